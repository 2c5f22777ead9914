"""Exponential-cost Fock-space evaluation oracle.

Elements act on a dense state vector over n qubits (2n Majorana strands)
through the Jordan-Wigner dictionary:

* strand 2q, 2q+1 form qubit q (qubit 0 is the most significant axis),
* g_{2q}   = Z_0 ... Z_{q-1} X_q,
* g_{2q+1} = i Z_0 ... Z_q X_q,
* a cap at an even position inserts a fresh qubit in |0> with weight 2^{1/4};
  at an odd position it splits qubit q via |b> -> 2^{-1/4} sum_p |p, p xor b>,
* cups are the daggers of caps,
* braids and scatterings act as a*1 + b*(i g_j g_{j+1}) with the weights from
  `scattering_weights`; the parity factor i g_{2q} g_{2q+1} is Z_q and
  i g_{2q+1} g_{2q+2} is X_q X_{q+1}.

Every normalization question elsewhere in the package is settled against
this oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import (
    BraidNeg,
    BraidPos,
    Cap,
    Cup,
    Dot,
    DotPair,
    MajoranaDiagram,
    Scattering,
    ScatteringStar,
    scattering_weights,
)
from .errors import NotClosed, OracleTooLarge

_QUARTER = 2.0 ** 0.25

DEFAULT_ORACLE_LIMIT = 20


@dataclass
class FockState:
    """Dense state over n_strands/2 qubits; amplitudes has length 2^(n_strands/2)."""

    n_strands: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = self.n_strands
        if n < 0 or n % 2:
            raise ValueError(f"n_strands must be even and non-negative, got {n}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** (n // 2),):
            raise ValueError(
                f"amplitude vector has length {self.amplitudes.shape}, expected {2 ** (n // 2)}"
            )

    @staticmethod
    def scalar(value: complex = 1.0) -> "FockState":
        return FockState(0, np.array([value], dtype=complex))

    def tensor(self) -> np.ndarray:
        n = self.n_strands // 2
        return self.amplitudes.reshape([2] * n) if n else self.amplitudes.reshape(())


def _zmul(t: np.ndarray, axis: int) -> np.ndarray:
    t = t.copy()
    sl = [slice(None)] * t.ndim
    sl[axis] = 1
    t[tuple(sl)] *= -1
    return t


def _xmul(t: np.ndarray, axis: int) -> np.ndarray:
    return np.take(t, [1, 0], axis=axis)


def apply_gamma(t: np.ndarray, j: int) -> np.ndarray:
    """Apply the Majorana operator of strand j to an n-qubit tensor."""
    q, odd = divmod(j, 2)
    u = _xmul(t, q)
    if odd:
        u = 1j * _zmul(u, q)
    for qp in range(q):
        u = _zmul(u, qp)
    return u


def _parity_factor(t: np.ndarray, j: int) -> np.ndarray:
    """Apply U = i g_j g_{j+1}: Z_q for even j, X_q X_{q+1} for odd."""
    q, odd = divmod(j, 2)
    if odd:
        return _xmul(_xmul(t, q), q + 1)
    return _zmul(t, q)


def _apply_cap(t: np.ndarray, j: int, n_after: int) -> np.ndarray:
    q, odd = divmod(j, 2)
    new = np.zeros([2] * n_after, dtype=complex)
    if not odd:
        sl = [slice(None)] * n_after
        sl[q] = 0
        new[tuple(sl)] = t
        return _QUARTER * new
    for b in (0, 1):
        sl_old = [slice(None)] * (n_after - 1)
        sl_old[q] = b
        tb = t[tuple(sl_old)]
        for p in (0, 1):
            sl = [slice(None)] * n_after
            sl[q] = p
            sl[q + 1] = p ^ b
            new[tuple(sl)] = tb
    return new / _QUARTER


def _apply_cup(t: np.ndarray, j: int, n_before: int) -> np.ndarray:
    q, odd = divmod(j, 2)
    if not odd:
        sl = [slice(None)] * n_before
        sl[q] = 0
        return _QUARTER * t[tuple(sl)]
    new = None
    for a in (0, 1):
        for b in (0, 1):
            sl = [slice(None)] * n_before
            sl[q], sl[q + 1] = a, b
            piece = t[tuple(sl)]
            target = a ^ b
            sl_new = [slice(None)] * (n_before - 1)
            sl_new[q] = target
            if new is None:
                new = np.zeros(piece.shape[:q] + (2,) + piece.shape[q:], dtype=complex)
            new[tuple(sl_new)] += piece
    return new / _QUARTER


def apply_element(state: FockState, el) -> FockState:
    """Apply one diagram element to a Fock state."""
    n = state.n_strands // 2
    t = state.tensor()
    if isinstance(el, Cap):
        return FockState(state.n_strands + 2, _apply_cap(t, el.j, n + 1).ravel())
    if isinstance(el, Cup):
        return FockState(state.n_strands - 2, _apply_cup(t, el.j, n).ravel())
    if isinstance(el, Dot):
        return FockState(state.n_strands, apply_gamma(t, el.j).ravel())
    if isinstance(el, DotPair):
        u = apply_gamma(apply_gamma(t, el.k), el.j)
        return FockState(state.n_strands, (1j * u).ravel())
    if isinstance(el, (BraidPos, BraidNeg, Scattering, ScatteringStar)):
        a, b = scattering_weights(el)
        u = a * t + b * _parity_factor(t, el.j)
        return FockState(state.n_strands, u.ravel())
    raise TypeError(f"unknown element {el!r}")


def global_parity(state: FockState) -> FockState:
    """Apply the global parity operator (dots on every strand, paired left to right)."""
    t = state.tensor()
    for q in range(state.n_strands // 2):
        t = _zmul(t, q)
    return FockState(state.n_strands, t.ravel())


def evaluate_closed_oracle(
    diag: MajoranaDiagram, limit: int = DEFAULT_ORACLE_LIMIT
) -> complex:
    """Evaluate a closed diagram by brute-force state propagation.

    Raises NotClosed for open diagrams and OracleTooLarge when any slice
    holds more than `limit` Majoranas.
    """
    if not diag.is_closed:
        raise NotClosed(f"diagram has widths {diag.width_in} -> {diag.width_out}")
    if diag.max_width() > limit:
        raise OracleTooLarge(f"max width {diag.max_width()} exceeds oracle limit {limit}")
    state = FockState.scalar(1.0)
    for el in diag.elements:
        state = apply_element(state, el)
    return complex(diag.amplitude) * complex(state.amplitudes[0])


def diagram_operator(diag: MajoranaDiagram, limit: int = DEFAULT_ORACLE_LIMIT) -> np.ndarray:
    """Dense matrix of an open diagram: shape (2^(w_out/2), 2^(w_in/2)).

    Columns are obtained by feeding computational basis states in at the top.
    """
    if diag.max_width() > limit:
        raise OracleTooLarge(f"max width {diag.max_width()} exceeds oracle limit {limit}")
    n_in = diag.width_in // 2
    n_out = diag.width_out // 2
    mat = np.zeros((2 ** n_out, 2 ** n_in), dtype=complex)
    for col in range(2 ** n_in):
        vec = np.zeros(2 ** n_in, dtype=complex)
        vec[col] = 1.0
        state = FockState(diag.width_in, vec)
        for el in diag.elements:
            state = apply_element(state, el)
        mat[:, col] = state.amplitudes
    return complex(diag.amplitude) * mat
