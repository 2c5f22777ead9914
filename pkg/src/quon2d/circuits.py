"""Nearest-neighbor qubit circuits and the dense matrix oracle."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonAdjacentTwoQubitGate, TooLarge

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

ONE_QUBIT_GATES = ("X", "Y", "Z", "S", "SINV", "H", "RXQ+", "RXQ-", "RZ")
TWO_QUBIT_GATES = ("XX", "CNOT", "CZ", "SWAP")


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        name = self.name.upper()
        object.__setattr__(self, "name", name)
        if name in ONE_QUBIT_GATES:
            if len(self.qubits) != 1:
                raise ValueError(f"{name} takes one qubit")
        elif name in TWO_QUBIT_GATES:
            if len(self.qubits) != 2:
                raise ValueError(f"{name} takes two qubits")
        else:
            raise ValueError(f"unknown gate {name}")
        if name in ("RZ", "XX"):
            if self.angle is None:
                raise ValueError(f"{name} needs an angle")
            object.__setattr__(self, "angle", float(self.angle) % (2 * math.pi))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise ValueError(f"{g} addresses qubits outside 0..{self.n_qubits - 1}")
            if len(g.qubits) == 2 and abs(g.qubits[0] - g.qubits[1]) != 1:
                raise NonAdjacentTwoQubitGate(
                    f"{g} is not nearest-neighbor; insert explicit SWAP chains"
                )


def gate_matrix(g: Gate) -> np.ndarray:
    """The gate's unitary on its own qubits (two-qubit gates: qubit order =
    (min, max) of the addressed pair)."""
    n = g.name
    if n == "X":
        return X
    if n == "Y":
        return Y
    if n == "Z":
        return Z
    if n == "S":
        return np.diag([1, 1j]).astype(complex)
    if n == "SINV":
        return np.diag([1, -1j]).astype(complex)
    if n == "H":
        return H
    if n == "RXQ+":
        # e^{i pi/4} e^{-i pi/4 X}
        return cmath.exp(1j * math.pi / 4) * (
            math.cos(math.pi / 4) * I2 - 1j * math.sin(math.pi / 4) * X
        )
    if n == "RXQ-":
        return cmath.exp(-1j * math.pi / 4) * (
            math.cos(math.pi / 4) * I2 + 1j * math.sin(math.pi / 4) * X
        )
    if n == "RZ":
        return np.diag([1, cmath.exp(1j * g.angle)]).astype(complex)
    if n == "XX":
        th = g.angle
        xx = np.kron(X, X)
        return cmath.exp(1j * th / 2) * (
            math.cos(th / 2) * np.eye(4) - 1j * math.sin(th / 2) * xx
        )
    if n == "CNOT":
        control_first = g.qubits[0] < g.qubits[1]
        if control_first:
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        return np.array(
            [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
        )
    if n == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if n == "SWAP":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    raise ValueError(n)


def circuit_oracle_unitary(c: Circuit) -> np.ndarray:
    """Ordered matrix product of the standard gate matrices; qubit 0 is the
    most significant index.  Limited to 12 qubits."""
    if c.n_qubits > 12:
        raise TooLarge(f"{c.n_qubits} qubits exceeds the 12-qubit oracle limit")
    dim = 2 ** c.n_qubits
    u = np.eye(dim, dtype=complex)
    for g in c.gates:
        u = _embedded(g, c.n_qubits) @ u
    return u


def _embedded(g: Gate, n: int) -> np.ndarray:
    lo = min(g.qubits)
    m = gate_matrix(g)
    left = np.eye(2 ** lo, dtype=complex)
    right = np.eye(2 ** (n - lo - len(g.qubits)), dtype=complex)
    return np.kron(np.kron(left, m), right)
