import math

import numpy as np
import pytest

from quon2d.classify import classify
from quon2d.diagram import ScatteringStar, VERTICAL
from quon2d.errors import NonPlanarInput, Singular, TooManySites
from quon2d.ising import (
    IsingLattice,
    build_ising_quon,
    kw_dual_angle,
    kw_dual_coupling,
    kw_rewrite_chain,
    kw_self_dual_point,
    partition_oracle,
    star_triangle_oracle,
    star_triangle_solve,
)
from quon2d.quon import evaluate_closed_quon


def test_partition_oracle_basics():
    single = IsingLattice(1, ())
    assert partition_oracle(single) == pytest.approx(2.0)
    edge = IsingLattice(2, ((0, 1, 1.0),))
    assert partition_oracle(edge) == pytest.approx(2 * math.e + 2 / math.e)
    with pytest.raises(TooManySites):
        partition_oracle(IsingLattice(25, ()))


def test_nonplanar_rejected():
    edges = [(a, b, 0.1) for a in range(5) for b in range(a + 1, 5)]
    with pytest.raises(NonPlanarInput):
        IsingLattice(5, tuple(edges))  # K5


@pytest.mark.parametrize("shape", [(1, 2), (2, 2), (3, 3)])
@pytest.mark.parametrize("coupling", [0.2, 0.4407, 1.0])
def test_square_lattice_partition(shape, coupling):
    lattice = IsingLattice.square(*shape, coupling)
    z = evaluate_closed_quon(build_ising_quon(lattice)).real
    want = partition_oracle(lattice)
    assert abs(z - want) / want <= 1e-8


def test_single_edge_closed_form():
    lattice = IsingLattice(2, ((0, 1, 1.0),))
    z = evaluate_closed_quon(build_ising_quon(lattice)).real
    assert z == pytest.approx(2 * math.e + 2 / math.e)


def test_zero_coupling_counts_spins():
    lattice = IsingLattice.square(2, 2, 1e-14)
    z = evaluate_closed_quon(build_ising_quon(lattice)).real
    assert z == pytest.approx(2 ** 4)


def test_generic_planar_graphs():
    triangle = IsingLattice(3, ((0, 1, 0.3), (1, 2, 0.3), (0, 2, 0.3)))
    z = evaluate_closed_quon(build_ising_quon(triangle)).real
    assert z == pytest.approx(partition_oracle(triangle), rel=1e-10)
    pentagon = IsingLattice(
        5,
        ((0, 1, 0.25), (1, 2, 0.4), (2, 3, 0.3), (3, 4, 0.2), (0, 4, 0.35),
         (1, 3, 0.15)),
    )
    z = evaluate_closed_quon(build_ising_quon(pentagon)).real
    assert z == pytest.approx(partition_oracle(pentagon), rel=1e-10)


def test_per_edge_overrides():
    lattice = IsingLattice.square(2, 2, 0.3, overrides={(0, 1): 0.7})
    z = evaluate_closed_quon(build_ising_quon(lattice)).real
    assert z == pytest.approx(partition_oracle(lattice), rel=1e-10)


def test_ising_diagram_is_matchgate_form():
    lattice = IsingLattice.square(2, 2, 0.4)
    report = classify(build_ising_quon(lattice))
    assert report.matchgate_form
    assert not report.clifford_form  # real scattering-star angles are generic


def test_kw_chain_per_step_preservation():
    lattice = IsingLattice.square(3, 3, 0.4)
    steps, dual = kw_rewrite_chain(lattice)
    values = [evaluate_closed_quon(s) for s in steps]
    for a, b in zip(values, values[1:]):
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))
    assert dual.shape == (2, 2)
    assert dual.edges[0][2] == pytest.approx(kw_dual_coupling(0.4))


def test_kw_chain_final_angles_are_dual():
    coupling = 0.4
    steps, _ = kw_rewrite_chain(IsingLattice.square(3, 3, coupling))
    final = steps[-1]
    stars = [el for el in final.core.elements if isinstance(el, ScatteringStar)]
    assert stars and all(el.orientation != VERTICAL for el in stars)
    dual_angle = -2 * kw_dual_coupling(coupling)
    for el in stars:
        assert complex(el.phi).real == pytest.approx(dual_angle, abs=1e-9)
        assert abs(complex(el.phi).imag) <= 1e-9


def test_kw_dual_fixed_point():
    kc = kw_self_dual_point()
    assert kc == pytest.approx(0.5 * math.log(1 + math.sqrt(2)))
    assert kw_dual_coupling(kc) == pytest.approx(kc, abs=1e-9)
    # the loop-angle duality map has the same fixed point
    assert kw_dual_angle(-2 * kc) == pytest.approx(-2 * kc, abs=1e-9)


def test_kw_monotone_limit():
    ks = [0.5, 1.0, 2.0, 4.0]
    duals = [kw_dual_coupling(k) for k in ks]
    assert all(a > b for a, b in zip(duals, duals[1:]))
    assert duals[-1] < 1e-3


# -- star-triangle ------------------------------------------------------------


def test_star_triangle_solves_random(rng):
    worst = 0.0
    for _ in range(30):
        u = tuple(rng.uniform(0.05, 0.95, 3))
        sol = star_triangle_solve(*u)
        worst = max(worst, sol.residual(u))
    assert worst <= 1e-9


def test_star_triangle_symmetric():
    sol = star_triangle_solve(0.31, 0.31, 0.31)
    assert sol.v1 == pytest.approx(sol.v2, abs=1e-9)
    assert sol.v2 == pytest.approx(sol.v3, abs=1e-9)


def test_star_triangle_parity():
    star = star_triangle_oracle((0.3, 0.5, 0.7), "star")
    tri = star_triangle_oracle((0.2, 0.4, 0.6), "triangle")
    for x in range(2):
        for y in range(2):
            for z in range(2):
                if (x + y + z) % 2:
                    assert star[x, y, z] == 0
                    assert tri[x, y, z] == 0


def test_star_triangle_zero_couplings():
    star = star_triangle_oracle((0.0, 0.0, 0.0), "star")
    p3 = np.zeros((2, 2, 2))
    for i in range(8):
        x, y, z = i >> 2 & 1, i >> 1 & 1, i & 1
        p3[x, y, z] = 1.0 if (x + y + z) % 2 == 0 else 0.0
    assert np.allclose(star, p3)


def test_star_triangle_singular_detected():
    # u = (1, 1, -1) collapses the star tensor entirely: no solution exists
    with pytest.raises(Singular):
        star_triangle_solve(1.0, 1.0, -1.0)


def test_kw_chain_small_lattice_trivial():
    steps, dual = kw_rewrite_chain(IsingLattice.square(2, 2, 0.4))
    values = [evaluate_closed_quon(s) for s in steps]
    for a, b in zip(values, values[1:]):
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))
