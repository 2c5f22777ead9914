"""Dev fuzz: fast evaluator vs Fock oracle on random closed diagrams."""
import numpy as np

from quon2d.diagram import (
    BraidNeg, BraidPos, Cap, Cup, Dot, DotPair, MajoranaDiagram, Scattering,
    ScatteringStar, HORIZONTAL, VERTICAL,
)
from quon2d.fock import evaluate_closed_oracle
from quon2d.gaussian import evaluate_closed_fast


def random_closed_diagram(rng, max_width=16, max_elems=50, allow_dots=True,
                          allow_horizontal=True, allow_star=True):
    elems = []
    w = 0
    n = rng.integers(5, max_elems)
    for _ in range(n):
        choices = ["cap"]
        if w >= 2:
            choices += ["cup", "braid", "scat", "pair"]
            if allow_dots:
                choices += ["dot", "dotpair"]
        kind = rng.choice(choices)
        if kind == "cap" and w + 2 <= max_width:
            elems.append(Cap(int(rng.integers(0, w + 1))))
            w += 2
        elif kind == "cup" and w >= 2:
            elems.append(Cup(int(rng.integers(0, w - 1))))
            w -= 2
        elif kind == "braid" and w >= 2:
            j = int(rng.integers(0, w - 1))
            elems.append(BraidPos(j) if rng.random() < 0.5 else BraidNeg(j))
        elif kind == "scat" and w >= 2:
            j = int(rng.integers(0, w - 1))
            theta = complex(rng.normal() * 2, rng.normal() * 0.5)
            orient = HORIZONTAL if (allow_horizontal and rng.random() < 0.3) else VERTICAL
            if allow_star and rng.random() < 0.3:
                elems.append(ScatteringStar(j, 1j * theta if rng.random() < 0.5 else complex(rng.normal(), rng.normal()*0.3), orient))
            else:
                elems.append(Scattering(j, theta, orient))
        elif kind == "dot" and w >= 1:
            elems.append(Dot(int(rng.integers(0, w))))
        elif kind == "dotpair" and w >= 2:
            j = int(rng.integers(0, w - 1))
            k = int(rng.integers(j + 1, w))
            elems.append(DotPair(j, k))
    while w > 0:
        elems.append(Cup(int(rng.integers(0, w - 1))))
        w -= 2
    amp = complex(rng.normal(), rng.normal())
    return MajoranaDiagram(0, 0, tuple(elems), amp)


def main():
    rng = np.random.default_rng(7)
    bad = 0
    for trial in range(400):
        d = random_closed_diagram(rng)
        ref = evaluate_closed_oracle(d)
        got = evaluate_closed_fast(d)
        tol = 1e-9 * max(1.0, abs(ref))
        if abs(ref - got) > tol:
            bad += 1
            if bad <= 5:
                print(f"MISMATCH trial {trial}: ref={ref:.12g} got={got:.12g}")
                print("  elements:", d.elements)
    print(f"{400 - bad}/400 matched")


if __name__ == "__main__":
    main()
