"""The nine acceptance criteria, each under its wall-clock limit.

Every criterion prints one ``PASS``/``FAIL`` line (also collected into the
terminal summary).  Functors are built fresh here rather than taken from
the shared test cache.
"""

import itertools
import time
from contextlib import contextmanager

import numpy as np

from labyrinth.algebra import ExactMatrix, RingSpec
from labyrinth.axioms import AXIOMS
from labyrinth.crosseffects import (
    ce_dim,
    covering_subsets,
    degree,
    deviation_formula_check,
    idempotent_relations,
    kernel_equals_image,
)
from labyrinth.functors import build, nat_transform, random_arrow
from labyrinth.laby import PassageGuardError, compose, identity, named_set, normalize, random_mazesum
from labyrinth.phi import (
    annihilation_profile,
    degree_coherent,
    functoriality_check,
    naturality_check,
    roundtrip_check,
)
from labyrinth.quadratic import extract, law_table_check

from conftest import ACCEPTANCE, BUILTINS

DEFAULT_MAX_PASSAGES = 8  # the command-line default for --max-passages

Z2, Z4 = RingSpec.zmod(2), RingSpec.zmod(4)
F2, F3 = RingSpec.fp(2), RingSpec.fp(3)


def pcg(seed):
    return np.random.Generator(np.random.PCG64(seed))


@contextmanager
def criterion(number, title, limit):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        passed = ok and elapsed < limit
        line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title} ({elapsed:.2f}s, limit {limit}s)"
        ACCEPTANCE.append(line)
        print(line)
    assert elapsed < limit, f"criterion {number} took {elapsed:.2f}s, limit {limit}s"


def failures(rows):
    return [r for r in rows if r["status"] != "pass"]


def test_1_deviation_formula():
    with criterion(1, "deviation formula", 60):
        rng = pcg(1)
        rows = []
        for spec, ring, field in [("U", Z2, F2), ("T2", F2, F2), ("S2", F3, F3)]:
            F = build(spec, ring, field)
            for m, n in [(1, 1), (1, 2), (2, 1), (2, 2)]:
                for _ in range(200):
                    M = int(rng.integers(1, 3))
                    widths = [int(w) for w in rng.integers(1, 3, size=m)]
                    alphas = [random_arrow(ring, M, w, rng) for w in widths]
                    betas = [random_arrow(ring, sum(widths), int(rng.integers(1, 3)), rng)
                             for _ in range(n)]
                    rows.append(deviation_formula_check(F, alphas, betas))
        assert len(rows) == 3 * 4 * 200
        assert not failures(rows), failures(rows)[0]


def test_2_kernel_equals_image():
    with criterion(2, "cross-effect kernel = image", 10):
        for spec, ring, field in BUILTINS:
            F = build(spec, ring, field)
            for k in range(4):
                assert kernel_equals_image(F, (1,) * k), (spec, k)


def test_3_decomposition_tables():
    with criterion(3, "decomposition dimension tables", 10):
        table = {
            ("U", Z2, F2): [1, 1, 1, 1],
            ("T2", F2, F2): [0, 1, 2, 0],
            ("S2", F3, F3): [0, 1, 1, 0],
            ("L2", F3, F3): [0, 0, 1, 0],
        }
        for (spec, ring, field), dims in table.items():
            F = build(spec, ring, field)
            assert [ce_dim(F, k) for k in range(4)] == dims, spec
            for k in range(4):
                assert idempotent_relations(F, k) == {"orthogonal": True, "complete": True}


def test_4_degree_detection():
    with criterion(4, "degree detection", 30):
        for spec, ring, field in [("T2", F3, F3), ("S2", F3, F3), ("L2", F3, F3)]:
            F = build(spec, ring, field)
            assert degree(F, 4) == 2, spec
            assert degree_coherent(F, 4)
        R = build("RedU", Z2, F2)
        assert degree(R, 4) == "exceeds 4"
        assert annihilation_profile(R, 4) == [ce_dim(R, k) for k in range(5)]
        assert degree_coherent(R, 4)


def test_5_labyrinth_composition():
    with criterion(5, "labyrinth composition", 30):
        rng = pcg(5)
        redrawn = {}
        for ring in (Z2, Z4):
            accepted = redrawn[str(ring)] = 0
            while accepted < 100:
                W, X, Y, Z = (named_set(int(rng.integers(1, 4)), pre) for pre in "wxyz")
                P = random_mazesum(ring, W, X, rng, terms=1)
                Q = random_mazesum(ring, X, Y, rng, terms=1)
                R = random_mazesum(ring, Y, Z, rng, terms=1)
                # triples whose intermediate composites exceed the default
                # passage guard are outside the configured scope; redraw them
                try:
                    left = compose(compose(P, Q), R, DEFAULT_MAX_PASSAGES)
                    right = compose(P, compose(Q, R), DEFAULT_MAX_PASSAGES)
                except PassageGuardError:
                    redrawn[str(ring)] += 1
                    continue
                assert left == right
                assert compose(identity(ring, W), P) == P == compose(P, identity(ring, X))
                accepted += 1
        print(f"associativity: 100 triples per ring, guarded redraws {redrawn}")
        two = named_set(2)
        T = normalize(Z4, two, two, [("2", "1", 1), ("1", "2", 1)])
        assert compose(T, T) == identity(Z4, two)
        grid = [(i, j) for i in range(2) for j in range(2)]
        oracle = [K for r in range(5) for K in itertools.combinations(grid, r)
                  if {i for i, _ in K} == {0, 1} and {j for _, j in K} == {0, 1}]
        covers = covering_subsets(range(2), range(2), grid)
        assert len(covers) == len(oracle) == 7
        assert {frozenset(K) for K in covers} == {frozenset(K) for K in oracle}


def test_6_functoriality_and_axioms():
    with criterion(6, "functoriality of evaluation and axiom instances", 120):
        rng = pcg(6)
        rows = []
        for spec, ring, field in [("U", Z2, F2), ("U", Z4, F2), ("S2", F3, F3), ("T2", F2, F2)]:
            F = build(spec, ring, field)
            for _ in range(100):
                X, Y, Z = (named_set(int(rng.integers(1, 4)), pre) for pre in "xyz")
                P = random_mazesum(ring, X, Y, rng)
                Q = random_mazesum(ring, Y, Z, rng)
                rows.append(functoriality_check(F, P, Q))
            for name in AXIOMS:
                rows.extend(AXIOMS[name](F, rng, 3) for _ in range(10))
        assert len(rows) == 4 * (100 + 10 * len(AXIOMS))
        assert not failures(rows), failures(rows)[0]


def test_7_roundtrip():
    with criterion(7, "round trip through the inverse construction", 120):
        rng = pcg(7)
        rows = []
        for spec, ring, field in [("U", Z2, F2), ("S2", F3, F3)]:
            F = build(spec, ring, field)
            for shape in [(1, 1), (2, 2), (3, 2)]:
                rows.extend(roundtrip_check(F, random_arrow(ring, *shape, rng)) for _ in range(20))
        assert len(rows) == 2 * 3 * 20
        assert not failures(rows), failures(rows)[0]


def test_8_quadratic_suite():
    with criterion(8, "quadratic laws, axioms and derived identities", 60):
        verdicts = {}
        for spec in ("T2", "S2"):
            F = build(spec, F3, F3)
            report = law_table_check(F, pcg(8))
            assert report["status"] == "pass", failures(report["laws"])
            data = extract(F)
            inv = data.invariants()
            assert all(inv.values()), inv
            assert data.H[(1, 1)] @ data.P == ExactMatrix.identity(F3, data.M_ee.dim) + data.T
            assert data.P @ data.H[(1, 1)] @ data.P == 2 * data.P
            qm2 = next(v for v in report["variants"] if v["law"].startswith("QM2"))
            verdicts[spec] = qm2["holds_under_evaluation"]
        # the I + I form fails on the tensor square, where T is not the identity
        assert verdicts == {"T2": False, "S2": True}
        print(f"QM2 in the I + I form holds under evaluation: {verdicts}")


def test_9_naturality():
    with criterion(9, "naturality of sym: T2 -> S2", 30):
        rng = pcg(9)
        eta = nat_transform("sym", build("T2", F3, F3), build("S2", F3, F3))
        rows = []
        for _ in range(50):
            X, Z = named_set(int(rng.integers(1, 4))), named_set(int(rng.integers(1, 4)), "z")
            rows.append(naturality_check(eta, random_mazesum(F3, X, Z, rng)))
        assert not failures(rows), failures(rows)[0]
