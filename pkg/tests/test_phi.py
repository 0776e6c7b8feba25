import itertools

import numpy as np
import pytest

from labyrinth.algebra import ExactMatrix, transport_sigma
from labyrinth.crosseffects import ce_dim, decomposition
from labyrinth.functors import build, nat_transform, random_arrow
from labyrinth.laby import (
    MazeSum,
    compose,
    identity,
    named_set,
    normalize,
    random_maze,
    random_mazesum,
    to_structured,
)
from labyrinth.phi import (
    InvariantViolation,
    Phi,
    ambient,
    ambient_literal,
    annihilation_profile,
    degree_coherent,
    functoriality_check,
    naturality_check,
    phi_on_nat,
    reconstruct,
    roundtrip_check,
    roundtrip_sides,
)

from conftest import BUILTINS, F2, F3, Z2, Z4, builtin_id, functor

TWO = named_set(2)


def intro_maze(ring, a, b, c):
    return normalize(ring, TWO, TWO, [("1", "1", a), ("2", "1", b), ("2", "2", c)])


def expand_by_hand(F, ring, a, b, c):
    """F(a sigma_11 | b sigma_21 | c sigma_22) as eight signed values of F."""
    s11 = transport_sigma(ring, TWO, TWO, "1", "1")
    s21 = transport_sigma(ring, TWO, TWO, "2", "1")
    s22 = transport_sigma(ring, TWO, TWO, "2", "2")
    pieces = [a * s11, b * s21, c * s22]
    total = ExactMatrix.zeros(F.target_field, F.obj(2), F.obj(2))
    for r in range(4):
        for S in itertools.combinations(range(3), r):
            arg = ExactMatrix.zeros(ring, 2, 2)
            for i in S:
                arg = arg + pieces[i]
            term = F.apply(arg)
            total = total + term if (3 - r) % 2 == 0 else total - term
    return total


@pytest.mark.parametrize("entry", [("U", Z4, F2), ("U", Z2, F2), ("S2", F3, F3), ("T2", F3, F3)],
                         ids=builtin_id)
def test_intro_maze_matches_hand_expansion(entry):
    F = functor(*entry)
    ring = F.source_ring
    for a, b, c in [(1, 1, 1), (1, ring.modulus - 1, 1), (ring.modulus - 1, 1, ring.modulus - 1)]:
        s = intro_maze(ring, a, b, c)
        assert ambient(F, s) == expand_by_hand(F, ring, a, b, c)


@pytest.mark.parametrize("entry", [("U", Z4, F2), ("S2", F3, F3), ("T2", F2, F2), ("RedU", Z2, F2)],
                         ids=builtin_id)
def test_folded_evaluation_matches_literal(entry, rng):
    F = functor(*entry)
    ring = F.source_ring
    for _ in range(40):
        X, Z = named_set(int(rng.integers(1, 3))), named_set(int(rng.integers(1, 3)), "z")
        m = random_maze(ring, X, Z, rng)
        assert ambient(F, m) == ambient_literal(F, to_structured(m))


def test_sum_evaluation_is_linear(rng):
    F = functor("U", Z4, F2)
    phi = Phi(F)
    for _ in range(20):
        s = random_mazesum(Z4, TWO, named_set(2, "z"), rng, terms=3)
        parts = [c * phi(MazeSum.single(m)) for m, c in s.items()]
        assert phi(s) == sum(parts[1:], parts[0]) if parts else phi(s).is_zero()


@pytest.mark.parametrize("entry", BUILTINS, ids=builtin_id)
def test_identity_and_zero(entry):
    F = functor(*entry)
    phi = Phi(F)
    for n in range(1, 4):
        X = named_set(n)
        assert phi(identity(F.source_ring, X)) == ExactMatrix.identity(F.target_field, phi.dim(n))
        zero = MazeSum.zero(F.source_ring, X, X)
        assert phi(zero) == ExactMatrix.zeros(F.target_field, phi.dim(n), phi.dim(n))


@pytest.mark.parametrize("entry", [("U", Z2, F2), ("U", Z4, F2), ("S2", F3, F3), ("T2", F2, F2),
                                   ("L2", F3, F3), ("RedU", Z2, F2)], ids=builtin_id)
def test_functoriality(entry, rng):
    F = functor(*entry)
    for _ in range(25):
        X, Y, Z = (named_set(int(rng.integers(1, 4)), pre) for pre in "xyz")
        P = random_mazesum(F.source_ring, X, Y, rng)
        Q = random_mazesum(F.source_ring, Y, Z, rng)
        report = functoriality_check(F, P, Q)
        assert report["status"] == "pass", report


def test_transposition_swaps_the_tensor_cross_effect():
    F = functor("T2", F3, F3)
    phi = Phi(F)
    T = normalize(F3, TWO, TWO, [("1", "2", 1), ("2", "1", 1)])
    M = phi(T)
    assert M != ExactMatrix.identity(F3, 2)
    assert M @ M == ExactMatrix.identity(F3, 2)
    assert phi(compose(T, T)) == M @ M


def test_cross_effect_of_t2_vanishes_at_three():
    F = functor("T2", F3, F3)
    X = named_set(3)
    s = normalize(F3, X, X, [(x, x, 1) for x in X] + [("1", "2", 2)])
    assert Phi(F).dim(X) == 0
    assert Phi(F)(s).shape == (0, 0)


def test_containment_is_asserted_not_projected():
    F = functor("U", Z2, F2)
    phi = Phi(F)
    # every basis vector of ce_X is hit inside ce_X; no projection happens
    m = random_maze(Z2, TWO, TWO, np.random.default_rng(0))
    M = phi.eval_maze(m, check_well_defined=True).matrix
    assert M.shape == (phi.dim(2), phi.dim(2))
    assert issubclass(InvariantViolation, AssertionError)


def test_well_defined_on_samples(rng):
    for entry in [("U", Z4, F2), ("S2", F3, F3)]:
        phi = Phi(functor(*entry))
        for _ in range(20):
            m = random_maze(phi.F.source_ring, TWO, named_set(2, "z"), rng)
            assert phi.well_defined(m)


def test_sym_from_t2_to_s2():
    T2, S2 = functor("T2", F3, F3), functor("S2", F3, F3)
    eta = nat_transform("sym", T2, S2)
    M = phi_on_nat(eta, 2)
    assert M.shape == (1, 2)
    assert not M.is_zero()


@pytest.mark.parametrize("kind, target", [("sym", "S2"), ("alt", "L2")])
def test_naturality(kind, target, rng):
    T2, G = functor("T2", F3, F3), functor(target, F3, F3)
    eta = nat_transform(kind, T2, G)
    for _ in range(50):
        X, Z = named_set(int(rng.integers(1, 3))), named_set(int(rng.integers(1, 3)), "z")
        report = naturality_check(eta, random_mazesum(F3, X, Z, rng))
        assert report["status"] == "pass", report


@pytest.mark.parametrize("entry", [("U", Z2, F2), ("U", Z4, F2), ("S2", F3, F3), ("T2", F2, F2),
                                   ("L2", F3, F3), ("Sum(T2,T1)", F3, F3)], ids=builtin_id)
def test_reconstruction_of_units(entry):
    F = functor(*entry)
    ring, field = F.source_ring, F.target_field
    phi = Phi(F)
    one = ExactMatrix.identity(ring, 1)
    assert reconstruct(phi, one) == ExactMatrix.identity(field, F.obj(1))
    zero = ExactMatrix.zeros(ring, 1, 1)
    dec = decomposition(F, 1)
    assert reconstruct(phi, zero) == dec.J @ F.apply(zero) @ dec.J_inv


@pytest.mark.parametrize("entry", [("U", Z2, F2), ("U", Z4, F2), ("S2", F3, F3), ("T2", F2, F2),
                                   ("RedU", Z2, F2), ("T3", F3, F3)], ids=builtin_id)
def test_roundtrip(entry, rng):
    F = functor(*entry)
    for shape in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)]:
        for _ in range(4):
            report = roundtrip_check(F, random_arrow(F.source_ring, *shape, rng))
            assert report["status"] == "pass", report


def test_roundtrip_on_all_arrows_of_size_two():
    F = functor("U", Z2, F2)
    for entries in itertools.product(range(2), repeat=4):
        alpha = ExactMatrix(Z2, np.array(entries).reshape(2, 2))
        direct, rebuilt = roundtrip_sides(F, alpha)
        assert direct == rebuilt


def test_reconstruction_is_multiplicative(rng):
    F = functor("S2", F3, F3)
    phi = Phi(F)
    for _ in range(15):
        a, b, c = (int(v) for v in rng.integers(1, 3, size=3))
        alpha, beta = random_arrow(F3, a, b, rng), random_arrow(F3, b, c, rng)
        assert reconstruct(phi, alpha) @ reconstruct(phi, beta) == reconstruct(phi, alpha @ beta)


@pytest.mark.parametrize(
    "spec, ring, field, profile",
    [
        ("T2", F3, F3, [0, 1, 2, 0]),
        ("L2", F3, F3, [0, 0, 1, 0]),
        ("RedU", Z2, F2, [0, 1, 1, 1, 1]),
        ("T1", F3, F3, [0, 1, 0, 0]),
    ],
)
def test_annihilation_profile(spec, ring, field, profile):
    F = functor(spec, ring, field)
    nmax = len(profile) - 1
    assert annihilation_profile(F, nmax) == profile
    assert degree_coherent(F, nmax)


def test_ring_mismatch_is_rejected():
    F = functor("U", Z2, F2)
    with pytest.raises(Exception):
        Phi(F)(identity(Z4, TWO))
