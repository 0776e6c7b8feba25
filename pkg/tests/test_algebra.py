import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labyrinth.algebra import (
    AlgebraError,
    ExactMatrix,
    NotInSpan,
    RingSpec,
    arrow_sum,
    block_injection,
    block_retraction,
    column_space,
    complement_retraction,
    coords_in_span,
    direct_sum,
    injection,
    inverse,
    kernel_basis,
    kronecker,
    left_inverse,
    rank,
    rref,
    transport_sigma,
)

from conftest import F2, F3, Z4


def brute_product(a, b, m, cols):
    rows, inner = len(a), len(b)
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            s = 0
            for k in range(inner):
                s += a[i][k] * b[k][j]
            out[i][j] = s % m
    return out


def det_mod(M, p):
    """Leibniz expansion; only for tiny matrices."""
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total % p


def minor_rank(M, p):
    rows, cols = len(M), len(M[0]) if M else 0
    for k in range(min(rows, cols), 0, -1):
        for R in itertools.combinations(range(rows), k):
            for C in itertools.combinations(range(cols), k):
                if det_mod([[M[r][c] for c in C] for r in R], p):
                    return k
    return 0


def matrices(p, max_rows=4, max_cols=4):
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c),
                               min_size=r, max_size=r).map(lambda rows: (rows, r, c))
        )
    )


def test_ring_parse_and_equality():
    assert RingSpec.parse("zmod:4").modulus == 4
    assert RingSpec.parse("fp:3").is_field
    assert not RingSpec.parse("zmod:4").is_field
    assert RingSpec.parse("zmod:2") == RingSpec.parse("fp:2")
    with pytest.raises(AlgebraError):
        RingSpec.parse("fp:4")
    with pytest.raises(AlgebraError):
        RingSpec.parse("gf:2")


def test_inverse_of_units_and_nonunits():
    assert Z4.inverse(3) == 3
    with pytest.raises(AlgebraError):
        Z4.inverse(2)


def test_entries_are_reduced_and_immutable():
    M = ExactMatrix(Z4, [[5, -1], [8, 2]])
    assert M.entries() == [1, 3, 0, 2]
    with pytest.raises(ValueError):
        M.data[0, 0] = 2


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_product_matches_triple_loop(data):
    m = data.draw(st.sampled_from([2, 3, 4, 6]))
    r, k, c = (data.draw(st.integers(0, 4)) for _ in range(3))
    a = data.draw(st.lists(st.lists(st.integers(0, m - 1), min_size=k, max_size=k), min_size=r, max_size=r))
    b = data.draw(st.lists(st.lists(st.integers(0, m - 1), min_size=c, max_size=c), min_size=k, max_size=k))
    ring = RingSpec.zmod(m)
    A = ExactMatrix(ring, a, shape=(r, k))
    B = ExactMatrix(ring, b, shape=(k, c))
    product = A @ B
    assert product.shape == (r, c)
    if r and c:
        assert product.data.tolist() == brute_product(a, b, m, c)


def test_product_rejects_mismatch():
    with pytest.raises(AlgebraError):
        ExactMatrix.zeros(F3, 2, 3) @ ExactMatrix.zeros(F3, 2, 3)
    with pytest.raises(AlgebraError):
        ExactMatrix.zeros(F3, 2, 2) @ ExactMatrix.zeros(Z4, 2, 2)


@settings(max_examples=80, deadline=None)
@given(matrices(3))
def test_rank_matches_minor_expansion(case):
    rows, r, c = case
    M = ExactMatrix(F3, rows, shape=(r, c))
    assert rank(M) == (minor_rank(rows, 3) if r and c else 0)


@settings(max_examples=60, deadline=None)
@given(matrices(2, 5, 5))
def test_rref_kernel_and_column_space(case):
    rows, r, c = case
    M = ExactMatrix(F2, rows, shape=(r, c))
    R, pivots, rk = rref(M)
    assert rk == len(pivots)
    for v in kernel_basis(M):
        assert not (M.data @ v % 2).any()
    assert len(kernel_basis(M)) == c - rk
    B = column_space(M)
    assert B.cols == rk
    for j in range(c):
        coords_in_span(B, M.data[:, j])


def test_rref_requires_field():
    with pytest.raises(AlgebraError):
        rref(ExactMatrix.identity(Z4, 2))


def test_inverse_and_left_inverse():
    M = ExactMatrix(F3, [[1, 2], [0, 1]])
    assert M @ inverse(M) == ExactMatrix.identity(F3, 2)
    B = ExactMatrix(F3, [[1, 0], [2, 1], [1, 1]])
    assert left_inverse(B) @ B == ExactMatrix.identity(F3, 2)
    with pytest.raises(AlgebraError):
        inverse(ExactMatrix(F3, [[1, 2], [2, 1]]))


def test_coords_outside_span():
    B = ExactMatrix(F3, [[1], [0]])
    assert list(coords_in_span(B, [2, 0])) == [2]
    with pytest.raises(NotInSpan):
        coords_in_span(B, [0, 1])


def test_canonical_arrows():
    X, Y = ("1", "2", "3"), ("a", "b")
    s = transport_sigma(F3, X, Y, "2", "b")
    assert s.data.tolist() == [[0, 0], [0, 1], [0, 0]]
    assert injection(F3, X, "3").data.T.tolist() == [[0, 0, 1]]
    assert block_injection(F3, [1, 2], 1).data.tolist() == [[0, 0], [1, 0], [0, 1]]
    assert complement_retraction(F3, [1, 2], 0).data.tolist() == [[0, 1, 0], [0, 0, 1]]


def test_retractions_against_injections():
    parts = [1, 2, 2]
    for i, j in itertools.product(range(3), repeat=2):
        got = block_retraction(Z4, parts, i) @ block_injection(Z4, parts, j)
        if i == j:
            assert got == ExactMatrix.identity(Z4, parts[i])
        else:
            assert got.is_zero()


def test_direct_sum_is_a_sum_of_injected_arrows():
    a = ExactMatrix(Z4, [[1, 3]])
    b = ExactMatrix(Z4, [[2], [1]])
    ds = direct_sum([a, b])
    out_parts = [a.rows, b.rows]
    pieces = [block_injection(Z4, out_parts, 0) @ a, block_injection(Z4, out_parts, 1) @ b]
    assert ds == arrow_sum(pieces)


def test_sums_and_kronecker():
    a = ExactMatrix(F3, [[1], [2]])
    b = ExactMatrix(F3, [[0, 1], [1, 1]])
    assert arrow_sum([a, b]).data.tolist() == [[1, 0, 1], [2, 1, 1]]
    assert direct_sum([a, b]).shape == (4, 3)
    k = kronecker(b, b)
    assert k.shape == (4, 4)
    # mixed-product property
    c = ExactMatrix(F3, [[2, 1], [0, 1]])
    assert kronecker(b, b) @ kronecker(c, c) == kronecker(b @ c, b @ c)


def test_json_round_trip():
    M = ExactMatrix(Z4, [[1, 2, 3], [0, 1, 2]])
    assert ExactMatrix.from_json(M.to_json()) == M
    assert ExactMatrix.from_json(ExactMatrix.zeros(F2, 0, 3).to_json()).shape == (0, 3)
