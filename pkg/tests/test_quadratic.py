import pytest

from labyrinth.algebra import ExactMatrix
from labyrinth.laby import from_structured
from labyrinth.quadratic import (
    AXIOM_LAWS,
    GENERATORS,
    TABLE_LAWS,
    QuadraticError,
    check_law,
    extract,
    generator,
    laby2_hom_basis,
    law_table_check,
    structured_generator,
)

from conftest import F2, F3, Z2, Z4, functor


@pytest.mark.parametrize("tag", sorted(GENERATORS))
def test_structured_display_matches_generator(tag):
    ring = Z4
    arity = GENERATORS[tag][2]
    for params in [(1,) * arity, (3, 2)[:arity], (2,) * arity, (0,) + (1,) * (arity - 1)]:
        assert from_structured(structured_generator(tag, params, ring)) == generator(tag, params, ring)


def test_generator_arity_and_tag_errors():
    with pytest.raises(QuadraticError):
        generator("T", (1,), F3)
    with pytest.raises(QuadraticError):
        generator("X", (1,), F3)


def test_zero_parameter_gives_zero():
    assert generator("H", (0, 1), F3).is_zero()
    assert generator("E", (2, 0), F3).is_zero()
    assert not generator("H", (1, 1), F3).is_zero()


def test_unit_generators_are_identities():
    from labyrinth.laby import compose, identity

    assert generator("I2", (1, 1), Z4) == identity(Z4, ("1", "2"))
    assert generator("I1", (1,), Z4) == identity(Z4, ("1",))
    T = generator("T", (1, 1), Z4)
    assert compose(T, T) == generator("I2", (1, 1), Z4)


def test_law_count():
    assert len(TABLE_LAWS) == 18
    assert len(AXIOM_LAWS) == 10


@pytest.mark.parametrize("spec", ["T2", "S2", "L2"])
def test_all_laws_hold_over_f3(spec):
    report = law_table_check(functor(spec, F3, F3))
    assert report["status"] == "pass", [r for r in report["laws"] if r["status"] != "pass"]
    assert all(r["points"] == min(3 ** law.arity, 729) or law.arity == 0 and r["points"] == 1
               for r, law in zip(report["laws"], TABLE_LAWS + AXIOM_LAWS))


@pytest.mark.parametrize("spec", ["T2", "S2"])
def test_all_laws_hold_over_f2(spec):
    assert law_table_check(functor(spec, F2, F2))["status"] == "pass"


def test_non_quadratic_is_rejected():
    with pytest.raises(QuadraticError):
        law_table_check(functor("T3", F3, F3))
    with pytest.raises(QuadraticError):
        extract(functor("RedU", Z2, F2))


def variant(report, name):
    return next(v for v in report["variants"] if v["law"].startswith(name))


def test_qm2_with_two_i_terms_depends_on_the_functor():
    t2 = law_table_check(functor("T2", F3, F3))
    s2 = law_table_check(functor("S2", F3, F3))
    assert not variant(t2, "QM2")["holds_under_evaluation"]
    assert variant(s2, "QM2")["holds_under_evaluation"]
    assert not variant(t2, "QM2")["holds_in_laby"]


def test_unswapped_t_h_is_not_an_identity_of_mazes():
    report = law_table_check(functor("T2", F3, F3))
    v = variant(report, "T*H")
    assert not v["holds_in_laby"]
    # the evaluated value only sees the product x1 * x2
    assert v["holds_under_evaluation"]


def test_e_p_with_free_xi_fails():
    report = law_table_check(functor("T2", F3, F3))
    assert not variant(report, "E*P")["holds_under_evaluation"]


def test_untruncated_h_after_p():
    law = next(l for l in TABLE_LAWS if l.name == "H*P")
    row = check_law(functor("T2", F3, F3), law, (1, 1, 1, 1))
    assert row["status"] == "pass"
    assert row["untruncated_terms"] == 7
    assert row["truncation_harmless"]


@pytest.mark.parametrize("spec", ["T2", "S2"])
def test_derived_identities(spec):
    data = extract(functor(spec, F3, F3))
    inv = data.invariants()
    assert all(inv.values()), inv
    assert inv["H(1,1)P = id + T"] and inv["PHP = 2P"]


def test_tensor_square_data():
    data = extract(functor("T2", F3, F3))
    assert (data.M_e.dim, data.M_ee.dim) == (1, 2)
    swap = ExactMatrix(F3, [[0, 1], [1, 0]])
    assert data.T == swap
    assert data.report()["status"] == "pass"


def test_exterior_square_data():
    data = extract(functor("L2", F3, F3))
    assert (data.M_e.dim, data.M_ee.dim) == (0, 1)
    assert data.T == ExactMatrix(F3, [[2]])
    assert data.report()["status"] == "pass"


def test_symmetric_square_data():
    data = extract(functor("S2", F3, F3))
    assert data.T == ExactMatrix.identity(F3, 1)
    assert data.H[(1, 1)] @ data.P == 2 * ExactMatrix.identity(F3, 1)


def test_extract_needs_a_reduced_functor():
    F = functor("Sum(T2,T1)", F3, F3)
    assert extract(F).report()["status"] == "pass"


def test_hom_basis_from_one_to_two():
    basis = laby2_hom_basis(Z2, 1, 2)
    assert len(basis) == 4
    assert {e["tag"] for e in basis} == {"H"}
    nonzero = [e for e in basis if not e["zero"]]
    assert len(nonzero) == 1 and nonzero[0]["params"] == [1, 1]


def test_hom_basis_slots():
    assert {e["tag"] for e in laby2_hom_basis(F3, 2, 2)} == {"I2", "T"}
    assert {e["tag"] for e in laby2_hom_basis(F3, 1, 1)} == {"I1", "E"}
    assert len(laby2_hom_basis(F3, 2, 1)) == 9
    with pytest.raises(QuadraticError):
        laby2_hom_basis(F3, 3, 1)
