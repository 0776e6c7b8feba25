"""Quadratic functors: the generators of Laby_(2) on [1] and [2], their laws, and
extraction of the quadratic data (M_e, M_ee, T, P, H).

Parameters are ring elements; a parameter living in A^2 (xi, omega) is a
pair standing for an arrow Omega -> Omega^2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import ExactMatrix, RingSpec
from .crosseffects import CEBasis, ce_basis, ce_dim, degree
from .functors import Functor
from .laby import MazeSum, StructuredMaze, compose, from_structured, normalize, truncate, named_set
from .phi import Phi

ONE = named_set(1)
TWO = named_set(2)

# tag -> (source, target, parameter arity)
GENERATORS = {
    "I1": (ONE, ONE, 1),
    "I2": (TWO, TWO, 2),
    "T": (TWO, TWO, 2),
    "P": (TWO, ONE, 2),
    "H": (ONE, TWO, 2),
    "E": (ONE, ONE, 2),
}


class QuadraticError(ValueError):
    pass


def generator(tag: str, params, ring: RingSpec) -> MazeSum:
    """The labeled maze of a generator; zero parameters give the zero morphism.

    I1(e)     = {(1<-1, e)}
    I2(a, b)  = {(1<-1, a), (2<-2, b)}
    T(c, d)   = {(2<-1, c), (1<-2, d)}
    P(z, h)   = {(1<-1, z), (1<-2, h)}
    H(x1, x2) = {(1<-1, x1), (2<-1, x2)}
    E(w1, w2) = {(1<-1, w1), (1<-1, w2)}
    """
    if tag not in GENERATORS:
        raise QuadraticError(f"unknown generator {tag!r}")
    source, target, arity = GENERATORS[tag]
    params = [int(v) for v in params]
    if len(params) != arity:
        raise QuadraticError(f"{tag} takes {arity} parameter(s), got {len(params)}")
    a = params[0]
    b = params[1] if arity == 2 else None
    raw = {
        "I1": [("1", "1", a)],
        "I2": [("1", "1", a), ("2", "2", b)],
        "T": [("2", "1", a), ("1", "2", b)],
        "P": [("1", "1", a), ("1", "2", b)],
        "H": [("1", "1", a), ("2", "1", b)],
        "E": [("1", "1", a), ("1", "1", b)],
    }[tag]
    return normalize(ring, target, source, raw)


def structured_generator(tag: str, params, ring: RingSpec) -> StructuredMaze:
    """The generator as a triple (f, g, alpha), read off from its defining diagram."""
    p = [int(v) for v in params]
    diag = lambda a, b: ExactMatrix(ring, [[a, 0], [0, b]])
    column = lambda a, b: ExactMatrix(ring, [[a], [b]])
    if tag == "I1":
        return StructuredMaze(ONE, ONE, ONE, ("1",), ("1",), ExactMatrix(ring, [[p[0]]]))
    if tag == "I2":
        return StructuredMaze(TWO, TWO, TWO, ("1", "2"), ("1", "2"), diag(*p))
    if tag == "T":
        return StructuredMaze(TWO, TWO, TWO, ("2", "1"), ("1", "2"), diag(*p))
    if tag == "P":
        return StructuredMaze(ONE, TWO, TWO, ("1", "1"), ("1", "2"), diag(*p))
    if tag == "H":
        return StructuredMaze(TWO, TWO, ONE, ("1", "2"), ("1", "1"), column(*p))
    if tag == "E":
        return StructuredMaze(ONE, TWO, ONE, ("1", "1"), ("1", "1"), column(*p))
    raise QuadraticError(f"unknown generator {tag!r}")


# laws ------------------------------------------------------------------------

# A law is a product of generators on the left and a sum of generators on
# the right, both functions of a flat parameter tuple.


@dataclass(frozen=True)
class Law:
    name: str
    arity: int
    lhs: Callable
    rhs: Callable
    group: str = "table"


TABLE_LAWS = [
    Law("I2*I2", 4, lambda a, b, a_, b_: [("I2", (a, b)), ("I2", (a_, b_))],
        lambda a, b, a_, b_: [("I2", (a * a_, b * b_))]),
    Law("I2*T", 4, lambda a, b, c, d: [("I2", (a, b)), ("T", (c, d))],
        lambda a, b, c, d: [("T", (b * c, a * d))]),
    Law("T*I2", 4, lambda c, d, a, b: [("T", (c, d)), ("I2", (a, b))],
        lambda c, d, a, b: [("T", (c * a, d * b))]),
    Law("T*T", 4, lambda c, d, c_, d_: [("T", (c, d)), ("T", (c_, d_))],
        lambda c, d, c_, d_: [("I2", (d * c_, c * d_))]),
    Law("I2*H", 4, lambda a, b, x1, x2: [("I2", (a, b)), ("H", (x1, x2))],
        lambda a, b, x1, x2: [("H", (a * x1, b * x2))]),
    Law("T*H", 4, lambda c, d, x1, x2: [("T", (c, d)), ("H", (x1, x2))],
        lambda c, d, x1, x2: [("H", (d * x2, c * x1))]),
    Law("P*I2", 4, lambda z, h, a, b: [("P", (z, h)), ("I2", (a, b))],
        lambda z, h, a, b: [("P", (z * a, h * b))]),
    Law("P*T", 4, lambda z, h, c, d: [("P", (z, h)), ("T", (c, d))],
        lambda z, h, c, d: [("P", (h * c, z * d))]),
    Law("H*I1", 3, lambda x1, x2, e: [("H", (x1, x2)), ("I1", (e,))],
        lambda x1, x2, e: [("H", (x1 * e, x2 * e))]),
    Law("I1*I1", 2, lambda e, e_: [("I1", (e,)), ("I1", (e_,))],
        lambda e, e_: [("I1", (e * e_,))]),
    Law("I1*E", 3, lambda e, w1, w2: [("I1", (e,)), ("E", (w1, w2))],
        lambda e, w1, w2: [("E", (e * w1, e * w2))]),
    Law("E*I1", 3, lambda w1, w2, e: [("E", (w1, w2)), ("I1", (e,))],
        lambda w1, w2, e: [("E", (w1 * e, w2 * e))]),
    Law("E*E", 4, lambda w1, w2, v1, v2: [("E", (w1, w2)), ("E", (v1, v2))],
        lambda w1, w2, v1, v2: [("E", (w1 * v1, w2 * v2)), ("E", (w2 * v1, w1 * v2))]),
    Law("H*E", 4, lambda x1, x2, w1, w2: [("H", (x1, x2)), ("E", (w1, w2))],
        lambda x1, x2, w1, w2: [("H", (x1 * w1, x2 * w2)), ("H", (x1 * w2, x2 * w1))]),
    Law("H*P", 4, lambda x1, x2, z, h: [("H", (x1, x2)), ("P", (z, h))],
        lambda x1, x2, z, h: [("I2", (x1 * z, x2 * h)), ("T", (x2 * z, x1 * h))]),
    Law("E*P", 4, lambda w1, w2, z, h: [("E", (w1, w2)), ("P", (z, h))],
        lambda w1, w2, z, h: [("P", (w1 * z, w2 * h)), ("P", (w2 * z, w1 * h))]),
    Law("P*H", 4, lambda z, h, x1, x2: [("P", (z, h)), ("H", (x1, x2))],
        lambda z, h, x1, x2: [("E", (z * x1, h * x2))]),
    Law("I1*P", 3, lambda e, z, h: [("I1", (e,)), ("P", (z, h))],
        lambda e, z, h: [("P", (e * z, e * h))]),
]

# T(gamma, delta)H(xi) read as H((delta + gamma) xi), without the swap of
# xi; at gamma = delta = 1 it contradicts the axiom TH(xi) = H(sigma xi).
T_H_UNSWAPPED = Law(
    "T*H[unswapped]", 4,
    lambda c, d, x1, x2: [("T", (c, d)), ("H", (x1, x2))],
    lambda c, d, x1, x2: [("H", (d * x1, c * x2))],
    group="variant",
)

# The row for E(omega)P(zeta, eta) with a free xi in its last
# parameter; quantified over xi it is reported apart from the table.
E_P_FREE_XI = Law(
    "E*P[free xi]", 6,
    lambda w1, w2, z, h, x1, x2: [("E", (w1, w2)), ("P", (z, h))],
    lambda w1, w2, z, h, x1, x2: [("P", (w1 * z, w2 * h)), ("P", (w2 * z, x1 * h))],
    group="variant",
)

AXIOM_LAWS = [
    Law("M module", 2, lambda e, e_: [("I1", (e,)), ("I1", (e_,))],
        lambda e, e_: [("I1", (e * e_,))], "axiom"),
    Law("N module", 4, lambda a, b, a_, b_: [("I2", (a, b)), ("I2", (a_, b_))],
        lambda a, b, a_, b_: [("I2", (a * a_, b * b_))], "axiom"),
    Law("N symmetric", 2, lambda a, b: [("I2", (a, b)), ("T", (1, 1))],
        lambda a, b: [("T", (1, 1)), ("I2", (b, a))], "axiom"),
    Law("T involution", 0, lambda: [("T", (1, 1)), ("T", (1, 1))],
        lambda: [("I2", (1, 1))], "axiom"),
    Law("P homo", 1, lambda e: [("I1", (e,)), ("P", (1, 1))],
        lambda e: [("P", (1, 1)), ("I2", (e, e))], "axiom"),
    Law("P", 0, lambda: [("P", (1, 1)), ("T", (1, 1))],
        lambda: [("P", (1, 1))], "axiom"),
    Law("H well-defined", 3, lambda x1, x2, e: [("H", (x1, x2)), ("I1", (e,))],
        lambda x1, x2, e: [("H", (x1 * e, x2 * e))], "axiom"),
    Law("H symmetric", 2, lambda x1, x2: [("T", (1, 1)), ("H", (x1, x2))],
        lambda x1, x2: [("H", (x2, x1))], "axiom"),
    Law("H homo", 4, lambda a, b, x1, x2: [("I2", (a, b)), ("H", (x1, x2))],
        lambda a, b, x1, x2: [("H", (a * x1, b * x2))], "axiom"),
    Law("QM2", 2, lambda x1, x2: [("H", (x1, x2)), ("P", (1, 1))],
        lambda x1, x2: [("I2", (x1, x2)), ("T", (x2, x1))], "axiom"),
]

# QM2 with I in place of T in its second term.
QM2_I_PLUS_I = Law(
    "QM2[I+I]", 2,
    lambda x1, x2: [("H", (x1, x2)), ("P", (1, 1))],
    lambda x1, x2: [("I2", (x1, x2)), ("I2", (x2, x1))],
    group="variant",
)

VARIANTS = [QM2_I_PLUS_I, T_H_UNSWAPPED, E_P_FREE_XI]

# A right-hand term is a generator or, for the axioms, a product of them.
_PRODUCT_RHS = {"N symmetric", "P homo"}


def _product(factors, ring: RingSpec) -> MazeSum:
    out = None
    for tag, params in factors:
        g = generator(tag, params, ring)
        out = g if out is None else compose(out, g)
    return out


def _rhs_sum(law: Law, params, ring: RingSpec) -> MazeSum:
    terms = law.rhs(*params)
    if law.name in _PRODUCT_RHS:
        return _product(terms, ring)
    total = None
    for tag, p in terms:
        g = generator(tag, p, ring)
        total = g if total is None else total + g
    return total


def _parameter_grid(ring: RingSpec, arity: int, rng, limit: int):
    elements = list(range(ring.modulus))
    if ring.modulus ** arity <= limit:
        return list(itertools.product(elements, repeat=arity))
    return [tuple(int(v) for v in rng.integers(0, ring.modulus, size=arity)) for _ in range(limit)]


def _require_quadratic(F: Functor):
    d = degree(F, 3)
    if not isinstance(d, int) or d > 2:
        raise QuadraticError(f"functor {getattr(F, 'spec', F.name)} is not quadratic (degree {d})")


def check_law(F: Functor, law: Law, params, phi: Phi | None = None) -> dict:
    """Compare both sides of a law at one parameter point, in two ways.

    ``truncated``: the composite in Laby(A), with terms of more than two
    passages dropped, equals the stated right-hand side as a formal sum.
    ``evaluated``: Phi(F) of the untruncated composite equals Phi(F) of the
    right-hand side.  ``truncation_harmless``: Phi(F) does not see the
    dropped terms.
    """
    ring = F.source_ring
    phi = phi or Phi(F)
    full = _product(law.lhs(*params), ring)
    rhs = _rhs_sum(law, params, ring)
    cut = truncate(full, 2)
    lhs_value, rhs_value, cut_value = phi(full), phi(rhs), phi(cut)
    row = {
        "law": law.name,
        "group": law.group,
        "params": [int(v) for v in params],
        "truncated": cut == rhs,
        "evaluated": lhs_value == rhs_value,
        "truncation_harmless": lhs_value == cut_value,
        "untruncated_terms": len(full),
    }
    row["status"] = "pass" if row["truncated"] and row["evaluated"] and row["truncation_harmless"] else "fail"
    if row["status"] == "fail":
        row["witness"] = {"lhs": lhs_value.to_json(), "rhs": rhs_value.to_json()}
    return row


def law_table_check(F: Functor, rng: np.random.Generator | None = None, limit: int = 729,
                    include_variants: bool = True) -> dict:
    """Every table law and all ten axioms, over all parameters when |A|^arity <= limit.

    Variants are reported per law as a verdict and never affect ``status``.
    """
    _require_quadratic(F)
    rng = rng if rng is not None else np.random.default_rng(0)
    phi = Phi(F)
    rows, variants = [], []
    for law in TABLE_LAWS + AXIOM_LAWS:
        results = [check_law(F, law, p, phi) for p in _parameter_grid(F.source_ring, law.arity, rng, limit)]
        failures = [r for r in results if r["status"] != "pass"]
        row = {"law": law.name, "group": law.group, "points": len(results),
               "status": "fail" if failures else "pass"}
        if failures:
            row["first_failure"] = failures[0]
        rows.append(row)
    if include_variants:
        for law in VARIANTS:
            results = [check_law(F, law, p, phi) for p in _parameter_grid(F.source_ring, law.arity, rng, limit)]
            failures = [r for r in results if not r["evaluated"]]
            variants.append({
                "law": law.name,
                "points": len(results),
                "holds_under_evaluation": not failures,
                "holds_in_laby": all(r["truncated"] for r in results),
                "first_failure": failures[0] if failures else None,
            })
    status = "pass" if all(r["status"] == "pass" for r in rows) else "fail"
    return {"functor": getattr(F, "spec", F.name), "laws": rows, "variants": variants, "status": status}


# quadratic data ----------------------------------------------------------------


@dataclass
class QuadData:
    """The quadratic data of F in the canonical cross-effect bases."""

    functor: Functor
    M_e: CEBasis
    M_ee: CEBasis
    T: ExactMatrix
    P: ExactMatrix
    H: dict = field(repr=False)
    I_act: dict = field(repr=False)
    II_act: dict = field(repr=False)

    def invariants(self) -> dict[str, bool]:
        ring = self.functor.source_ring
        A = list(range(ring.modulus))
        T, P, H, I1, I2 = self.T, self.P, self.H, self.I_act, self.II_act
        id_ee = ExactMatrix.identity(T.ring, T.rows)
        id_e = ExactMatrix.identity(T.ring, self.M_e.dim)
        r = ring.reduce
        out = {
            "T involution": T @ T == id_ee,
            "PT = P": P @ T == P,
            "M_e action unital": I1[1] == id_e,
            "M_e action multiplicative": all(I1[a] @ I1[b] == I1[r(a * b)] for a in A for b in A),
            "M_ee action multiplicative": all(
                I2[(a, b)] @ I2[(c, d)] == I2[(r(a * c), r(b * d))]
                for a, b, c, d in itertools.product(A, repeat=4)
            ),
            "M_ee symmetric": all(I2[(a, b)] @ T == T @ I2[(b, a)] for a in A for b in A),
            "P homomorphism": all(P @ I2[(e, e)] == I1[e] @ P for e in A),
            "H well-defined": all(H[(x1, x2)] @ I1[e] == H[(r(x1 * e), r(x2 * e))]
                                  for x1, x2, e in itertools.product(A, repeat=3)),
            "H symmetric": all(T @ H[(x1, x2)] == H[(x2, x1)] for x1 in A for x2 in A),
            "H homomorphism": all(I2[(a, b)] @ H[(x1, x2)] == H[(r(a * x1), r(b * x2))]
                                  for a, b, x1, x2 in itertools.product(A, repeat=4)),
            "QM2": all(H[(x1, x2)] @ P == I2[(x1, x2)] + T @ I2[(x2, x1)] for x1 in A for x2 in A),
            "H(1,1)P = id + T": H[(1, 1)] @ P == id_ee + T,
            "PHP = 2P": P @ H[(1, 1)] @ P == 2 * P,
        }
        return out

    def report(self) -> dict:
        inv = self.invariants()
        return {
            "functor": getattr(self.functor, "spec", self.functor.name),
            "dims": {"M_e": self.M_e.dim, "M_ee": self.M_ee.dim},
            "T": self.T.to_json(),
            "P": self.P.to_json(),
            "invariants": inv,
            "status": "pass" if all(inv.values()) else "fail",
        }


def extract(F: Functor) -> QuadData:
    """Evaluate the generators on ce_1 F and ce_2 F, exhaustively over A."""
    _require_quadratic(F)
    if ce_dim(F, 0) != 0:
        raise QuadraticError("F(0) is not zero; extract from Red(F) instead")
    ring = F.source_ring
    phi = Phi(F)
    A = list(range(ring.modulus))
    ev = lambda tag, params: phi(generator(tag, params, ring))
    return QuadData(
        functor=F,
        M_e=ce_basis(F, (1,)),
        M_ee=ce_basis(F, (1, 1)),
        T=ev("T", (1, 1)),
        P=ev("P", (1, 1)),
        H={(a, b): ev("H", (a, b)) for a in A for b in A},
        I_act={e: ev("I1", (e,)) for e in A},
        II_act={(a, b): ev("I2", (a, b)) for a in A for b in A},
    )


# hom-sets of Laby_(2) ------------------------------------------------------------

_HOM_SLOTS = {
    (1, 1): ("I1", "E"),
    (2, 1): ("P",),
    (1, 2): ("H",),
    (2, 2): ("I2", "T"),
}


def laby2_hom_basis(ring: RingSpec, source: int, target: int) -> list[dict]:
    """Generators from [source] to [target], one entry per parameter value.

    Entries whose maze is the zero morphism (a zero parameter) are kept and
    flagged, so the enumeration is complete over the finite ring.
    """
    if (source, target) not in _HOM_SLOTS:
        raise QuadraticError(f"no generators from [{source}] to [{target}]")
    out = []
    for tag in _HOM_SLOTS[(source, target)]:
        arity = GENERATORS[tag][2]
        for params in itertools.product(range(ring.modulus), repeat=arity):
            maze = generator(tag, params, ring)
            out.append({"tag": tag, "params": list(params), "maze": maze, "zero": maze.is_zero()})
    return out
