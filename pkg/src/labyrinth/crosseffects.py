"""Deviations, cross-effects and polynomial degree."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .algebra import (
    AlgebraError,
    ExactMatrix,
    arrow_sum,
    block_injection,
    column_space,
    complement_retraction,
    diagonal_projection,
    kernel_matrix,
    left_inverse,
    subset_retraction,
    subspace_contains,
)
from .functors import Functor, GuardError


def subsets(k: int):
    """Subsets of range(k) as sorted tuples, in bitmask order."""
    for mask in range(1 << k):
        yield tuple(i for i in range(k) if mask >> i & 1)


def deviate(F: Functor, arrows: Sequence[ExactMatrix], target: int | None = None) -> ExactMatrix:
    """The deviation F(a_1 | ... | a_k): F(Omega^{sum m_i}) -> F(Omega^M).

    Alternating sum over I of F applied to the sum of the arrows in I, the
    remaining blocks replaced by zero arrows.
    """
    ring = F.source_ring
    if not arrows:
        if target is None:
            raise AlgebraError("deviation of an empty family needs the target arity")
        return F.apply(ExactMatrix.zeros(ring, target, 0))
    M = arrows[0].rows
    for a in arrows:
        if a.rows != M:
            raise AlgebraError(f"deviation needs a common target; got {M} and {a.rows}")
        if a.ring != ring:
            raise AlgebraError(f"arrow over {a.ring}, functor over {ring}")
    if target is not None and target != M:
        raise AlgebraError(f"arrows target arity {M}, expected {target}")
    k = len(arrows)
    zeros = [ExactMatrix.zeros(ring, M, a.cols) for a in arrows]
    total = None
    for I in subsets(k):
        chosen = set(I)
        summed = arrow_sum([arrows[i] if i in chosen else zeros[i] for i in range(k)])
        term = F.apply(summed)
        if (k - len(I)) % 2:
            term = -term
        total = term if total is None else total + term
    return total


# covering subsets ---------------------------------------------------------


@dataclass(frozen=True)
class CoveringSubset:
    """A subset of a relation R x C whose projections onto R and C are onto."""

    relation: tuple
    members: tuple

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _component_covers(pairs: list, rows: list, cols: list):
    """Backtracking enumeration of covering subsets of one connected block."""
    remaining_r = {r: 0 for r in rows}
    remaining_c = {c: 0 for c in cols}
    for r, c in pairs:
        remaining_r[r] += 1
        remaining_c[c] += 1
    covered_r = {r: 0 for r in rows}
    covered_c = {c: 0 for c in cols}
    chosen: list = []
    out: list = []

    def walk(i):
        if i == len(pairs):
            out.append(tuple(chosen))
            return
        r, c = pairs[i]
        remaining_r[r] -= 1
        remaining_c[c] -= 1
        # include the pair
        covered_r[r] += 1
        covered_c[c] += 1
        chosen.append(pairs[i])
        walk(i + 1)
        chosen.pop()
        covered_r[r] -= 1
        covered_c[c] -= 1
        # exclude it, unless that strands r or c
        if (covered_r[r] or remaining_r[r]) and (covered_c[c] or remaining_c[c]):
            walk(i + 1)
        remaining_r[r] += 1
        remaining_c[c] += 1

    walk(0)
    return out


def covering_subsets(R: Sequence[Hashable], C: Sequence[Hashable], relation) -> list[CoveringSubset]:
    """All K contained in ``relation`` with both projections onto.

    The relation is split into connected blocks; covers of the whole are
    products of covers of the blocks.  Output order is deterministic.
    """
    R, C = list(R), list(C)
    rel = []
    for pair in relation:
        pair = tuple(pair)
        if pair not in rel:
            rel.append(pair)
    rel_t = tuple(rel)
    touched_r = {r for r, _ in rel}
    touched_c = {c for _, c in rel}
    if any(r not in touched_r for r in R) or any(c not in touched_c for c in C):
        return []
    # connected components of the bipartite graph
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r, c in rel:
        parent[find(("r", r))] = find(("c", c))
    blocks: dict = {}
    for r, c in rel:
        blocks.setdefault(find(("r", r)), []).append((r, c))
    per_block = []
    for pairs in blocks.values():
        rows = list(dict.fromkeys(r for r, _ in pairs))
        cols = list(dict.fromkeys(c for _, c in pairs))
        per_block.append(_component_covers(pairs, rows, cols))
    order = {pair: i for i, pair in enumerate(rel)}
    result = []
    for combo in itertools.product(*per_block):
        members = tuple(sorted((p for part in combo for p in part), key=order.__getitem__))
        result.append(CoveringSubset(rel_t, members))
    return result


# the deviation formula ----------------------------------------------------


def _block_sum_composite(alphas, betas, L) -> ExactMatrix:
    """sum_j (sum_{(i,j) in L} alpha_i) beta_j as an arrow (+)P_j -> M."""
    ring = alphas[0].ring
    M = alphas[0].rows
    pieces = []
    for j, beta in enumerate(betas):
        row = arrow_sum([a if (i, j) in L else ExactMatrix.zeros(ring, M, a.cols) for i, a in enumerate(alphas)])
        pieces.append(row @ beta)
    return arrow_sum(pieces)


def deviation_formula_sides(F: Functor, alphas, betas) -> tuple[ExactMatrix, ExactMatrix, int]:
    """Both sides of the deviation formula and the number of outer terms."""
    if not alphas or not betas:
        raise AlgebraError("the deviation formula needs non-empty families")
    N = sum(a.cols for a in alphas)
    for b in betas:
        if b.rows != N:
            raise AlgebraError(f"beta targets arity {b.rows}, alphas have total source {N}")
    lhs = deviate(F, alphas) @ deviate(F, betas)
    m, n = len(alphas), len(betas)
    grid = [(i, j) for i in range(m) for j in range(n)]
    covers = covering_subsets(range(m), range(n), grid)
    rhs = None
    for K in covers:
        members = K.members
        for r in range(len(members) + 1):
            for L in itertools.combinations(members, r):
                term = F.apply(_block_sum_composite(alphas, betas, set(L)))
                if (len(members) - r) % 2:
                    term = -term
                rhs = term if rhs is None else rhs + term
    return lhs, rhs, len(covers)


def deviation_formula_check(F: Functor, alphas, betas) -> dict:
    lhs, rhs, outer = deviation_formula_sides(F, alphas, betas)
    report = {
        "check": "dev-formula",
        "params": {
            "functor": getattr(F, "spec", F.name),
            "m": len(alphas),
            "n": len(betas),
            "outer_terms": outer,
        },
        "status": "pass" if lhs == rhs else "fail",
    }
    if lhs != rhs:
        report["witness"] = {
            "alphas": [a.to_json() for a in alphas],
            "betas": [b.to_json() for b in betas],
            "lhs": lhs.to_json(),
            "rhs": rhs.to_json(),
        }
    return report


# cross-effects ------------------------------------------------------------


@dataclass
class CEBasis:
    """Basis of ce_k F(Omega^{m_1}, ..., Omega^{m_k}) inside F(Omega^{sum m_i}).

    ``basis`` holds the basis vectors as columns; ``coords`` is a left
    inverse, so ``coords @ v`` gives coordinates of any ``v`` in the span.
    """

    functor: Functor
    parts: tuple
    ambient_dim: int
    idempotent: ExactMatrix
    basis: ExactMatrix
    coords: ExactMatrix = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.cols


def _cache(F: Functor) -> dict:
    if not hasattr(F, "_ce_cache"):
        F._ce_cache = {}
    return F._ce_cache


def ce_idempotent(F: Functor, parts: Sequence[int]) -> ExactMatrix:
    """F(i_1 | ... | i_k) for the block injections of the given parts."""
    ring = F.source_ring
    parts = list(parts)
    injections = [block_injection(ring, parts, i) for i in range(len(parts))]
    return deviate(F, injections, target=sum(parts))


def ce_basis(F: Functor, parts: Sequence[int]) -> CEBasis:
    parts = tuple(int(p) for p in parts)
    if any(p < 0 for p in parts):
        raise AlgebraError("parts must be non-negative arities")
    cache = _cache(F)
    if parts not in cache:
        e = ce_idempotent(F, parts)
        B = column_space(e)
        cache[parts] = CEBasis(F, parts, F.obj(sum(parts)), e, B, left_inverse(B))
    return cache[parts]


def ce_dim(F: Functor, k: int) -> int:
    return ce_basis(F, (1,) * k).dim


def ce_kernel(F: Functor, parts: Sequence[int]) -> ExactMatrix:
    """Basis (as columns) of the kernel of the stacked F(complement retractions)."""
    ring = F.source_ring
    parts = list(parts)
    total = F.obj(sum(parts))
    blocks = [F.apply(complement_retraction(ring, parts, j)).data for j in range(len(parts))]
    if blocks:
        height = sum(b.shape[0] for b in blocks)
        stacked = ExactMatrix(F.target_field, np.vstack(blocks).reshape(height, total))
    else:
        stacked = ExactMatrix.zeros(F.target_field, 0, total)
    return kernel_matrix(stacked)


def kernel_equals_image(F: Functor, parts: Sequence[int]) -> bool:
    image = ce_basis(F, parts).basis
    kernel = ce_kernel(F, parts)
    return subspace_contains(kernel, image) and subspace_contains(image, kernel)


@dataclass
class Decomposition:
    """F(Omega^k) split as the direct sum of ce_A F over subsets A of [k].

    ``J`` maps F(Omega^k) to the stacked cross-effect coordinates (blocks in
    bitmask order of ``subsets``); ``J_inv`` is its inverse.
    """

    k: int
    subsets: list
    dims: list
    J: ExactMatrix
    J_inv: ExactMatrix
    offsets: list


def subset_idempotent(F: Functor, k: int, A: Sequence[int]) -> ExactMatrix:
    """e_A on F(Omega^k): alternating sum of F(diagonal projection onto B), B in A."""
    ring = F.source_ring
    total = None
    for r in range(len(A) + 1):
        for B in itertools.combinations(A, r):
            term = F.apply(diagonal_projection(ring, k, B))
            if (len(A) - r) % 2:
                term = -term
            total = term if total is None else total + term
    return total


def idempotent_relations(F: Functor, k: int) -> dict[str, bool]:
    """e_A e_B = [A = B] e_A and sum_A e_A = 1 on F(Omega^k)."""
    idem = {A: subset_idempotent(F, k, A) for A in subsets(k)}
    field_ = F.target_field
    zero = ExactMatrix.zeros(field_, F.obj(k), F.obj(k))
    orthogonal = all(
        idem[A] @ idem[B] == (idem[A] if A == B else zero)
        for A in idem for B in idem
    )
    total = zero
    for e in idem.values():
        total = total + e
    return {"orthogonal": orthogonal, "complete": total == ExactMatrix.identity(field_, F.obj(k))}


def decomposition(F: Functor, k: int) -> Decomposition:
    ring = F.source_ring
    field_ = F.target_field
    ambient = F.obj(k)
    subs = list(subsets(k))
    rows, cols, dims = [], [], []
    for A in subs:
        ce = ce_basis(F, (1,) * len(A))
        rho = subset_retraction(ring, k, A)
        rows.append((ce.coords @ ce.idempotent @ F.apply(rho)).data)
        cols.append((F.apply(rho.T) @ ce.basis).data)
        dims.append(ce.dim)
    if sum(dims) != ambient:
        raise AlgebraError(f"cross-effect dims {dims} do not sum to dim F(Omega^{k}) = {ambient}")
    J = ExactMatrix(field_, np.vstack(rows).reshape(ambient, ambient))
    J_inv = ExactMatrix(field_, np.hstack(cols).reshape(ambient, ambient))
    if J @ J_inv != ExactMatrix.identity(field_, ambient):
        raise AlgebraError("decomposition maps are not mutually inverse")
    offsets = list(itertools.accumulate([0] + dims[:-1]))
    return Decomposition(k, subs, dims, J, J_inv, offsets)


def degree(F: Functor, nmax: int = 4) -> int | str:
    """Least n <= nmax such that ce_k F(Omega, ..., Omega) = 0 for every k > n.

    Ranks are examined up to max(nmax + 1, n + 2), stopping early at the
    dimension guard (rank n + 1 is always required).  Vanishing at rank
    n + 1 alone is not enough: ce_1 L2(Omega) = 0 while ce_2 L2 does not
    vanish.  Returns ``"exceeds nmax"`` when no such n is found.
    """
    if nmax < 0:
        raise AlgebraError("nmax must be non-negative")
    dims: list[int] = []
    top = nmax + 1
    for k in range(top + 2):
        try:
            dims.append(ce_dim(F, k))
        except GuardError:
            if k <= 1:
                raise
            break
    for n in range(nmax + 1):
        if n + 1 >= len(dims):
            raise GuardError(f"rank {n + 1} exceeds the dimension guard")
        upper = min(len(dims) - 1, max(top, n + 2))
        if all(dims[k] == 0 for k in range(n + 1, upper + 1)):
            return n
    return f"exceeds {nmax}"
