"""Evaluation of mazes on cross-effects and the inverse construction.

For a functor F, ``Phi(F)`` sends a finite set X to the cross-effect
ce_X F(Omega, ..., Omega) and a maze with passages y: f(y) <- g(y) to

    F(sigma_{f(y1) y1} | ... | sigma_{f(yk) yk}) F(alpha)

restricted to cross-effect coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AlgebraError, ExactMatrix, RingSpec, injection
from .crosseffects import CEBasis, ce_basis, decomposition, degree, deviate, subsets
from .functors import Functor, NatTransform
from .laby import Maze, MazeSum, StructuredMaze, as_sum, compose, named_set, normalize


class InvariantViolation(AssertionError):
    """An evaluated image escaped its cross-effect; carries a witness."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


@dataclass(frozen=True)
class CEMorphism:
    """A matrix ce_Z F -> ce_X F in the canonical cross-effect bases."""

    functor: Functor
    source: tuple
    target: tuple
    matrix: ExactMatrix


def _signed_subset_sums(labels: Sequence[int], modulus: int) -> dict[int, int]:
    """value -> sum over subsets S with sum(S) = value of (-1)^(n - |S|)."""
    dist = {0: 1}
    for label in labels:
        nxt: dict[int, int] = {}
        for v, c in dist.items():
            nxt[v] = nxt.get(v, 0) - c
            w = (v + label) % modulus
            nxt[w] = nxt.get(w, 0) + c
        dist = {v: c for v, c in nxt.items() if c}
    return dist


def _cells(maze: Maze) -> dict[int, list[int]]:
    width = len(maze.source)
    xpos = {x: i for i, x in enumerate(maze.target)}
    zpos = {z: i for i, z in enumerate(maze.source)}
    cells: dict[int, list[int]] = {}
    for passage in maze.passages:
        cells.setdefault(xpos[passage.to] * width + zpos[passage.source], []).append(passage.label)
    return cells


def _argument_codes(maze: Maze, modulus: int, p: int, wide: bool) -> tuple[np.ndarray, np.ndarray]:
    """Arguments of F with their signed coefficients mod p, for one maze.

    Uses F(sum_{y in I} sigma_{f(y) y}) F(alpha) = F(sum_{y in I} label_y E_{f(y) g(y)})
    and groups passages by their (x, z) cell: a cell holding labels
    l_1..l_r contributes every subset sum with sign (-1)^(r - |S|).
    An |X| x |Z| argument is encoded as the base-m integer whose digit at
    position x * |Z| + z is its (x, z) entry.
    """
    dtype = object if wide else np.int64
    codes = np.zeros(1, dtype=dtype)
    coeffs = np.ones(1, dtype=np.int64)
    for cell, labels in _cells(maze).items():
        dist = _signed_subset_sums(labels, modulus)
        values = np.array([v * modulus ** cell for v in dist], dtype=dtype)
        signs = np.array(list(dist.values()), dtype=np.int64) % p
        codes = (codes[:, None] + values[None, :]).ravel()
        coeffs = (coeffs[:, None] * signs[None, :]).ravel() % p
    return codes, coeffs


def _decode(code: int, modulus: int, rows: int, cols: int) -> np.ndarray:
    digits = np.zeros(rows * cols, dtype=np.int64)
    code = int(code)
    i = 0
    while code:
        code, digits[i] = divmod(code, modulus)
        i += 1
    return digits.reshape(rows, cols)


def ambient(F: Functor, s) -> ExactMatrix:
    """The value of a maze (or maze sum) as a map F(Omega^Z) -> F(Omega^X).

    F is only ever applied to |X| x |Z| matrices; arguments shared between
    subsets or between terms are evaluated once.
    """
    s = as_sum(s)
    ring = F.source_ring
    p = F.target_field.modulus
    rows, cols = len(s.target), len(s.source)
    wide = ring.modulus ** (rows * cols) >= 2 ** 62
    all_codes, all_coeffs = [], []
    for maze, coeff in s.items():
        codes, coeffs = _argument_codes(maze, ring.modulus, p, wide)
        all_codes.append(codes)
        all_coeffs.append(coeffs * (coeff % p) % p)
    total = np.zeros((F.obj(rows), F.obj(cols)), dtype=np.int64)
    if not all_codes:
        return ExactMatrix(F.target_field, total)
    unique, inverse = np.unique(np.concatenate(all_codes), return_inverse=True)
    summed = np.bincount(inverse.reshape(-1), weights=np.concatenate(all_coeffs), minlength=len(unique))
    summed = summed.astype(np.int64) % p
    for code, c in zip(unique, summed):
        if c:
            arg = ExactMatrix(ring, _decode(code, ring.modulus, rows, cols))
            total = (total + int(c) * F.apply(arg).data) % p
    return ExactMatrix(F.target_field, total)


def ambient_literal(F: Functor, s: StructuredMaze) -> ExactMatrix:
    """The same value computed as written: a deviation through F(Omega^Y), then F(alpha).

    Works for structured mazes whose structure map has zeros on its support.
    """
    ring = F.source_ring
    arrows = [injection(ring, s.X, x) for x in s.f]
    return deviate(F, arrows, target=len(s.X)) @ F.apply(s.alpha)


class Phi:
    """The additive functor Phi(F) on the labyrinth category."""

    def __init__(self, F: Functor):
        self.F = F

    def basis(self, X) -> CEBasis:
        n = X if isinstance(X, int) else len(X)
        return ce_basis(self.F, (1,) * n)

    def dim(self, X) -> int:
        return self.basis(X).dim

    def eval_maze(self, maze: Maze, check_well_defined: bool = False) -> CEMorphism:
        F = self.F
        if maze.ring != F.source_ring:
            raise AlgebraError(f"maze over {maze.ring}, functor over {F.source_ring}")
        A = ambient(F, maze)
        src, tgt = self.basis(maze.source), self.basis(maze.target)
        image = A @ src.basis
        coords = tgt.coords @ image
        if tgt.basis @ coords != image:
            raise InvariantViolation(
                "evaluated maze leaves the target cross-effect",
                {"maze": maze.to_json(), "functor": getattr(F, "spec", F.name)},
            )
        if check_well_defined and A @ src.idempotent != A:
            raise InvariantViolation(
                "evaluation changes under the source idempotent",
                {"maze": maze.to_json(), "functor": getattr(F, "spec", F.name)},
            )
        return CEMorphism(F, maze.source, maze.target, coords)

    def eval_sum(self, s) -> ExactMatrix:
        """Phi(F) of a formal sum, by linearity, as a matrix in ce coordinates."""
        s = as_sum(s)
        F = self.F
        if s.ring != F.source_ring:
            raise AlgebraError(f"maze over {s.ring}, functor over {F.source_ring}")
        src, tgt = self.basis(s.source), self.basis(s.target)
        image = ambient(F, s) @ src.basis
        coords = tgt.coords @ image
        if tgt.basis @ coords != image:
            raise InvariantViolation(
                "evaluated morphism leaves the target cross-effect",
                {"morphism": s.to_json(), "functor": getattr(F, "spec", F.name)},
            )
        return coords

    __call__ = eval_sum

    def well_defined(self, maze: Maze) -> bool:
        A = ambient(self.F, maze)
        return A @ self.basis(maze.source).idempotent == A


def eval_maze(F: Functor, maze: Maze) -> CEMorphism:
    return Phi(F).eval_maze(maze)


def eval_sum(F: Functor, s) -> ExactMatrix:
    return Phi(F).eval_sum(s)


def _report(check: str, params: dict, ok: bool, witness: dict | None = None) -> dict:
    out = {"check": check, "params": params, "status": "pass" if ok else "fail"}
    if not ok and witness:
        out["witness"] = witness
    return out


def functoriality_check(F: Functor, P, Q) -> dict:
    P, Q = as_sum(P), as_sum(Q)
    phi = Phi(F)
    lhs = phi(compose(P, Q))
    rhs = phi(P) @ phi(Q)
    return _report(
        "functoriality",
        {"functor": getattr(F, "spec", F.name), "source": list(Q.source), "target": list(P.target)},
        lhs == rhs,
        {"P": P.to_json(), "Q": Q.to_json(), "lhs": lhs.to_json(), "rhs": rhs.to_json()},
    )


def phi_on_nat(eta: NatTransform, X) -> ExactMatrix:
    """ce_X eta in the canonical bases of ce_X F and ce_X G."""
    n = X if isinstance(X, int) else len(X)
    bF = ce_basis(eta.source, (1,) * n)
    bG = ce_basis(eta.target, (1,) * n)
    image = eta(n) @ bF.basis
    coords = bG.coords @ image
    if bG.basis @ coords != image:
        raise InvariantViolation(f"{eta.name} does not preserve the cross-effect at rank {n}")
    return coords


def naturality_check(eta: NatTransform, s) -> dict:
    """Phi(eta)_X Phi(F)(s) = Phi(G)(s) Phi(eta)_Z for a morphism s: Z -> X."""
    s = as_sum(s)
    lhs = phi_on_nat(eta, s.target) @ Phi(eta.source)(s)
    rhs = Phi(eta.target)(s) @ phi_on_nat(eta, s.source)
    return _report(
        "naturality",
        {"transformation": eta.name, "source": list(s.source), "target": list(s.target)},
        lhs == rhs,
        {"morphism": s.to_json(), "lhs": lhs.to_json(), "rhs": rhs.to_json()},
    )


# the inverse construction ---------------------------------------------------


def subset_maze(ring: RingSpec, alpha: ExactMatrix, U) -> MazeSum:
    """The maze U_X <- U -> U_Y with passage (x <- y, alpha[x, y]) for (x, y) in U."""
    X = named_set(alpha.rows)
    Y = named_set(alpha.cols)
    UX = tuple(X[i] for i in sorted({x for x, _ in U}))
    UY = tuple(Y[j] for j in sorted({y for _, y in U}))
    raw = [(X[x], Y[y], int(alpha.data[x, y])) for x, y in U]
    return normalize(ring, UX, UY, raw)


def reconstruct(phi: Phi, alpha: ExactMatrix) -> ExactMatrix:
    """F'(alpha) as a block matrix from (+)_{B in [n]} H(B) to (+)_{A in [m]} H(A).

    Only ``phi.dim`` and ``phi.eval_sum`` are used, so ``phi`` may be any
    evaluation oracle with that interface.
    """
    m, n = alpha.shape
    ring = alpha.ring
    field = phi.F.target_field
    rows_sub = list(subsets(m))
    cols_sub = list(subsets(n))
    r_dims = [phi.dim(len(A)) for A in rows_sub]
    c_dims = [phi.dim(len(B)) for B in cols_sub]
    r_off = dict(zip(rows_sub, itertools.accumulate([0] + r_dims[:-1])))
    c_off = dict(zip(cols_sub, itertools.accumulate([0] + c_dims[:-1])))
    out = np.zeros((sum(r_dims), sum(c_dims)), dtype=np.int64)
    cells = [(x, y) for x in range(m) for y in range(n)]
    for r in range(len(cells) + 1):
        for U in itertools.combinations(cells, r):
            s = subset_maze(ring, alpha, U)
            if s.is_zero():
                continue
            block = phi.eval_sum(s)
            A = tuple(sorted({x for x, _ in U}))
            B = tuple(sorted({y for _, y in U}))
            ro, co = r_off[A], c_off[B]
            out[ro:ro + block.rows, co:co + block.cols] += block.data
    return ExactMatrix(field, out)


def roundtrip_sides(F: Functor, alpha: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix]:
    dec_x = decomposition(F, alpha.rows)
    dec_y = decomposition(F, alpha.cols)
    direct = dec_x.J @ F.apply(alpha) @ dec_y.J_inv
    return direct, reconstruct(Phi(F), alpha)


def roundtrip_check(F: Functor, alpha: ExactMatrix) -> dict:
    direct, rebuilt = roundtrip_sides(F, alpha)
    return _report(
        "roundtrip",
        {"functor": getattr(F, "spec", F.name), "shape": list(alpha.shape)},
        direct == rebuilt,
        {"alpha": alpha.to_json(), "direct": direct.to_json(), "rebuilt": rebuilt.to_json()},
    )


def annihilation_profile(F: Functor, nmax: int) -> list[int]:
    phi = Phi(F)
    return [phi.dim(k) for k in range(nmax + 1)]


def degree_coherent(F: Functor, nmax: int) -> bool:
    """Profile vanishes beyond n exactly when the degree is at most n."""
    profile = annihilation_profile(F, nmax)
    deg = degree(F, nmax)
    for n in range(nmax):
        vanishes = all(d == 0 for d in profile[n + 1:])
        at_most_n = isinstance(deg, int) and deg <= n
        if vanishes != at_most_n:
            return False
    return True
