"""Concrete functors from free Z/m-modules to F_p-vector spaces.

A :class:`Functor` is a dimension map ``obj(n) = dim F(Omega^n)`` together
with an arrow map sending an ``m x n`` matrix over the source ring to an
``obj(m) x obj(n)`` matrix over the target field.  Built-ins are described
by short textual descriptors::

    U          linearization F_p[A^n]; basis = points of A^n
    RedU       reduced linearization, Red(U)
    Zero       the zero functor
    T1 T2 T3   tensor powers (source ring must equal the target field)
    S2         symmetric square, quotient of T2 by x(x)y - y(x)x
    L2         exterior square, quotient of T2 by the span of x(x)x
    Sum(F,G)   direct sum
    Red(F)     kernel of the split augmentation F(M) -> F(0)
"""

from __future__ import annotations

import itertools
import re
from collections import OrderedDict
from typing import Callable

import numpy as np

from .algebra import (
    AlgebraError,
    ExactMatrix,
    RingSpec,
    column_space,
    direct_sum,
    kronecker,
    left_inverse,
    mat_compose,
)


class FunctorError(ValueError):
    """Unknown descriptor, incompatible rings, or a failed functor law."""


class GuardError(RuntimeError):
    """A requested value would exceed the configured dimension guard."""


DEFAULT_MAX_DIM = 512


class Functor:
    """A functor FMod_A -> Vec_{F_p} given by tables or closures.

    Arrow images are memoized on the exact matrix, so repeated evaluation
    of the same arrow is cheap.
    """

    def __init__(
        self,
        name: str,
        source_ring: RingSpec,
        target_field: RingSpec,
        obj: Callable[[int], int],
        arrow_map: Callable[[ExactMatrix], ExactMatrix],
        basis_labels: Callable[[int], list[str]] | None = None,
        max_dim: int | None = DEFAULT_MAX_DIM,
        cache_size: int = 4096,
    ):
        if not target_field.is_field:
            raise FunctorError(f"target {target_field} is not a prime field")
        self.name = name
        self.source_ring = source_ring
        self.target_field = target_field
        self._obj = obj
        self._map = arrow_map
        self._labels = basis_labels
        self.max_dim = max_dim
        self._cache: OrderedDict = OrderedDict()
        self._cache_size = cache_size

    def __repr__(self):
        return f"Functor({self.name}, {self.source_ring} -> {self.target_field})"

    def obj(self, n: int) -> int:
        if n < 0:
            raise FunctorError("arity must be non-negative")
        d = self._obj(n)
        if self.max_dim is not None and d > self.max_dim:
            raise GuardError(f"dim {self.name}(Omega^{n}) = {d} exceeds max_dim {self.max_dim}")
        return d

    def basis_labels(self, n: int) -> list[str]:
        if self._labels is None:
            return [f"b{i}" for i in range(self.obj(n))]
        return self._labels(n)

    def apply(self, alpha: ExactMatrix) -> ExactMatrix:
        if alpha.ring != self.source_ring:
            raise FunctorError(f"{self.name} expects arrows over {self.source_ring}, got {alpha.ring}")
        key = alpha.key()
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        self.obj(alpha.rows), self.obj(alpha.cols)
        image = self._map(alpha)
        if image.shape != (self._obj(alpha.rows), self._obj(alpha.cols)):
            raise FunctorError(
                f"{self.name} produced a {image.shape} image for a {alpha.shape} arrow"
            )
        self._cache[key] = image
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return image

    __call__ = apply

    def identity(self, n: int) -> ExactMatrix:
        return ExactMatrix.identity(self.target_field, self.obj(n))

    def zero_image(self, m: int, n: int) -> ExactMatrix:
        return ExactMatrix.zeros(self.target_field, self.obj(m), self.obj(n))


def random_arrow(ring: RingSpec, rows: int, cols: int, rng: np.random.Generator) -> ExactMatrix:
    return ExactMatrix(ring, rng.integers(0, ring.modulus, size=(rows, cols)))


def law_violations(F: Functor, rng: np.random.Generator, samples: int = 5, max_arity: int = 2) -> list[dict]:
    """Spot-check both functor laws on random arrows; return the failures."""
    failures = []
    for n in range(max_arity + 1):
        if F.apply(ExactMatrix.identity(F.source_ring, n)) != F.identity(n):
            failures.append({"law": "identity", "arity": n})
    for _ in range(samples):
        a, b, c = (int(x) for x in rng.integers(0, max_arity + 1, size=3))
        alpha = random_arrow(F.source_ring, a, b, rng)
        beta = random_arrow(F.source_ring, b, c, rng)
        if F.apply(alpha @ beta) != F.apply(alpha) @ F.apply(beta):
            failures.append({"law": "composition", "alpha": alpha.to_json(), "beta": beta.to_json()})
    return failures


# built-in functors --------------------------------------------------------


def _points(ring: RingSpec, n: int) -> np.ndarray:
    """All points of A^n as columns of an n x |A|^n array, lexicographic."""
    m = ring.modulus
    if n == 0:
        return np.zeros((0, 1), dtype=np.int64)
    grid = np.indices((m,) * n, dtype=np.int64).reshape(n, -1)
    return grid


def _point_index(ring: RingSpec, pts: np.ndarray) -> np.ndarray:
    m = ring.modulus
    n = pts.shape[0]
    weights = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return weights @ pts if n else np.zeros(pts.shape[1], dtype=np.int64)


def linearization(ring: RingSpec, field: RingSpec, max_dim: int | None = DEFAULT_MAX_DIM) -> Functor:
    """U: Omega^n -> F_p[A^n]; a linear map sends basis points to points."""
    m = ring.modulus

    def arrow_map(alpha: ExactMatrix) -> ExactMatrix:
        pts = _points(ring, alpha.cols)
        images = (alpha.data @ pts) % m
        idx = _point_index(ring, images)
        data = np.zeros((m ** alpha.rows, pts.shape[1]), dtype=np.int64)
        data[idx, np.arange(pts.shape[1])] = 1
        return ExactMatrix(field, data)

    def labels(n):
        return ["[" + ",".join(str(int(v)) for v in col) + "]" for col in _points(ring, n).T]

    return Functor("U", ring, field, lambda n: m**n, arrow_map, labels, max_dim)


def zero_functor(ring: RingSpec, field: RingSpec, max_dim: int | None = DEFAULT_MAX_DIM) -> Functor:
    return Functor(
        "Zero", ring, field, lambda n: 0,
        lambda a: ExactMatrix.zeros(field, 0, 0), lambda n: [], max_dim,
    )


def _require_same(ring: RingSpec, field: RingSpec, name: str):
    if ring.modulus != field.modulus or not field.is_field:
        raise FunctorError(f"{name} requires source ring = target field, got {ring} and {field}")


def tensor_power(ring: RingSpec, field: RingSpec, d: int, max_dim: int | None = DEFAULT_MAX_DIM) -> Functor:
    _require_same(ring, field, f"T{d}")

    def arrow_map(alpha: ExactMatrix) -> ExactMatrix:
        a = ExactMatrix(field, alpha.data)
        out = ExactMatrix.identity(field, 1)
        for _ in range(d):
            out = kronecker(out, a)
        return out

    def labels(n):
        return ["(x)".join(f"e{i + 1}" for i in idx) for idx in itertools.product(range(n), repeat=d)]

    return Functor(f"T{d}", ring, field, lambda n: n**d, arrow_map, labels, max_dim)


def _quotient_square(ring: RingSpec, field: RingSpec, name: str, pairs_fn, project_fn, max_dim):
    """Build S2/L2 as pi @ kron(alpha, alpha) @ s for a projection/section pair."""
    _require_same(ring, field, name)
    p = field.modulus
    cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def maps(n):
        if n not in cache:
            pairs = pairs_fn(n)
            pos = {pair: k for k, pair in enumerate(pairs)}
            proj = np.zeros((len(pairs), n * n), dtype=np.int64)
            sect = np.zeros((n * n, len(pairs)), dtype=np.int64)
            for i in range(n):
                for j in range(n):
                    hit = project_fn(i, j)
                    if hit is not None:
                        pair, sign = hit
                        proj[pos[pair], i * n + j] = sign % p
            for k, (i, j) in enumerate(pairs):
                sect[i * n + j, k] = 1
            cache[n] = (proj, sect)
        return cache[n]

    def arrow_map(alpha: ExactMatrix) -> ExactMatrix:
        proj, _ = maps(alpha.rows)
        _, sect = maps(alpha.cols)
        k = np.kron(alpha.data, alpha.data).reshape(alpha.rows**2, alpha.cols**2) % p
        return ExactMatrix(field, (proj @ k % p) @ sect)

    return maps, arrow_map


def symmetric_square(ring: RingSpec, field: RingSpec, max_dim: int | None = DEFAULT_MAX_DIM) -> Functor:
    def pairs(n):
        return [(i, j) for i in range(n) for j in range(i, n)]

    maps, arrow_map = _quotient_square(
        ring, field, "S2", pairs, lambda i, j: ((min(i, j), max(i, j)), 1), max_dim
    )
    F = Functor(
        "S2", ring, field, lambda n: n * (n + 1) // 2, arrow_map,
        lambda n: [f"e{i + 1}e{j + 1}" for i, j in pairs(n)], max_dim,
    )
    F.quotient_maps = maps
    return F


def exterior_square(ring: RingSpec, field: RingSpec, max_dim: int | None = DEFAULT_MAX_DIM) -> Functor:
    """T2 modulo the span of x(x)x, with basis e_i^e_j for i < j.

    In characteristic 2 this differs from the alternating tensors.
    """

    def pairs(n):
        return [(i, j) for i in range(n) for j in range(i + 1, n)]

    def project(i, j):
        if i == j:
            return None
        return ((i, j), 1) if i < j else ((j, i), -1)

    maps, arrow_map = _quotient_square(ring, field, "L2", pairs, project, max_dim)
    F = Functor(
        "L2", ring, field, lambda n: n * (n - 1) // 2, arrow_map,
        lambda n: [f"e{i + 1}^e{j + 1}" for i, j in pairs(n)], max_dim,
    )
    F.quotient_maps = maps
    return F


def sum_functor(F: Functor, G: Functor) -> Functor:
    if F.source_ring != G.source_ring or F.target_field != G.target_field:
        raise FunctorError("Sum needs functors with matching source and target")

    def arrow_map(alpha):
        return direct_sum([F.apply(alpha), G.apply(alpha)])

    def labels(n):
        return [f"1:{s}" for s in F.basis_labels(n)] + [f"2:{s}" for s in G.basis_labels(n)]

    return Functor(
        f"Sum({F.name},{G.name})", F.source_ring, F.target_field,
        lambda n: F._obj(n) + G._obj(n), arrow_map, labels, F.max_dim,
    )


def reduced(F: Functor) -> Functor:
    """Red(F): the complement of F(0) inside F(M), split off by F(M -> 0 -> M)."""
    ring, field = F.source_ring, F.target_field
    cache: dict[int, tuple[ExactMatrix, ExactMatrix]] = {}

    def pieces(n):
        if n not in cache:
            e = F.identity(n) - F.apply(ExactMatrix.zeros(ring, n, n))
            B = column_space(e)
            cache[n] = (B, left_inverse(B))
        return cache[n]

    def obj(n):
        return F._obj(n) - F._obj(0)

    def arrow_map(alpha):
        B_src, _ = pieces(alpha.cols)
        _, L_tgt = pieces(alpha.rows)
        return L_tgt @ F.apply(alpha) @ B_src

    name = "RedU" if F.name == "U" else f"Red({F.name})"
    return Functor(name, ring, field, obj, arrow_map, None, F.max_dim)


# descriptors --------------------------------------------------------------

_ATOMS = ("U", "RedU", "Zero", "T1", "T2", "T3", "S2", "L2")


def parse_spec(text: str):
    """Parse a descriptor into a nested tuple, e.g. ``("Sum", "U", ("Red", "T2"))``."""
    tokens = re.findall(r"[A-Za-z0-9]+|[(),]", text)
    if "".join(tokens) != re.sub(r"\s+", "", text):
        raise FunctorError(f"cannot parse functor descriptor {text!r}")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise FunctorError(f"unexpected end of descriptor {text!r}")
        tok = tokens[pos]
        pos += 1
        if tok in _ATOMS:
            return tok
        if tok in ("Sum", "Red"):
            arity = 2 if tok == "Sum" else 1
            if pos >= len(tokens) or tokens[pos] != "(":
                raise FunctorError(f"{tok} expects arguments in {text!r}")
            pos += 1
            args = [parse()]
            while len(args) < arity:
                if tokens[pos] != ",":
                    raise FunctorError(f"{tok} expects {arity} arguments in {text!r}")
                pos += 1
                args.append(parse())
            if pos >= len(tokens) or tokens[pos] != ")":
                raise FunctorError(f"unbalanced parentheses in {text!r}")
            pos += 1
            return (tok, *args)
        raise FunctorError(f"unknown functor descriptor {tok!r}")

    tree = parse()
    if pos != len(tokens):
        raise FunctorError(f"trailing input in descriptor {text!r}")
    return tree


def format_spec(tree) -> str:
    if isinstance(tree, str):
        return tree
    head, *args = tree
    return f"{head}({','.join(format_spec(a) for a in args)})"


def build(spec: str, ring: RingSpec, field: RingSpec, max_dim: int | None = DEFAULT_MAX_DIM,
          check_laws: bool = True) -> Functor:
    """Build a functor from a descriptor and spot-check its laws."""

    def make(tree):
        if tree == "U":
            return linearization(ring, field, max_dim)
        if tree == "RedU":
            return reduced(linearization(ring, field, max_dim))
        if tree == "Zero":
            return zero_functor(ring, field, max_dim)
        if tree in ("T1", "T2", "T3"):
            return tensor_power(ring, field, int(tree[1]), max_dim)
        if tree == "S2":
            return symmetric_square(ring, field, max_dim)
        if tree == "L2":
            return exterior_square(ring, field, max_dim)
        head, *args = tree
        if head == "Sum":
            return sum_functor(make(args[0]), make(args[1]))
        return reduced(make(args[0]))

    if not field.is_field:
        raise FunctorError(f"target {field} must be a prime field")
    F = make(parse_spec(spec))
    F.spec = format_spec(parse_spec(spec))
    if check_laws:
        rng = np.random.default_rng(0)
        max_arity = 0
        while max_arity < 2 and F._obj(max_arity + 1) <= (max_dim or 64):
            max_arity += 1
        bad = law_violations(F, rng, samples=5, max_arity=max_arity)
        if bad:
            raise FunctorError(f"{spec} violates the functor laws: {bad[0]}")
    return F


# natural transformations --------------------------------------------------


class NatTransform:
    """A family eta_n: F(Omega^n) -> G(Omega^n) indexed by arity."""

    def __init__(self, name: str, source: Functor, target: Functor, component: Callable[[int], ExactMatrix]):
        self.name = name
        self.source = source
        self.target = target
        self._component = component

    def __call__(self, n: int) -> ExactMatrix:
        return self._component(n)

    def naturality_holds(self, alpha: ExactMatrix) -> bool:
        m, n = alpha.shape
        return self(m) @ self.source.apply(alpha) == self.target.apply(alpha) @ self(n)


def nat_transform(name: str, F: Functor, G: Functor) -> NatTransform:
    """Built-in transformations ``sym: T2->S2``, ``alt: T2->L2`` and ``id``."""
    key = name.split(":")[0].strip()
    field = G.target_field
    if key == "id":
        if F is not G and getattr(F, "spec", F.name) != getattr(G, "spec", G.name):
            raise FunctorError("id needs equal source and target functors")
        return NatTransform("id", F, G, lambda n: F.identity(n))
    expected = {"sym": ("T2", "S2"), "alt": ("T2", "L2")}
    if key not in expected or (F.name, G.name) != expected[key]:
        raise FunctorError(f"unsupported natural transformation {name!r} from {F.name} to {G.name}")
    if F.source_ring != G.source_ring:
        raise FunctorError("natural transformation between functors on different rings")

    def component(n):
        proj, _ = G.quotient_maps(n)
        return ExactMatrix(field, proj.reshape(G.obj(n), F.obj(n)))

    return NatTransform(f"{key}: T2->{G.name}", F, G, component)


# user-supplied tables -----------------------------------------------------


def _all_arrows(ring: RingSpec, rows: int, cols: int):
    for entries in itertools.product(range(ring.modulus), repeat=rows * cols):
        yield ExactMatrix(ring, np.array(entries, dtype=np.int64).reshape(rows, cols))


def table_functor(table: dict, max_table: int = 20000, samples: int = 20) -> Functor:
    """Functor from JSON ``{"ring", "field", "obj", "generators"}``.

    ``generators`` is a list of ``{"arrow": matrix, "image": matrix}``.  The
    table is closed under composition among arities ``0..len(obj)-1``
    (identities are added), rejected on any inconsistency, and the laws are
    then sampled.  Arrows outside the closure raise :class:`FunctorError`.
    """
    ring = RingSpec.parse(table["ring"])
    field = RingSpec.parse(table["field"])
    dims = [int(d) for d in table["obj"]]
    top = len(dims) - 1
    known: dict = {}

    def add(arrow: ExactMatrix, image: ExactMatrix) -> bool:
        if arrow.ring != ring or image.ring != field:
            raise FunctorError("table entry over the wrong ring")
        if arrow.rows > top or arrow.cols > top:
            raise FunctorError(f"arrow {arrow.shape} exceeds the tabulated arities 0..{top}")
        if image.shape != (dims[arrow.rows], dims[arrow.cols]):
            raise FunctorError(f"image of a {arrow.shape} arrow must be {dims[arrow.rows]}x{dims[arrow.cols]}")
        old = known.get(arrow.key())
        if old is not None:
            if old[1] != image:
                raise FunctorError(f"inconsistent table: two images for {arrow.to_json()}")
            return False
        known[arrow.key()] = (arrow, image)
        return True

    for n in range(top + 1):
        add(ExactMatrix.identity(ring, n), ExactMatrix.identity(field, dims[n]))
    for entry in table.get("generators", []):
        add(ExactMatrix.from_json(entry["arrow"]), ExactMatrix.from_json(entry["image"]))

    frontier = list(known.values())
    while frontier:
        new = []
        everything = list(known.values())
        for a, fa in frontier:
            for b, fb in everything:
                for (x, fx), (y, fy) in (((a, fa), (b, fb)), ((b, fb), (a, fa))):
                    if x.cols == y.rows and add(x @ y, fx @ fy):
                        new.append(known[(x @ y).key()])
        if len(known) > max_table:
            raise GuardError(f"table closure exceeds {max_table} arrows")
        frontier = new

    def arrow_map(alpha):
        hit = known.get(alpha.key())
        if hit is None:
            raise FunctorError(f"arrow {alpha.to_json()} is not generated by the table")
        return hit[1]

    def obj(n):
        if n > top:
            raise FunctorError(f"table only covers arities 0..{top}")
        return dims[n]

    F = Functor(table.get("name", "Table"), ring, field, obj, arrow_map, None, None)
    F.spec = F.name
    F.table_arrows = [v[0] for v in known.values()]
    rng = np.random.default_rng(0)
    arrows = F.table_arrows
    for _ in range(samples):
        a = arrows[int(rng.integers(len(arrows)))]
        partners = [b for b in arrows if b.rows == a.cols]
        b = partners[int(rng.integers(len(partners)))]
        if F.apply(a @ b) != F.apply(a) @ F.apply(b):
            raise FunctorError("table violates the composition law")
    return F


def functor_to_table(F: Functor, top: int) -> dict:
    """Tabulate every arrow of arity <= ``top`` (tiny rings only)."""
    gens = []
    for m in range(top + 1):
        for n in range(top + 1):
            for alpha in _all_arrows(F.source_ring, m, n):
                gens.append({"arrow": alpha.to_json(), "image": F.apply(alpha).to_json()})
    return {
        "name": getattr(F, "spec", F.name),
        "ring": str(F.source_ring),
        "field": str(F.target_field),
        "obj": [F.obj(n) for n in range(top + 1)],
        "generators": gens,
    }


__all__ = [
    "AlgebraError", "Functor", "FunctorError", "GuardError", "NatTransform", "build",
    "exterior_square", "format_spec", "functor_to_table", "law_violations", "linearization",
    "mat_compose", "nat_transform", "parse_spec", "random_arrow", "reduced", "sum_functor",
    "symmetric_square", "table_functor", "tensor_power", "zero_functor",
]
