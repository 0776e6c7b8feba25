"""Mazes over Z/m and their formal integer combinations.

A maze from a finite set Z to a finite set X is a multiset of labelled
passages ``x <- z``; every element of X and of Z must be touched by some
passage and no label may vanish, otherwise the maze is the zero morphism.
Composition matches passages through the middle set and sums over every
covering choice of matched pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import ExactMatrix, RingSpec


class LabyError(ValueError):
    """Malformed mazes, mismatched endpoints or inconsistent rewrites."""


class PassageGuardError(LabyError):
    """A maze exceeds the configured passage bound."""


@dataclass(frozen=True, order=True)
class Passage:
    to: str
    source: str
    label: int

    def to_json(self) -> dict:
        return {"to": self.to, "from": self.source, "label": self.label}


class Maze:
    """A canonical maze: endpoints plus a sorted passage multiset.

    Build mazes with :func:`normalize`, which also handles the degenerate
    cases that collapse to zero.
    """

    __slots__ = ("ring", "source", "target", "passages", "_hash")

    def __init__(self, ring: RingSpec, source: Sequence[str], target: Sequence[str],
                 passages: Iterable[Passage]):
        self.ring = ring
        self.source = tuple(source)
        self.target = tuple(target)
        tpos = {x: i for i, x in enumerate(self.target)}
        spos = {z: i for i, z in enumerate(self.source)}
        self.passages = tuple(sorted(passages, key=lambda p: (tpos[p.to], spos[p.source], p.label)))
        self._hash = hash((ring.modulus, self.source, self.target, self.passages))

    def __len__(self):
        return len(self.passages)

    def __eq__(self, other):
        if not isinstance(other, Maze):
            return NotImplemented
        return (self.ring == other.ring and self.source == other.source
                and self.target == other.target and self.passages == other.passages)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (len(self.passages), tuple((p.to, p.source, p.label) for p in self.passages))

    def __repr__(self):
        inner = ", ".join(f"{p.to}<-{p.source}:{p.label}" for p in self.passages)
        return f"Maze({list(self.source)} -> {list(self.target)}: {inner})"

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "source": list(self.source),
            "target": list(self.target),
            "passages": [p.to_json() for p in self.passages],
        }


class MazeSum:
    """A formal Z-linear combination of canonical mazes with common endpoints."""

    __slots__ = ("ring", "source", "target", "terms")

    def __init__(self, ring: RingSpec, source: Sequence[str], target: Sequence[str],
                 terms: Mapping[Maze, int] | None = None):
        self.ring = ring
        self.source = tuple(source)
        self.target = tuple(target)
        clean = {}
        for maze, coeff in (terms or {}).items():
            if maze.source != self.source or maze.target != self.target:
                raise LabyError(f"term {maze!r} does not run {self.source} -> {self.target}")
            if coeff:
                clean[maze] = clean.get(maze, 0) + int(coeff)
        self.terms = {m: c for m, c in sorted(clean.items(), key=lambda kv: kv[0].sort_key()) if c}

    @classmethod
    def zero(cls, ring, source, target) -> "MazeSum":
        return cls(ring, source, target)

    @classmethod
    def single(cls, maze: Maze, coeff: int = 1) -> "MazeSum":
        return cls(maze.ring, maze.source, maze.target, {maze: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return self.terms.items()

    def __len__(self):
        return len(self.terms)

    def _check(self, other: "MazeSum"):
        if not isinstance(other, MazeSum):
            raise TypeError(f"expected MazeSum, got {type(other).__name__}")
        if other.ring != self.ring or other.source != self.source or other.target != self.target:
            raise LabyError("cannot add morphisms with different endpoints or rings")

    def __add__(self, other: "MazeSum") -> "MazeSum":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return MazeSum(self.ring, self.source, self.target, terms)

    def __neg__(self) -> "MazeSum":
        return MazeSum(self.ring, self.source, self.target, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MazeSum") -> "MazeSum":
        return self + (-other)

    def __rmul__(self, k: int) -> "MazeSum":
        return MazeSum(self.ring, self.source, self.target, {m: k * c for m, c in self.terms.items()})

    def __matmul__(self, other: "MazeSum") -> "MazeSum":
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, MazeSum):
            return NotImplemented
        return (self.ring == other.ring and self.source == other.source
                and self.target == other.target and self.terms == other.terms)

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"MazeSum(0: {list(self.source)} -> {list(self.target)})"
        return "MazeSum(" + " + ".join(f"{c}*{m!r}" for m, c in self.terms.items()) + ")"

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "source": list(self.source),
            "target": list(self.target),
            "terms": [{"coeff": c, "maze": m.to_json()} for m, c in self.terms.items()],
        }


def normalize(ring: RingSpec, X: Sequence[str], Z: Sequence[str], passages) -> MazeSum:
    """Canonical morphism for raw passages ``(to, from, label)`` from Z to X.

    A zero label, or an element of X or Z not touched by any passage,
    makes the whole maze zero.
    """
    X, Z = tuple(X), tuple(Z)
    if len(set(X)) != len(X) or len(set(Z)) != len(Z):
        raise LabyError("endpoint sets must not repeat elements")
    xs, zs = set(X), set(Z)
    clean = []
    for p in passages:
        to, src, label = (p.to, p.source, p.label) if isinstance(p, Passage) else p
        if to not in xs:
            raise LabyError(f"passage target {to!r} is not in {list(X)}")
        if src not in zs:
            raise LabyError(f"passage source {src!r} is not in {list(Z)}")
        clean.append(Passage(to, src, ring.reduce(label)))
    if any(p.label == 0 for p in clean):
        return MazeSum.zero(ring, Z, X)
    if {p.to for p in clean} != xs or {p.source for p in clean} != zs:
        return MazeSum.zero(ring, Z, X)
    return MazeSum.single(Maze(ring, Z, X, clean))


def as_sum(m) -> MazeSum:
    return m if isinstance(m, MazeSum) else MazeSum.single(m)


def identity(ring: RingSpec, X: Sequence[str]) -> MazeSum:
    return normalize(ring, X, X, [(x, x, 1) for x in X])


def _block_covers(ps: Sequence[tuple], qs: Sequence[tuple], modulus: int) -> dict:
    """Composite passage multisets over the covers of the full relation ps x qs.

    ``ps`` holds (target index, label) and ``qs`` holds (source index, label).
    Passages of ps are processed one at a time, each choosing a non-empty
    set of partners in qs; states are (partners covered so far, multiset)
    with multiplicities, so covers giving the same multiset are merged
    instead of enumerated.  A zero label product kills the term at once.
    """
    full = (1 << len(qs)) - 1
    states = {(0, ()): 1}
    for to, lp in ps:
        options = []
        for T in range(1, full + 1):
            new = []
            for j, (src, lq) in enumerate(qs):
                if T >> j & 1:
                    label = lp * lq % modulus
                    if label == 0:
                        break
                    new.append((to, src, label))
            else:
                options.append((T, tuple(new)))
        nxt: dict = {}
        for (mask, items), c in states.items():
            for T, new in options:
                key = (mask | T, tuple(sorted(items + new)))
                nxt[key] = nxt.get(key, 0) + c
        states = nxt
    return {items: c for (mask, items), c in states.items() if mask == full}


@lru_cache(maxsize=65536)
def _compose_mazes(P: Maze, Q: Maze) -> tuple:
    """Sum over covering subsets of the matched relation, as (maze, count) pairs.

    The relation splits into one complete block per middle element, so the
    covers are products of covers of the blocks.  Every composite passage
    has a nonzero label and every endpoint is touched, so results are
    merged on integer keys and turned into mazes once per distinct key.
    """
    ring = P.ring
    xpos = {x: i for i, x in enumerate(P.target)}
    zpos = {z: i for i, z in enumerate(Q.source)}
    blocks = []
    for y in P.source:
        ps = [(xpos[p.to], p.label) for p in P.passages if p.source == y]
        qs = [(zpos[q.source], q.label) for q in Q.passages if q.to == y]
        block = _block_covers(ps, qs, ring.modulus)
        if not block:
            return ()
        blocks.append(list(block.items()))
    merged: dict = {}
    for combo in itertools.product(*blocks):
        key = tuple(sorted(item for items, _ in combo for item in items))
        count = 1
        for _, c in combo:
            count *= c
        merged[key] = merged.get(key, 0) + count
    return tuple(
        (Maze(ring, Q.source, P.target,
              [Passage(P.target[x], Q.source[z], label) for x, z, label in key]), c)
        for key, c in merged.items()
    )


def compose(P, Q, max_passages: int | None = None) -> MazeSum:
    """P after Q, extended bilinearly from single mazes.

    Labels multiply as label(p) * label(q).
    """
    P, Q = as_sum(P), as_sum(Q)
    if P.ring != Q.ring:
        raise LabyError(f"ring mismatch: {P.ring} vs {Q.ring}")
    if Q.target != P.source:
        raise LabyError(f"cannot compose: {list(Q.target)} is not {list(P.source)}")
    if max_passages is not None:
        for m in itertools.chain(P.terms, Q.terms):
            if len(m) > max_passages:
                raise PassageGuardError(f"maze with {len(m)} passages exceeds the bound {max_passages}")
    total: dict = {}
    for mp, cp in P.items():
        for mq, cq in Q.items():
            for maze, c in _compose_mazes(mp, mq):
                total[maze] = total.get(maze, 0) + cp * cq * c
    return MazeSum(P.ring, Q.source, P.target, total)


def truncate(s, n: int) -> MazeSum:
    """Drop every term with more than ``n`` passages."""
    s = as_sum(s)
    if n < 0:
        raise LabyError("truncation level must be non-negative")
    return MazeSum(s.ring, s.source, s.target, {m: c for m, c in s.items() if len(m) <= n})


# structured presentation ---------------------------------------------------


@dataclass(frozen=True)
class StructuredMaze:
    """The triple (f: Y -> X, g: Y -> Z, alpha) presentation of a maze.

    ``alpha`` is a |Y| x |Z| matrix whose entry (y, z) vanishes unless
    g(y) = z.
    """

    X: tuple
    Y: tuple
    Z: tuple
    f: tuple
    g: tuple
    alpha: ExactMatrix

    def __post_init__(self):
        X, Y, Z = self.X, self.Y, self.Z
        if len(self.f) != len(Y) or len(self.g) != len(Y):
            raise LabyError("f and g must assign a value to every element of Y")
        if set(self.f) != set(X) or set(self.g) != set(Z):
            raise LabyError("f and g must be onto")
        if self.alpha.shape != (len(Y), len(Z)):
            raise LabyError(f"structure map must be {len(Y)}x{len(Z)}, got {self.alpha.shape}")
        zpos = {z: i for i, z in enumerate(Z)}
        for yi in range(len(Y)):
            for zi in range(len(Z)):
                if zi != zpos[self.g[yi]] and self.alpha.data[yi, zi] != 0:
                    raise LabyError(f"structure map has support outside g at ({Y[yi]}, {Z[zi]})")

    @property
    def ring(self):
        return self.alpha.ring

    def labels(self) -> list[int]:
        zpos = {z: i for i, z in enumerate(self.Z)}
        return [int(self.alpha.data[yi, zpos[self.g[yi]]]) for yi in range(len(self.Y))]


def to_structured(m: Maze) -> StructuredMaze:
    Y = tuple(f"y{i + 1}" for i in range(len(m.passages)))
    zpos = {z: i for i, z in enumerate(m.source)}
    alpha = np.zeros((len(Y), len(m.source)), dtype=np.int64)
    for i, p in enumerate(m.passages):
        alpha[i, zpos[p.source]] = p.label
    return StructuredMaze(
        m.target, Y, m.source,
        tuple(p.to for p in m.passages), tuple(p.source for p in m.passages),
        ExactMatrix(m.ring, alpha),
    )


def from_structured(s: StructuredMaze) -> MazeSum:
    raw = [(s.f[i], s.g[i], label) for i, label in enumerate(s.labels())]
    return normalize(s.ring, s.X, s.Z, raw)


# rewrites ------------------------------------------------------------------


def split_passage(m: Maze, index: int, a: int, b: int) -> MazeSum:
    """Rewrite passage ``index`` with label a + b as three mazes.

    The terms are: the passage doubled into parallel passages labelled a
    and b, the passage relabelled a, and the passage relabelled b.
    """
    return gen_split(m, {index: [a, b]})


def gen_split(m: Maze, splits: Mapping[int, Sequence[int]]) -> MazeSum:
    """Replace each listed passage by every non-empty subset of its parts.

    ``splits`` maps a passage index to labels summing to that passage's
    label; the result has one term per choice of non-empty subsets.
    """
    ring = m.ring
    choices = []
    for idx, passage in enumerate(m.passages):
        parts = splits.get(idx)
        if parts is None:
            choices.append([[passage.label]])
            continue
        parts = [ring.reduce(a) for a in parts]
        if not parts:
            raise LabyError(f"passage {idx} needs at least one part")
        if ring.reduce(sum(parts)) != passage.label:
            raise LabyError(f"parts {parts} do not sum to label {passage.label} of passage {idx}")
        options = []
        for r in range(1, len(parts) + 1):
            for subset in itertools.combinations(range(len(parts)), r):
                options.append([parts[i] for i in subset])
        choices.append(options)
    for idx in splits:
        if not 0 <= idx < len(m.passages):
            raise LabyError(f"no passage with index {idx}")
    total = MazeSum.zero(ring, m.source, m.target)
    for combo in itertools.product(*choices):
        raw = [
            (p.to, p.source, label)
            for p, labels in zip(m.passages, combo)
            for label in labels
        ]
        total = total + normalize(ring, m.target, m.source, raw)
    return total


# JSON ----------------------------------------------------------------------


def maze_from_json(obj: dict, ring: RingSpec | None = None) -> MazeSum:
    """Load a maze; normalization may yield the zero morphism."""
    ring = RingSpec.parse(obj["ring"]) if "ring" in obj else ring
    if ring is None:
        raise LabyError("maze JSON needs a ring")
    raw = [(p["to"], p["from"], int(p["label"])) for p in obj.get("passages", [])]
    return normalize(ring, [str(x) for x in obj["target"]], [str(z) for z in obj["source"]], raw)


def mazesum_from_json(obj: dict, ring: RingSpec | None = None) -> MazeSum:
    """Load either a single maze or ``{"terms": [...]}``."""
    if "terms" not in obj:
        return maze_from_json(obj, ring)
    ring = RingSpec.parse(obj["ring"]) if "ring" in obj else ring
    total = None
    for term in obj["terms"]:
        piece = int(term["coeff"]) * maze_from_json(term["maze"], ring)
        total = piece if total is None else total + piece
    if total is None:
        if ring is None or "source" not in obj or "target" not in obj:
            raise LabyError("an empty sum needs ring, source and target")
        return MazeSum.zero(ring, obj["source"], obj["target"])
    return total


# sampling ------------------------------------------------------------------


def random_maze(ring: RingSpec, X: Sequence[str], Z: Sequence[str], rng: np.random.Generator,
                extra: int = 1) -> Maze:
    """A random non-degenerate maze Z -> X with nonzero labels.

    The passage count is max(|X|, |Z|) plus up to ``extra`` additional
    passages; every endpoint is touched.
    """
    X, Z = list(X), list(Z)
    n = max(len(X), len(Z)) + int(rng.integers(0, extra + 1))
    tos = list(X) + [X[int(i)] for i in rng.integers(0, len(X), size=n - len(X))]
    froms = list(Z) + [Z[int(i)] for i in rng.integers(0, len(Z), size=n - len(Z))]
    rng.shuffle(tos)
    rng.shuffle(froms)
    labels = rng.integers(1, ring.modulus, size=n)
    return Maze(ring, Z, X, [Passage(t, f, int(l)) for t, f, l in zip(tos, froms, labels)])


def random_mazesum(ring: RingSpec, X, Z, rng: np.random.Generator, terms: int = 2, extra: int = 1) -> MazeSum:
    total = MazeSum.zero(ring, Z, X)
    for _ in range(int(rng.integers(1, terms + 1))):
        coeff = int(rng.choice([-2, -1, 1, 2]))
        total = total + coeff * MazeSum.single(random_maze(ring, X, Z, rng, extra))
    return total


def named_set(n: int, prefix: str = "") -> tuple:
    return tuple(f"{prefix}{i + 1}" for i in range(n))
