"""Exact arithmetic over Z/m and F_p.

Dense matrices with canonical residues, Gauss-Jordan reduction over prime
fields, and the canonical arrows of a category of free modules: injections,
retractions, sums, direct sums and transportations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Keeps every dot product of rows of length <= 2**10 inside int64.
MAX_MODULUS = 2**26


class AlgebraError(ValueError):
    """Raised on ring or dimension mismatches and unsupported operations."""


class NotInSpan(AlgebraError):
    """Raised by :func:`coords_in_span` when a vector lies outside a span."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """The ring Z/m, or the prime field F_p when ``kind == "fp"``.

    Two specs compare equal when their moduli agree; ``zmod:3`` and ``fp:3``
    denote the same ring.
    """

    modulus: int
    kind: str = field(default="zmod", compare=False)

    def __post_init__(self):
        if self.kind not in ("zmod", "fp"):
            raise AlgebraError(f"unknown ring kind {self.kind!r}")
        if not isinstance(self.modulus, (int, np.integer)) or self.modulus < 2:
            raise AlgebraError(f"modulus must be an integer >= 2, got {self.modulus!r}")
        if self.modulus >= MAX_MODULUS:
            raise AlgebraError(f"modulus {self.modulus} too large (limit {MAX_MODULUS})")
        if self.kind == "fp" and not _is_prime(int(self.modulus)):
            raise AlgebraError(f"fp:{self.modulus} is not a prime field")
        object.__setattr__(self, "modulus", int(self.modulus))

    @classmethod
    def zmod(cls, m: int) -> "RingSpec":
        return cls(m, "zmod")

    @classmethod
    def fp(cls, p: int) -> "RingSpec":
        return cls(p, "fp")

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        """Parse ``"zmod:4"`` or ``"fp:3"``."""
        match = re.fullmatch(r"\s*(zmod|fp)\s*:\s*(\d+)\s*", str(text))
        if not match:
            raise AlgebraError(f"cannot parse ring {text!r}; expected zmod:m or fp:p")
        return cls(int(match.group(2)), match.group(1))

    @property
    def is_field(self) -> bool:
        return _is_prime(self.modulus)

    @property
    def size(self) -> int:
        return self.modulus

    def elements(self) -> range:
        return range(self.modulus)

    def reduce(self, value: int) -> int:
        return int(value) % self.modulus

    def inverse(self, value: int) -> int:
        try:
            return pow(int(value), -1, self.modulus)
        except ValueError:
            raise AlgebraError(f"{value} is not invertible modulo {self.modulus}") from None

    def __str__(self) -> str:
        return f"{self.kind}:{self.modulus}"


class ExactMatrix:
    """Immutable dense matrix over a :class:`RingSpec`.

    Entries are stored as canonical residues in ``[0, m)``.  Supports ``@``
    (composition), ``+``, ``-``, integer scaling, equality and hashing.
    """

    __slots__ = ("ring", "data", "_key")

    def __init__(self, ring: RingSpec, data, shape: tuple[int, int] | None = None):
        arr = np.array(data, dtype=np.int64)
        if shape is not None:
            arr = arr.reshape(shape)
        elif arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise AlgebraError(f"matrix data must be 2-dimensional, got shape {arr.shape}")
        arr %= ring.modulus
        arr.setflags(write=False)
        self.ring = ring
        self.data = arr
        self._key = None

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "ExactMatrix":
        return cls(ring, np.eye(n, dtype=np.int64), shape=(n, n))

    @classmethod
    def zeros(cls, ring: RingSpec, rows: int, cols: int) -> "ExactMatrix":
        return cls(ring, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Sequence[Sequence[int]], cols: int | None = None):
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(ring, 0, cols or 0)
        return cls(ring, rows)

    @classmethod
    def from_columns(cls, ring: RingSpec, columns: Sequence, rows: int) -> "ExactMatrix":
        if len(columns) == 0:
            return cls.zeros(ring, rows, 0)
        return cls(ring, np.column_stack([np.asarray(c, dtype=np.int64).reshape(rows) for c in columns]))

    # basic properties -----------------------------------------------------

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, self.data.T)

    def entries(self) -> list[int]:
        return [int(v) for v in self.data.ravel()]

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]

    def is_zero(self) -> bool:
        return not self.data.any()

    def key(self) -> tuple:
        """Hashable fingerprint (modulus, shape, entry bytes)."""
        if self._key is None:
            self._key = (self.ring.modulus, self.data.shape, self.data.tobytes())
        return self._key

    # arithmetic -----------------------------------------------------------

    def _check_ring(self, other: "ExactMatrix"):
        if not isinstance(other, ExactMatrix):
            raise TypeError(f"expected ExactMatrix, got {type(other).__name__}")
        if other.ring != self.ring:
            raise AlgebraError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        return mat_compose(self, other)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        if self.shape != other.shape:
            raise AlgebraError(f"shape mismatch in sum: {self.shape} vs {other.shape}")
        return ExactMatrix(self.ring, self.data + other.data)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        if self.shape != other.shape:
            raise AlgebraError(f"shape mismatch in difference: {self.shape} vs {other.shape}")
        return ExactMatrix(self.ring, self.data - other.data)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, -self.data)

    def __mul__(self, scalar: int) -> "ExactMatrix":
        if not isinstance(scalar, (int, np.integer)):
            return NotImplemented
        return ExactMatrix(self.ring, self.data * (int(scalar) % self.ring.modulus))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"ExactMatrix({self.ring}, {self.data.tolist()})"

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {"ring": str(self.ring), "rows": self.rows, "cols": self.cols, "entries": self.entries()}

    @classmethod
    def from_json(cls, obj: dict) -> "ExactMatrix":
        ring = RingSpec.parse(obj["ring"])
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = list(obj.get("entries", []))
        if len(entries) != rows * cols:
            raise AlgebraError(f"expected {rows * cols} entries, got {len(entries)}")
        return cls(ring, np.array(entries, dtype=np.int64).reshape(rows, cols))


def mat_compose(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Matrix product ``a @ b`` (the arrow ``a`` after ``b``)."""
    a._check_ring(b)
    if a.cols != b.rows:
        raise AlgebraError(f"cannot compose {a.shape} after {b.shape}")
    return ExactMatrix(a.ring, a.data @ b.data)


# canonical arrows ---------------------------------------------------------


def _position(index_set: Sequence, element) -> int:
    try:
        return list(index_set).index(element)
    except ValueError:
        raise AlgebraError(f"{element!r} is not an element of {list(index_set)!r}") from None


def injection(ring: RingSpec, X: Sequence, x) -> ExactMatrix:
    """The injection of the summand ``x`` into Omega^X, a |X| x 1 matrix."""
    data = np.zeros((len(X), 1), dtype=np.int64)
    data[_position(X, x), 0] = 1
    return ExactMatrix(ring, data)


def retraction(ring: RingSpec, X: Sequence, x) -> ExactMatrix:
    """The retraction of Omega^X onto the summand ``x``, a 1 x |X| matrix."""
    data = np.zeros((1, len(X)), dtype=np.int64)
    data[0, _position(X, x)] = 1
    return ExactMatrix(ring, data)


def transport_sigma(ring: RingSpec, X: Sequence, Y: Sequence, x, y) -> ExactMatrix:
    """sigma_xy = injection(X, x) @ retraction(Y, y): Omega^Y -> Omega^X."""
    return injection(ring, X, x) @ retraction(ring, Y, y)


def block_injection(ring: RingSpec, parts: Sequence[int], i: int) -> ExactMatrix:
    """Injection of the i-th block Omega^{parts[i]} into Omega^{sum(parts)}."""
    total = sum(parts)
    start = sum(parts[:i])
    data = np.zeros((total, parts[i]), dtype=np.int64)
    data[start:start + parts[i], :] = np.eye(parts[i], dtype=np.int64)
    return ExactMatrix(ring, data)


def block_retraction(ring: RingSpec, parts: Sequence[int], i: int) -> ExactMatrix:
    return block_injection(ring, parts, i).T


def complement_retraction(ring: RingSpec, parts: Sequence[int], j: int) -> ExactMatrix:
    """Retraction of Omega^{sum(parts)} onto the sum of all blocks except ``j``."""
    total = sum(parts)
    keep = [r for i, m in enumerate(parts) for r in range(sum(parts[:i]), sum(parts[:i]) + m) if i != j]
    data = np.zeros((len(keep), total), dtype=np.int64)
    for row, col in enumerate(keep):
        data[row, col] = 1
    return ExactMatrix(ring, data)


def subset_retraction(ring: RingSpec, n: int, subset: Sequence[int]) -> ExactMatrix:
    """Retraction Omega^n -> Omega^subset for a sorted list of positions."""
    data = np.zeros((len(subset), n), dtype=np.int64)
    for row, col in enumerate(subset):
        data[row, col] = 1
    return ExactMatrix(ring, data)


def diagonal_projection(ring: RingSpec, n: int, subset: Iterable[int]) -> ExactMatrix:
    """The idempotent endomorphism of Omega^n keeping the listed summands."""
    data = np.zeros((n, n), dtype=np.int64)
    for i in subset:
        data[i, i] = 1
    return ExactMatrix(ring, data)


def arrow_sum(arrows: Sequence[ExactMatrix]) -> ExactMatrix:
    """The sum of arrows with common target: horizontal concatenation."""
    if not arrows:
        raise AlgebraError("arrow_sum of an empty family needs an explicit target; use ExactMatrix.zeros")
    ring = arrows[0].ring
    rows = arrows[0].rows
    for a in arrows[1:]:
        arrows[0]._check_ring(a)
        if a.rows != rows:
            raise AlgebraError(f"arrow_sum row mismatch: {rows} vs {a.rows}")
    return ExactMatrix(ring, np.hstack([a.data for a in arrows]).reshape(rows, sum(a.cols for a in arrows)))


def direct_sum(arrows: Sequence[ExactMatrix]) -> ExactMatrix:
    """Block-diagonal matrix alpha_1 (+) ... (+) alpha_k."""
    if not arrows:
        raise AlgebraError("direct_sum of an empty family")
    ring = arrows[0].ring
    for a in arrows[1:]:
        arrows[0]._check_ring(a)
    rows = sum(a.rows for a in arrows)
    cols = sum(a.cols for a in arrows)
    data = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for a in arrows:
        data[r:r + a.rows, c:c + a.cols] = a.data
        r += a.rows
        c += a.cols
    return ExactMatrix(ring, data)


def kronecker(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    a._check_ring(b)
    return ExactMatrix(a.ring, np.kron(a.data, b.data).reshape(a.rows * b.rows, a.cols * b.cols))


# Gauss-Jordan over F_p ----------------------------------------------------


def _require_field(ring: RingSpec):
    if not ring.is_field:
        raise AlgebraError(f"{ring} is not a field; kernels and images need a prime modulus")


def rref(M: ExactMatrix) -> tuple[ExactMatrix, list[int], int]:
    """Reduced row echelon form over F_p.

    Returns:
        (R, pivots, rank) where ``pivots`` lists the pivot column indices.
    """
    _require_field(M.ring)
    p = M.ring.modulus
    R = M.data.copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        others = np.nonzero(R[:, c])[0]
        for i in others:
            if i != r:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return ExactMatrix(M.ring, R), pivots, len(pivots)


def rank(M: ExactMatrix) -> int:
    return rref(M)[2]


def kernel_basis(M: ExactMatrix) -> list[np.ndarray]:
    """Basis of the right null space {v : M v = 0}, one array per vector."""
    R, pivots, _ = rref(M)
    p = M.ring.modulus
    free = [c for c in range(M.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(M.cols, dtype=np.int64)
        v[f] = 1
        for row, pc in enumerate(pivots):
            v[pc] = (-R.data[row, f]) % p
        basis.append(v)
    return basis


def column_space(M: ExactMatrix) -> ExactMatrix:
    """Canonical basis of the column space, as the columns of a matrix.

    The basis is the transposed reduced row echelon form of ``M.T``, so it
    depends only on the subspace, not on the spanning set.
    """
    R, _, r = rref(M.T)
    return ExactMatrix(M.ring, R.data[:r].T.reshape(M.rows, r))


def image_basis(M: ExactMatrix) -> list[np.ndarray]:
    B = column_space(M)
    return [B.data[:, j].copy() for j in range(B.cols)]


def kernel_matrix(M: ExactMatrix) -> ExactMatrix:
    return ExactMatrix.from_columns(M.ring, kernel_basis(M), M.cols)


def left_inverse(B: ExactMatrix) -> ExactMatrix:
    """A matrix L with L @ B = identity, for B with independent columns."""
    _require_field(B.ring)
    _, rows_used, r = rref(B.T)
    if r != B.cols:
        raise AlgebraError("columns are not independent; no left inverse")
    square = ExactMatrix(B.ring, B.data[rows_used, :].reshape(r, r))
    inv = inverse(square)
    data = np.zeros((B.cols, B.rows), dtype=np.int64)
    data[:, rows_used] = inv.data
    return ExactMatrix(B.ring, data)


def inverse(M: ExactMatrix) -> ExactMatrix:
    if M.rows != M.cols:
        raise AlgebraError(f"cannot invert a {M.shape} matrix")
    n = M.rows
    aug = ExactMatrix(M.ring, np.hstack([M.data, np.eye(n, dtype=np.int64)]).reshape(n, 2 * n))
    R, pivots, _ = rref(aug)
    if pivots[:n] != list(range(n)):
        raise AlgebraError("matrix is singular")
    return ExactMatrix(M.ring, R.data[:, n:])


def coords_in_span(basis: ExactMatrix | Sequence, v) -> np.ndarray:
    """Unique coefficients c with basis @ c = v.

    ``basis`` is a matrix whose columns are independent (or a list of
    columns).  Raises :class:`NotInSpan` when ``v`` is outside the span.
    """
    B = basis if isinstance(basis, ExactMatrix) else None
    if B is None:
        raise AlgebraError("coords_in_span needs an ExactMatrix basis")
    _require_field(B.ring)
    v = np.asarray(v.data if isinstance(v, ExactMatrix) else v, dtype=np.int64).reshape(-1) % B.ring.modulus
    if v.shape[0] != B.rows:
        raise AlgebraError(f"vector of length {v.shape[0]} against basis of length {B.rows}")
    aug = ExactMatrix(B.ring, np.column_stack([B.data, v]).reshape(B.rows, B.cols + 1))
    R, pivots, _ = rref(aug)
    if B.cols in pivots:
        raise NotInSpan("vector is not in the span of the basis")
    if len(pivots) != B.cols:
        raise AlgebraError("basis columns are not independent")
    return R.data[: B.cols, B.cols].copy()


def in_span(basis: ExactMatrix, v) -> bool:
    try:
        coords_in_span(basis, v)
    except NotInSpan:
        return False
    return True


def subspace_contains(big: ExactMatrix, small: ExactMatrix) -> bool:
    """True when every column of ``small`` lies in the column span of ``big``."""
    if small.cols == 0:
        return True
    if big.cols == 0:
        return small.is_zero()
    return rank(arrow_sum([big, small])) == rank(big)
