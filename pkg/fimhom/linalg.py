"""
Dense exact linear algebra over a prime field F_p.

Matrices are plain ``numpy`` int64 arrays holding canonical residues in
``[0, p)``; the modulus travels alongside in a :class:`PrimeField`.
Matrices act on column vectors (``v -> A @ v``), subspaces are stored as
row bases in reduced row echelon form.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np


logger = logging.getLogger(__name__)

_INT64_MAX = 2**63 - 1
_P_LIMIT = 2**31


class DimensionMismatchError(ValueError):
    """Raised when matrix or subspace shapes do not fit together."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p; scalars are ints in ``[0, p)``."""

    p: int

    def __post_init__(self) -> None:
        if not 2 <= self.p < _P_LIMIT:
            raise ValueError(f"field must be prime and below 2^31, got {self.p}")
        if not is_prime(self.p):
            raise ValueError(f"field must be prime, got {self.p}")

    def scalar(self, value: int) -> int:
        return int(value) % self.p

    def inv(self, value: int) -> int:
        value = int(value) % self.p
        if value == 0:
            raise ZeroDivisionError("zero has no inverse in F_%d" % self.p)
        return pow(value, -1, self.p)

    def matrix(self, values, rows: int | None = None, cols: int | None = None) -> np.ndarray:
        """Coerce nested sequences (possibly big ints) into a reduced int64 matrix."""
        arr = np.asarray(values, dtype=object)
        if arr.size == 0:
            r = rows if rows is not None else (arr.shape[0] if arr.ndim >= 1 else 0)
            c = cols if cols is not None else (arr.shape[1] if arr.ndim == 2 else 0)
            return np.zeros((r, c), dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"expected a 2-d matrix, got shape {arr.shape}")
        return (arr % self.p).astype(np.int64)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)


# PrimeScalar is a canonical residue int; PrimeMatrix an int64 ndarray.
PrimeScalar = int
PrimeMatrix = np.ndarray


def matmul(a: np.ndarray, b: np.ndarray, field: PrimeField) -> np.ndarray:
    """Product mod p; int64 while it cannot overflow, exact ints otherwise."""
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    inner = a.shape[1]
    if inner == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if (field.p - 1) ** 2 * inner <= _INT64_MAX:
        return (a @ b) % field.p
    prod = a.astype(object) @ b.astype(object)
    return (prod % field.p).astype(np.int64)


def chain(mats: Sequence[np.ndarray], field: PrimeField) -> np.ndarray:
    """Compose column maps applied left-to-right: ``mats[-1] @ ... @ mats[0]``."""
    if not mats:
        raise DimensionMismatchError("chain of no matrices has no shape")
    out = mats[0]
    for m in mats[1:]:
        out = matmul(m, out, field)
    return out


def stack_rows(blocks: Iterable[np.ndarray], width: int) -> np.ndarray:
    parts = [b for b in blocks if b.shape[0]]
    for b in parts:
        if b.shape[1] != width:
            raise DimensionMismatchError(f"row block of width {b.shape[1]}, expected {width}")
    if not parts:
        return np.zeros((0, width), dtype=np.int64)
    return np.vstack(parts)


def block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def rref(matrix: np.ndarray, field: PrimeField) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form over F_p.

    Returns ``(R, pivots)`` where ``R`` has the shape of ``matrix`` (zero rows
    at the bottom) and ``pivots`` lists the leading column of each nonzero row.
    """
    p = field.p
    R = np.array(matrix, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise DimensionMismatchError(f"rref needs a 2-d matrix, got shape {R.shape}")
    R %= p
    rows, cols = R.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidates = np.nonzero(R[r:, c])[0]
        if candidates.size == 0:
            continue
        k = r + int(candidates[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        # rows r.. vanish left of c, so only the trailing columns change
        R[r, c:] = (R[r, c:] * field.inv(R[r, c])) % p
        factors = R[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            R[hit, c:] = (R[hit, c:] - np.outer(factors[hit], R[r, c:])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank(matrix: np.ndarray, field: PrimeField) -> int:
    """Rank by forward elimination only; no echelon form is kept."""
    if matrix.shape[0] == 0 or matrix.shape[1] == 0:
        return 0
    p = field.p
    # the shorter side indexes the rows, elimination cost is rank * rows * cols either way
    R = np.array(matrix.T if matrix.shape[0] > matrix.shape[1] else matrix, dtype=np.int64, copy=True)
    R %= p
    rows, cols = R.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidates = np.nonzero(R[r:, c])[0]
        if candidates.size == 0:
            continue
        k = r + int(candidates[0])
        if k != r:
            R[[r, k], c:] = R[[k, r], c:]
        R[r, c:] = (R[r, c:] * field.inv(R[r, c])) % p
        below = r + 1 + np.nonzero(R[r + 1 :, c])[0]
        if below.size:
            R[below, c:] = (R[below, c:] - np.outer(R[below, c], R[r, c:])) % p
        r += 1
    return r


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    A subspace of F_p^d kept as a row basis that is the identity on the
    ``pivots`` columns; canonical RREF except for non-canonical kernels.
    """

    field: PrimeField
    ambient_dim: int
    basis: np.ndarray
    pivots: Tuple[int, ...]

    @classmethod
    def from_rows(cls, rows: np.ndarray, ambient_dim: int, field: PrimeField) -> "Subspace":
        if rows.shape[0] == 0:
            return cls.zero(ambient_dim, field)
        if rows.shape[1] != ambient_dim:
            raise DimensionMismatchError(
                f"vectors of length {rows.shape[1]} in ambient dimension {ambient_dim}"
            )
        R, pivots = rref(rows, field)
        return cls(field, ambient_dim, R[: len(pivots)].copy(), tuple(pivots))

    @classmethod
    def zero(cls, ambient_dim: int, field: PrimeField) -> "Subspace":
        return cls(field, ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), ())

    @classmethod
    def full(cls, ambient_dim: int, field: PrimeField) -> "Subspace":
        return cls(field, ambient_dim, np.eye(ambient_dim, dtype=np.int64), tuple(range(ambient_dim)))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.rank

    def is_zero(self) -> bool:
        return self.rank == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and np.array_equal(self.basis, other.basis)
        )

    __hash__ = None  # type: ignore[assignment]

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates (rows) of row vectors assumed to lie in the subspace."""
        return vectors[:, list(self.pivots)]

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """Row vectors minus their component along the basis, by pivot entries."""
        if self.rank == 0 or vectors.shape[0] == 0:
            return vectors % self.field.p
        return (vectors - matmul(self.coordinates(vectors), self.basis, self.field)) % self.field.p

    def contains(self, vectors: np.ndarray) -> bool:
        return not self.reduce(vectors).any()

    def plus(self, other: "Subspace") -> "Subspace":
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError("cannot add subspaces of different ambient spaces")
        return Subspace.from_rows(stack_rows([self.basis, other.basis], self.ambient_dim), self.ambient_dim, self.field)

    def image(self, matrix: np.ndarray) -> "Subspace":
        """Image under the column map ``matrix`` (shape target x ambient_dim)."""
        if matrix.shape[1] != self.ambient_dim:
            raise DimensionMismatchError(f"map of shape {matrix.shape} on dimension {self.ambient_dim}")
        rows = matmul(self.basis, matrix.T.copy(), self.field)
        return Subspace.from_rows(rows, matrix.shape[0], self.field)


def kernel_basis(matrix: np.ndarray, field: PrimeField, canonical: bool = True) -> Subspace:
    """
    Null space ``{v : M v = 0}``.

    With ``canonical=False`` the basis is the one read off the RREF of M: one
    vector per free column, unit on the free columns.  It reduces and
    projects like an RREF basis but is not comparable with ``==``.
    """
    cols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return Subspace.full(cols, field)
    R, pivots = rref(matrix, field)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    if not free:
        return Subspace.zero(cols, field)
    vecs = np.zeros((len(free), cols), dtype=np.int64)
    vecs[np.arange(len(free)), free] = 1
    if pivots:
        vecs[:, pivots] = (-R[: len(pivots)][:, free].T) % field.p
    if not canonical:
        return Subspace(field, cols, vecs, tuple(free))
    return Subspace.from_rows(vecs, cols, field)


def image_basis(matrix: np.ndarray, field: PrimeField) -> Subspace:
    """Column space of ``matrix`` as a subspace of F_p^rows."""
    return Subspace.from_rows(matrix.T.copy(), matrix.shape[0], field)


def sum_and_close(
    seeds: Sequence[Subspace],
    maps: Sequence[np.ndarray],
    field: PrimeField,
    ambient_dim: int | None = None,
) -> Subspace:
    """
    Smallest subspace containing every seed and stable under every map.

    Maps are applied in the given order, one full pass at a time, until a
    pass adds no rank.
    """
    if ambient_dim is None:
        if not seeds:
            raise DimensionMismatchError("sum_and_close needs seeds or an explicit ambient_dim")
        ambient_dim = seeds[0].ambient_dim
    for s in seeds:
        if s.ambient_dim != ambient_dim:
            raise DimensionMismatchError(
                f"seed in dimension {s.ambient_dim}, expected {ambient_dim}"
            )
    for a in maps:
        if a.shape != (ambient_dim, ambient_dim):
            raise DimensionMismatchError(f"map of shape {a.shape} on dimension {ambient_dim}")

    current = Subspace.from_rows(
        stack_rows([s.basis for s in seeds], ambient_dim), ambient_dim, field
    )
    passes = 0
    while 0 < current.rank < ambient_dim:
        before = current.rank
        for a in maps:
            images = matmul(current.basis, a.T.copy(), field)
            current = Subspace.from_rows(
                stack_rows([current.basis, images], ambient_dim), ambient_dim, field
            )
        passes += 1
        if current.rank == before:
            break
    logger.debug("sum_and_close: rank %d/%d after %d pass(es)", current.rank, ambient_dim, passes)
    return current


def quotient_data(sub: Subspace) -> Tuple[np.ndarray, List[int]]:
    """
    Canonical projection onto the non-pivot coordinates modulo ``sub``.

    Returns ``(proj, complement)``: ``proj`` is ``(d - rank) x d`` and
    restricted to the complement columns it is the identity.
    """
    d = sub.ambient_dim
    pivot_set = set(sub.pivots)
    complement = [c for c in range(d) if c not in pivot_set]
    proj = np.zeros((len(complement), d), dtype=np.int64)
    if complement:
        proj[np.arange(len(complement)), complement] = 1
        if sub.rank:
            proj[:, list(sub.pivots)] = (-sub.basis[:, complement].T) % sub.field.p
    return proj, complement


__all__ = [
    "DimensionMismatchError",
    "PrimeField",
    "PrimeMatrix",
    "PrimeScalar",
    "Subspace",
    "block_diag",
    "chain",
    "image_basis",
    "is_prime",
    "kernel_basis",
    "matmul",
    "quotient_data",
    "rank",
    "rref",
    "stack_rows",
    "sum_and_close",
]
