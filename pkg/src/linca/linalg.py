"""Exact linear and affine algebra over prime fields GF(p).

Matrices are dense numpy int64 arrays with entries reduced into [0, p);
all arithmetic is exact.  Subspaces are stored through their unique reduced
row-echelon basis, affine subspaces as a canonical point plus a direction
subspace, with the point's coordinates at the direction pivots zeroed out.
Those canonical forms make set equality a structural comparison: two
subspaces (or affine subspaces) are equal as sets iff their stored data
compare equal, and the canonical point is the lexicographically smallest
member.

The single hot primitive, in-place Gauss-Jordan elimination, lives in the
kernel backends (see ``_kernels``); everything here is thin bookkeeping on
top of it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from ._kernels import rref_inplace

ENUMERATION_CAP = 200_000


class LinalgError(ValueError):
    """Invalid matrix data or incompatible dimensions."""


def require_prime(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or p < 2:
        raise LinalgError(f"modulus must be a prime integer, got {p!r}")
    if p in (2, 3):
        return p
    if p % 2 == 0:
        raise LinalgError(f"modulus {p} is not prime")
    d = 3
    while d * d <= p:
        if p % d == 0:
            raise LinalgError(f"modulus {p} is not prime")
        d += 2
    return p


def as_matrix(data, p: int) -> np.ndarray:
    """Coerce to a 2-d int64 array reduced mod p."""
    a = np.array(data, dtype=np.int64)
    if a.ndim != 2:
        raise LinalgError(f"expected a matrix, got array of ndim {a.ndim}")
    return a % p


def as_vector(data, p: int) -> np.ndarray:
    a = np.array(data, dtype=np.int64)
    if a.ndim != 1:
        raise LinalgError(f"expected a vector, got array of ndim {a.ndim}")
    return a % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact mod-p product; int64 accumulation never overflows at the
    dimensions (< 10^4) and moduli (< 2^20) in scope."""
    if a.shape[-1] != b.shape[0]:
        raise LinalgError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    return (a.astype(np.int64) @ b.astype(np.int64)) % p


def rref(mat, p: int) -> tuple[np.ndarray, tuple[int, ...], int]:
    """Reduced row-echelon form over GF(p): (matrix, pivot columns, rank)."""
    a = np.ascontiguousarray(as_matrix(mat, p))
    pivots = rref_inplace(a, p)
    return a, tuple(pivots), len(pivots)


def rank(mat, p: int) -> int:
    return rref(mat, p)[2]


def _kernel_from_rref(r: np.ndarray, pivots: Sequence[int], cols: int, p: int):
    """Right null space read off an RREF; returned as spanning rows."""
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    vecs = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        vecs[k, f] = 1
        for i, c in enumerate(pivots):
            vecs[k, c] = (-r[i, f]) % p
    return vecs


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of GF(p)^ambient stored via its RREF basis."""

    ambient: int
    p: int
    basis: np.ndarray  # dim x ambient, reduced row-echelon, read-only
    pivots: tuple[int, ...]

    @classmethod
    def from_spanning(cls, vectors, ambient: int, p: int) -> "Subspace":
        arr = np.array(list(vectors), dtype=np.int64)
        arr = (arr.reshape(0, ambient) if arr.size == 0 else arr.reshape(-1, ambient)) % p
        r, pivots, rk = rref(arr, p)
        basis = r[:rk].copy()
        basis.setflags(write=False)
        return cls(ambient, p, basis, pivots)

    @classmethod
    def zero(cls, ambient: int, p: int) -> "Subspace":
        basis = np.zeros((0, ambient), dtype=np.int64)
        basis.setflags(write=False)
        return cls(ambient, p, basis, ())

    @classmethod
    def full(cls, ambient: int, p: int) -> "Subspace":
        basis = np.eye(ambient, dtype=np.int64)
        basis.setflags(write=False)
        return cls(ambient, p, basis, tuple(range(ambient)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Residue of v modulo the subspace (pivot coordinates eliminated)."""
        w = np.array(v, dtype=np.int64) % self.p
        for i, c in enumerate(self.pivots):
            if w[c]:
                w = (w - w[c] * self.basis[i]) % self.p
        return w

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def members(self) -> Iterator[np.ndarray]:
        """All member vectors; guarded against combinatorial blowup."""
        if self.p ** self.dim > ENUMERATION_CAP:
            raise LinalgError("subspace too large to enumerate")
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            yield (np.array(coeffs, dtype=np.int64) @ self.basis) % self.p

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.p == other.p
            and np.array_equal(self.basis, other.basis)
        )

    def __repr__(self):
        return f"Subspace(ambient={self.ambient}, p={self.p}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """An affine subspace: EMPTY, or canonical point + direction subspace."""

    ambient: int
    p: int
    point: Optional[np.ndarray]
    directions: Optional[Subspace]

    @classmethod
    def empty(cls, ambient: int, p: int) -> "AffineSubspace":
        return cls(ambient, p, None, None)

    @classmethod
    def from_point_subspace(cls, point, directions: Subspace) -> "AffineSubspace":
        pt = directions.reduce(point)
        pt.setflags(write=False)
        return cls(directions.ambient, directions.p, pt, directions)

    @classmethod
    def single_point(cls, point, ambient: int, p: int) -> "AffineSubspace":
        return cls.from_point_subspace(
            as_vector(point, p), Subspace.zero(ambient, p)
        )

    @classmethod
    def full(cls, ambient: int, p: int) -> "AffineSubspace":
        return cls.from_point_subspace(
            np.zeros(ambient, dtype=np.int64), Subspace.full(ambient, p)
        )

    @property
    def is_empty(self) -> bool:
        return self.point is None

    @property
    def dim(self) -> int:
        """Dimension, with -1 denoting the empty set."""
        return -1 if self.is_empty else self.directions.dim

    def contains(self, v) -> bool:
        if self.is_empty:
            return False
        return self.directions.contains((as_vector(v, self.p) - self.point) % self.p)

    def members(self) -> Iterator[np.ndarray]:
        if self.is_empty:
            return
        for d in self.directions.members():
            yield (self.point + d) % self.p

    def __eq__(self, other):
        if not isinstance(other, AffineSubspace):
            return NotImplemented
        if self.ambient != other.ambient or self.p != other.p:
            return False
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        return np.array_equal(self.point, other.point) and self.directions == other.directions

    def __repr__(self):
        if self.is_empty:
            return f"AffineSubspace(ambient={self.ambient}, p={self.p}, EMPTY)"
        return f"AffineSubspace(ambient={self.ambient}, p={self.p}, dim={self.dim})"


def kernel_basis(mat, p: int) -> Subspace:
    """Basis of the right null space of ``mat`` over GF(p)."""
    a = as_matrix(mat, p)
    r, pivots, _ = rref(a, p)
    vecs = _kernel_from_rref(r, pivots, a.shape[1], p)
    return Subspace.from_spanning(vecs, a.shape[1], p)


def solve_affine(mat, rhs, p: int) -> AffineSubspace:
    """The full solution set {x : mat x = rhs} in canonical form."""
    a = as_matrix(mat, p)
    b = as_vector(rhs, p)
    if b.shape[0] != a.shape[0]:
        raise LinalgError(f"solve shape mismatch: {a.shape} vs rhs {b.shape}")
    kernel, points = solve_affine_multi(a, b.reshape(-1, 1), p)
    if points[0] is None:
        return AffineSubspace.empty(a.shape[1], p)
    return AffineSubspace.from_point_subspace(points[0], kernel)


def solve_affine_multi(
    mat: np.ndarray, rhs_cols: np.ndarray, p: int
) -> tuple[Subspace, list[Optional[np.ndarray]]]:
    """Solve mat x = b for every column b of ``rhs_cols`` with one
    elimination; the kernel is shared by all right-hand sides.  A column
    without a solution yields None in the returned point list."""
    a = as_matrix(mat, p)
    b = as_matrix(rhs_cols, p)
    rows, cols = a.shape
    if b.shape[0] != rows:
        raise LinalgError(f"rhs rows {b.shape[0]} do not match matrix rows {rows}")
    aug, pivots, _ = rref(np.hstack([a, b]), p)
    left_pivots = tuple(c for c in pivots if c < cols)
    rk = len(left_pivots)
    kernel = Subspace.from_spanning(
        _kernel_from_rref(aug[:, :cols], left_pivots, cols, p), cols, p
    )
    points: list[Optional[np.ndarray]] = []
    for j in range(b.shape[1]):
        col = aug[:, cols + j]
        if np.any(col[rk:]):
            points.append(None)
            continue
        x = np.zeros(cols, dtype=np.int64)
        for i, c in enumerate(left_pivots):
            x[c] = col[i]
        points.append(x)
    return kernel, points


def image_of_subspace(mat, subspace: Subspace, p: int) -> Subspace:
    """Exact image {mat s : s in subspace} as a subspace of the row space."""
    a = as_matrix(mat, p)
    if a.shape[1] != subspace.ambient:
        raise LinalgError(
            f"image shape mismatch: {a.shape} applied to ambient {subspace.ambient}"
        )
    if subspace.dim == 0:
        return Subspace.zero(a.shape[0], p)
    vecs = matmul(subspace.basis, a.T, p)
    return Subspace.from_spanning(vecs, a.shape[0], p)


def image_of_affine(mat, affine: AffineSubspace, p: int) -> AffineSubspace:
    """Exact image of an affine subspace under a linear map."""
    a = as_matrix(mat, p)
    if affine.is_empty:
        return AffineSubspace.empty(a.shape[0], p)
    point = matmul(a, affine.point.reshape(-1, 1), p).reshape(-1)
    dirs = image_of_subspace(a, affine.directions, p)
    return AffineSubspace.from_point_subspace(point, dirs)


def constrain_affine(
    affine: AffineSubspace, mat, target, p: int
) -> AffineSubspace:
    """The subset {x in affine : mat x = target}, again affine canonical.

    Solved in the parameter space of the affine set and pushed back to the
    ambient space, so the result's canonical point is the lexicographically
    smallest solution."""
    a = as_matrix(mat, p)
    t = as_vector(target, p)
    if affine.is_empty:
        return AffineSubspace.empty(affine.ambient, p)
    base = matmul(a, affine.point.reshape(-1, 1), p).reshape(-1)
    rhs = (t - base) % p
    coeff = matmul(a, affine.directions.basis.T, p)
    sols = solve_affine(coeff, rhs, p)
    if sols.is_empty:
        return AffineSubspace.empty(affine.ambient, p)
    point = (affine.point + matmul(sols.point.reshape(1, -1), affine.directions.basis, p).reshape(-1)) % p
    dir_vecs = matmul(sols.directions.basis, affine.directions.basis, p)
    dirs = Subspace.from_spanning(dir_vecs, affine.ambient, p)
    return AffineSubspace.from_point_subspace(point, dirs)
