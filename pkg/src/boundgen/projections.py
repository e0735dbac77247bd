"""Projections in M_d(C): lattice meet, supports of unitaries, conjugators.

A :class:`Projection` keeps an orthonormal basis of its range next to the
matrix, so ranks and normalized traces are exact integers and rationals.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidInput,
    NotAProjection,
    NotSubprojection,
    NotUnitary,
    RankMismatch,
)
from .matrix_core import (
    DEFAULT_TOL,
    adjoint,
    as_matrix,
    fix_phases,
    hermitian_eigendecompose,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    unitarity_residual,
)


@dataclass(frozen=True, eq=False)
class Projection:
    """Orthogonal projection onto the span of ``basis`` (orthonormal columns)."""

    basis: np.ndarray
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def from_basis(cls, basis):
        b = np.asarray(basis, dtype=np.complex128)
        if b.ndim != 2:
            raise InvalidInput("basis must be a 2-d array")
        return cls(b, b @ adjoint(b))

    @classmethod
    def zero(cls, dim):
        return cls.from_basis(np.zeros((dim, 0), dtype=np.complex128))

    @classmethod
    def identity(cls, dim):
        return cls.from_basis(np.eye(dim, dtype=np.complex128))

    @classmethod
    def coordinate(cls, dim, indices):
        """Projection onto the span of the listed standard basis vectors."""
        e = np.eye(dim, dtype=np.complex128)
        return cls.from_basis(e[:, list(indices)])

    @classmethod
    def from_matrix(cls, a, tol=DEFAULT_TOL):
        a = as_matrix(a)
        herm = operator_norm(a - adjoint(a))
        idem = operator_norm(a @ a - a)
        if herm > tol.tol_projection or idem > tol.tol_projection:
            raise NotAProjection(
                f"||p - p*|| = {herm:.2e}, ||p^2 - p|| = {idem:.2e} exceed {tol.tol_projection:.1e}"
            )
        w, v = hermitian_eigendecompose(a)
        if np.any((w > 0.1) & (w < 0.9)):
            raise NotAProjection("eigenvalue strictly inside (0.1, 0.9): rank ambiguous")
        keep = w > 0.5
        return cls(v[:, keep], a)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def trace(self):
        """Normalized trace rank/dim as an exact rational."""
        return Fraction(self.rank, self.dim)

    def complement(self):
        w, v = hermitian_eigendecompose(np.eye(self.dim) - self.matrix)
        return Projection(v[:, w > 0.5], np.eye(self.dim) - self.matrix)

    def orthogonal_sum(self, other, tol=DEFAULT_TOL):
        _same_dim(self, other)
        overlap = operator_norm(self.matrix @ other.matrix)
        if overlap > tol.tol_residual:
            raise NotSubprojection(f"projections not orthogonal: ||pq|| = {overlap:.2e}")
        return Projection.from_basis(np.hstack([self.basis, other.basis]))

    def leq(self, other, tol=DEFAULT_TOL):
        """True when self is a subprojection of other (residual ||q p - p||)."""
        _same_dim(self, other)
        return operator_norm(other.matrix @ self.basis - self.basis) <= tol.tol_residual

    def is_orthogonal(self, other, tol=DEFAULT_TOL):
        return operator_norm(adjoint(self.basis) @ other.basis) <= tol.tol_residual

    def distance(self, other):
        return operator_norm(self.matrix - other.matrix)

    def leading(self, k):
        """Subprojection spanned by the first k basis vectors."""
        return Projection.from_basis(self.basis[:, :k])

    def conjugated(self, u):
        """u p u* computed through the basis, so rank is preserved exactly."""
        return Projection.from_basis(u @ self.basis)

    def to_json(self):
        obj = matrix_to_json(self.matrix)
        obj["rank"] = self.rank
        return obj

    @classmethod
    def from_json(cls, obj, tol=DEFAULT_TOL):
        p = cls.from_matrix(matrix_from_json(obj), tol)
        if "rank" in obj and int(obj["rank"]) != p.rank:
            raise InvalidInput(f"stated rank {obj['rank']} != measured rank {p.rank}")
        return p


@dataclass(frozen=True)
class CornerContext:
    """Restricts constructions to G(c): identity on the complement of ``corner``."""

    corner: Projection

    @property
    def dim(self):
        return self.corner.dim


def _same_dim(p, q):
    if p.dim != q.dim:
        raise DimensionMismatch(f"dimensions {p.dim} and {q.dim} differ")


def meet(p, q, tol=DEFAULT_TOL):
    """Projection onto the intersection of the ranges of ``p`` and ``q``."""
    _same_dim(p, q)
    w, v = hermitian_eigendecompose(p.matrix + q.matrix)
    return Projection.from_basis(v[:, w >= 2.0 - tol.tol_meet])


def fixed_space_basis(u, cutoff):
    """Orthonormal basis of {x : u x = x} up to singular values <= cutoff."""
    d = u.shape[0]
    _, s, vh = np.linalg.svd(u - np.eye(d))
    null = vh[s <= cutoff].conj().T
    return fix_phases(null)


def support_of(u, tol=DEFAULT_TOL):
    """1 minus the projection onto the fixed-point space of the unitary ``u``."""
    u = as_matrix(u)
    res = unitarity_residual(u)
    if res > tol.tol_unitary:
        raise NotUnitary(f"||u u* - 1|| = {res:.3e}")
    fixed = Projection.from_basis(fixed_space_basis(u, tol.tol_residual))
    return fixed.complement()


def support_residual(g, e):
    """||g(1-e) - (1-e)||: zero exactly when supp g <= e."""
    off = np.eye(e.dim) - e.matrix
    return operator_norm(g @ off - off)


def in_corner(g, e, tol=DEFAULT_TOL):
    return support_residual(g, e) <= tol.tol_residual


def _corner_bases(q, c, tol):
    """Bases of qH, (c-q)H from one eigendecomposition of c + q."""
    w, v = hermitian_eigendecompose(c.matrix + q.matrix)
    bad = ((w > 0.1) & (w < 0.9)) | ((w > 1.1) & (w < 1.9)) | (w > 2.1)
    if np.any(bad):
        raise NotSubprojection("projection is not a subprojection of the corner")
    top = v[:, w >= 1.5]
    mid = v[:, (w > 0.5) & (w < 1.5)]
    if top.shape[1] != q.rank:
        raise NotSubprojection("projection is not a subprojection of the corner")
    return top, mid


def conjugator(p, q, ctx, tol=DEFAULT_TOL):
    """Unitary w in G(c) with w p w* = q, built by pairing eigen-sorted bases."""
    c = ctx.corner
    _same_dim(p, q)
    _same_dim(p, c)
    if p.rank != q.rank:
        raise RankMismatch(f"rank {p.rank} != rank {q.rank}")
    for name, x in (("p", p), ("q", q)):
        if not x.leq(c, tol):
            raise NotSubprojection(f"{name} is not below the corner")
    d = c.dim
    if p.distance(q) <= tol.tol_residual:
        return np.eye(d, dtype=np.complex128)
    bp, bcp = _corner_bases(p, c, tol)
    bq, bcq = _corner_bases(q, c, tol)
    w = bq @ adjoint(bp) + bcq @ adjoint(bcp) + (np.eye(d) - c.matrix)
    return w


def symmetry_from(q, ctx, tol=DEFAULT_TOL):
    """The symmetry 1 - 2q; requires q <= c."""
    if not q.leq(ctx.corner, tol):
        raise NotSubprojection("q is not below the corner")
    return np.eye(q.dim) - 2.0 * q.matrix


def corner_trace(s, c):
    """Unnormalized trace of c s c."""
    return complex(np.trace(c.matrix @ s @ c.matrix))
