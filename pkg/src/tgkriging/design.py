"""Design sets, trend bases and the projection matrices P and W."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RankError
from .kernel import sq_diffs

# trend bases understood by TrendBasis
CONSTANT = "constant"
AFFINE_A = "affine_a"
AFFINE = "affine"


class DesignSet:
    """n points of the unit cube; column 0 is the parameter of interest ``a``."""

    def __init__(self, points):
        pts = np.array(points, dtype=float, ndmin=2)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DomainError("a design needs at least one point and one coordinate")
        if not np.all(np.isfinite(pts)):
            raise DomainError("design coordinates must be finite")
        if np.any(pts < 0) or np.any(pts > 1):
            raise DomainError("design coordinates must lie in [0, 1]")
        uniq = np.unique(pts, axis=0)
        if uniq.shape[0] != pts.shape[0]:
            raise DomainError("design contains duplicate rows")
        pts.setflags(write=False)
        self.points = pts

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def r(self):
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"DesignSet(n={self.n}, r={self.r})"


def _points(design):
    if isinstance(design, DesignSet):
        return design.points
    return np.atleast_2d(np.asarray(design, dtype=float))


class TrendBasis:
    """Polynomial trend: constant, constant + a, or constant + every coordinate."""

    def __init__(self, kind=AFFINE_A):
        if kind not in (CONSTANT, AFFINE_A, AFFINE):
            raise DomainError(f"unknown trend basis {kind!r}")
        self.kind = kind

    def p(self, r):
        return {CONSTANT: 1, AFFINE_A: 2, AFFINE: 1 + r}[self.kind]

    def evaluate(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        ones = np.ones((points.shape[0], 1))
        if self.kind == CONSTANT:
            return ones
        if self.kind == AFFINE_A:
            return np.hstack([ones, points[:, :1]])
        return np.hstack([ones, points])

    def __repr__(self):
        return f"TrendBasis({self.kind!r})"


def _fix_signs(m):
    """Flip columns so their first nonzero entry is positive."""
    m = m.copy()
    for j in range(m.shape[1]):
        col = m[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size and col[nz[0]] < 0:
            m[:, j] = -col
    return m


def _check_rank(h, name="trend matrix"):
    n, p = h.shape
    if p >= n:
        raise RankError(f"{name}: p = {p} basis functions need n > p points, got n = {n}")
    s = np.linalg.svd(h, compute_uv=False)
    if s.size == 0 or s[-1] <= 1e-10 * s[0]:
        raise RankError(f"{name} is rank deficient (singular values {s})")


def build_H(design, basis=None):
    basis = basis or TrendBasis()
    h = basis.evaluate(_points(design))
    _check_rank(h, f"trend matrix for basis {basis.kind!r}")
    return h


def orthonormalize(h):
    """Gram-Schmidt (classical, with one reorthogonalization pass)."""
    h = np.atleast_2d(np.asarray(h, dtype=float))
    n, p = h.shape
    if p > n:
        raise RankError("more columns than rows")
    scale = np.linalg.norm(h, axis=0).max() if h.size else 1.0
    q = np.zeros_like(h)
    for j in range(p):
        v = h[:, j].copy()
        for _ in range(2):
            v -= q[:, :j] @ (q[:, :j].T @ v)
        norm = np.linalg.norm(v)
        if norm <= 1e-10 * scale:
            raise RankError(f"column {j} is linearly dependent on the previous ones")
        q[:, j] = v / norm
    return _fix_signs(q)


def null_space(h):
    """Orthonormal basis W of the complement of span(H), via SVD of H."""
    h = np.atleast_2d(np.asarray(h, dtype=float))
    _check_rank(h)
    n, p = h.shape
    u, _, _ = np.linalg.svd(h, full_matrices=True)
    return _fix_signs(u[:, p:])


@dataclass(frozen=True)
class ProjectionPair:
    P: np.ndarray
    W: np.ndarray

    @classmethod
    def from_H(cls, h):
        return cls(orthonormalize(h), null_space(h))


class Model:
    """Design, trend and projection bundled together; everything θ-free."""

    def __init__(self, design, basis=None):
        self.design = design if isinstance(design, DesignSet) else DesignSet(design)
        self.basis = basis or TrendBasis()
        self.H = build_H(self.design, self.basis)
        self.proj = ProjectionPair.from_H(self.H)
        self.sqd = sq_diffs(self.design.points)

    @property
    def points(self):
        return self.design.points

    @property
    def n(self):
        return self.design.n

    @property
    def r(self):
        return self.design.r

    @property
    def p(self):
        return self.H.shape[1]

    @property
    def W(self):
        return self.proj.W

    def __repr__(self):
        return f"Model(n={self.n}, r={self.r}, basis={self.basis.kind!r})"
