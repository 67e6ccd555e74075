"""Vertex, ray and lineality enumeration for small polyhedra.

Brute force over row subsets, batched through numpy. Intended for the low
dimensions used by subdifferential cells and 2-d grid oracles.
"""

from dataclasses import dataclass
from itertools import combinations
import math
from math import comb

import numpy as np

from .errors import InputError

_TOL = 1e-9
MAX_SUBSETS = 200_000


@dataclass(frozen=True)
class Generators:
    """``P = conv(vertices) + cone(rays) + span(lines)``."""

    vertices: np.ndarray
    rays: np.ndarray
    lines: np.ndarray


def null_space(M, tol=1e-10):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    d = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(d)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    cut = tol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return vt[rank:].T.copy()


def orth(M, tol=1e-10):
    """Orthonormal basis (columns) of the column space of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    cut = tol * max(1.0, s[0] if s.size else 0.0)
    return u[:, : int(np.sum(s > cut))].copy()


def _dedup(rows, tol):
    out = []
    for r in rows:
        if not any(np.max(np.abs(r - o)) <= tol * (1.0 + np.max(np.abs(o))) for o in out):
            out.append(r)
    return np.array(out).reshape(len(out), rows.shape[1] if rows.ndim == 2 else 0)


def _subsets(k, size):
    if comb(k, size) > MAX_SUBSETS:
        raise InputError(f"enumeration needs C({k},{size}) subsets; too many")
    return np.array(list(combinations(range(k), size)), dtype=int).reshape(-1, size)


def _pointed_generators(A, b, tol):
    """Vertices and extreme rays of a pointed ``{u : A u <= b}``."""
    k, d = A.shape
    if d == 0:
        return (np.zeros((1, 0)) if np.all(b >= -tol) else np.zeros((0, 0))), np.zeros((0, 0))
    if k < d:
        return np.zeros((0, d)), np.zeros((0, d))
    feas_tol = tol * (1.0 + np.abs(b))
    # vertices
    idx = _subsets(k, d)
    sub = A[idx]
    rhs = b[idx]
    dets = np.linalg.det(sub)
    ok = np.abs(dets) > 1e-12
    verts = []
    if np.any(ok):
        sol = np.linalg.solve(sub[ok], rhs[ok][..., None])[..., 0]
        feas = np.all(sol @ A.T <= b + feas_tol + tol * np.abs(sol) @ np.abs(A).T, axis=1)
        verts = sol[feas]
    verts = _dedup(np.asarray(verts).reshape(-1, d), 1e-8)
    # extreme rays of {A u <= 0}
    rays = []
    if d == 1:
        for s in (1.0, -1.0):
            if np.all(A[:, 0] * s <= tol):
                rays.append(np.array([s]))
    else:
        for rows in _subsets(k, d - 1):
            ns = null_space(A[rows])
            if ns.shape[1] != 1:
                continue
            r = ns[:, 0]
            for s in (1.0, -1.0):
                if np.all(A @ (s * r) <= tol):
                    rays.append(s * r)
    rays = _dedup(np.asarray(rays).reshape(-1, d), 1e-8)
    return verts, rays


def generators(A_ub, b_ub, A_eq=None, b_eq=None, tol=_TOL):
    """Return the :class:`Generators` of ``{z : A_ub z <= b_ub, A_eq z = b_eq}``,
    or ``None`` when the polyhedron is empty."""
    A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.asarray(b_ub, dtype=float).reshape(-1)
    d = A_ub.shape[1]
    A_eq = np.zeros((0, d)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)

    lines = null_space(np.vstack([A_ub, A_eq]))
    U = null_space(lines.T) if lines.shape[1] else np.eye(d)
    # equalities in U-coordinates
    if A_eq.shape[0]:
        E = A_eq @ U
        w0, *_ = np.linalg.lstsq(E, b_eq, rcond=None)
        if np.max(np.abs(E @ w0 - b_eq)) > tol * (1.0 + np.max(np.abs(b_eq))):
            return None
        N = null_space(E)
    else:
        w0 = np.zeros(U.shape[1])
        N = np.eye(U.shape[1])
    base = U @ w0
    Ared = A_ub @ U @ N
    bred = b_ub - A_ub @ base
    norms = np.linalg.norm(Ared, axis=1)
    zero = norms <= tol
    if np.any(bred[zero] < -tol * (1.0 + np.abs(b_ub[zero]))):
        return None
    Ared, bred, norms = Ared[~zero], bred[~zero], norms[~zero]
    Ared = Ared / norms[:, None]
    bred = bred / norms
    verts, rays = _pointed_generators(Ared, bred, tol)
    if verts.shape[0] == 0:
        return None
    UN = U @ N
    V = base + verts @ UN.T
    R = rays @ UN.T if rays.size else np.zeros((0, d))
    return Generators(vertices=V, rays=R, lines=lines.T.copy())


def _affine_project(x, C, d):
    """Projection of ``x`` onto ``{y : C y = d}``; ``None`` if inconsistent."""
    if C.shape[0] == 0:
        return x.copy()
    r = C @ x - d
    z, *_ = np.linalg.lstsq(C @ C.T, r, rcond=None)
    y = x - C.T @ z
    if np.linalg.norm(C @ y - d) > 1e-9 * (1.0 + np.linalg.norm(d)):
        return None
    return y


def project_polyhedron(x, A_ub, b_ub, A_eq=None, b_eq=None, tol=_TOL):
    """Euclidean projection onto ``{A_ub y <= b_ub, A_eq y = b_eq}`` in low dimension.

    The projection is the projection onto the affine hull of the face whose
    relative interior contains it, and that face is cut out by at most
    ``dim`` active rows, so enumerating row subsets and keeping the nearest
    feasible candidate is exact. Returns ``None`` for an empty polyhedron.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    A_ub = np.asarray(A_ub, dtype=float).reshape(-1, n)
    b_ub = np.asarray(b_ub, dtype=float).reshape(-1)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    scale = 1.0 + np.abs(b_ub)

    def feasible(y):
        return np.all(A_ub @ y - b_ub <= tol * scale)

    y = _affine_project(x, A_eq, b_eq)
    if y is not None and feasible(y):
        return y
    best, best_d = None, math.inf
    free = n - (np.linalg.matrix_rank(A_eq) if A_eq.shape[0] else 0)
    for size in range(1, min(free, A_ub.shape[0]) + 1):
        for S in combinations(range(A_ub.shape[0]), size):
            S = list(S)
            y = _affine_project(x, np.vstack([A_eq, A_ub[S]]), np.concatenate([b_eq, b_ub[S]]))
            if y is None or not feasible(y):
                continue
            dist = float(np.sum((y - x) ** 2))
            if dist < best_d:
                best, best_d = y, dist
    return best


def project_hull(z, P):
    """Euclidean projection of ``z`` onto the convex hull of the rows of ``P``."""
    z = np.asarray(z, dtype=float)
    P = np.asarray(P, dtype=float)
    k, n = P.shape
    best, best_d = None, math.inf
    for size in range(1, min(k, n + 1) + 1):
        for S in combinations(range(k), size):
            Q = P[list(S)]
            if size == 1:
                y = Q[0]
            else:
                D = (Q[1:] - Q[0]).T
                w, *_ = np.linalg.lstsq(D, z - Q[0], rcond=None)
                if np.any(w < -1e-12) or w.sum() > 1 + 1e-12:
                    continue
                y = Q[0] + D @ w
            dist = float(np.sum((y - z) ** 2))
            if dist < best_d:
                best, best_d = y, dist
    return best
