"""Exactly evaluable extended-real convex functions and their conjugates.

Every variant evaluates to a float in ``(-inf, +inf]``. Conjugation is exact
for the polyhedral pair (:class:`MaxAffine` with a polyhedral domain and
:class:`PolyhedralHull` with rays), for :class:`Quadratic` functions on affine
subspaces, and for separable sums of those. Other combinations evaluate but
raise :class:`UnsupportedVariantError` when conjugated.
"""

import math
from functools import cached_property

import numpy as np

from ._checks import INF, as_matrix, as_points, as_vector, frozen
from .errors import InputError, UnsupportedVariantError
from .lp import INFEASIBLE, UNBOUNDED, LpProblem, lp_solve
from .polyhedra import MAX_SUBSETS, generators, null_space, orth

DOMAIN_TOL = 1e-9
# hulls whose dual polyhedron needs at most this many row subsets get a
# closed-form max-affine representation for batch evaluation
VREP_LIMIT = 20_000


class ConvexFn:
    """Base class. Subclasses implement :meth:`value` on validated vectors."""

    dim = None

    def __call__(self, b):
        return self.value(as_vector(b, self.dim))

    def value(self, b):
        raise NotImplementedError

    def values(self, B):
        B = as_points(B, self.dim)
        return np.array([self.value(b) for b in B], dtype=float)

    def conjugate(self, y):
        """``sup_b <y, b> - f(b)``."""
        raise UnsupportedVariantError(f"no exact conjugate for {type(self).__name__}")

    def at_conjugate(self, space, c):
        """Conjugate with respect to the SSD pairing: ``f*(iota(c))``."""
        return self.conjugate(space.iota(c))

    def subgradient(self, b):
        raise UnsupportedVariantError(f"no subgradient oracle for {type(self).__name__}")

    def conjugate_fn(self):
        raise UnsupportedVariantError(f"no closed-form conjugate for {type(self).__name__}")

    def conjugate_argmax(self, y):
        """A maximizer of ``<y, b> - f(b)``, i.e. a subgradient of ``f*`` at ``y``."""
        return self.conjugate_fn().subgradient(y)

    def affine_hull(self):
        """``(b0, N)`` with orthonormal ``N`` whose span, shifted by ``b0``,
        contains the effective domain."""
        return np.zeros(self.dim), np.eye(self.dim)

    def __add__(self, other):
        return WeightedSum([(1.0, self), (1.0, other)])

    def __rmul__(self, t):
        return WeightedSum([(float(t), self)])


def _dom_ok(A, rhs, b, tol=DOMAIN_TOL):
    if A.shape[0] == 0:
        return True
    lhs = A @ b
    slack = tol * (1.0 + np.abs(rhs) + np.abs(A) @ np.abs(b))
    return bool(np.all(lhs <= rhs + slack))


def _dom_ok_eq(A, rhs, b, tol=DOMAIN_TOL):
    if A.shape[0] == 0:
        return True
    lhs = A @ b
    slack = tol * (1.0 + np.abs(rhs) + np.abs(A) @ np.abs(b))
    return bool(np.all(np.abs(lhs - rhs) <= slack))


def _dom_mask(A, rhs, B, eq=False, tol=DOMAIN_TOL):
    if A.shape[0] == 0:
        return np.ones(B.shape[0], dtype=bool)
    lhs = B @ A.T
    slack = tol * (1.0 + np.abs(rhs)[None, :] + np.abs(B) @ np.abs(A).T)
    if eq:
        return np.all(np.abs(lhs - rhs) <= slack, axis=1)
    return np.all(lhs <= rhs + slack, axis=1)


def _rows(A, rhs, dim, name):
    if A is None:
        return np.zeros((0, dim)), np.zeros(0)
    A = np.asarray(A, dtype=float).reshape(-1, dim)
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    if A.shape[0] != rhs.shape[0]:
        raise InputError(f"{name}: {A.shape[0]} rows but {rhs.shape[0]} right-hand sides")
    return frozen(A), frozen(rhs)


def _hull_lp(points, values, rays, ray_values, lines, line_values, b):
    """``min sum l_i v_i + sum m_j s_j + sum n_k t_k`` over representations
    ``b = sum l_i a_i + sum m_j r_j + sum n_k d_k`` with ``l`` in the simplex,
    ``m >= 0`` and ``n`` free. Returns the LP solution object."""
    d = points.shape[1]
    cols = [points.T, rays.T, lines.T, -lines.T]
    A = np.vstack([np.hstack(cols),
                   np.concatenate([np.ones(points.shape[0]), np.zeros(rays.shape[0] + 2 * lines.shape[0])])])
    c = np.concatenate([values, ray_values, line_values, -line_values])
    rhs = np.concatenate([b, [1.0]])
    return lp_solve(LpProblem(c, A.reshape(d + 1, -1), rhs))


class MaxAffine(ConvexFn):
    """``b -> max_i <g_i, b> - c_i`` restricted to a polyhedral domain.

    Parameters
    ----------
    slopes : array_like, shape (m, dim)
    offsets : array_like, shape (m,)
    ineq : (A, rhs), optional
        Domain rows ``A b <= rhs``; outside the value is ``+inf``.
    eq : (A, rhs), optional
        Domain rows ``A b = rhs``.
    """

    def __init__(self, slopes, offsets, ineq=None, eq=None):
        G = as_matrix(slopes, name="slopes")
        c = np.asarray(offsets, dtype=float).reshape(-1)
        if G.shape[0] == 0 or G.shape[0] != c.shape[0]:
            raise InputError("max-affine function needs at least one piece and matching offsets")
        self.dim = G.shape[1]
        self.slopes = frozen(G)
        self.offsets = frozen(c)
        self.ineq_A, self.ineq_b = _rows(*(ineq or (None, None)), self.dim, "ineq")
        self.eq_A, self.eq_b = _rows(*(eq or (None, None)), self.dim, "eq")

    @classmethod
    def from_pieces(cls, pieces):
        """Build from ``[{"g": [...], "c": float}, ...]``."""
        if not pieces:
            raise InputError("max-affine function needs at least one piece")
        G = [np.atleast_1d(np.asarray(p["g"], dtype=float)) for p in pieces]
        return cls(np.vstack(G), [float(p["c"]) for p in pieces])

    @property
    def has_domain(self):
        return self.ineq_A.shape[0] > 0 or self.eq_A.shape[0] > 0

    def in_domain(self, b):
        return _dom_ok(self.ineq_A, self.ineq_b, b) and _dom_ok_eq(self.eq_A, self.eq_b, b)

    def value(self, b):
        if not self.in_domain(b):
            return INF
        return float(np.max(self.slopes @ b - self.offsets))

    def values(self, B):
        B = as_points(B, self.dim)
        out = np.max(B @ self.slopes.T - self.offsets, axis=1)
        mask = _dom_mask(self.ineq_A, self.ineq_b, B) & _dom_mask(self.eq_A, self.eq_b, B, eq=True)
        out[~mask] = INF
        return out

    def conjugate_fn(self):
        return PolyhedralHull(self.slopes, self.offsets, rays=self.ineq_A, ray_values=self.ineq_b,
                              lines=self.eq_A, line_values=self.eq_b)

    def conjugate(self, y):
        """Exact conjugate by linear programming over the dual representation."""
        y = as_vector(y, self.dim, "y")
        sol = _hull_lp(self.slopes, self.offsets, self.ineq_A, self.ineq_b, self.eq_A, self.eq_b, y)
        if sol.status == INFEASIBLE:
            return INF
        if sol.status == UNBOUNDED:
            return -INF
        return sol.value

    def subgradient(self, b):
        b = as_vector(b, self.dim)
        return self.slopes[int(np.argmax(self.slopes @ b - self.offsets))].copy()

    def compose(self, L):
        """``b -> f(L b)``."""
        L = as_matrix(L, (self.dim, self.dim), "L")
        ineq = (self.ineq_A @ L, self.ineq_b) if self.ineq_A.shape[0] else None
        eq = (self.eq_A @ L, self.eq_b) if self.eq_A.shape[0] else None
        return MaxAffine(self.slopes @ L, self.offsets, ineq=ineq, eq=eq)

    def affine_hull(self):
        if self.eq_A.shape[0] == 0:
            return np.zeros(self.dim), np.eye(self.dim)
        b0 = np.linalg.lstsq(self.eq_A, self.eq_b, rcond=None)[0]
        return b0, null_space(self.eq_A)

    def __repr__(self):
        return f"MaxAffine(pieces={self.slopes.shape[0]}, dim={self.dim}, domain_rows={self.ineq_A.shape[0] + self.eq_A.shape[0]})"


def max_affine_sum(terms):
    """``sum w_k f_k`` for max-affine ``f_k`` as one :class:`MaxAffine`.

    Pieces are all sums of one piece per term and the domain is the
    intersection of the domains.
    """
    terms = [(float(w), f) for w, f in terms if w]
    if not terms or any(w < 0 for w, _ in terms):
        raise InputError("need at least one positive weight and no negative ones")
    G, c = terms[0][0] * terms[0][1].slopes, terms[0][0] * terms[0][1].offsets
    for w, f in terms[1:]:
        G = (G[:, None, :] + w * f.slopes[None]).reshape(-1, f.dim)
        c = (c[:, None] + w * f.offsets[None]).reshape(-1)
    ineq_A = np.vstack([f.ineq_A for _, f in terms])
    ineq_b = np.concatenate([f.ineq_b for _, f in terms])
    eq_A = np.vstack([f.eq_A for _, f in terms])
    eq_b = np.concatenate([f.eq_b for _, f in terms])
    return MaxAffine(G, c, ineq=(ineq_A, ineq_b) if ineq_A.shape[0] else None,
                     eq=(eq_A, eq_b) if eq_A.shape[0] else None)


class PolyhedralHull(ConvexFn):
    """Closed convex hull of finitely many lifted points plus recession directions.

    ``f(b) = min { sum l_i v_i + sum m_j s_j + sum n_k t_k :
    b = sum l_i a_i + sum m_j r_j + sum n_k d_k, l in simplex, m >= 0 }``;
    ``+inf`` when no representation exists.
    """

    def __init__(self, points, values, rays=None, ray_values=None, lines=None, line_values=None):
        P = as_matrix(points, name="points")
        v = np.asarray(values, dtype=float).reshape(-1)
        if P.shape[0] == 0 or P.shape[0] != v.shape[0]:
            raise InputError("hull needs at least one point and one value per point")
        self.dim = P.shape[1]
        self.points = frozen(P)
        self.point_values = frozen(v)
        self.rays, self.ray_values = _rows(rays, ray_values, self.dim, "rays")
        self.lines, self.line_values = _rows(lines, line_values, self.dim, "lines")

    def solve(self, b):
        return _hull_lp(self.points, self.point_values, self.rays, self.ray_values,
                        self.lines, self.line_values, b)

    def value(self, b):
        sol = self.solve(b)
        if sol.status == INFEASIBLE:
            return INF
        if sol.status == UNBOUNDED:
            return -INF
        return sol.value

    def subgradient(self, b):
        b = as_vector(b, self.dim)
        sol = self.solve(b)
        if not sol.optimal:
            raise InputError("subgradient requested outside the domain")
        return sol.dual[: self.dim].copy()

    def conjugate(self, y):
        y = as_vector(y, self.dim, "y")
        if not _dom_ok(self.rays, self.ray_values, y) or not _dom_ok_eq(self.lines, self.line_values, y):
            return INF
        return float(np.max(self.points @ y - self.point_values))

    def conjugate_fn(self):
        return MaxAffine(self.points, self.point_values, ineq=(self.rays, self.ray_values),
                         eq=(self.lines, self.line_values))

    @cached_property
    def vrep(self):
        """Equivalent :class:`MaxAffine`, or ``None`` when enumeration is too large."""
        d = self.dim
        k = self.points.shape[0] + self.rays.shape[0]
        from math import comb
        if comb(k, min(k, d + 1)) > min(VREP_LIMIT, MAX_SUBSETS):
            return None
        # dual polyhedron in (y, t): <a_i, y> + t <= v_i, <r_j, y> <= s_j, <d_k, y> = t_k
        A_ub = np.vstack([np.hstack([self.points, np.ones((self.points.shape[0], 1))]),
                          np.hstack([self.rays, np.zeros((self.rays.shape[0], 1))])])
        b_ub = np.concatenate([self.point_values, self.ray_values])
        A_eq = np.hstack([self.lines, np.zeros((self.lines.shape[0], 1))])
        gen = generators(A_ub, b_ub, A_eq, self.line_values)
        if gen is None:
            raise InputError("hull is identically -inf (improper)")
        V, R, L = gen.vertices, gen.rays, gen.lines
        ineq = (R[:, :d], -R[:, d]) if R.shape[0] else None
        eq = (L[:, :d], -L[:, d]) if L.shape[0] else None
        return MaxAffine(V[:, :d], -V[:, d], ineq=ineq, eq=eq)

    def values(self, B):
        B = as_points(B, self.dim)
        rep = self.vrep
        if rep is None:
            return super().values(B)
        return rep.values(B)

    def affine_hull(self):
        p0 = self.points[0]
        dirs = np.vstack([self.points - p0, self.rays, self.lines])
        return p0.copy(), orth(dirs.T)

    def __repr__(self):
        return f"PolyhedralHull(points={self.points.shape[0]}, rays={self.rays.shape[0]}, lines={self.lines.shape[0]}, dim={self.dim})"


class Quadratic(ConvexFn):
    """``b -> 0.5 b^T P b + l^T b + c0`` on ``{b : C b = d}``, ``+inf`` elsewhere.

    ``P`` restricted to the constraint subspace must be positive semidefinite.
    """

    def __init__(self, P, l=None, c0=0.0, C=None, d=None):
        P = as_matrix(P, name="P")
        if P.shape[0] != P.shape[1]:
            raise InputError("P must be square")
        self.dim = n = P.shape[0]
        P = 0.5 * (P + P.T)
        self.P = frozen(P)
        self.l = frozen(np.zeros(n) if l is None else as_vector(l, n, "l"))
        self.c0 = float(c0)
        self.C, self.d = _rows(C, d, n, "C")
        if self.C.shape[0]:
            b0, *_ = np.linalg.lstsq(self.C, self.d, rcond=None)
            if np.max(np.abs(self.C @ b0 - self.d)) > 1e-9 * (1.0 + np.max(np.abs(self.d))):
                raise InputError("quadratic has an empty domain")
            N = null_space(self.C)
            # project b0 onto the orthogonal complement of the subspace
            b0 = b0 - N @ (N.T @ b0)
        else:
            b0, N = np.zeros(n), np.eye(n)
        self.b0 = frozen(b0)
        self.N = frozen(N)
        H = N.T @ P @ N
        w, Q = np.linalg.eigh(0.5 * (H + H.T)) if H.size else (np.zeros(0), np.zeros((0, 0)))
        scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
        if w.size and w[0] < -1e-9 * scale:
            raise InputError(f"quadratic is not convex on its domain (eigenvalue {w[0]:.3g})")
        self._eig = (w, Q, 1e-10 * scale)

    def _in_domain(self, b):
        return _dom_ok_eq(self.C, self.d, b)

    def value(self, b):
        if not self._in_domain(b):
            return INF
        return float(0.5 * b @ self.P @ b + self.l @ b + self.c0)

    def values(self, B):
        B = as_points(B, self.dim)
        out = 0.5 * np.einsum("ij,jk,ik->i", B, self.P, B) + B @ self.l + self.c0
        if self.C.shape[0]:
            out[~_dom_mask(self.C, self.d, B, eq=True)] = INF
        return out

    def conjugate(self, y):
        y = as_vector(y, self.dim, "y")
        b0 = self.b0
        f0 = 0.5 * b0 @ self.P @ b0 + self.l @ b0 + self.c0
        g = self.N.T @ (y - self.l - self.P @ b0)
        w, Q, cut = self._eig
        gq = Q.T @ g
        pos = w > cut
        null_part = gq[~pos]
        if null_part.size and np.max(np.abs(null_part)) > 1e-9 * (1.0 + np.max(np.abs(y)) + np.max(np.abs(g))):
            return INF
        return float(y @ b0 - f0 + 0.5 * np.sum(gq[pos] ** 2 / w[pos]))

    def escape_ray(self, y):
        """For ``f*(y) = +inf``: ``(c0, d, v0, rate)`` such that
        ``<y, c0 + t d> - f(c0 + t d) = v0 + t rate`` with ``rate > 0``.
        ``None`` when ``f*(y)`` is finite."""
        y = as_vector(y, self.dim, "y")
        b0 = self.b0
        f0 = 0.5 * b0 @ self.P @ b0 + self.l @ b0 + self.c0
        g = self.N.T @ (y - self.l - self.P @ b0)
        w, Q, cut = self._eig
        gq = Q.T @ g
        pos = w > cut
        u = gq[~pos]
        if not u.size or np.max(np.abs(u)) <= 1e-9 * (1.0 + np.max(np.abs(y)) + np.max(np.abs(g))):
            return None
        z0 = Q[:, pos] @ (gq[pos] / w[pos])
        c0 = b0 + self.N @ z0
        d = self.N @ (Q[:, ~pos] @ u)
        v0 = float(y @ b0 - f0 + 0.5 * np.sum(gq[pos] ** 2 / w[pos]))
        return c0, d, v0, float(u @ u)

    def conjugate_fn(self):
        """The conjugate as another :class:`Quadratic`."""
        w, Q, cut = self._eig
        pos = w > cut
        N = self.N
        Hplus = (Q[:, pos] / w[pos]) @ Q[:, pos].T
        Pc = N @ Hplus @ N.T
        shift = self.l + self.P @ self.b0
        b0 = self.b0
        f0 = 0.5 * b0 @ self.P @ b0 + self.l @ b0 + self.c0
        lc = b0 - Pc @ shift
        # y.b0 - f0 + 0.5 (y - shift)^T Pc (y - shift)
        cc = 0.5 * shift @ Pc @ shift - f0
        K = (N @ Q[:, ~pos]).T
        if K.shape[0]:
            return Quadratic(Pc, lc, cc, C=K, d=K @ shift)
        return Quadratic(Pc, lc, cc)

    def compose(self, L):
        """``b -> f(L b)`` for a square invertible or general linear map ``L``."""
        L = as_matrix(L, name="L")
        if L.shape[0] != self.dim:
            raise InputError("composition dimension mismatch")
        C = self.C @ L if self.C.shape[0] else None
        return Quadratic(L.T @ self.P @ L, L.T @ self.l, self.c0, C=C, d=self.d if C is not None else None)

    def at_conjugate_fn(self, space):
        return self.conjugate_fn().compose(space.gram)

    def subgradient(self, b):
        b = as_vector(b, self.dim)
        return self.P @ b + self.l

    def affine_hull(self):
        return self.b0.copy(), self.N.copy()

    def __add__(self, other):
        if isinstance(other, Quadratic):
            C = np.vstack([self.C, other.C])
            d = np.concatenate([self.d, other.d])
            return Quadratic(self.P + other.P, self.l + other.l, self.c0 + other.c0,
                             C=C if C.shape[0] else None, d=d if C.shape[0] else None)
        return super().__add__(other)

    def scaled(self, t):
        t = float(t)
        if t < 0:
            raise InputError("negative scaling breaks convexity")
        return Quadratic(t * self.P, t * self.l, t * self.c0,
                         C=self.C if self.C.shape[0] else None, d=self.d if self.C.shape[0] else None)

    def __rmul__(self, t):
        return self.scaled(t)

    def __repr__(self):
        return f"Quadratic(dim={self.dim}, constraints={self.C.shape[0]})"


def quad_on_graph(space, M, p):
    """``q + delta_A`` for the graph ``A = {(x, M x + p)}`` in the product space."""
    from .spaces import product_dim
    n = product_dim(space)
    M = as_matrix(M, (n, n), "M")
    p = as_vector(p, n, "p")
    C = np.hstack([-M, np.eye(n)])
    return Quadratic(space.gram, None, 0.0, C=C, d=p)


class PlusQ(ConvexFn):
    """``base + q``; convex only when that is separately established."""

    def __init__(self, base, space):
        if base.dim != space.dim:
            raise InputError("PlusQ dimension mismatch")
        self.base = base
        self.space = space
        self.dim = space.dim

    def value(self, b):
        v = self.base.value(b)
        return v if math.isinf(v) else v + self.space.q(b)

    def values(self, B):
        B = as_points(B, self.dim)
        return self.base.values(B) + self.space.q_many(B)

    def conjugate(self, y):
        if isinstance(self.base, Quadratic):
            return self.as_quadratic().conjugate(y)
        return super().conjugate(y)

    def as_quadratic(self):
        if not isinstance(self.base, Quadratic):
            raise UnsupportedVariantError("PlusQ over a non-quadratic base has no closed form")
        b = self.base
        return Quadratic(b.P + self.space.gram, b.l, b.c0,
                         C=b.C if b.C.shape[0] else None, d=b.d if b.C.shape[0] else None)

    def conjugate_fn(self):
        return self.as_quadratic().conjugate_fn()

    def affine_hull(self):
        return self.base.affine_hull()

    def subgradient(self, b):
        b = as_vector(b, self.dim)
        return self.base.subgradient(b) + self.space.gram @ b


class SeparableSum(ConvexFn):
    """``(x, z) -> f(x) + g(z)`` on a block-split vector."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        self.dim = first.dim + second.dim

    def _split(self, b):
        return b[: self.first.dim], b[self.first.dim:]

    def value(self, b):
        x, z = self._split(b)
        u = self.first.value(x)
        if math.isinf(u):
            return u
        v = self.second.value(z)
        return v if math.isinf(v) else u + v

    def values(self, B):
        B = as_points(B, self.dim)
        k = self.first.dim
        return self.first.values(B[:, :k]) + self.second.values(B[:, k:])

    def conjugate(self, y):
        y = as_vector(y, self.dim, "y")
        x, z = self._split(y)
        u = self.first.conjugate(x)
        if math.isinf(u):
            return u
        v = self.second.conjugate(z)
        return v if math.isinf(v) else u + v

    def subgradient(self, b):
        b = as_vector(b, self.dim)
        x, z = self._split(b)
        return np.concatenate([self.first.subgradient(x), self.second.subgradient(z)])

    def conjugate_fn(self):
        return SeparableSum(self.first.conjugate_fn(), self.second.conjugate_fn())

    def affine_hull(self):
        b1, N1 = self.first.affine_hull()
        b2, N2 = self.second.affine_hull()
        N = np.zeros((self.dim, N1.shape[1] + N2.shape[1]))
        N[: self.first.dim, : N1.shape[1]] = N1
        N[self.first.dim:, N1.shape[1]:] = N2
        return np.concatenate([b1, b2]), N


class WeightedSum(ConvexFn):
    """Nonnegative combination ``sum w_k f_k``; evaluation only."""

    def __init__(self, terms):
        terms = [(float(w), f) for w, f in terms]
        if not terms:
            raise InputError("empty sum")
        if any(w < 0 for w, _ in terms):
            raise InputError("negative weights break convexity")
        dims = {f.dim for _, f in terms}
        if len(dims) != 1:
            raise InputError("summands have different dimensions")
        self.terms = terms
        self.dim = dims.pop()

    def value(self, b):
        total = 0.0
        for w, f in self.terms:
            if w == 0:
                continue
            v = f.value(b)
            if math.isinf(v):
                return v
            total += w * v
        return total

    def values(self, B):
        B = as_points(B, self.dim)
        total = np.zeros(B.shape[0])
        for w, f in self.terms:
            if w:
                total = total + w * f.values(B)
        return total

    def affine_hull(self):
        # intersection is not tracked; the first term's hull contains the domain
        return self.terms[0][1].affine_hull()


class PointwiseFn(ConvexFn):
    """Wraps an arbitrary callable. Used for negative controls; not assumed convex."""

    def __init__(self, func, dim, label="pointwise", vectorized=False):
        self.func = func
        self.dim = int(dim)
        self.label = label
        self.vectorized = vectorized

    def value(self, b):
        if self.vectorized:
            return float(self.func(b[None, :])[0])
        return float(self.func(b))

    def values(self, B):
        B = as_points(B, self.dim)
        if self.vectorized:
            return np.asarray(self.func(B), dtype=float)
        return super().values(B)

    def __repr__(self):
        return f"PointwiseFn({self.label}, dim={self.dim})"


class GridOracle(ConvexFn):
    """Brute-force reference: a function known only on a finite sample grid.

    Its conjugate is the discrete supremum over the samples, which never
    exceeds the true conjugate and converges to it as the grid refines.
    """

    def __init__(self, samples, values, step=None):
        S = as_points(samples)
        v = np.asarray(values, dtype=float).reshape(-1)
        keep = np.isfinite(v)
        self.dim = S.shape[1]
        self.samples = S[keep]
        self.sample_values = v[keep]
        self.step = step
        self._grid = None

    @classmethod
    def from_function(cls, f, lo=-5.0, hi=5.0, step=0.01):
        """Sample ``f`` on a grid of spacing ``step`` laid over the affine hull
        of its domain and clipped to the box ``[lo, hi]^dim``."""
        b0, N = f.affine_hull()
        k = N.shape[1]
        if k > 2:
            raise InputError("grid oracle supports domains of dimension <= 2")
        if k == f.dim and np.allclose(N, np.eye(f.dim)):
            base, N = np.zeros(f.dim), np.eye(f.dim)
            ticks = np.round(np.arange(lo, hi + 0.5 * step, step), 12)
        else:
            center = np.full(f.dim, 0.5 * (lo + hi))
            base = b0 + N @ (N.T @ (center - b0))
            R = 0.5 * (hi - lo) * math.sqrt(f.dim)
            ticks = np.arange(-math.floor(R / step), math.floor(R / step) + 1) * step
        if k == 0:
            Z, shape = np.zeros((1, 0)), ()
        else:
            Z = np.stack(np.meshgrid(*([ticks] * k), indexing="ij"), axis=-1).reshape(-1, k)
            shape = (len(ticks),) * k
        B = base + Z @ N.T
        inside = np.all((B >= lo - 1e-12) & (B <= hi + 1e-12), axis=1)
        vals = np.full(B.shape[0], INF)
        vals[inside] = f.values(B[inside])
        obj = cls(B, vals, step=step)
        obj._grid = (B, vals, shape, Z, base, N)
        return obj

    def value(self, b):
        hit = np.flatnonzero(np.all(self.samples == b, axis=1))
        if hit.size:
            return float(self.sample_values[hit[0]])
        raise UnsupportedVariantError("grid oracle is only defined at its samples")

    def conjugate(self, y):
        y = as_vector(y, self.dim, "y")
        return float(np.max(self.samples @ y - self.sample_values))

    def lipschitz_bound(self, y, center=None, radius=None):
        """Largest finite-difference slope of ``b -> <y, b> - f(b)`` along the
        grid axes, times ``sqrt(k)``. With ``center`` the search is restricted
        to grid points within ``radius`` of it."""
        if self._grid is None:
            raise UnsupportedVariantError("lipschitz bound needs a structured grid")
        B, vals, shape, Z, base, N = self._grid
        if not shape:
            return 0.0
        phi = (B @ y - vals).reshape(shape)
        near = np.ones(shape, dtype=bool)
        if center is not None:
            zc = N.T @ (as_vector(center, self.dim) - base)
            r = radius if radius is not None else 3 * self.step
            near = (np.linalg.norm(Z - zc, axis=1) <= r).reshape(shape)
        best = 0.0
        for ax in range(len(shape)):
            lo_idx, hi_idx = np.arange(shape[ax] - 1), np.arange(1, shape[ax])
            a, b = np.take(phi, lo_idx, axis=ax), np.take(phi, hi_idx, axis=ax)
            ok = np.isfinite(a) & np.isfinite(b) & (np.take(near, lo_idx, axis=ax) | np.take(near, hi_idx, axis=ax))
            if np.any(ok):
                best = max(best, float(np.max(np.abs(a[ok] - b[ok]))) / self.step)
        return best * math.sqrt(len(shape))

    def interior_points(self, margin=1):
        """Grid points whose neighbours within ``margin`` steps all have finite values."""
        B, vals, shape, *_ = self._grid
        if not shape:
            return B[np.isfinite(vals)]
        fin = np.isfinite(vals).reshape(shape)
        ok = fin.copy()
        for ax in range(len(shape)):
            for s in range(1, margin + 1):
                ok &= np.roll(fin, s, axis=ax) & np.roll(fin, -s, axis=ax)
                idx = [slice(None)] * len(shape)
                idx[ax] = slice(0, s)
                ok[tuple(idx)] = False
                idx[ax] = slice(-s, None)
                ok[tuple(idx)] = False
        return B[ok.reshape(-1)]
