"""Exact representations of q-positive sets.

Three variants are supported:

* :class:`FiniteSet` -- a finite point list in any space;
* :class:`AffineGraph` -- ``{(x, M x + p)}`` in ``product(n)``;
* :class:`SubdiffGraph` -- the graph of the subdifferential of a max-affine
  function in ``product(n)``.

Each variant knows how to compute ``inf_{c in A} q(b - c)``, the Fitzpatrick
type functions of the set, a Euclidean distance to the set and random points
of the set.
"""

import math
import warnings
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from ._checks import INF, as_matrix, as_points, as_vector, frozen, rng_from
from .errors import InputError
from .functions import MaxAffine, PolyhedralHull, Quadratic, quad_on_graph
from .lp import OPTIMAL, UNBOUNDED, lp_general
from .polyhedra import generators, null_space, project_hull, project_polyhedron
from .reports import Tally
from .spaces import product_dim

POSITIVITY_TOL = 1e-12
PSD_TOL = 1e-10
WITNESS_DISTANCE = 1e-6
WITNESS_SLACK = 1e-9
MAX_PIECES = 32
MAX_SUBDIFF_DIM = 3


class PositiveSet:
    """Common interface. Subclasses are immutable after construction."""

    kind = None
    space = None

    @property
    def dim(self):
        return self.space.dim

    @property
    def maximal_by_construction(self):
        return False

    def inf_q(self, b):
        raise NotImplementedError

    def phi(self):
        raise NotImplementedError

    def theta(self):
        raise NotImplementedError

    def theta_star(self):
        raise NotImplementedError

    def distance(self, b):
        raise NotImplementedError

    def sample(self, count, rng):
        """``count`` points of the set (rows)."""
        raise NotImplementedError


# ---------------------------------------------------------------------------


class FiniteSet(PositiveSet):
    """A finite point list.

    Parameters
    ----------
    space : SsdSpace
    points : array_like, shape (m, dim)
    assume_maximal : bool
        Caller's assertion that the set is maximally q-positive. Only
        singletons in spaces with negative definite form are recognised as
        maximal without it.
    """

    kind = "finite"

    def __init__(self, space, points, assume_maximal=False):
        P = as_points(points, space.dim)
        if P.shape[0] == 0:
            raise InputError("finite set must be nonempty")
        if not np.all(np.isfinite(P)):
            raise InputError("finite set has non-finite coordinates")
        self.space = space
        self.points = frozen(P)
        self.assume_maximal = bool(assume_maximal)

    def __repr__(self):
        return f"FiniteSet({self.points.shape[0]} points, {self.space!r})"

    @cached_property
    def pair_gaps(self):
        """``q(a_i - a_j)`` for all ``i < j``."""
        m = self.points.shape[0]
        if m < 2:
            return np.zeros(0)
        i, j = np.triu_indices(m, 1)
        return self.space.q_many(self.points[i] - self.points[j])

    @property
    def is_q_positive(self):
        return bool(np.all(self.pair_gaps >= -POSITIVITY_TOL))

    @property
    def near_degenerate(self):
        """Distinct points whose pairwise q-gap sits at tolerance scale."""
        m = self.points.shape[0]
        if m < 2:
            return False
        i, j = np.triu_indices(m, 1)
        dist = np.linalg.norm(self.points[i] - self.points[j], axis=1)
        scale = 1.0 + dist ** 2
        return bool(np.any((np.abs(self.pair_gaps) <= 1e-9 * scale) & (dist > 1e-9)))

    @property
    def maximal_by_construction(self):
        if self.assume_maximal:
            return True
        if self.points.shape[0] == 1:
            return bool(np.linalg.eigvalsh(self.space.gram)[-1] < -PSD_TOL)
        return False

    def inf_q(self, b):
        b = as_vector(b, self.dim)
        return float(np.min(self.space.q_many(b - self.points)))

    def inf_q_many(self, B):
        B = as_points(B, self.dim)
        D = B[:, None, :] - self.points[None, :, :]
        vals = 0.5 * np.einsum("nmi,ij,nmj->nm", D, self.space.gram, D)
        return vals.min(axis=1)

    def phi(self):
        return MaxAffine(self.points @ self.space.gram, self.space.q_many(self.points))

    def theta(self):
        return MaxAffine(self.points, self.space.q_many(self.points))

    def theta_star(self):
        return PolyhedralHull(self.points, self.space.q_many(self.points))

    def distance(self, b):
        b = as_vector(b, self.dim)
        return float(np.min(np.linalg.norm(self.points - b, axis=1)))

    def distance_many(self, B):
        B = as_points(B, self.dim)
        return np.min(np.linalg.norm(B[:, None, :] - self.points[None], axis=2), axis=1)

    def sample(self, count, rng):
        idx = rng.integers(0, self.points.shape[0], size=count)
        return self.points[idx].copy()

    def to_spec(self):
        spec = {"finite": self.points.tolist()}
        if self.assume_maximal:
            spec["assume_maximal"] = True
        return spec


# ---------------------------------------------------------------------------


class AffineGraph(PositiveSet):
    """``{(x, M x + p) : x in R^n}`` in ``product(n)``.

    The set is q-positive exactly when the symmetric part of ``M`` is
    positive semidefinite; it is then maximal as well.
    """

    kind = "affine"

    def __init__(self, space, M, p=None):
        n = product_dim(space)
        self.space = space
        self.n = n
        self.M = frozen(as_matrix(M, (n, n), "M"))
        self.p = frozen(np.zeros(n) if p is None else as_vector(p, n, "p"))
        S = 0.5 * (self.M + self.M.T)
        self.S = frozen(S)
        w, V = np.linalg.eigh(S)
        self.min_eig = float(w[0])
        scale = max(1.0, float(np.max(np.abs(w))))
        pos = w > 1e-12 * scale
        self._Splus = frozen((V[:, pos] / w[pos]) @ V[:, pos].T)
        self._K = frozen(V[:, ~pos])

    def __repr__(self):
        return f"AffineGraph(n={self.n})"

    @property
    def is_q_positive(self):
        return self.min_eig >= -PSD_TOL

    @property
    def maximal_by_construction(self):
        return self.is_q_positive

    def _split(self, b):
        return b[: self.n], b[self.n:]

    def inf_q(self, b):
        """Minimum of the convex quadratic ``y -> q(b - (y, M y + p))``.

        Solved through the normal equations ``2 S y = r``; an inconsistent
        system means the quadratic is unbounded below.
        """
        if not self.is_q_positive:
            raise InputError("inf_q needs a positive semidefinite symmetric part")
        b = as_vector(b, self.dim)
        x, xs = self._split(b)
        r = xs + self.M.T @ x - self.p
        S2 = 2.0 * self.S
        y, *_ = np.linalg.lstsq(S2, r, rcond=None)
        if np.linalg.norm(S2 @ y - r) > 1e-9 * (1.0 + np.linalg.norm(r)):
            return -INF
        c = np.concatenate([y, self.M @ y + self.p])
        return self.space.q(b - c)

    def inf_q_many(self, B):
        return np.array([self.inf_q(b) for b in as_points(B, self.dim)])

    def phi(self):
        """``1/4 r^T S^+ r + <x, p>`` with ``r = x* + M^T x - p``, finite only
        when ``r`` lies in the range of ``S``."""
        if not self.is_q_positive:
            raise InputError("Fitzpatrick function of a non-monotone affine graph is not convex")
        n = self.n
        L = np.hstack([self.M.T, np.eye(n)])
        Sp = self._Splus
        P = 0.5 * L.T @ Sp @ L
        l = -0.5 * L.T @ Sp @ self.p + np.concatenate([self.p, np.zeros(n)])
        c0 = 0.25 * self.p @ Sp @ self.p
        K = self._K
        if K.shape[1]:
            return Quadratic(P, l, c0, C=K.T @ L, d=K.T @ self.p)
        return Quadratic(P, l, c0)

    def theta(self):
        # the product-space form is an involution, so Theta = Phi o iota
        return self.phi().compose(self.space.gram)

    def theta_star(self):
        return quad_on_graph(self.space, self.M, self.p)

    def distance(self, b):
        b = as_vector(b, self.dim)
        x, xs = self._split(b)
        A = np.vstack([np.eye(self.n), self.M])
        t = np.concatenate([x, xs - self.p])
        y, *_ = np.linalg.lstsq(A, t, rcond=None)
        return float(np.linalg.norm(A @ y - t))

    def distance_many(self, B):
        B = as_points(B, self.dim)
        A = np.vstack([np.eye(self.n), self.M])
        T = np.hstack([B[:, : self.n], B[:, self.n:] - self.p])
        Y, *_ = np.linalg.lstsq(A, T.T, rcond=None)
        return np.linalg.norm(A @ Y - T.T, axis=0)

    def sample(self, count, rng):
        Y = rng.normal(size=(count, self.n))
        return np.hstack([Y, Y @ self.M.T + self.p])

    def to_spec(self):
        return {"affine": {"M": self.M.tolist(), "p": self.p.tolist()}}


# ---------------------------------------------------------------------------


class _Cell:
    __slots__ = ("active", "gen", "A_ub", "b_ub", "A_eq", "b_eq")

    def __init__(self, active, gen, A_ub, b_ub, A_eq, b_eq):
        self.active = active
        self.gen = gen
        self.A_ub, self.b_ub, self.A_eq, self.b_eq = A_ub, b_ub, A_eq, b_eq


class SubdiffGraph(PositiveSet):
    """Graph of ``\\partial f`` for ``f = max_i <g_i, x> - c_i`` on ``R^n``.

    The graph is the union over nonempty cells ``R_I`` (points where exactly
    the pieces in ``I`` are active, or at least those) of ``R_I x co{g_i}``.
    """

    kind = "subdiff"

    def __init__(self, space, f):
        n = product_dim(space)
        if not isinstance(f, MaxAffine) or f.has_domain:
            raise InputError("subdifferential graphs need a max-affine function on all of R^n")
        if f.dim != n:
            raise InputError(f"function lives in R^{f.dim}, space needs R^{n}")
        if n > MAX_SUBDIFF_DIM or f.slopes.shape[0] > MAX_PIECES:
            raise InputError(f"subdifferential graphs are limited to n <= {MAX_SUBDIFF_DIM} "
                             f"and {MAX_PIECES} pieces")
        self.space = space
        self.n = n
        self.f = f

    @classmethod
    def from_pieces(cls, space, pieces):
        return cls(space, MaxAffine.from_pieces(pieces))

    def __repr__(self):
        return f"SubdiffGraph(n={self.n}, pieces={self.f.slopes.shape[0]})"

    @property
    def maximal_by_construction(self):
        return True

    def _region(self, I):
        """Constraints of ``R_I``: pieces in ``I`` tie and dominate the rest."""
        G, c = self.f.slopes, self.f.offsets
        i0 = I[0]
        A_ub = G - G[i0]
        b_ub = c - c[i0]
        A_eq = G[list(I[1:])] - G[i0] if len(I) > 1 else np.zeros((0, self.n))
        b_eq = c[list(I[1:])] - c[i0] if len(I) > 1 else np.zeros(0)
        return A_ub, b_ub, A_eq, b_eq

    @cached_property
    def cells(self):
        """Nonempty cells, grown by joining active sets whose subsets are nonempty."""
        m = self.f.slopes.shape[0]
        out = []
        level = []
        for i in range(m):
            A_ub, b_ub, A_eq, b_eq = self._region((i,))
            gen = generators(A_ub, b_ub, A_eq, b_eq)
            if gen is not None:
                out.append(_Cell((i,), gen, A_ub, b_ub, A_eq, b_eq))
                level.append((i,))
        alive = set(level)
        while level:
            nxt = []
            seen = set()
            for I in level:
                for j in range(I[-1] + 1, m):
                    J = I + (j,)
                    if J in seen or not all(tuple(s) in alive for s in combinations(J, len(J) - 1)):
                        continue
                    seen.add(J)
                    A_ub, b_ub, A_eq, b_eq = self._region(J)
                    gen = generators(A_ub, b_ub, A_eq, b_eq)
                    if gen is not None:
                        out.append(_Cell(J, gen, A_ub, b_ub, A_eq, b_eq))
                        nxt.append(J)
            alive.update(nxt)
            level = nxt
        return out

    def inf_q(self, b):
        """``min_i [<x, x* - g_i> - sup_{y in R_i} <y, x* - g_i>]`` by linear programming."""
        b = as_vector(b, self.dim)
        x, xs = b[: self.n], b[self.n:]
        best = INF
        for cell in self.cells:
            if len(cell.active) != 1:
                continue
            g = self.f.slopes[cell.active[0]]
            w = xs - g
            status, val, _ = lp_general(w, cell.A_ub, cell.b_ub, maximize=True)
            if status == UNBOUNDED:
                return -INF
            if status == OPTIMAL:
                best = min(best, float(x @ w - val))
        return best

    def inf_q_many(self, B):
        return np.array([self.inf_q(b) for b in as_points(B, self.dim)])

    @cached_property
    def _hull(self):
        n = self.n
        G = self.f.slopes
        pts, vals, rays, rvals = [], [], [], []
        lines = None
        for cell in self.cells:
            if len(cell.active) != 1:
                continue
            g = G[cell.active[0]]
            gen = cell.gen
            for v in gen.vertices:
                pts.append(np.concatenate([v, g]))
                vals.append(float(v @ g))
            for r in gen.rays:
                rays.append(np.concatenate([r, np.zeros(n)]))
                rvals.append(float(r @ g))
            if lines is None:
                lines = [(np.concatenate([l, np.zeros(n)]), float(l @ g)) for l in gen.lines]
        lines = lines or []
        return PolyhedralHull(
            np.array(pts), np.array(vals),
            rays=np.array(rays).reshape(-1, 2 * n), ray_values=np.array(rvals),
            lines=np.array([l for l, _ in lines]).reshape(-1, 2 * n),
            line_values=np.array([v for _, v in lines]),
        )

    def theta_star(self):
        """Closed convex hull of ``q + delta_A``, built from the cell generators."""
        return self._hull

    def theta(self):
        return self._hull.conjugate_fn()

    def phi(self):
        return self.theta().compose(self.space.gram)

    def _cell_distance2(self, cell, x, xs, bound=INF):
        G = self.f.slopes[list(cell.active)]
        # distance from x* to co{g_I} first; it is cheap and often prunes the cell
        d2 = float(np.sum((project_hull(xs, G) - xs) ** 2))
        if d2 >= bound:
            return d2
        y = project_polyhedron(x, cell.A_ub, cell.b_ub, cell.A_eq, cell.b_eq)
        if y is None:
            return INF
        return float(np.sum((y - x) ** 2)) + d2

    def distance(self, b):
        """Exact Euclidean distance to the graph, cell by cell."""
        b = as_vector(b, self.dim)
        x, xs = b[: self.n], b[self.n:]
        best = INF
        for cell in self.cells:
            best = min(best, self._cell_distance2(cell, x, xs, best))
            if best == 0.0:
                break
        return math.sqrt(best)

    def distance_many(self, B):
        return np.array([self.distance(b) for b in as_points(B, self.dim)])

    def sample(self, count, rng):
        """Graph points: random ``x`` with its active slope, and points of the
        lower-dimensional cells paired with convex combinations of their slopes."""
        n = self.n
        G = self.f.slopes
        multi = [c for c in self.cells if len(c.active) > 1]
        out = np.empty((count, 2 * n))
        for k in range(count):
            if multi and rng.random() < 0.4:
                cell = multi[rng.integers(len(multi))]
                gen = cell.gen
                y = gen.vertices[rng.integers(gen.vertices.shape[0])].copy()
                if gen.vertices.shape[0] > 1:
                    w = rng.dirichlet(np.ones(gen.vertices.shape[0]))
                    y = w @ gen.vertices
                for r in gen.rays:
                    y = y + rng.exponential() * r
                for l in gen.lines:
                    y = y + rng.normal() * l
                mu = rng.dirichlet(np.ones(len(cell.active)))
                out[k] = np.concatenate([y, mu @ G[list(cell.active)]])
            else:
                y = rng.normal(scale=2.0, size=n)
                i = int(np.argmax(G @ y - self.f.offsets))
                out[k] = np.concatenate([y, G[i]])
        return out

    def to_spec(self):
        return {"subdiff": {"pieces": [{"g": g.tolist(), "c": float(c)}
                                       for g, c in zip(self.f.slopes, self.f.offsets)]}}


# ---------------------------------------------------------------------------


def set_from_spec(space, spec):
    """Build a set from a JSON-style spec (the format ``gen_random_instances`` emits).

    An optional ``"space"`` entry must name the same space as ``space``.
    """
    if isinstance(spec, dict) and "space" in spec:
        from .spaces import space_from_spec
        if space_from_spec(spec["space"]) != space:
            raise InputError(f"set spec is for space {spec['space']!r}, got {space!r}")
        spec = {k: v for k, v in spec.items() if k != "space"}
    if not isinstance(spec, dict) or len(set(spec) - {"assume_maximal"}) != 1:
        raise InputError(f"set spec must have exactly one of finite/affine/subdiff: {spec!r}")
    if "finite" in spec:
        return FiniteSet(space, spec["finite"], assume_maximal=spec.get("assume_maximal", False))
    if "affine" in spec:
        a = spec["affine"]
        return AffineGraph(space, a["M"], a.get("p"))
    if "subdiff" in spec:
        return SubdiffGraph.from_pieces(space, spec["subdiff"]["pieces"])
    raise InputError(f"unknown set kind in {spec!r}")


def subdiff_membership(f, x, xstar, eps):
    """Whether ``x* in \\partial_eps f(x)``, i.e. ``f(x) + f*(x*) <= <x, x*> + eps``."""
    if eps < 0:
        raise InputError("eps must be nonnegative")
    x = as_vector(x, f.dim, "x")
    xstar = as_vector(xstar, f.dim, "xstar")
    fx = f(x)
    if math.isinf(fx):
        return False
    fs = f.conjugate(xstar)
    if math.isinf(fs):
        return fs < 0
    return fx + fs <= float(x @ xstar) + eps + 1e-10


def q_positivity_report(A, sample_budget=1000, seed=0, instance="set", expect="pass"):
    """Pairwise q-positivity. Exhaustive for finite sets; eigenvalue
    certificate plus random pairs for affine graphs; random graph pairs for
    subdifferential graphs."""
    rng = rng_from(seed)
    tally = Tally(POSITIVITY_TOL)
    if isinstance(A, FiniteSet):
        for g in A.pair_gaps:
            tally.add(-float(g))
        if A.points.shape[0] == 1:
            tally.trials = max(tally.trials, 1)
        if A.near_degenerate:
            tally.notes["warning"] = "near-degenerate: pairwise q-gaps at tolerance scale"
        return tally.report("q_positivity", instance, seed, expect)
    if isinstance(A, AffineGraph):
        tally.add(-A.min_eig, tol=PSD_TOL)
        tally.notes["min_eig"] = A.min_eig
    B = A.sample(sample_budget, rng)
    C = A.sample(sample_budget, rng)
    gaps = A.space.q_many(B - C)
    scale = 1.0 + np.sum(B ** 2, axis=1) + np.sum(C ** 2, axis=1)
    for g, s in zip(gaps, scale):
        tally.add(-float(g), tol=1e-9 * s)
    return tally.report("q_positivity", instance, seed, expect)


def maximality_refute(A, budget=2000, seed=0):
    """Search for ``b`` outside ``A`` that is q-positively related to all of ``A``.

    Returns a witness vector (proof of non-maximality) or ``None``. Sets that
    are maximal by construction return ``None`` without searching.
    """
    if A.maximal_by_construction:
        return None
    if not isinstance(A, FiniteSet):
        raise InputError("refutation search is implemented for finite sets")
    rng = rng_from(seed)
    P = A.points
    dim = A.dim
    lo, hi = P.min(axis=0), P.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    lo, hi = lo - span, hi + span

    def ok(B):
        return (A.inf_q_many(B) >= -WITNESS_SLACK) & (A.distance_many(B) > WITNESS_DISTANCE)

    # structured candidates: coordinate mixes of pairs of points
    cands = [P]
    if P.shape[0] > 1:
        i, j = np.triu_indices(P.shape[0], 1)
        for _ in range(4):
            mask = rng.random((i.size, dim)) < 0.5
            cands.append(np.where(mask, P[i], P[j]))
    cands.append(rng.uniform(lo, hi, size=(budget, dim)))
    B = np.vstack(cands)
    hit = ok(B)
    if np.any(hit):
        k = int(np.flatnonzero(hit)[0])
        return B[k].copy()

    # multistart: maximize t subject to q(b - a_i) >= t, t <= 1, in the box
    G = A.space.gram
    starts = rng.uniform(lo, hi, size=(max(1, min(20, budget // 100)), dim))
    for z0 in starts:
        v0 = np.concatenate([z0, [A.inf_q(z0)]])
        cons = [{"type": "ineq",
                 "fun": lambda v: 0.5 * np.einsum("mi,ij,mj->m", v[:-1] - P, G, v[:-1] - P) - v[-1],
                 "jac": lambda v: np.hstack([(v[:-1] - P) @ G, -np.ones((P.shape[0], 1))])}]
        bounds = [(l, h) for l, h in zip(lo, hi)] + [(None, 1.0)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = minimize(lambda v: -v[-1], v0, jac=lambda v: np.concatenate([np.zeros(dim), [-1.0]]),
                           bounds=bounds, constraints=cons, method="SLSQP",
                           options={"maxiter": 200, "ftol": 1e-12})
        b = res.x[:-1]
        if ok(b[None, :])[0]:
            return b
    return None
