"""Fitzpatrick-type functions of a set and representative-function checks.

For a q-positive set ``A``:

* ``Phi_A(b) = sup_{a in A} [a, b] - q(a) = q(b) - inf_{c in A} q(b - c)``;
* ``Theta_A = (q + delta_A)*`` on the dual, with ``Phi_A = Theta_A o iota``;
* ``*Theta_A = cl co (q + delta_A)``.

A convex lsc ``h`` represents a maximal ``A`` when ``h >= q`` everywhere and
``h = q`` on ``A``. Every check below returns a :class:`CheckReport`.
"""

import math

import numpy as np

from ._checks import as_vector, excess, rng_from, scaled_tol
from .errors import InputError
from .functions import MaxAffine, PolyhedralHull, Quadratic, SeparableSum, WeightedSum, max_affine_sum
from .reports import Tally
from .sampling import candidate_points, convex_combos

TOL = 1e-9
DIST_TOL = 1e-5
# a level function growing like kappa d^2 with kappa >= 1e-2 is below TOL only
# within sqrt(TOL / kappa) of the set; hits between DIST_TOL and this radius
# are tolerance artefacts, not counterexamples
SHELL = math.sqrt(TOL / 1e-2)


def zero_hit(tally, A, b):
    """Record a point where the level function vanishes to ``TOL``."""
    d = A.distance(b)
    if DIST_TOL < d <= SHELL:
        tally.notes["tolerance_shell"] = tally.notes.get("tolerance_shell", 0) + 1
        return
    tally.add(d, tol=DIST_TOL, where=b.tolist())


def phi_eval(A, b):
    return A.phi()(as_vector(b, A.dim))


def theta_eval(A, bstar):
    return A.theta()(as_vector(bstar, A.dim, "bstar"))


def theta_star_eval(A, b):
    return A.theta_star()(as_vector(b, A.dim))


def at_conjugate_eval(f, space, c):
    """``f^@(c) = f*(iota c)``."""
    return f.at_conjugate(space, as_vector(c, space.dim, "c"))


def _add_le(tally, a, b, where=None):
    """Record ``a <= b`` with the extended-real conventions."""
    tally.add(excess(a, b), tol=scaled_tol(tally.tol, a, b), where=where)


def _add_eq(tally, a, b, where=None):
    if math.isinf(a) or math.isinf(b):
        tally.add(0.0 if a == b else math.inf, where=where)
    else:
        tally.add(abs(a - b), tol=scaled_tol(tally.tol, a, b), where=where)


def _broad_points(A, count, rng):
    """Candidates near ``A`` mixed with wide Gaussian points."""
    near = candidate_points(A, count - count // 4, rng)
    wide = 3.0 * rng.normal(size=(count // 4, A.dim))
    return np.vstack([near, wide])


def repr_membership_report(A, h, samples=500, seed=0, instance="set", expect="pass"):
    """``h >= q`` on random points and ``h = q`` on sampled points of ``A``."""
    rng = rng_from(seed)
    t = Tally(TOL)
    B = _broad_points(A, samples, rng)
    hv, qv = h.values(B), A.space.q_many(B)
    for k in range(B.shape[0]):
        _add_le(t, qv[k], hv[k], where=B[k].tolist())
    S = A.sample(max(1, samples // 5), rng)
    hs, qs = h.values(S), A.space.q_many(S)
    for k in range(S.shape[0]):
        _add_eq(t, hs[k], qs[k], where=S[k].tolist())
    return t.report("repr_membership", instance, seed, expect)


def sandwich_report(A, h, samples=500, seed=0, instance="set", expect="pass"):
    """``Phi_A <= h <= *Theta_A`` at random points."""
    rng = rng_from(seed)
    t = Tally(TOL)
    B = _broad_points(A, samples, rng)
    lo, mid, hi = A.phi().values(B), h.values(B), A.theta_star().values(B)
    for k in range(B.shape[0]):
        _add_le(t, lo[k], mid[k], where=B[k].tolist())
        _add_le(t, mid[k], hi[k], where=B[k].tolist())
    return t.report("sandwich", instance, seed, expect)


def h_at_membership_report(A, h, samples=200, seed=0, instance="set", expect="pass"):
    """``h^@`` is again a representative function: ``h^@ >= q`` and ``= q`` on ``A``."""
    rng = rng_from(seed)
    t = Tally(TOL)
    sp = A.space
    B = _broad_points(A, samples, rng)
    for b in B:
        _add_le(t, sp.q(b), h.at_conjugate(sp, b), where=b.tolist())
    for a in A.sample(max(1, samples // 5), rng):
        _add_eq(t, h.at_conjugate(sp, a), sp.q(a), where=a.tolist())
    return t.report("h_at_membership", instance, seed, expect)


def fitzpatrick_chain_report(A, samples=500, seed=0, instance="set", expect="pass"):
    """Consistency of the three Fitzpatrick-type functions.

    Checks ``Theta_A(iota b) = Phi_A(b)``, ``Phi_A = q - inf q(. - A)``,
    ``*Theta_A >= Phi_A^@ >= max(Phi_A, q)`` and ``*Theta_A = Phi_A^@ = q``
    on points of ``A``.
    """
    rng = rng_from(seed)
    t = Tally(TOL)
    sp = A.space
    phi, theta, ts = A.phi(), A.theta(), A.theta_star()
    B = _broad_points(A, samples, rng)
    pv, tv = phi.values(B), theta.values(sp.iota_many(B))
    qv = sp.q_many(B)
    inf_q = A.inf_q_many(B) if hasattr(A, "inf_q_many") else np.array([A.inf_q(b) for b in B])
    for k, b in enumerate(B):
        _add_eq(t, tv[k], pv[k], where=b.tolist())
        via_inf = math.inf if inf_q[k] == -math.inf else qv[k] - inf_q[k]
        _add_eq(t, via_inf, pv[k], where=b.tolist())
    m = max(1, samples // 10)
    C = np.vstack([B[:m], convex_combos(A.sample(8, rng), m, rng)])
    tsv = ts.values(C)
    for k, b in enumerate(C):
        pat = phi.at_conjugate(sp, b)
        _add_le(t, pat, tsv[k], where=b.tolist())
        _add_le(t, max(phi(b), sp.q(b)), pat, where=b.tolist())
    for a in A.sample(m, rng):
        _add_eq(t, ts(a), sp.q(a), where=a.tolist())
        _add_eq(t, phi.at_conjugate(sp, a), sp.q(a), where=a.tolist())
    return t.report("fitzpatrick_chain", instance, seed, expect)


def cross_validation_report(A, samples=200, seed=0, instance="set", expect="pass", tol=1e-8):
    """``Phi_A^@`` by conjugating ``Phi_A`` equals ``*Theta_A`` by the hull,
    and ``(*Theta_A)*`` equals ``Theta_A`` on sampled duals."""
    rng = rng_from(seed)
    t = Tally(tol)
    sp = A.space
    phi, theta, ts = A.phi(), A.theta(), A.theta_star()
    half = samples // 2
    pts = np.vstack([convex_combos(A.sample(max(3, samples), rng), half, rng),
                     candidate_points(A, samples - half, rng)])
    tsv = ts.values(pts)
    for k, b in enumerate(pts):
        _add_eq(t, phi.at_conjugate(sp, b), tsv[k], where=b.tolist())
    duals = np.vstack([sp.iota_many(candidate_points(A, half, rng)),
                       2.0 * rng.normal(size=(samples - half, A.dim))])
    thv = theta.values(duals)
    for k, y in enumerate(duals):
        _add_eq(t, ts.conjugate(y), thv[k], where=y.tolist())
    return t.report("cross_validation", instance, seed, expect)


def coincidence_report(A, h, samples=500, seed=0, instance="set", expect="pass", extra=None):
    """``P(h) = A``: points where ``h = q`` lie within ``1e-5`` of ``A``, and
    ``h = q`` on sampled points of ``A``."""
    rng = rng_from(seed)
    t = Tally(TOL)
    sp = A.space
    B = candidate_points(A, samples, rng)
    if extra is not None and len(extra):
        B = np.vstack([B, np.atleast_2d(extra)])
    gap = h.values(B) - sp.q_many(B)
    hits = 0
    for k, b in enumerate(B):
        if gap[k] <= scaled_tol(TOL, gap[k]):
            hits += 1
            zero_hit(t, A, b)
    for a in A.sample(max(1, samples // 5), rng):
        _add_eq(t, h(a), sp.q(a), where=a.tolist())
    t.notes["coincidence_points"] = hits
    return t.report("coincidence", instance, seed, expect)


# -- standard representative functions --------------------------------------


def penalized_repr(A, t):
    """``Phi_A + t |x* - M x - p|^2`` for an affine graph; in ``H(A)`` for ``t >= 0``."""
    from .sets import AffineGraph
    if not isinstance(A, AffineGraph):
        raise InputError("penalized representative functions need an affine graph")
    if t < 0:
        raise InputError("penalty weight must be nonnegative")
    C = np.hstack([-A.M, np.eye(A.n)])
    pen = Quadratic(2.0 * t * C.T @ C, -2.0 * t * C.T @ A.p, t * float(A.p @ A.p))
    return A.phi() + pen


def young_repr(f):
    """``(x, x*) -> f(x) + f*(x*)``, the representative function of the eps-subdifferential."""
    return SeparableSum(f, f.conjugate_fn())


def average_repr(A):
    """``(Phi_A + *Theta_A) / 2``; convex and between the extremes.

    When both extremes are polyhedral with a small vertex representation the
    result is a :class:`MaxAffine` (exact conjugate); otherwise it is an
    evaluation-only weighted sum.
    """
    phi, ts = A.phi(), A.theta_star()
    if isinstance(ts, PolyhedralHull):
        ts = ts.vrep or ts
    if isinstance(phi, MaxAffine) and isinstance(ts, MaxAffine):
        return max_affine_sum([(0.5, phi), (0.5, ts)])
    return WeightedSum([(0.5, phi), (0.5, ts)])


def standard_reprs(A):
    """Two nontrivial representative functions per maximal set kind."""
    from .sets import AffineGraph, SubdiffGraph
    if isinstance(A, AffineGraph):
        return {"h1": penalized_repr(A, 0.25), "h2": penalized_repr(A, 1.0)}
    if isinstance(A, SubdiffGraph):
        return {"h1": young_repr(A.f), "h2": average_repr(A)}
    return {}
