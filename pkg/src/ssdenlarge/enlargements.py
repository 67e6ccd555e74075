"""Enlargements represented by their level functions.

An enlargement ``E`` of ``A`` is stored through ``Lambda_E = lambda_E + q``;
membership is ``b in E(eps)  <=>  lambda_E(b) <= eps``. Four constructions
are provided: the biggest enlargement ``E^A`` (``Lambda = Phi_A``), the
closure of the smallest one (``Lambda = *Theta_A``), ``A_h`` for a
representative function ``h`` (``Lambda = h``) and the eps-subdifferential
(``Lambda = f (+) f*``).
"""

import math

import numpy as np

from ._checks import as_points, as_vector, rng_from, scaled_tol
from .errors import ContractError, InputError
from .functions import MaxAffine, SeparableSum
from .reports import Tally
from .representative import TOL, _add_eq, _add_le, repr_membership_report, zero_hit
from .sampling import candidate_points, log_uniform, member_pairs, member_pool
from .sets import FiniteSet, SubdiffGraph, maximality_refute
from .spaces import product

MEMBER_SLACK = 1e-10


class Enlargement:
    """A closed enlargement given by ``Lambda_E``.

    Parameters
    ----------
    A : PositiveSet
    Lambda : ConvexFn
        ``lambda_E + q``; ``lambda_E`` is recovered as ``Lambda - q``.
    provenance : str
        ``"EA"``, ``"EbarA"``, ``"FromRepr"`` or ``"EpsSubdiff"``.
    level_route : callable, optional
        Independent evaluation of ``lambda_E`` on a batch of points, used by
        the round-trip check. Defaults to ``Lambda - q``.
    """

    def __init__(self, A, Lambda, provenance, label=None, level_route=None):
        if Lambda.dim != A.dim:
            raise InputError("Lambda lives in a different space than A")
        self.A = A
        self.Lambda = Lambda
        self.provenance = provenance
        self.label = label or provenance
        self._route = level_route

    def __repr__(self):
        return f"Enlargement({self.label}, {self.A!r})"

    @property
    def space(self):
        return self.A.space

    @property
    def dim(self):
        return self.A.dim

    def lam(self, b):
        b = as_vector(b, self.dim)
        v = self.Lambda(b)
        return v if math.isinf(v) else v - self.space.q(b)

    def lam_many(self, B):
        B = as_points(B, self.dim)
        if B.shape[0] == 0:
            return np.zeros(0)
        return self.Lambda.values(B) - self.space.q_many(B)

    def level_route(self, B):
        B = as_points(B, self.dim)
        if self._route is None:
            return self.lam_many(B)
        return self._route(B)

    def member(self, eps, b, slack=MEMBER_SLACK):
        if eps < 0:
            raise InputError("eps must be nonnegative")
        return self.lam(b) <= eps + slack


def membership(E, eps, b):
    return E.member(eps, b)


def _require_maximal(A, force):
    if not (A.maximal_by_construction or force):
        raise ContractError(f"{A!r} is not maximal by construction; pass force=True to override")


def make_ea(A, force=False):
    """``E^A``: ``b in E(eps)  <=>  q(b - c) >= -eps`` for all ``c in A``."""
    _require_maximal(A, force)

    def route(B):
        inf_q = A.inf_q_many(B)
        return np.where(inf_q == -math.inf, math.inf, -inf_q)

    return Enlargement(A, A.phi(), "EA", label="E^A", level_route=route)


def make_ebar(A, force=False):
    """Closure of the smallest enlargement, ``Lambda = *Theta_A``."""
    _require_maximal(A, force)
    return Enlargement(A, A.theta_star(), "EbarA", label="Ebar_A")


def make_from_repr(A, h, check=True, samples=200, seed=0, label=None):
    """``A_h(eps) = {b : h(b) <= eps + q(b)}``.

    Raises
    ------
    ContractError
        When ``check`` is on and ``h`` fails the representative-function test.
    """
    if check:
        rep = repr_membership_report(A, h, samples=samples, seed=seed)
        if rep.violations:
            raise ContractError(f"h is not a representative function of {A!r} "
                                f"(worst residual {rep.worst_residual:.3g})")
    return Enlargement(A, h, "FromRepr", label=label or "A_h")


def make_eps_subdiff(f):
    """``E(eps) = graph of the eps-subdifferential of f``, ``f`` max-affine."""
    if not isinstance(f, MaxAffine) or f.has_domain:
        raise InputError("eps-subdifferential enlargement needs a max-affine f on R^n")
    n = f.dim
    A = SubdiffGraph(product(n), f)
    Lam = SeparableSum(f, f.conjugate_fn())

    def route(B):
        out = np.empty(B.shape[0])
        for k, b in enumerate(B):
            x, xs = b[:n], b[n:]
            fs = f.conjugate(xs)
            out[k] = math.inf if math.isinf(fs) else f(x) + fs - float(x @ xs)
        return out

    return Enlargement(A, Lam, "EpsSubdiff", label="eps-subdiff", level_route=route)


def psi_map(space, eps, b):
    """``Psi(eps, b) = (eps + q(b), b)``."""
    b = as_vector(b, space.dim)
    return eps + space.q(b), b


def psi_inverse(space, mu, b):
    b = as_vector(b, space.dim)
    return mu - space.q(b), b


# -- reports ----------------------------------------------------------------


def _eps_levels(lam, rng):
    u = rng.uniform(0.0, 1.0, size=lam.shape)
    u[rng.random(lam.shape) < 0.5] = 0.0
    return lam + u


def lambda_axioms_report(E, samples=500, seed=0, instance=None, expect="pass"):
    """``lambda_E >= 0`` sampled and ``lambda_E = 0`` on sampled points of ``A``."""
    rng = rng_from(seed)
    t = Tally(TOL)
    B = candidate_points(E.A, samples, rng)
    for b, l in zip(B, E.lam_many(B)):
        t.add(-l, tol=1e-10, where=b.tolist())
    S = E.A.sample(max(1, samples // 5), rng)
    for a, l in zip(S, E.lam_many(S)):
        t.add(abs(l), where=a.tolist())
    return t.report("lambda_axioms", instance or E.label, seed, expect)


def transportation_report_2pt(E, trials=1000, seed=0, instance=None, expect="pass"):
    """Two-point transportation formula on sampled members.

    With ``b_i in E(eps_i)`` and ``eps = a1 eps1 + a2 eps2 + a1 a2 q(b1 - b2)``
    checks ``eps >= 0`` and ``a1 b1 + a2 b2 in E(eps)``.
    """
    rng = rng_from(seed)
    t = Tally(TOL)
    b1, b2, l1, l2, local = member_pairs(E, trials, rng)
    e1, e2 = _eps_levels(l1, rng), _eps_levels(l2, rng)
    a = rng.uniform(0.0, 1.0, size=l1.shape)
    a[local & (rng.random(l1.shape) < 0.5)] = 0.5
    sp = E.space
    eps = a * e1 + (1 - a) * e2 + a * (1 - a) * sp.q_many(b1 - b2)
    mid = a[:, None] * b1 + (1 - a)[:, None] * b2
    lm = E.lam_many(mid)
    for k in range(eps.shape[0]):
        tol = scaled_tol(TOL, e1[k], e2[k], lm[k])
        t.add(max(-eps[k], lm[k] - eps[k]), tol=tol, where=mid[k].tolist())
    return t.report("transportation_2pt", instance or E.label, seed, expect, min_trials=trials)


def transportation_report_npt(E, n=3, trials=200, seed=0, instance=None, expect="pass"):
    """n-point transportation formula.

    Also checks ``sum a_i q(b_i - bbar) = sum a_i q(b_i) - q(bbar)`` to 1e-10.
    """
    if not 2 <= n <= 8:
        raise InputError("n must be between 2 and 8")
    rng = rng_from(seed)
    t = Tally(TOL)
    ident = Tally(1e-10)
    sp = E.space
    P, L = member_pool(E, max(64, 4 * n), rng)
    done = 0
    attempts = 0
    while done < trials and attempts < 20 * trials and P.shape[0] >= n:
        attempts += 1
        if rng.random() < 0.5:
            idx = rng.choice(P.shape[0], size=n, replace=False)
            B, lam = P[idx], L[idx]
        else:
            c = P[rng.integers(P.shape[0])]
            if rng.random() < 0.5:
                d = rng.normal(size=(n, E.dim))
            else:
                d = P[rng.integers(0, P.shape[0], size=n)] - c
            d -= d.mean(axis=0)
            B = c + log_uniform(rng, 1e-3, 1.0, 1)[0] * d
            lam = E.lam_many(B)
            if not np.all(np.isfinite(lam)):
                continue
        alpha = rng.dirichlet(np.ones(n))
        eps_i = _eps_levels(lam, rng)
        bbar = alpha @ B
        qdev = sp.q_many(B - bbar)
        lhs = float(alpha @ qdev)
        rhs = float(alpha @ sp.q_many(B)) - sp.q(bbar)
        mag = float(np.max(np.abs(sp.q_many(B)), initial=0.0))
        ident.add(abs(lhs - rhs), tol=1e-10 * (1.0 + mag))
        eps = float(alpha @ eps_i) + lhs
        lb = E.lam(bbar)
        t.add(max(-eps, lb - eps), tol=scaled_tol(TOL, eps, lb), where=bbar.tolist())
        done += 1
    t.violations += ident.violations
    t.notes["identity_worst"] = max(0.0, ident.worst) if ident.trials else 0.0
    t.notes["n"] = n
    return t.report("transportation_npt", instance or E.label, seed, expect, min_trials=trials)


def psi_convexity_report(E, trials=1000, seed=0, instance=None, expect="pass"):
    """Midpoint convexity of ``Lambda_E``, i.e. convexity of ``Psi(G(E))``."""
    rng = rng_from(seed)
    t = Tally(TOL)
    b1, b2, l1, l2, _ = member_pairs(E, trials, rng)
    sp = E.space
    L1 = l1 + sp.q_many(b1)
    L2 = l2 + sp.q_many(b2)
    mid = 0.5 * (b1 + b2)
    Lm = E.Lambda.values(mid)
    for k in range(mid.shape[0]):
        bound = 0.5 * (L1[k] + L2[k])
        t.add(Lm[k] - bound, tol=scaled_tol(TOL, Lm[k], bound), where=mid[k].tolist())
    return t.report("psi_convexity", instance or E.label, seed, expect, min_trials=trials)


def roundtrip_report(A, h, E=None, samples=500, seed=0, instance=None, expect="pass"):
    """Bijection between closed enlargements and representative functions.

    ``Lambda_{A_h} = h``: for random levels ``eps``, membership in ``A_h(eps)``
    by the sublevel test must agree with ``h(b) <= eps + q(b)``. When ``E``
    is given, its level function computed through its own independent route
    (e.g. ``-inf q(b - A)`` for ``E^A``) plus ``q`` must equal ``h``.
    """
    rng = rng_from(seed)
    t = Tally(TOL)
    Ah = make_from_repr(A, h, check=False)
    B = candidate_points(A, samples, rng)
    hv = h.values(B)
    qv = A.space.q_many(B)
    lam = Ah.lam_many(B)
    for k in range(B.shape[0]):
        back = lam[k] if math.isinf(lam[k]) else lam[k] + qv[k]
        _add_eq(t, back, hv[k], where=B[k].tolist())
        if math.isfinite(lam[k]):
            eps = max(0.0, lam[k] + rng.normal(scale=0.1))
            direct = hv[k] <= eps + qv[k] + MEMBER_SLACK
            if Ah.member(eps, B[k]) != direct:
                t.add(math.inf, where=B[k].tolist())
    if E is not None:
        route = E.level_route(B)
        for k in range(B.shape[0]):
            back = route[k] if math.isinf(route[k]) else route[k] + qv[k]
            _add_eq(t, back, hv[k], where=B[k].tolist())
    return t.report("roundtrip", instance or (E.label if E else "A_h"), seed, expect)


def ordering_report(A, E, samples=500, seed=0, instance=None, expect="pass"):
    """``lambda_{E^A} <= lambda_E <= lambda_{Ebar_A}`` at sampled points."""
    rng = rng_from(seed)
    t = Tally(TOL)
    lo_E = make_ea(A, force=True)
    hi_E = make_ebar(A, force=True)
    B = np.vstack([candidate_points(A, samples - samples // 5, rng),
                   2.0 * rng.normal(size=(samples // 5, A.dim))])
    lo, mid, hi = lo_E.lam_many(B), E.lam_many(B), hi_E.lam_many(B)
    for k in range(B.shape[0]):
        _add_le(t, lo[k], mid[k], where=B[k].tolist())
        _add_le(t, mid[k], hi[k], where=B[k].tolist())
    return t.report("ordering", instance or E.label, seed, expect)


def e_zero_report(A, E, samples=500, seed=0, instance=None, expect="pass"):
    """``E(0) = A``: tolerance-level members lie within ``1e-5`` of ``A`` and
    ``lambda_E = 0`` on sampled points of ``A``.

    For finite sets the refutation witness, if any, joins the candidates.
    """
    rng = rng_from(seed)
    t = Tally(TOL)
    B = candidate_points(A, samples, rng)
    if isinstance(A, FiniteSet):
        w = maximality_refute(FiniteSet(A.space, A.points), seed=seed)
        if w is not None:
            B = np.vstack([B, w])
    lam = E.lam_many(B)
    hits = 0
    for k in range(B.shape[0]):
        if lam[k] <= TOL:
            hits += 1
            zero_hit(t, A, B[k])
    S = A.sample(max(1, samples // 5), rng)
    for a, l in zip(S, E.lam_many(S)):
        t.add(abs(l), where=a.tolist())
    t.notes["zero_level_points"] = hits
    return t.report("e_zero", instance or E.label, seed, expect)


def zero_level_positivity_report(E, trials=1000, seed=0, instance=None, expect="pass"):
    """Members of ``E(0)`` are pairwise q-positive."""
    rng = rng_from(seed)
    t = Tally(TOL)
    P, L = member_pool(E, 200, rng)
    Z = np.vstack([P[L <= TOL], E.A.sample(100, rng)])
    i = rng.integers(0, Z.shape[0], size=trials)
    j = rng.integers(0, Z.shape[0], size=trials)
    gaps = E.space.q_many(Z[i] - Z[j])
    for g in gaps:
        t.add(-g)
    return t.report("zero_level_positivity", instance or E.label, seed, expect)


def make_corrupted(A, height=1.0, width=0.5, center=None, seed=0):
    """Negative control: ``Lambda = Phi_A + height * gaussian bump``.

    The bump makes ``Lambda`` nonconvex, so both the transportation formula
    and the convexity of ``Psi(G(E))`` must fail.
    """
    from .functions import PointwiseFn
    phi = A.phi()
    c = A.sample(1, rng_from(seed))[0] if center is None else as_vector(center, A.dim)

    def Lam(B):
        d2 = np.sum((B - c) ** 2, axis=1)
        return phi.values(B) + height * np.exp(-0.5 * d2 / width ** 2)

    return Enlargement(A, PointwiseFn(Lam, A.dim, label="phi+bump", vectorized=True),
                       "Corrupted", label="corrupted")
