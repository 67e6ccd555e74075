"""Random candidate points, member pools and member pairs for the property checks."""

import numpy as np

from ._checks import as_points

# Perturbations smaller than this would make quadratic-growth level functions
# drop below 1e-9 while the point is still farther than 1e-5 from the set.
SIGMA_MIN = 1e-3
SIGMA_MAX = 1.0


def log_uniform(rng, lo, hi, size):
    return 10.0 ** rng.uniform(np.log10(lo), np.log10(hi), size=size)


def convex_combos(P, count, rng, max_terms=3):
    """Random convex combinations of 2..max_terms rows of ``P``."""
    P = as_points(P)
    out = np.empty((count, P.shape[1]))
    for k in range(count):
        t = int(rng.integers(2, max_terms + 1))
        idx = rng.integers(0, P.shape[0], size=t)
        out[k] = rng.dirichlet(np.ones(t)) @ P[idx]
    return out


def candidate_points(A, count, rng, sigma=(SIGMA_MIN, SIGMA_MAX)):
    """Points of ``A``, convex combinations of them, and Gaussian
    perturbations of both with log-uniform radius."""
    k = max(1, count // 4)
    base = A.sample(max(k, 3), rng)
    pts = A.sample(k, rng)
    combos = convex_combos(base if base.shape[0] > 1 else np.vstack([base, base]), k, rng)
    rest = count - 2 * k
    anchors = np.vstack([A.sample(rest - rest // 2, rng), convex_combos(base, rest // 2, rng)]) \
        if rest > 0 else np.zeros((0, A.dim))
    scale = log_uniform(rng, sigma[0], sigma[1], anchors.shape[0])[:, None]
    noisy = anchors + scale * rng.normal(size=anchors.shape)
    return np.vstack([pts, combos, noisy])[:count]


def onto_domain(E, B):
    """Orthogonal projection of the rows of ``B`` onto the affine hull of ``dom Lambda_E``.

    Perturbations of ``A`` usually leave a lower-dimensional domain (for
    instance ``x*`` in the range of a singular ``M``), where nothing can be
    tested; projected copies put those samples back where ``lambda`` is finite.
    """
    b0, N = E.Lambda.affine_hull()
    if N.shape[1] == E.dim:
        return B
    return b0 + (B - b0) @ N @ N.T


def domain_candidates(E, count, rng):
    """``candidate_points`` around ``E.A`` with every other point projected onto the domain."""
    C = candidate_points(E.A, count, rng)
    C[1::2] = onto_domain(E, C[1::2])
    return C


def member_pool(E, size, rng, max_rounds=10):
    """At least ``size`` points with finite level, with their levels.

    May return fewer points when the enlargement's finite region is hard to
    hit; callers treat that as an inconclusive sample.
    """
    got, lev = [], []
    total = 0
    for _ in range(max_rounds):
        C = domain_candidates(E, 2 * size, rng)
        L = E.lam_many(C)
        keep = np.isfinite(L)
        got.append(C[keep])
        lev.append(L[keep])
        total += int(keep.sum())
        if total >= size:
            break
    B = np.vstack(got) if got else np.zeros((0, E.dim))
    L = np.concatenate(lev) if lev else np.zeros(0)
    return B[:size], L[:size]


def member_pairs(E, count, rng, pool=None):
    """``count`` pairs of members ``(b1, b2, lam1, lam2, local)``.

    Half the pairs are drawn from a pool; the other half are symmetric pairs
    ``c +- s d`` around a pool point, which probe local convexity.
    """
    if pool is None:
        pool = member_pool(E, max(64, count // 4), rng)
    P, L = pool
    if P.shape[0] < 2:
        empty = np.zeros((0, E.dim))
        return empty, empty, np.zeros(0), np.zeros(0), np.zeros(0, dtype=bool)
    n_glob = count // 2
    i = rng.integers(0, P.shape[0], size=n_glob)
    j = (i + rng.integers(1, P.shape[0], size=n_glob)) % P.shape[0]
    b1, b2, l1, l2 = [P[i]], [P[j]], [L[i]], [L[j]]
    loc = [np.zeros(n_glob, dtype=bool)]
    need = count - n_glob
    for _ in range(20):
        if need <= 0:
            break
        m = 2 * need
        c = P[rng.integers(0, P.shape[0], size=m)]
        d = P[rng.integers(0, P.shape[0], size=m)] - P[rng.integers(0, P.shape[0], size=m)]
        gauss = rng.random(m) < 0.5
        d[gauss] = rng.normal(size=(int(gauss.sum()), E.dim))
        s = log_uniform(rng, SIGMA_MIN, SIGMA_MAX, m)[:, None]
        u, v = c + s * d, c - s * d
        lu, lv = E.lam_many(u), E.lam_many(v)
        ok = np.isfinite(lu) & np.isfinite(lv)
        ok &= np.cumsum(ok) <= need
        b1.append(u[ok]), b2.append(v[ok]), l1.append(lu[ok]), l2.append(lv[ok])
        loc.append(np.ones(int(ok.sum()), dtype=bool))
        need -= int(ok.sum())
    return (np.vstack(b1), np.vstack(b2), np.concatenate(l1), np.concatenate(l2),
            np.concatenate(loc))
