"""Seeded random instance generators producing JSON-ready set specs."""

import warnings

import numpy as np

from ._checks import rng_from
from .errors import InputError
from .sets import MAX_SUBDIFF_DIM

KINDS = ("finite", "affine", "subdiff")


def _finite(space, rng, points, budget):
    acc = [rng.normal(scale=2.0, size=space.dim)]
    tries = 0
    while len(acc) < points and tries < budget:
        tries += 1
        b = rng.normal(scale=2.0, size=space.dim)
        P = np.array(acc)
        # keep a margin so generated sets are not near-degenerate
        if np.all(space.q_many(b - P) >= 1e-6):
            acc.append(b)
    if len(acc) < points:
        return None
    return {"finite": np.round(np.array(acc), 6).tolist()}


def _affine(n, rng):
    r = int(rng.integers(1, n + 1))
    # round the factors, not M: rounding M can make a singular S^T S indefinite
    S = np.round(rng.normal(size=(r, n)), 6)
    K = np.round(rng.normal(size=(n, n)), 6)
    P = S.T @ S
    M = 0.5 * (P + P.T) + 0.5 * (K - K.T)
    p = rng.normal(size=n)
    return {"affine": {"M": M.tolist(), "p": np.round(p, 6).tolist()}}


def _subdiff(n, rng, pieces):
    m = pieces if pieces is not None else int(rng.integers(2, 9))
    G = rng.normal(size=(m, n))
    c = rng.normal(size=m)
    return {"subdiff": {"pieces": [{"g": np.round(g, 6).tolist(), "c": round(float(v), 6)}
                                   for g, v in zip(G, c)]}}


def gen_random_instances(kind, count, dim, seed, points=5, pieces=None, space=None):
    """Return ``count`` set specs of the given kind.

    Parameters
    ----------
    kind : {"finite", "affine", "subdiff"}
    dim : int
        ``n`` of the product space ``R^n x R^n`` (finite sets use ``space`` if
        given instead).
    points : int
        Size of finite sets.
    pieces : int, optional
        Number of affine pieces for subdifferential graphs (default random in
        2..8).

    Each spec carries a ``"space"`` entry. Finite sets that cannot be grown
    within the rejection budget are dropped with a warning.
    """
    from .spaces import product, space_to_spec
    if kind not in KINDS:
        raise InputError(f"unknown instance kind {kind!r}")
    if count < 0:
        raise InputError("count must be nonnegative")
    limit = MAX_SUBDIFF_DIM if kind == "subdiff" else 10
    if not 1 <= dim <= limit:
        raise InputError(f"dim must be in 1..{limit} for {kind}")
    if pieces is not None and not 1 <= pieces <= 8:
        raise InputError("pieces must be in 1..8")
    rng = rng_from(seed)
    sp = space or product(dim)
    out = []
    dropped = 0
    for _ in range(count):
        if kind == "finite":
            spec = _finite(sp, rng, points, budget=1000 * points)
            if spec is None:
                dropped += 1
                continue
        elif kind == "affine":
            spec = _affine(dim, rng)
        else:
            spec = _subdiff(dim, rng, pieces)
        spec["space"] = space_to_spec(sp)
        out.append(spec)
    if dropped:
        warnings.warn(f"{dropped} finite instance(s) dropped: rejection budget exceeded", RuntimeWarning)
    return out
