"""Dense two-phase simplex with Bland's rule.

Problems are in standard form::

    minimize    c^T x
    subject to  A x = b,  x >= 0

The solver is meant for desk-scale problems (a few hundred columns at most).
Every optimal solution carries a dual vector and the residuals needed to
certify it.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SolverError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_PIVOT_TOL = 1e-9
_COST_TOL = 1e-11
_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class LpProblem:
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        A = np.asarray(self.A_eq, dtype=float)
        b = np.asarray(self.b_eq, dtype=float).reshape(-1)
        if A.ndim != 2:
            A = A.reshape(len(b), -1)
        if A.shape != (b.shape[0], c.shape[0]):
            raise InputError(
                f"LP dimension mismatch: A is {A.shape}, b has {b.shape[0]}, c has {c.shape[0]}"
            )
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A_eq", A)
        object.__setattr__(self, "b_eq", b)


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray = None
    value: float = None
    dual: np.ndarray = None
    pivots: int = 0
    residuals: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == OPTIMAL


def _pivot(T, i, j):
    T[i] /= T[i, j]
    col = T[:, j].copy()
    col[i] = 0.0
    T -= np.outer(col, T[i])


def _bland(T, basis, ncols, budget):
    """Run primal simplex on tableau ``T`` (last row = reduced costs, last
    column = rhs) over the first ``ncols`` columns. Returns (status, pivots)."""
    m = T.shape[0] - 1
    pivots = 0
    cost_tol = _COST_TOL * max(1.0, np.max(np.abs(T[-1, :ncols]), initial=0.0))
    while True:
        neg = np.flatnonzero(T[-1, :ncols] < -cost_tol)
        if neg.size == 0:
            return OPTIMAL, pivots
        j = int(neg[0])
        col = T[:m, j]
        rows = np.flatnonzero(col > _PIVOT_TOL)
        if rows.size == 0:
            return UNBOUNDED, pivots
        ratios = T[rows, -1] / col[rows]
        rmin = ratios.min()
        tied = rows[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
        i = int(min(tied, key=lambda r: basis[r]))
        _pivot(T, i, j)
        basis[i] = j
        pivots += 1
        if pivots > budget:
            raise SolverError(f"simplex exceeded pivot cap ({budget})")


def lp_solve(problem, *, pivot_cap=None):
    """Solve ``problem`` and return an :class:`LpSolution`.

    Raises
    ------
    SolverError
        If Bland's rule exceeds ``pivot_cap`` pivots (default ``10 (m + n)^2``).
    """
    c, A, b = problem.c, problem.A_eq.copy(), problem.b_eq.copy()
    m, n = A.shape
    budget = pivot_cap if pivot_cap is not None else 10 * (m + n) ** 2

    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign

    if m == 0:
        if np.any(c < -_COST_TOL):
            return LpSolution(UNBOUNDED)
        x = np.zeros(n)
        return LpSolution(OPTIMAL, x=x, value=0.0, dual=np.zeros(0),
                          residuals={"primal": 0.0, "dual": 0.0, "gap": 0.0})

    # phase 1: artificial basis
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    status, p1 = _bland(T, basis, n + m, budget)
    if status != OPTIMAL:
        raise SolverError("phase 1 reported an unbounded auxiliary problem")
    if -T[-1, -1] > _FEAS_TOL * (1.0 + np.abs(b).max()):
        return LpSolution(INFEASIBLE, pivots=p1)

    # drive artificials out of the basis, dropping redundant rows
    keep = list(range(m))
    r = 0
    while r < len(basis):
        if basis[r] >= n:
            cand = np.flatnonzero(np.abs(T[r, :n]) > _PIVOT_TOL)
            if cand.size:
                j = int(cand[0])
                _pivot(T, r, j)
                basis[r] = j
            else:
                T = np.delete(T, r, axis=0)
                del basis[r]
                del keep[r]
                continue
        r += 1
    m2 = len(basis)

    # phase 2
    T2 = np.zeros((m2 + 1, n + 1))
    T2[:m2, :n] = T[:m2, :n]
    T2[:m2, -1] = T[:m2, -1]
    cb = c[basis]
    T2[-1, :n] = c - cb @ T2[:m2, :n]
    T2[-1, -1] = -cb @ T2[:m2, -1]
    status, p2 = _bland(T2, basis, n, budget - p1)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=p1 + p2)

    x = np.zeros(n)
    x[basis] = T2[:m2, -1]
    x = np.maximum(x, 0.0)
    y = np.zeros(m)
    if m2:
        B = A[keep][:, basis]
        try:
            y[keep] = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError:
            y[keep] = np.linalg.lstsq(B.T, c[basis], rcond=None)[0]
    y = y * sign
    value = float(c @ x)
    res = {
        "primal": float(np.max(np.abs(problem.A_eq @ x - problem.b_eq), initial=0.0)),
        "dual": float(max(0.0, -np.min(c - problem.A_eq.T @ y, initial=0.0))),
        "gap": float(abs(value - problem.b_eq @ y)),
    }
    return LpSolution(OPTIMAL, x=x, value=value, dual=y, pivots=p1 + p2, residuals=res)


def certificate_ok(sol, problem, tol=1e-8):
    """Primal feasibility, dual feasibility and zero gap within ``tol``."""
    if not sol.optimal:
        return False
    scale = 1.0 + np.abs(problem.b_eq).max(initial=0.0)
    return (
        sol.residuals["primal"] <= 1e-9 * scale
        and sol.residuals["dual"] <= tol
        and sol.residuals["gap"] <= tol * max(1.0, abs(sol.value))
        and np.min(sol.x, initial=0.0) >= -1e-10
    )


def lp_general(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, maximize=False):
    """Optimize ``c^T z`` over ``{A_ub z <= b_ub, A_eq z = b_eq}`` with free ``z``.

    Returns ``(status, value, z)``; ``value`` is ``+-inf`` when unbounded and
    ``None`` when infeasible.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    d = c.shape[0]
    A_ub = np.zeros((0, d)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    A_eq = np.zeros((0, d)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    k, e = A_ub.shape[0], A_eq.shape[0]
    # z = u - v, slack s
    cost = np.concatenate([c, -c, np.zeros(k)])
    if maximize:
        cost = -cost
    rows = np.zeros((k + e, 2 * d + k))
    rows[:k, :d] = A_ub
    rows[:k, d:2 * d] = -A_ub
    rows[:k, 2 * d:] = np.eye(k)
    rows[k:, :d] = A_eq
    rows[k:, d:2 * d] = -A_eq
    rhs = np.concatenate([b_ub, b_eq])
    sol = lp_solve(LpProblem(cost, rows, rhs))
    if sol.status == INFEASIBLE:
        return INFEASIBLE, None, None
    if sol.status == UNBOUNDED:
        return UNBOUNDED, (np.inf if maximize else -np.inf), None
    z = sol.x[:d] - sol.x[d:2 * d]
    val = float(c @ z)
    return OPTIMAL, val, z
