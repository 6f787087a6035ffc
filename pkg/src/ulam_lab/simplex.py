"""A small dense two-phase primal simplex solver.

Solves  minimize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.

The instances this package produces are dense and small (a few hundred
variables), so a tableau method is the right tool: phase 1 drives
artificial variables to zero to find a basic feasible point, phase 2
optimizes the real objective.  Entering columns follow Dantzig's rule
with smallest-index ties; if the objective stalls long enough to
suggest degenerate cycling, the pivot rule switches to Bland's, which
terminates unconditionally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEASIBILITY_TOL = 1e-9

PIVOT_TOL = 1e-11

_STALL_LIMIT = 200


@dataclass(frozen=True)
class LinProgResult:
    status: str  # optimal | infeasible | unbounded | iteration-limit
    x: np.ndarray | None
    value: float | None
    iterations: int

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    other = np.arange(t.shape[0]) != row
    t[other] -= np.outer(t[other, col], t[row])


def _simplex_core(t: np.ndarray, basis: list[int], cost: np.ndarray, max_iter: int) -> tuple[str, int]:
    """Optimize a canonical tableau in place; returns (status, iterations)."""
    n_cols = t.shape[1] - 1
    stall = 0
    last_obj = np.inf
    bland = False
    for it in range(max_iter):
        reduced = cost - cost[basis] @ t[:, :n_cols]
        reduced[basis] = 0.0
        negative = np.flatnonzero(reduced < -FEASIBILITY_TOL)
        if negative.size == 0:
            return "optimal", it
        if bland:
            col = int(negative[0])
        else:
            col = int(negative[np.argmin(reduced[negative])])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(t[:, col] > PIVOT_TOL, t[:, -1] / t[:, col], np.inf)
        if not np.isfinite(ratios).any():
            return "unbounded", it
        best = float(np.min(ratios))
        tied = np.flatnonzero(ratios <= best + 1e-15)
        row = int(tied[np.argmin(np.asarray(basis)[tied])])
        _pivot(t, row, col)
        basis[row] = col
        obj = float(cost[basis] @ t[:, -1])
        if obj < last_obj - 1e-12:
            stall = 0
            last_obj = obj
        else:
            stall += 1
            if stall > _STALL_LIMIT:
                bland = True
    return "iteration-limit", max_iter


def linprog_simplex(
    c,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
    max_iter: int = 50_000,
) -> LinProgResult:
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    a_ub = np.zeros((0, n)) if a_ub is None else np.asarray(a_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    a_eq = np.zeros((0, n)) if a_eq is None else np.asarray(a_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    if a_ub.shape != (b_ub.shape[0], n) or a_eq.shape != (b_eq.shape[0], n):
        raise ValueError("constraint shapes do not match the cost vector")

    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq
    slack = np.vstack([np.eye(m_ub), np.zeros((m_eq, m_ub))]) if m else np.zeros((0, 0))
    a = np.hstack([np.vstack([a_ub, a_eq]), slack]) if m else np.zeros((0, n + m_ub))
    b = np.concatenate([b_ub, b_eq])
    flip = b < 0
    a[flip] *= -1.0
    b = np.abs(b)

    # initial basis: unflipped ub rows keep their slack; others get artificials
    n_real = n + m_ub
    basis: list[int] = []
    artificial_rows = []
    for i in range(m):
        if i < m_ub and not flip[i]:
            basis.append(n + i)
        else:
            artificial_rows.append(i)
            basis.append(-1)  # placeholder
    n_art = len(artificial_rows)
    art = np.zeros((m, n_art))
    for k, i in enumerate(artificial_rows):
        art[i, k] = 1.0
        basis[i] = n_real + k
    t = np.hstack([a, art, b[:, None]])
    iterations = 0

    if n_art:
        phase1_cost = np.concatenate([np.zeros(n_real), np.ones(n_art)])
        status, used = _simplex_core(t, basis, phase1_cost, max_iter)
        iterations += used
        if status == "iteration-limit":
            return LinProgResult("iteration-limit", None, None, iterations)
        if float(phase1_cost[basis] @ t[:, -1]) > FEASIBILITY_TOL:
            return LinProgResult("infeasible", None, None, iterations)
        # drive leftover artificials out of the basis or drop their rows
        keep_rows = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n_real:
                pivots = np.flatnonzero(np.abs(t[i, :n_real]) > PIVOT_TOL)
                if pivots.size:
                    _pivot(t, i, int(pivots[0]))
                    basis[i] = int(pivots[0])
                else:
                    keep_rows[i] = False  # redundant constraint
        if not keep_rows.all():
            t = t[keep_rows]
            basis = [bv for bv, k in zip(basis, keep_rows) if k]
    t = np.hstack([t[:, :n_real], t[:, -1:]])

    phase2_cost = np.concatenate([c, np.zeros(m_ub)])
    status, used = _simplex_core(t, basis, phase2_cost, max_iter - iterations)
    iterations += used
    if status != "optimal":
        return LinProgResult(status, None, None, iterations)
    x_full = np.zeros(n_real)
    x_full[np.asarray(basis, dtype=int)] = t[:, -1]
    x = x_full[:n]
    return LinProgResult("optimal", x, float(c @ x), iterations)
