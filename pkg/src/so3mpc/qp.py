"""Dense convex QP solver for box-constrained problems.

Solves

    minimize    0.5 x' H x + f' x + c
    subject to  lo <= x <= hi
                g_lo <= G x <= g_hi     (optional general rows)

with a primal active-set method on the bounds.  Problems here are small
(a dozen variables for the receding-horizon controller), so dense linear
algebra is the right tool.  General rows, when present, are handled by an
augmented-Lagrangian outer loop around the box solver; all bundled
scenarios use box-only problems.

The method is deterministic: ties in the ratio test and in multiplier
release are broken by lowest index, so identical inputs give identical
iterates.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 10000


@dataclass
class QpProblem:
    """Quadratic program data; see module docstring for the convention."""

    H: np.ndarray
    f: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    constant: float = 0.0
    G: np.ndarray | None = None
    g_lo: np.ndarray | None = None
    g_hi: np.ndarray | None = None

    def objective(self, x):
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.H @ x + self.f @ x + self.constant)


@dataclass
class QpSolution:
    x: np.ndarray
    objective: float
    iterations: int
    status: str                 # 'optimal' | 'max_iterations'
    active_set_size: int
    kkt_residual: float


def _kkt_residual(H, f, x, lo, hi, at_lo, at_hi):
    g = H @ x + f
    r = 0.0
    for i in range(x.size):
        if at_lo[i]:
            r = max(r, max(0.0, -g[i]))
        elif at_hi[i]:
            r = max(r, max(0.0, g[i]))
        else:
            r = max(r, abs(g[i]))
    return r


def solve_box_qp(H, f, lo, hi, x0=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Active-set solve of min 0.5 x'Hx + f'x over [lo, hi].

    Returns (x, iterations, status, active_set_size, kkt_residual).
    Bounds may be +-inf.  H must be symmetric positive semidefinite; the
    subproblem solves fall back to least squares if a principal block is
    singular.
    """
    H = np.asarray(H, dtype=float)
    f = np.asarray(f, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = f.size
    if np.any(lo > hi):
        raise InfeasibleError("box is empty: lo > hi componentwise")

    if x0 is None:
        try:
            x = np.linalg.solve(H, -f)
        except np.linalg.LinAlgError:
            x = np.zeros(n)
    else:
        x = np.asarray(x0, dtype=float).copy()
    x = np.clip(x, lo, hi)
    at_lo = x <= lo
    at_hi = x >= hi
    # a variable cannot sit on both sides unless the box is degenerate
    at_hi &= ~at_lo | (lo == hi)

    status = "max_iterations"
    iterations = 0
    for iterations in range(1, max_iter + 1):
        free = ~(at_lo | at_hi)
        moved = False
        if np.any(free):
            idx = np.flatnonzero(free)
            Hff = H[np.ix_(idx, idx)]
            rhs = -(f[idx] + H[np.ix_(idx, ~free)] @ x[~free]) if np.any(~free) else -f[idx]
            try:
                target = np.linalg.solve(Hff, rhs)
            except np.linalg.LinAlgError:
                target = np.linalg.lstsq(Hff, rhs, rcond=None)[0]
            d = target - x[idx]
            if np.max(np.abs(d)) > 1e-14:
                # largest step along d keeping the box; blocking index joins the active set
                theta = 1.0
                blocker = -1
                block_side_lo = False
                for j, i in enumerate(idx):
                    if d[j] > 0.0 and np.isfinite(hi[i]):
                        r = (hi[i] - x[i]) / d[j]
                        if r < theta - 1e-15:
                            theta, blocker, block_side_lo = r, i, False
                    elif d[j] < 0.0 and np.isfinite(lo[i]):
                        r = (lo[i] - x[i]) / d[j]
                        if r < theta - 1e-15:
                            theta, blocker, block_side_lo = r, i, True
                x[idx] = x[idx] + theta * d
                if blocker >= 0:
                    if block_side_lo:
                        x[blocker] = lo[blocker]
                        at_lo[blocker] = True
                    else:
                        x[blocker] = hi[blocker]
                        at_hi[blocker] = True
                moved = True
        if not moved:
            # at the optimum of the current working set: price the bounds
            g = H @ x + f
            worst = 0.0
            release = -1
            for i in range(n):
                if at_lo[i] and -g[i] > worst + 1e-15:
                    worst, release = -g[i], i
                elif at_hi[i] and g[i] > worst + 1e-15:
                    worst, release = g[i], i
            if release < 0 or worst <= tol:
                status = "optimal"
                break
            at_lo[release] = False
            at_hi[release] = False

    active = int(np.sum(at_lo | at_hi))
    res = _kkt_residual(H, f, x, lo, hi, at_lo, at_hi)
    if status == "optimal" and res > tol:
        status = "max_iterations"
    return x, iterations, status, active, res


def solve_qp(problem, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, warm_start=None):
    """Solve a QpProblem; dispatches on whether general rows are present.

    Returns a QpSolution.  On hitting the iteration cap the best iterate is
    returned with status 'max_iterations'.

    Raises
    ------
    InfeasibleError
        If the box is empty or the general rows prove inconsistent.
    """
    if problem.G is None:
        x, iters, status, active, res = solve_box_qp(
            problem.H, problem.f, problem.lo, problem.hi,
            x0=warm_start, tol=tol, max_iter=max_iter)
        return QpSolution(x=x, objective=problem.objective(x), iterations=iters,
                          status=status, active_set_size=active, kkt_residual=res)
    return _solve_with_general_rows(problem, tol, max_iter, warm_start)


def _solve_with_general_rows(problem, tol, max_iter, warm_start):
    """Augmented Lagrangian on g_lo <= Gx <= g_hi around the box solver."""
    G = np.asarray(problem.G, dtype=float)
    g_lo = np.asarray(problem.g_lo, dtype=float)
    g_hi = np.asarray(problem.g_hi, dtype=float)
    if np.any(g_lo > g_hi):
        raise InfeasibleError("general constraint rows are empty: g_lo > g_hi")
    lam = np.zeros(G.shape[0])
    rho = 10.0
    x = warm_start
    total_iters = 0
    prev_violation = np.inf
    for _ in range(50):
        s = np.clip((G @ x if x is not None else np.zeros(G.shape[0])) + lam / rho, g_lo, g_hi)
        H_aug = problem.H + rho * G.T @ G
        f_aug = problem.f + G.T @ (lam - rho * s)
        x, iters, status, active, res = solve_box_qp(
            H_aug, f_aug, problem.lo, problem.hi, x0=x, tol=tol, max_iter=max_iter)
        total_iters += iters
        s = np.clip(G @ x + lam / rho, g_lo, g_hi)
        violation = float(np.max(np.abs(G @ x - s), initial=0.0))
        if violation <= max(tol, 1e-9):
            return QpSolution(x=x, objective=problem.objective(x),
                              iterations=total_iters, status=status,
                              active_set_size=active, kkt_residual=res)
        lam = lam + rho * (G @ x - s)
        if violation > 0.9 * prev_violation:
            rho *= 10.0
            if rho > 1e12:
                raise InfeasibleError(
                    f"general rows appear inconsistent (violation {violation:.3e})")
        prev_violation = violation
    raise InfeasibleError(
        f"augmented-Lagrangian loop did not reach feasibility (violation {prev_violation:.3e})")
