"""Dense nonlinear least-squares via Levenberg-Marquardt.

Small, deterministic solver for curve-fitting problems with a handful of
parameters: forward-difference Jacobian, multiplicative damping (x10 on a
rejected step, /10 on an accepted one), and simple bound handling by
projection.  Accepted iterates never increase the cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["LsqProblem", "LsqSolution", "solve_lsq", "numeric_jacobian"]

REL_STEP = 1e-6
ABS_STEP = 1e-8
_LAMBDA_INIT = 1e-3
_LAMBDA_MAX = 1e12
_LAMBDA_MIN = 1e-14


@dataclass
class LsqProblem:
    """Residual map plus starting point, bounds, and stopping tolerances."""

    residual: Callable[[np.ndarray], np.ndarray]
    x0: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    max_iterations: int = 200
    gtol: float = 1e-10
    xtol: float = 1.5e-8  # forward differences resolve no finer

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=np.float64).ravel()
        p = self.x0.size
        if self.lower is not None:
            self.lower = np.asarray(self.lower, dtype=np.float64).ravel()
            if self.lower.size != p:
                raise ValueError("lower bounds length mismatch")
            if np.any(self.x0 < self.lower):
                raise ValueError("initial point violates lower bounds")
        if self.upper is not None:
            self.upper = np.asarray(self.upper, dtype=np.float64).ravel()
            if self.upper.size != p:
                raise ValueError("upper bounds length mismatch")
            if np.any(self.x0 > self.upper):
                raise ValueError("initial point violates upper bounds")


@dataclass
class LsqSolution:
    params: np.ndarray
    cost: float  # half the sum of squared residuals
    converged: bool
    iterations: int
    reason: str


def _eval_residual(fn: Callable, x: np.ndarray) -> np.ndarray | None:
    """Residual vector, or None when the evaluation fails or is non-finite."""
    try:
        r = np.asarray(fn(x), dtype=np.float64).ravel()
    except (ValueError, FloatingPointError, ZeroDivisionError, OverflowError):
        return None
    if not np.all(np.isfinite(r)):
        return None
    return r


def numeric_jacobian(
    residual: Callable[[np.ndarray], np.ndarray],
    params: np.ndarray,
    r0: np.ndarray | None = None,
    upper: np.ndarray | None = None,
) -> np.ndarray:
    """Forward-difference Jacobian of `residual` at `params`.

    Step per coordinate is max(1e-6 * |param|, 1e-8).  A coordinate whose
    forward point lies above its upper bound, or whose perturbed residual is
    non-finite, falls back to a backward difference; if that also fails the
    column is zeroed (the solver then simply makes no progress along it and
    backtracks via damping).
    """
    x = np.asarray(params, dtype=np.float64).ravel()
    if r0 is None:
        r0 = _eval_residual(residual, x)
        if r0 is None:
            raise ValueError("residuals are not finite at the evaluation point")
    n, p = r0.size, x.size
    jac = np.zeros((n, p))
    for j in range(p):
        h = max(REL_STEP * abs(x[j]), ABS_STEP)
        directions = [h, -h]
        if upper is not None and x[j] + h > upper[j]:
            directions = [-h, h]
        for step in directions:
            xj = x.copy()
            xj[j] += step
            rj = _eval_residual(residual, xj)
            if rj is not None and rj.size == n:
                jac[:, j] = (rj - r0) / step
                break
        # both directions failed: column stays zero
    return jac


def solve_lsq(problem: LsqProblem) -> LsqSolution:
    """Minimize half the sum of squared residuals from `problem.x0`.

    Terminates when the gradient's max-norm drops below gtol, the relative
    step below xtol, the iteration cap is reached, or damping growth stalls
    (no acceptable step exists, e.g. persistent non-finite residuals).
    """
    fn = problem.residual
    lo, hi = problem.lower, problem.upper
    x = problem.x0.copy()
    r = _eval_residual(fn, x)
    if r is None:
        raise ValueError("residuals are not finite at the initial point")
    if r.size < x.size:
        raise ValueError(f"need at least as many residuals as parameters ({r.size} < {x.size})")
    cost = 0.5 * float(r @ r)
    lam = _LAMBDA_INIT
    reason = "max_iterations"
    iterations = 0

    for iterations in range(1, problem.max_iterations + 1):
        jac = numeric_jacobian(fn, x, r0=r, upper=hi)
        grad = jac.T @ r
        if np.max(np.abs(grad)) < problem.gtol:
            reason = "gradient"
            break
        jtj = jac.T @ jac
        diag = np.maximum(np.diag(jtj), 1e-12)

        accepted = False
        small_step = False
        while lam <= _LAMBDA_MAX:
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                delta = np.linalg.lstsq(jtj + lam * np.diag(diag), -grad, rcond=None)[0]
            # a near-Gauss-Newton trial step below resolution means converged,
            # whether or not it still buys a float-level cost improvement
            if lam <= _LAMBDA_INIT and float(np.linalg.norm(delta)) < problem.xtol * (
                float(np.linalg.norm(x)) + problem.xtol
            ):
                small_step = True
            x_new = x + delta
            if lo is not None:
                x_new = np.maximum(x_new, lo)
            if hi is not None:
                x_new = np.minimum(x_new, hi)
            r_new = _eval_residual(fn, x_new)
            if r_new is not None:
                cost_new = 0.5 * float(r_new @ r_new)
                if cost_new < cost:
                    step = float(np.linalg.norm(x_new - x))
                    x, r, cost = x_new, r_new, cost_new
                    lam = max(lam / 10.0, _LAMBDA_MIN)
                    accepted = True
                    if step < problem.xtol * (float(np.linalg.norm(x)) + problem.xtol):
                        reason = "step"
                    break
            if small_step:
                break
            lam *= 10.0
        if small_step:
            reason = "step"
            break
        if not accepted:
            reason = "stalled"
            break
        if reason == "step":
            break

    converged = reason in ("gradient", "step")
    return LsqSolution(
        params=x, cost=cost, converged=converged, iterations=iterations, reason=reason
    )
