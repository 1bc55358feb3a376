"""
Outer Newton loop with unit steps. The direction comes either from a dense
direct solve or from one of the stationary inner solvers.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
import logging
import time

import numpy as np
from numpy.typing import ArrayLike

from errors import DimensionError, SolverError
from inner import InnerMethod, inner_solve
from linalg import MethodKind, Vector, as_vector
from problems import ObjectiveProblem
from solver_config import OuterCriterion, SolverConfig

logger = logging.getLogger(__name__)

ITERATE_LIMIT = 1e12


class RunStatus(str, Enum):
    CONVERGED = "converged"
    MAX_OUTER = "max_outer"
    INNER_FAILURE = "inner_failure"
    DIVERGED = "diverged"


@dataclass
class RunReport:
    outer_iterations: int
    inner_total: int
    inner_per_outer: list[int]
    status: RunStatus
    x_final: Vector
    f_final: float
    grad_norm_final: float
    omega_used: float | None
    wall_time: float
    descent_flags: list[bool] = field(default_factory=list)
    failed_outer: int | None = None
    message: str | None = None
    omega_tuning: object | None = None


def descent_check(problem: ObjectiveProblem, x_prev: ArrayLike, x_next: ArrayLike) -> bool:
    x_prev = np.asarray(x_prev, dtype=np.float64)
    x_next = np.asarray(x_next, dtype=np.float64)
    if x_prev.shape != x_next.shape:
        raise DimensionError("iterates have different shapes")
    return problem.eval(x_next) < problem.eval(x_prev)


def _criterion(config: SolverConfig, f_value: float, gradient: Vector) -> float:
    if config.outer_criterion is OuterCriterion.FUNCTION_VALUE:
        return abs(f_value)
    return float(np.linalg.norm(gradient))


def run_newton(problem: ObjectiveProblem, x0: ArrayLike, config: SolverConfig,
               method: InnerMethod) -> RunReport:
    x = as_vector(x0)
    if x.size != problem.n:
        raise DimensionError(f"x0 has length {x.size}, problem '{problem.name}' expects {problem.n}")

    omega_used = {MethodKind.GSOR: method.omega, MethodKind.GGS: 1.0}.get(method.kind)
    inner_counts = []
    descent_flags = []
    best = None
    status = None
    failed_outer = None
    message = None
    d_previous = None

    started = time.perf_counter()
    k = 0
    while True:
        f_value = problem.eval(x)
        gradient = problem.gradient(x)
        if not np.isfinite(f_value) or not np.all(np.isfinite(gradient)) \
                or np.linalg.norm(x) > ITERATE_LIMIT:
            status, message = RunStatus.DIVERGED, f"iterate left the finite range at outer step {k}"
            failed_outer = k
            break

        score = _criterion(config, f_value, gradient)
        if best is None or score < best[0]:
            best = (score, x, f_value, gradient)
        logger.info("%s outer %d: criterion %.3e", problem.name, k, score)
        if score < config.eps1:
            status = RunStatus.CONVERGED
            break
        if k == config.max_outer:
            status = RunStatus.MAX_OUTER
            break

        try:
            result = inner_solve(problem.hessian(x), -gradient, method, config.m, config.eps2,
                                 config.max_inner, norm_ord=config.step_norm,
                                 d0=d_previous if config.warm_start else None)
        except SolverError as e:
            status, failed_outer, message = RunStatus.INNER_FAILURE, k, str(e)
            inner_counts.append(getattr(e, 'iterations', 0))
            break
        inner_counts.append(result.iterations)
        if not result.converged:
            status, failed_outer = RunStatus.INNER_FAILURE, k
            message = f"inner solve hit max_inner={config.max_inner} at outer step {k}"
            break

        x_next = x + result.d
        descended = descent_check(problem, x, x_next)
        descent_flags.append(descended)
        if not descended:
            logger.warning("%s outer %d: unit step did not decrease f", problem.name, k)

        x = x_next
        d_previous = result.d
        k += 1

    wall_time = time.perf_counter() - started

    if status in (RunStatus.MAX_OUTER, RunStatus.DIVERGED) and best is not None:
        _, x, f_value, gradient = best
    if message:
        logger.warning("%s stopped with %s: %s", problem.name, status.value, message)

    return RunReport(outer_iterations=k, inner_total=sum(inner_counts), inner_per_outer=inner_counts,
                     status=status, x_final=x, f_final=float(f_value),
                     grad_norm_final=float(np.linalg.norm(gradient)), omega_used=omega_used,
                     wall_time=wall_time, descent_flags=descent_flags,
                     failed_outer=failed_outer, message=message)


def newton_direct(problem: ObjectiveProblem, x0: ArrayLike, config: SolverConfig) -> RunReport:
    return run_newton(problem, x0, config, InnerMethod(MethodKind.DIRECT))


def newton_iterative(problem: ObjectiveProblem, x0: ArrayLike, config: SolverConfig) -> RunReport:
    method = config.method
    tuning = None
    if config.omega_auto and method.kind is MethodKind.GSOR:
        from omega import tune_omega

        omega, tuning = tune_omega(problem, x0, config, config.omega_search)
        method = replace(method, omega=omega)
        logger.info("%s n=%d m=%d: tuned omega %.2f", problem.name, problem.n, config.m, omega)

    report = run_newton(problem, x0, config, method)
    report.omega_tuning = tuning
    return report
