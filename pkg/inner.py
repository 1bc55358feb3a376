"""Stationary inner solvers for the Newton system H d = fhat."""
from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np
from numpy.typing import ArrayLike

from errors import ConfigError, InnerDivergenceError
from linalg import (BandedSplitting, LowerSystemFactorization, MethodKind, Vector,
                    apply_rhs_operator, as_matrix, as_vector, factor_lower_system,
                    factor_matrix, iteration_operator, solve_factored, split)

logger = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class InnerMethod:
    kind: MethodKind
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", MethodKind(self.kind))
        if not 0.0 < self.omega <= 2.0:
            raise ConfigError(f"omega must lie in (0, 2], got {self.omega}")

    @property
    def omega_in_default_range(self) -> bool:
        return 1.0 < self.omega <= 2.0


@dataclass(frozen=True)
class InnerResult:
    d: Vector
    iterations: int
    converged: bool
    final_step_norm: float


def gj_step(s: BandedSplitting, d: ArrayLike, fhat: ArrayLike,
            fact: LowerSystemFactorization | None = None) -> Vector:
    # T_m d' = (E_m + F_m) d + fhat
    if fact is None:
        fact = factor_lower_system(s, 0.0)
    rhs = s.e_matvec(d) + s.f_matvec(d) + np.asarray(fhat, dtype=np.float64)
    return solve_factored(fact, rhs)


def gsor_step(s: BandedSplitting, omega: float, d: ArrayLike, fhat: ArrayLike,
              fact: LowerSystemFactorization | None = None) -> Vector:
    # (T_m - omega E_m) d' = (omega F_m + (1 - omega) T_m) d + omega fhat
    if fact is None:
        fact = factor_lower_system(s, omega)
    rhs = apply_rhs_operator(s, omega, d) + omega * np.asarray(fhat, dtype=np.float64)
    return solve_factored(fact, rhs)


def ggs_step(s: BandedSplitting, d: ArrayLike, fhat: ArrayLike,
             fact: LowerSystemFactorization | None = None) -> Vector:
    return gsor_step(s, 1.0, d, fhat, fact)


def make_step(s: BandedSplitting, method: InnerMethod):
    """Factor M once and return the update (d, fhat) -> d'."""
    fact, _ = iteration_operator(s, method.kind, method.omega)
    if method.kind is MethodKind.GJ:
        return lambda d, fhat: gj_step(s, d, fhat, fact)
    if method.kind is MethodKind.GGS:
        return lambda d, fhat: ggs_step(s, d, fhat, fact)
    return lambda d, fhat: gsor_step(s, method.omega, d, fhat, fact)


def inner_solve(h: ArrayLike, fhat: ArrayLike, method: InnerMethod, m: int, eps2: float,
                max_inner: int, norm_ord: float = 2, d0: ArrayLike | None = None) -> InnerResult:
    """
    Iterates the method's update from d0 (zero unless a warm start is passed)
    until ||d^{k+1} - d^k|| < eps2 or max_inner steps were taken.
    """
    h = as_matrix(h)
    fhat = as_vector(fhat)
    if eps2 <= 0 or max_inner < 1:
        raise ConfigError("eps2 must be positive and max_inner at least 1")

    if method.kind is MethodKind.DIRECT:
        d = solve_factored(factor_matrix(h), fhat)
        return InnerResult(d=d, iterations=1, converged=True, final_step_norm=0.0)

    step = make_step(split(h, m), method)
    d = np.zeros_like(fhat) if d0 is None else as_vector(d0)
    step_norm = np.inf
    for k in range(1, max_inner + 1):
        d_next = step(d, fhat)
        step_norm = float(np.linalg.norm(d_next - d, ord=norm_ord))
        if not np.all(np.isfinite(d_next)) or not np.isfinite(step_norm) \
                or step_norm > DIVERGENCE_LIMIT:
            raise InnerDivergenceError(
                f"{method.kind.value} diverged at inner step {k} (step norm {step_norm:.3e})", k)
        d = d_next
        if step_norm < eps2:
            return InnerResult(d=d, iterations=k, converged=True, final_step_norm=step_norm)

    logger.warning("%s stopped at max_inner=%d with step norm %.3e",
                   method.kind.value, max_inner, step_norm)
    return InnerResult(d=d, iterations=max_inner, converged=False, final_step_norm=step_norm)
