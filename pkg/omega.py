"""Choosing the GSOR relaxation parameter before the outer loop starts."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
import logging

import numpy as np
from numpy.typing import ArrayLike

from errors import AllCandidatesFailedError, ConfigError, SolverError
from inner import InnerMethod
from linalg import MethodKind, as_vector, spectral_radius_estimate, split
from newton import RunStatus, run_newton
from problems import ObjectiveProblem
from solver_config import SolverConfig

logger = logging.getLogger(__name__)

DEFAULT_GRID = tuple(round(1.0 + 0.05 * i, 2) for i in range(21))


class OmegaStrategy(str, Enum):
    GRID_BY_INNER_COUNT = "grid"
    SPECTRAL_RADIUS_AT_START = "spectral"


@dataclass(frozen=True)
class OmegaSearchSpec:
    strategy: OmegaStrategy = OmegaStrategy.GRID_BY_INNER_COUNT
    grid: tuple[float, ...] = DEFAULT_GRID
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'strategy', OmegaStrategy(self.strategy))
        object.__setattr__(self, 'grid', tuple(float(w) for w in self.grid))
        if not self.grid:
            raise ConfigError("omega grid is empty")
        if any(not 0.0 < w <= 2.0 for w in self.grid):
            raise ConfigError(f"omega grid values must lie in (0, 2]: {self.grid}")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("omega grid must be strictly increasing")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")


@dataclass
class OmegaDiagnostics:
    strategy: OmegaStrategy
    # omega -> score (total inner iterations or spectral radius); None if the candidate failed
    scores: dict[float, float | None] = field(default_factory=dict)
    failures: dict[float, str] = field(default_factory=dict)


def _grid_score(problem, x0, config, omega):
    report = run_newton(problem, x0, config, InnerMethod(MethodKind.GSOR, omega))
    if report.status is not RunStatus.CONVERGED:
        return None, report.message or report.status.value
    return report.inner_total, None


def _spectral_score(splitting, config, omega):
    estimate = spectral_radius_estimate(splitting, omega, MethodKind.GSOR, seed=config.seed)
    failure = None if estimate.converged else "spectral radius estimate did not settle"
    return estimate.radius, failure


def tune_omega(problem: ObjectiveProblem, x0: ArrayLike, config: SolverConfig,
               spec: OmegaSearchSpec | None = None) -> tuple[float, OmegaDiagnostics]:
    """
    Scores every grid omega and returns the smallest minimizer.
    Candidates that fail are recorded and skipped.
    """
    spec = spec or OmegaSearchSpec()
    x0 = as_vector(x0)
    config = replace(config, omega_auto=False)
    diagnostics = OmegaDiagnostics(strategy=spec.strategy)

    splitting = None
    if spec.strategy is OmegaStrategy.SPECTRAL_RADIUS_AT_START:
        splitting = split(problem.hessian(x0), config.m)

    def guarded(omega):
        try:
            if splitting is not None:
                return _spectral_score(splitting, config, omega)
            return _grid_score(problem, x0, config, omega)
        except SolverError as e:
            return None, str(e)

    with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
        outcomes = list(pool.map(guarded, spec.grid))

    best_omega, best_score = None, np.inf
    for omega, (value, failure) in zip(spec.grid, outcomes):
        if failure is not None:
            diagnostics.failures[omega] = failure
        diagnostics.scores[omega] = value
        if value is not None and value < best_score:
            best_omega, best_score = omega, value

    if best_omega is None:
        raise AllCandidatesFailedError(
            f"no omega in the grid produced a usable score for {problem.name} (m={config.m})")
    logger.info("omega search (%s) picked %.2f with score %s",
                spec.strategy.value, best_omega, best_score)
    return best_omega, diagnostics
