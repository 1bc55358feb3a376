"""
Benchmark objectives with analytic derivatives, a name registry for the CLI
and central finite-difference oracles for checking the derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from errors import ConfigError, DimensionError
from linalg import DenseMatrix, Vector, as_matrix, as_vector


@dataclass(frozen=True)
class ObjectiveProblem:
    name: str
    n: int
    eval: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    hessian: Callable[[Vector], DenseMatrix]
    known_optimum: Vector
    known_min_value: float


def _arrowhead_gradient(x, r, tail_gradient):
    # both objectives share sum_i 4 (x_i^2 - x_1)^2, which couples every x_i to x_1
    g = 16.0 * x * r + tail_gradient
    g[0] -= 8.0 * np.sum(r)
    return g


def _arrowhead_hessian(x, r, tail_diagonal):
    n = x.size
    h = np.diag(16.0 * r + 32.0 * x ** 2 + tail_diagonal)
    h[1:, 0] -= 16.0 * x[1:]
    h[0, 1:] -= 16.0 * x[1:]
    h[0, 0] += 8.0 * n - 32.0 * x[0]
    return h


def liarwhd(n: int) -> ObjectiveProblem:
    """f(x) = sum 4 (x_i^2 - x_1)^2 + sum (x_i - 1)^2, minimum 0 at (1, ..., 1)."""
    if n < 1:
        raise DimensionError(f"dimension must be at least 1, got {n}")

    def value(x):
        r = x ** 2 - x[0]
        return float(np.sum(4.0 * r ** 2) + np.sum((x - 1.0) ** 2))

    def gradient(x):
        return _arrowhead_gradient(x, x ** 2 - x[0], 2.0 * (x - 1.0))

    def hessian(x):
        return _arrowhead_hessian(x, x ** 2 - x[0], 2.0)

    return ObjectiveProblem(name="liarwhd", n=n, eval=value, gradient=gradient,
                            hessian=hessian, known_optimum=np.ones(n), known_min_value=0.0)


def diag_aup1(n: int) -> ObjectiveProblem:
    """f(x) = sum 4 (x_i^2 - x_1)^2 + sum (x_i^2 - 1)^2, minimum 0 at (1, ..., 1)."""
    if n < 1:
        raise DimensionError(f"dimension must be at least 1, got {n}")

    def value(x):
        r = x ** 2 - x[0]
        return float(np.sum(4.0 * r ** 2) + np.sum((x ** 2 - 1.0) ** 2))

    def gradient(x):
        return _arrowhead_gradient(x, x ** 2 - x[0], 4.0 * x * (x ** 2 - 1.0))

    def hessian(x):
        return _arrowhead_hessian(x, x ** 2 - x[0], 12.0 * x ** 2 - 4.0)

    return ObjectiveProblem(name="diag-aup1", n=n, eval=value, gradient=gradient,
                            hessian=hessian, known_optimum=np.ones(n), known_min_value=0.0)


def quadratic(a: ArrayLike, b: ArrayLike) -> ObjectiveProblem:
    """f(x) = 1/2 x^T A x - b^T x for symmetric positive definite A."""
    a = as_matrix(a)
    b = as_vector(b)
    if b.size != a.shape[0]:
        raise DimensionError("A and b dimensions differ")
    x_star = np.linalg.solve(a, b)

    return ObjectiveProblem(
        name="quadratic", n=b.size,
        eval=lambda x: float(0.5 * x @ a @ x - b @ x),
        gradient=lambda x: a @ x - b,
        hessian=lambda x: a.copy(),
        known_optimum=x_star,
        known_min_value=float(-0.5 * b @ x_star))


PROBLEMS: dict[str, Callable[[int], ObjectiveProblem]] = {
    "liarwhd": liarwhd,
    "diag-aup1": diag_aup1,
}


def register_problem(name: str, factory: Callable[[int], ObjectiveProblem]):
    PROBLEMS[name] = factory


def problem_names() -> list[str]:
    return list(PROBLEMS)


def get_problem(name: str, n: int) -> ObjectiveProblem:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise ConfigError(f"unknown problem '{name}', expected one of {problem_names()}") from None
    return factory(n)


def _default_step(x):
    return 1e-6 * (1.0 + np.max(np.abs(x)))


def fd_gradient(problem: ObjectiveProblem, x: ArrayLike, h: float | None = None) -> Vector:
    x = as_vector(x)
    h = _default_step(x) if h is None else h
    g = np.empty_like(x)
    shifted = x.copy()
    for i in range(x.size):
        shifted[i] = x[i] + h
        forward = problem.eval(shifted)
        shifted[i] = x[i] - h
        backward = problem.eval(shifted)
        shifted[i] = x[i]
        g[i] = (forward - backward) / (2.0 * h)
    return g


def fd_hessian(problem: ObjectiveProblem, x: ArrayLike, h: float | None = None) -> DenseMatrix:
    """Central differences of the analytic gradient, symmetrized as (A + A^T) / 2."""
    x = as_vector(x)
    h = _default_step(x) if h is None else h
    columns = np.empty((x.size, x.size))
    shifted = x.copy()
    for j in range(x.size):
        shifted[j] = x[j] + h
        forward = problem.gradient(shifted)
        shifted[j] = x[j] - h
        backward = problem.gradient(shifted)
        shifted[j] = x[j]
        columns[:, j] = (forward - backward) / (2.0 * h)
    return 0.5 * (columns + columns.T)
