import numpy as np
import pytest

from errors import AllCandidatesFailedError, ConfigError
from inner import InnerMethod
from linalg import MethodKind
from omega import DEFAULT_GRID, OmegaSearchSpec, OmegaStrategy, tune_omega
from problems import diag_aup1, liarwhd, quadratic
from solver_config import SolverConfig

SMALL_GRID = (1.0, 1.1, 1.2, 1.3, 1.5, 1.8)


def gsor_config(**kwargs):
    return SolverConfig(method=InnerMethod(MethodKind.GSOR, 1.0), **kwargs)


def test_default_grid():
    assert len(DEFAULT_GRID) == 21
    assert DEFAULT_GRID[0] == 1.0 and DEFAULT_GRID[-1] == 2.0
    assert DEFAULT_GRID[7] == 1.35


@pytest.mark.parametrize('grid', [(), (0.0, 1.0), (1.0, 2.5), (1.2, 1.1), (1.0, 1.0)])
def test_invalid_grids(grid):
    with pytest.raises(ConfigError):
        OmegaSearchSpec(grid=grid)


def test_single_point_grid_returns_it():
    omega, diagnostics = tune_omega(liarwhd(8), np.full(8, 4.0), gsor_config(m=3),
                                    OmegaSearchSpec(grid=(1.0,)))
    assert omega == 1.0
    assert list(diagnostics.scores) == [1.0]
    assert diagnostics.failures == {}


def test_spectral_strategy_on_full_band_picks_one():
    spec = OmegaSearchSpec(strategy=OmegaStrategy.SPECTRAL_RADIUS_AT_START)
    omega, diagnostics = tune_omega(liarwhd(6), np.full(6, 4.0), gsor_config(m=5), spec)
    assert omega == 1.0
    assert diagnostics.scores[1.0] == 0.0
    for w, radius in diagnostics.scores.items():
        assert radius == pytest.approx(abs(1.0 - w), rel=1e-6, abs=1e-12)


@pytest.mark.parametrize('factory', [liarwhd, diag_aup1])
def test_grid_choice_dominates_and_is_deterministic(factory):
    problem = factory(10)
    x0 = np.full(10, 4.0)
    spec = OmegaSearchSpec(grid=SMALL_GRID)
    omega, diagnostics = tune_omega(problem, x0, gsor_config(m=5), spec)
    again, diagnostics_again = tune_omega(problem, x0, gsor_config(m=5), spec)
    assert omega == again
    assert diagnostics.scores == diagnostics_again.scores

    best = diagnostics.scores[omega]
    others = [score for score in diagnostics.scores.values() if score is not None]
    assert all(best <= score for score in others)
    # ties go to the smallest omega
    assert omega == min(w for w, score in diagnostics.scores.items() if score == best)


def test_concurrent_search_matches_serial():
    problem = liarwhd(10)
    x0 = np.full(10, 4.0)
    serial = tune_omega(problem, x0, gsor_config(m=5), OmegaSearchSpec(grid=SMALL_GRID))
    threaded = tune_omega(problem, x0, gsor_config(m=5), OmegaSearchSpec(grid=SMALL_GRID, jobs=4))
    assert serial[0] == threaded[0]
    assert serial[1].scores == threaded[1].scores


def test_spectral_strategy_picks_the_true_optimum():
    # SOR on the 12-point second difference: optimal omega 1.614, so 1.65 is the best grid point
    h = 2.0 * np.eye(12) - np.eye(12, k=1) - np.eye(12, k=-1)
    problem = quadratic(h, np.ones(12))
    spec = OmegaSearchSpec(strategy='spectral')
    omega, diagnostics = tune_omega(problem, np.zeros(12), gsor_config(m=0), spec)
    assert diagnostics.strategy is OmegaStrategy.SPECTRAL_RADIUS_AT_START
    assert omega == 1.65
    assert diagnostics.scores[1.65] == pytest.approx(0.65, rel=1e-4)
    assert diagnostics.scores[1.95] == pytest.approx(0.95, rel=1e-4)
    assert diagnostics.failures == {}


def test_all_candidates_failing():
    with pytest.raises(AllCandidatesFailedError):
        tune_omega(liarwhd(5), np.full(5, 4.0), gsor_config(m=0, max_inner=1),
                   OmegaSearchSpec(grid=(1.0, 1.5)))
