"""Full benchmark runs checked against measured and published iteration counts."""
from functools import lru_cache

import numpy as np
import pytest

from bench import BenchPlan, run_plan
from newton import RunStatus, newton_direct
from problems import get_problem
from solver_config import SolverConfig

pytestmark = pytest.mark.acceptance

# total inner iterations reported for GSOR at n=20, m=15, x0=(4, ..., 4)
PUBLISHED_GSOR_INNER = {'liarwhd': 96, 'diag-aup1': 165}
PUBLISHED_OUTER = {('liarwhd', 4.0): 11, ('diag-aup1', 4.0): 12,
                   ('liarwhd', 1.5): 8, ('diag-aup1', 1.5): 8}

# outer steps of exact Newton (dense solve, eps1=1e-6, gradient norm) on the stated objectives
DIRECT_OUTER = {
    ('liarwhd', 4.0, 20): 10, ('liarwhd', 4.0, 30): 10, ('liarwhd', 4.0, 50): 10,
    ('diag-aup1', 4.0, 20): 9, ('diag-aup1', 4.0, 30): 9, ('diag-aup1', 4.0, 50): 9,
    ('liarwhd', 1.5, 20): 6, ('liarwhd', 1.5, 30): 6, ('liarwhd', 1.5, 50): 7,
    ('diag-aup1', 1.5, 20): 6, ('diag-aup1', 1.5, 30): 6, ('diag-aup1', 1.5, 50): 6,
}

OUTER_CASES = [(problem, x0, n) for problem in ('liarwhd', 'diag-aup1')
               for x0, ns in ((4.0, (20, 30, 50)), (1.5, (20, 30))) for n in ns]


@lru_cache(maxsize=None)
def direct_outer(problem, x0, n):
    report = newton_direct(get_problem(problem, n), np.full(n, x0), SolverConfig())
    assert report.status is RunStatus.CONVERGED
    return report.outer_iterations


def rows_by_method(rows):
    return {(row.method, row.m): row for row in rows}


@pytest.mark.parametrize('problem,x0,n', sorted(DIRECT_OUTER))
def test_direct_outer_counts(problem, x0, n):
    assert direct_outer(problem, x0, n) == DIRECT_OUTER[(problem, x0, n)]


@pytest.mark.parametrize('problem,x0,n', OUTER_CASES)
def test_iterative_outer_counts_track_direct(problem, x0, n):
    methods = ('gsor', 'ggs', 'gj') if x0 == 4.0 else ('sor', 'gsor', 'ggs', 'gj')
    ms = ('n-5',) if x0 == 4.0 else ('n-5', 'n-3')
    plan = BenchPlan(problems=(problem,), ns=(n,), ms=ms, x0_fills=(x0,), methods=methods, jobs=4)
    expected = direct_outer(problem, x0, n)
    for row in run_plan(plan):
        assert row.status == 'converged', row
        assert abs(row.outer_ic - expected) <= 1, row


@pytest.mark.xfail(strict=True, reason='exact Newton on the stated objectives takes fewer outer '
                                       'steps than the published tables report')
@pytest.mark.parametrize('problem,x0,n', OUTER_CASES)
def test_published_outer_counts(problem, x0, n):
    assert direct_outer(problem, x0, n) == PUBLISHED_OUTER[(problem, x0)]


@pytest.mark.parametrize('problem', ['liarwhd', 'diag-aup1'])
@pytest.mark.parametrize('x0', [4.0, 1.5])
def test_converged_runs_recover_the_optimum(problem, x0):
    plan = BenchPlan(problems=(problem,), ns=(20,), ms=('n-5',), x0_fills=(x0,),
                     methods=('direct', 'sor', 'gsor', 'ggs', 'gj'), jobs=4)
    for row in run_plan(plan):
        if row.status != 'converged':
            continue
        assert np.max(np.abs(row.report.x_final - 1.0)) <= 1e-5
        assert row.report.f_final <= 1e-6


@pytest.mark.parametrize('problem', ['liarwhd', 'diag-aup1'])
def test_banded_methods_need_fewer_inner_iterations(problem):
    plan = BenchPlan(problems=(problem,), ns=(20,), ms=('15',), x0_fills=(4.0,),
                     methods=('sor', 'gsor', 'ggs', 'gj'), jobs=4)
    rows = rows_by_method(run_plan(plan))
    sor, gsor = rows[('sor', 0)], rows[('gsor', 15)]
    ggs, gj = rows[('ggs', 15)], rows[('gj', 15)]
    assert all(r.status == 'converged' for r in (sor, gsor, ggs, gj))

    assert gsor.inner_ic < sor.inner_ic
    assert ggs.inner_ic < gj.inner_ic
    assert gsor.inner_ic <= 1.5 * PUBLISHED_GSOR_INNER[problem]


def test_wider_band_needs_fewer_inner_iterations():
    plan = BenchPlan(problems=('liarwhd',), ns=(30,), ms=('27', '25', '0'), x0_fills=(1.5,),
                     methods=('gsor',), jobs=3)
    rows = rows_by_method(run_plan(plan))
    counts = [rows[('gsor', m)].inner_ic for m in (27, 25, 0)]
    assert None not in counts
    assert counts[0] <= counts[1] <= counts[2]
