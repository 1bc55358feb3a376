import csv
import io

import numpy as np
import orjson
import pytest

from bench import (CSV_HEADER, ERROR_STATUS, BenchPlan, BenchRow, emit_table, exit_code, load_rows,
                   run_plan)
from bench_tasks import parse_omega, resolve_bandwidth
from errors import ConfigError

CONVERGED_ROW = BenchRow('liarwhd', 20, 15, 'gsor', 1.4, 11, 96, 0.012, 'converged', x0=4.0)
FAILED_ROW = BenchRow('liarwhd', 100, 0, 'sor', 1.9, None, None, 3.5, 'max_outer', x0=4.0)


def small_plan(**kwargs):
    options = dict(problems=('liarwhd',), ns=(8,), ms=('n-3',),
                   methods=('sor', 'gsor', 'ggs', 'gj', 'direct'), omega=1.2)
    options.update(kwargs)
    return BenchPlan(**options)


def test_resolve_bandwidth():
    assert resolve_bandwidth('n-5', 20) == 15
    assert resolve_bandwidth('3', 20) == 3
    assert resolve_bandwidth(0, 1) == 0
    for value, n in (('n-30', 20), ('20', 20), ('-1', 5), ('n+1', 5), ('abc', 5)):
        with pytest.raises(ConfigError):
            resolve_bandwidth(value, n)


def test_parse_omega():
    assert parse_omega('auto') == 'auto'
    assert parse_omega('AUTO') == 'auto'
    assert parse_omega('1.35') == 1.35
    assert parse_omega(2) == 2.0
    for value in ('0', '2.5', 'fast', '-1'):
        with pytest.raises(ConfigError):
            parse_omega(value)


@pytest.mark.parametrize('kwargs', [
    {'methods': ()},
    {'problems': ()},
    {'ns': ()},
    {'problems': ('rosenbrock',)},
    {'methods': ('newton',)},
    {'ms': ('n-30',)},
    {'omega': '3'},
    {'repetitions': 0},
])
def test_plan_validation(kwargs):
    with pytest.raises(ConfigError):
        small_plan(**kwargs)


def test_plan_cells_resolve_bandwidths():
    plan = small_plan(ns=(8, 10), ms=('n-3', '2', 'n-8'))
    cells = plan.cells()
    by_method = {}
    for cell in cells:
        by_method.setdefault((cell.n, cell.method), []).append(cell.m)
    assert by_method[(8, 'sor')] == [0]
    assert by_method[(8, 'direct')] == [7]
    assert by_method[(10, 'direct')] == [9]
    # n-8 and 2 coincide at n=10
    assert by_method[(10, 'gsor')] == [7, 2]
    assert by_method[(8, 'gj')] == [5, 2, 0]


def test_run_plan_rows_follow_plan_order():
    plan = small_plan()
    rows = run_plan(plan)
    assert [(r.method, r.m) for r in rows] == [(c.method, c.m) for c in plan.cells()]
    assert all(r.status == 'converged' for r in rows)
    omegas = {r.method: r.omega_used for r in rows}
    assert omegas == {'sor': 1.2, 'gsor': 1.2, 'ggs': 1.0, 'gj': None, 'direct': None}
    assert exit_code(rows) == 0

    outer = {r.outer_ic for r in rows}
    assert len(outer) == 1
    direct = next(r for r in rows if r.method == 'direct')
    assert direct.inner_ic == direct.outer_ic


def test_concurrent_plan_is_deterministic():
    serial = run_plan(small_plan())
    threaded = run_plan(small_plan(jobs=3, repetitions=2))
    strip = [{k: v for k, v in r.to_dict().items() if k != 'time_sec'} for r in serial]
    assert strip == [{k: v for k, v in r.to_dict().items() if k != 'time_sec'} for r in threaded]


def test_direct_and_exact_gsor_agree():
    plan = BenchPlan(problems=('diag-aup1',), ns=(10,), ms=('n-1',), methods=('direct', 'gsor'),
                     omega=1.0)
    direct, gsor = run_plan(plan)
    assert direct.m == gsor.m == 9
    assert np.max(np.abs(direct.report.x_final - gsor.report.x_final)) <= 1e-8


def test_failed_cells_become_error_rows():
    plan = small_plan(methods=('gsor', 'gj'), omega='auto', max_inner=1)
    rows = run_plan(plan)
    assert rows[0].status == ERROR_STATUS
    assert rows[0].outer_ic is None and rows[0].report is None
    assert rows[1].status == 'inner_failure'
    assert rows[1].inner_ic is None
    assert exit_code(rows) == 2


def test_csv_output():
    text = emit_table([CONVERGED_ROW, FAILED_ROW], 'csv')
    lines = text.splitlines()
    assert lines[0] == 'problem,n,m,method,omega,outer_ic,inner_ic,time_sec,status'
    assert lines[0].split(',') == list(CSV_HEADER)
    assert lines[1] == 'liarwhd,20,15,gsor,1.40,11,96,0.012,converged'
    assert lines[2] == 'liarwhd,100,0,sor,1.90,,,3.500,max_outer'


def test_json_output_round_trips():
    rows = [CONVERGED_ROW, FAILED_ROW, BenchRow('diag-aup1', 20, 15, 'gj', None, 12, 359, 0.5,
                                                'converged')]
    text = emit_table(rows, 'json')
    assert list(orjson.loads(text)[0]) == list(CSV_HEADER)
    assert load_rows(text) == rows


def test_markdown_output():
    rows = [CONVERGED_ROW, FAILED_ROW, BenchRow('liarwhd', 20, 0, 'sor', 1.75, 11, 218, 0.02,
                                                'converged', x0=4.0)]
    text = emit_table(rows)
    assert text.startswith('### liarwhd, x0 = (4, ..., 4)')
    assert '| n | Newton-GSOR m | Newton-GSOR ω |' in text
    assert 'Newton-SOR Inner IC' in text
    assert '| 20 | 15 | 1.40 | 11 | 96 | 0.012 | 0 | 1.75 | 11 | 218 | 0.020 |' in text
    assert '| 100 |  |  |  |  |  | 0 | 1.90 | -- | -- | -- |' in text


def test_formats_report_the_same_counts():
    rows = run_plan(small_plan(methods=('gsor', 'gj')))
    from_csv = list(csv.DictReader(io.StringIO(emit_table(rows, 'csv'))))
    from_json = load_rows(emit_table(rows, 'json'))
    markdown = emit_table(rows, 'markdown')
    for row, csv_row, json_row in zip(rows, from_csv, from_json):
        assert int(csv_row['outer_ic']) == json_row.outer_ic == row.outer_ic
        assert int(csv_row['inner_ic']) == json_row.inner_ic == row.inner_ic
        assert f"| {row.outer_ic} | {row.inner_ic} |" in markdown


def test_emit_table_rejects_bad_input():
    with pytest.raises(ConfigError):
        emit_table([])
    with pytest.raises(ConfigError):
        emit_table([CONVERGED_ROW], 'xml')
