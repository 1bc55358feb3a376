"""
Benchmark plans: the cross product of problems, dimensions, bandwidths,
methods and starting points, run cell by cell into table rows.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from itertools import product
import csv
import io
import logging

import numpy as np
import orjson

from bench_tasks import parse_omega, resolve_bandwidth, validate_bulk
from errors import ConfigError, SolverError
from inner import InnerMethod
from linalg import MethodKind
from newton import RunReport, RunStatus, newton_direct, newton_iterative
from omega import OmegaSearchSpec, OmegaStrategy, tune_omega
from problems import get_problem, problem_names
from regexes import METHOD_REGEX, PROBLEM_REGEX
from solver_config import (DEFAULT_EPS1, DEFAULT_EPS2, DEFAULT_MAX_INNER, DEFAULT_MAX_OUTER,
                           DEFAULT_SEED, OuterCriterion, SolverConfig)

logger = logging.getLogger(__name__)

CSV_HEADER = ('problem', 'n', 'm', 'method', 'omega', 'outer_ic', 'inner_ic', 'time_sec', 'status')
TABLE_FORMATS = ('markdown', 'csv', 'json')
ERROR_STATUS = 'error'


@dataclass(frozen=True)
class BenchCell:
    problem: str
    n: int
    m: int
    method: str
    x0_fill: float


@dataclass(frozen=True)
class BenchPlan:
    problems: tuple[str, ...]
    ns: tuple[int, ...]
    methods: tuple[str, ...]
    ms: tuple[str, ...] = ('n-5',)
    x0_fills: tuple[float, ...] = (4.0,)
    eps1: float = DEFAULT_EPS1
    eps2: float = DEFAULT_EPS2
    omega: float | str = 'auto'
    omega_strategy: OmegaStrategy = OmegaStrategy.GRID_BY_INNER_COUNT
    max_outer: int = DEFAULT_MAX_OUTER
    max_inner: int = DEFAULT_MAX_INNER
    criterion: OuterCriterion = OuterCriterion.GRADIENT_NORM
    repetitions: int = 1
    seed: int = DEFAULT_SEED
    jobs: int = 1

    def __post_init__(self):
        for name in ('problems', 'ns', 'methods', 'ms', 'x0_fills'):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, 'omega', parse_omega(self.omega))
        object.__setattr__(self, 'omega_strategy', OmegaStrategy(self.omega_strategy))
        object.__setattr__(self, 'criterion', OuterCriterion(self.criterion))

        if not self.problems or not self.ns or not self.methods or not self.x0_fills:
            raise ConfigError("plan needs at least one problem, dimension, method and x0")
        data_list = [{'input': p, 'pattern': PROBLEM_REGEX} for p in self.problems] \
            + [{'input': m, 'pattern': METHOD_REGEX} for m in self.methods]
        if not validate_bulk(data_list, 'input'):
            raise ConfigError(f"invalid problem or method names in {self.problems + self.methods}")
        unknown = [p for p in self.problems if p not in problem_names()]
        if unknown:
            raise ConfigError(f"unknown problems {unknown}, expected one of {problem_names()}")
        if any(n < 1 for n in self.ns):
            raise ConfigError(f"dimensions must be positive: {self.ns}")
        if self.repetitions < 1 or self.jobs < 1:
            raise ConfigError("repetitions and jobs must be at least 1")
        if not self.ms and any(m not in ('sor', 'direct') for m in self.methods):
            raise ConfigError("banded methods need at least one bandwidth")
        # resolving every cell up front rejects bad (n, m) pairs before anything runs
        self.cells()

    def cells(self) -> list[BenchCell]:
        cells = []
        for problem, x0_fill, n in product(self.problems, self.x0_fills, self.ns):
            for method in self.methods:
                if method == 'sor':
                    bandwidths = [0]
                elif method == 'direct':
                    bandwidths = [n - 1]
                else:
                    bandwidths = list(dict.fromkeys(resolve_bandwidth(m, n) for m in self.ms))
                cells.extend(BenchCell(problem, n, m, method, x0_fill) for m in bandwidths)
        return cells


@dataclass
class BenchRow:
    problem: str
    n: int
    m: int
    method: str
    omega_used: float | None
    outer_ic: int | None
    inner_ic: int | None
    time_sec: float
    status: str
    x0: float | None = field(default=None, compare=False)
    report: RunReport | None = field(default=None, compare=False, repr=False)

    def to_dict(self):
        return {
            'problem': self.problem,
            'n': self.n,
            'm': self.m,
            'method': self.method,
            'omega': self.omega_used,
            'outer_ic': self.outer_ic,
            'inner_ic': self.inner_ic,
            'time_sec': self.time_sec,
            'status': self.status,
        }


def _method_kind(method: str) -> MethodKind:
    # classical SOR is GSOR at bandwidth 0
    return MethodKind.GSOR if method == 'sor' else MethodKind(method)


def run_cell(plan: BenchPlan, cell: BenchCell) -> BenchRow:
    kind = _method_kind(cell.method)
    omega = plan.omega if kind is MethodKind.GSOR and plan.omega != 'auto' else 1.0
    try:
        config = SolverConfig(method=InnerMethod(kind, omega), m=cell.m, eps1=plan.eps1,
                              eps2=plan.eps2, max_outer=plan.max_outer, max_inner=plan.max_inner,
                              omega_search=OmegaSearchSpec(strategy=plan.omega_strategy),
                              outer_criterion=plan.criterion, seed=plan.seed)
        problem = get_problem(cell.problem, cell.n)
        x0 = np.full(cell.n, cell.x0_fill)
        tuning = None
        if plan.omega == 'auto' and kind is MethodKind.GSOR:
            omega, tuning = tune_omega(problem, x0, config, config.omega_search)
            config = replace(config, method=InnerMethod(kind, omega))

        solve = newton_direct if kind is MethodKind.DIRECT else newton_iterative
        reports = [solve(problem, x0, config) for _ in range(plan.repetitions)]
    except SolverError as e:
        logger.error("cell %s failed: %s", cell, e)
        return BenchRow(cell.problem, cell.n, cell.m, cell.method, None, None, None, 0.0,
                        ERROR_STATUS, x0=cell.x0_fill)

    report = reports[0]
    report.omega_tuning = tuning
    converged = report.status is RunStatus.CONVERGED
    return BenchRow(
        problem=cell.problem, n=cell.n, m=cell.m, method=cell.method,
        omega_used=None if report.omega_used is None else round(report.omega_used, 2),
        outer_ic=report.outer_iterations if converged else None,
        inner_ic=report.inner_total if converged else None,
        time_sec=round(min(r.wall_time for r in reports), 3),
        status=report.status.value, x0=cell.x0_fill, report=report)


def run_plan(plan: BenchPlan) -> list[BenchRow]:
    with ThreadPoolExecutor(max_workers=plan.jobs) as pool:
        return list(pool.map(partial(run_cell, plan), plan.cells()))


def exit_code(rows: list[BenchRow]) -> int:
    return 0 if all(row.status == RunStatus.CONVERGED.value for row in rows) else 2


def _text_fields(row: BenchRow) -> list[str]:
    return [
        row.problem, str(row.n), str(row.m), row.method,
        '' if row.omega_used is None else f"{row.omega_used:.2f}",
        '' if row.outer_ic is None else str(row.outer_ic),
        '' if row.inner_ic is None else str(row.inner_ic),
        f"{row.time_sec:.3f}",
        row.status,
    ]


def _emit_csv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    writer.writerows(_text_fields(row) for row in rows)
    return buffer.getvalue()


def _emit_json(rows):
    return orjson.dumps([row.to_dict() for row in rows], option=orjson.OPT_INDENT_2).decode()


def _markdown_block(row: BenchRow | None) -> list[str]:
    if row is None:
        return [''] * 5
    fields = _text_fields(row)
    if row.status != RunStatus.CONVERGED.value:
        return [fields[2], fields[4], '--', '--', '--']
    return [fields[2], fields[4], fields[5], fields[6], fields[7]]


def _emit_markdown(rows):
    groups = {}
    for row in rows:
        groups.setdefault((row.problem, row.x0), []).append(row)

    lines = []
    for (problem, x0), group in groups.items():
        title = problem if x0 is None else f"{problem}, x0 = ({x0:g}, ..., {x0:g})"
        methods = list(dict.fromkeys(row.method for row in group))
        header = ['n']
        for method in methods:
            label = f"Newton-{method.upper()}"
            header += [f"{label} m", f"{label} ω", f"{label} Outer IC",
                       f"{label} Inner IC", f"{label} T (s)"]

        lines += [f"### {title}", '', '| ' + ' | '.join(header) + ' |',
                  '|' + '---|' * len(header)]
        for n in dict.fromkeys(row.n for row in group):
            by_method = {method: [r for r in group if r.n == n and r.method == method]
                         for method in methods}
            height = max(len(cell_rows) for cell_rows in by_method.values())
            for i in range(height):
                cells = [str(n) if i == 0 else '']
                for method in methods:
                    cell_rows = by_method[method]
                    cells += _markdown_block(cell_rows[i] if i < len(cell_rows) else None)
                lines.append('| ' + ' | '.join(cells) + ' |')
        lines.append('')
    return '\n'.join(lines)


def emit_table(rows: list[BenchRow], format: str = 'markdown') -> str:
    if not rows:
        raise ConfigError("no rows to render")
    emitters = {'markdown': _emit_markdown, 'csv': _emit_csv, 'json': _emit_json}
    if format not in emitters:
        raise ConfigError(f"unknown table format '{format}', expected one of {TABLE_FORMATS}")
    return emitters[format](rows)


def load_rows(text: str) -> list[BenchRow]:
    """Parses the JSON rendering back into rows."""
    rows = []
    for item in orjson.loads(text):
        item = dict(item)
        item['omega_used'] = item.pop('omega')
        rows.append(BenchRow(**item))
    return rows
