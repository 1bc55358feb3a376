import sys

import click
import numpy as np

from bench import TABLE_FORMATS, BenchPlan, emit_table, exit_code, run_plan
from bench_tasks import parse_omega, validate_pattern
from errors import ConfigError
from omega import OmegaStrategy
from problems import get_problem, problem_names
from regexes import BANDWIDTH_REGEX
from solver_config import (DEFAULT_EPS1, DEFAULT_EPS2, DEFAULT_MAX_INNER, DEFAULT_MAX_OUTER,
                           DEFAULT_SEED, LOG_LEVEL, OuterCriterion, init_logging)

METHOD_CHOICES = ['sor', 'gsor', 'gj', 'ggs', 'direct']


def check_bandwidths(ctx, param, value):
    values = value if isinstance(value, tuple) else (value,)
    for v in values:
        if not validate_pattern(v, BANDWIDTH_REGEX):
            raise click.BadParameter(f"'{v}' is neither an integer nor of the form n-<k>")
    return value


def check_problems(ctx, param, value):
    # looked up per call so problems registered after import are accepted
    names = problem_names()
    values = value if isinstance(value, tuple) else (value,)
    for v in values:
        if v not in names:
            raise click.BadParameter(f"'{v}' is not one of {names}")
    return value


def check_omega(ctx, param, value):
    try:
        return parse_omega(value)
    except ConfigError as e:
        raise click.BadParameter(str(e))


def shared_options(command):
    options = [
        click.option('--omega', default='auto', show_default=True, callback=check_omega,
                     help="relaxation parameter for GSOR/SOR, a number in (0, 2] or 'auto'"),
        click.option('--omega-strategy', type=click.Choice([s.value for s in OmegaStrategy]),
                     default=OmegaStrategy.GRID_BY_INNER_COUNT.value, show_default=True),
        click.option('--eps1', type=float, default=DEFAULT_EPS1, show_default=True),
        click.option('--eps2', type=float, default=DEFAULT_EPS2, show_default=True),
        click.option('--max-outer', type=int, default=DEFAULT_MAX_OUTER, show_default=True),
        click.option('--max-inner', type=int, default=DEFAULT_MAX_INNER, show_default=True),
        click.option('--criterion', type=click.Choice([c.value for c in OuterCriterion]),
                     default=OuterCriterion.GRADIENT_NORM.value, show_default=True),
        click.option('--format', 'table_format', type=click.Choice(TABLE_FORMATS),
                     default='markdown', show_default=True),
        click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None,
                     help='write the table here instead of stdout'),
        click.option('--seed', type=int, default=DEFAULT_SEED, show_default=True,
                     help='seed for the spectral-radius start vector'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def write_output(text, out):
    if out is None:
        click.echo(text)
    else:
        with open(out, 'w', encoding='utf-8') as handle:
            handle.write(text)
            if not text.endswith('\n'):
                handle.write('\n')


@click.group()
@click.option('--log-level', default=LOG_LEVEL, show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
def cli(log_level):
    """Newton's method with banded-splitting inner solvers."""
    init_logging(log_level)


@click.command()
@click.option('--problem', required=True, callback=check_problems, help='registered problem name')
@click.option('--n', 'n', type=click.IntRange(min=1), required=True)
@click.option('--m', default='n-5', show_default=True, callback=check_bandwidths,
              help="bandwidth, an integer or 'n-<k>'")
@click.option('--method', type=click.Choice(METHOD_CHOICES), default='gsor', show_default=True)
@click.option('--x0', type=float, default=4.0, show_default=True, help='fill value of the start point')
@shared_options
@click.pass_context
def solve(ctx, problem, n, m, method, x0, omega, omega_strategy, eps1, eps2, max_outer, max_inner,
          criterion, table_format, out, seed):
    """Run a single Newton solve."""
    plan = BenchPlan(problems=(problem,), ns=(n,), ms=(m,), methods=(method,), x0_fills=(x0,),
                     eps1=eps1, eps2=eps2, omega=omega, omega_strategy=omega_strategy,
                     max_outer=max_outer, max_inner=max_inner, criterion=criterion, seed=seed)
    rows = run_plan(plan)
    write_output(emit_table(rows, table_format), out)

    report = rows[0].report
    if report is not None:
        error = np.max(np.abs(report.x_final - get_problem(problem, n).known_optimum))
        click.echo(f"f = {report.f_final:.3e}, |grad f| = {report.grad_norm_final:.3e}, "
                   f"max |x - x*| = {error:.3e}", err=True)
    ctx.exit(exit_code(rows))


@click.command()
@click.option('--problem', 'problems', multiple=True, required=True, callback=check_problems,
              help='registered problem names (repeatable)')
@click.option('--n', 'ns', type=click.IntRange(min=1), multiple=True, required=True)
@click.option('--m', 'ms', multiple=True, default=('n-5',), show_default=True,
              callback=check_bandwidths, help="bandwidths, integers or 'n-<k>' (repeatable)")
@click.option('--method', 'methods', type=click.Choice(METHOD_CHOICES), multiple=True,
              default=('sor', 'gsor', 'ggs', 'gj'), show_default=True)
@click.option('--x0', 'x0_fills', type=float, multiple=True, default=(4.0,), show_default=True)
@click.option('--repetitions', type=click.IntRange(min=1), default=1, show_default=True)
@click.option('--jobs', type=click.IntRange(min=1), default=1, show_default=True)
@shared_options
@click.pass_context
def bench(ctx, problems, ns, ms, methods, x0_fills, repetitions, jobs, omega, omega_strategy,
          eps1, eps2, max_outer, max_inner, criterion, table_format, out, seed):
    """Run a benchmark plan and print the comparison tables."""
    plan = BenchPlan(problems=problems, ns=ns, ms=ms, methods=methods, x0_fills=x0_fills,
                     eps1=eps1, eps2=eps2, omega=omega, omega_strategy=omega_strategy,
                     max_outer=max_outer, max_inner=max_inner, criterion=criterion,
                     repetitions=repetitions, seed=seed, jobs=jobs)
    rows = run_plan(plan)
    write_output(emit_table(rows, table_format), out)
    ctx.exit(exit_code(rows))


def get_commands():
    return [
        ('solve', solve),
        ('bench', bench),
    ]


def config_cli():
    for name, command in get_commands():
        cli.add_command(command, name=name)


config_cli()


def main(argv=None):
    try:
        return cli.main(args=argv, prog_name='ngsor', standalone_mode=False) or 0
    except click.ClickException as e:
        e.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except ConfigError as e:
        click.echo(f"Error: {e}", err=True)
        return 1


if __name__ == '__main__':
    sys.exit(main())
