import json
from contextlib import contextmanager
from pathlib import Path
import click
from config import Config
from reachavoid import create_app
from reachavoid.errors import InvalidScenarioError, ReachAvoidError, ScenarioFileError
from reachavoid.scenarios import io
from reachavoid.services import benchmark, game, simulation, verification
from reachavoid.utils import dump_json, error_report, success_report


class ReportedError(click.ClickException):
    """Prints the error envelope instead of click's plain message."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = message if details is None else details

    def show(self, file=None):
        click.echo(json.dumps(error_report(self.details, self.exit_code)), err=True)


class ScenarioError(ReportedError):
    exit_code = 3


class SolverRuntimeError(ReportedError):
    exit_code = 4


class PropertyFailure(ReportedError):
    exit_code = 5


@contextmanager
def domain_errors():
    try:
        yield
    except ScenarioFileError as e:
        raise ScenarioError(str(e), e.details) from e
    except InvalidScenarioError as e:
        raise ScenarioError(str(e), e.errors) from e
    except ReachAvoidError as e:
        raise SolverRuntimeError(f"{type(e).__name__}: {e}") from e


def _load(path):
    with domain_errors():
        return io.load_scenario(path)


def _fmt(value):
    return 'n/a' if value is None else f"{value:.6f}"


@click.group()
@click.pass_context
def cli(ctx):
    """Multiplayer reach-avoid games: solve, simulate, benchmark and verify."""
    if ctx.obj is None:
        ctx.obj = create_app()
    ctx.with_resource(ctx.obj.app_context())


@cli.command()
@click.argument('scenario_path', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--report', 'report_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Where to write the JSON solution report (default: <scenario>.solution.json).')
def solve(scenario_path, report_path):
    """Classify the game, find the optimal assignments and the game Value."""
    scenario = _load(scenario_path)
    with domain_errors():
        solution = game.solve(scenario)

    click.echo(f"winner:       {solution.winner.value}")
    click.echo(f"barrier:      {_fmt(solution.barrier_value)}")
    click.echo(f"assignment:   {solution.chosen.label()}")
    click.echo(f"gamma*:       {' '.join(solution.gamma_star.labels())}")
    click.echo(f"theta*:       {' '.join(solution.theta_star.labels())}")
    click.echo(f"value:        {_fmt(solution.value)}")
    click.echo(f"certified:    {'yes' if solution.certified else 'no'}")
    click.echo(f"dispersal:    {'yes' if solution.on_dispersal_surface else 'no'}")
    click.echo(f"penalty L:    {_fmt(solution.penalty_L)} (L*={_fmt(solution.l_star)}, L_bar={_fmt(solution.l_bar)})")
    for outcome in solution.per_pair:
        click.echo(f"  {outcome.label}: {outcome.region.value} alpha={outcome.alpha:.4f} value={_fmt(outcome.pair_value)}")

    report_path = report_path or scenario_path.with_name(f"{scenario_path.stem}.solution.json")
    dump_json(success_report(io.solution_report(solution)), report_path)
    click.echo(f"report:       {report_path}")


@cli.command()
@click.argument('scenario_path', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--profile', type=click.Choice(['optimal', 'straight-evaders']), default='optimal', show_default=True,
              help='Evader strategy: optimal play or straight to the target.')
@click.option('--pursuers', type=click.Choice(['feedback', 'open-loop']), default='feedback', show_default=True,
              help='Re-aim pursuers every step or hold their initial optimal heading.')
@click.option('--step', type=click.FloatRange(min=0, min_open=True),
              help='Integration step (default: scale-relative).')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Trajectory CSV (default: <scenario>.trajectory.csv).')
def simulate(scenario_path, profile, pursuers, step, out_path):
    """Play the game forward under a strategy profile and record the trajectory."""
    scenario = _load(scenario_path)
    strategy = simulation.StrategyProfile.named(profile, 'optimal' if pursuers == 'feedback' else 'open-loop')
    with domain_errors():
        trajectory = simulation.simulate(scenario, profile=strategy, step=step)

    out_path = out_path or scenario_path.with_name(f"{scenario_path.stem}.trajectory.csv")
    io.write_trajectory_csv(trajectory, out_path)
    events_file = io.write_events(trajectory, out_path)

    click.echo(f"assignment:      {trajectory.assignment.label()}")
    click.echo(f"realized payoff: {trajectory.realized_payoff:.6f}")
    click.echo(f"t_f:             {trajectory.t_f:.6f}")
    for event in trajectory.events:
        record = io.event_record(event)
        who = ''.join(f" {key}={record[key]}" for key in ('i', 'j') if key in record)
        click.echo(f"  {record['type']:<9} t={record['t']:.6f}{who}")
    click.echo(f"trajectory:      {out_path}")
    click.echo(f"events:          {events_file}")


@cli.command()
@click.option('--sizes', default=Config.BENCH_SIZES, show_default=True, help='Comma-separated (n,m) sizes.')
@click.option('--trials', type=click.IntRange(min=1), default=Config.BENCH_TRIALS, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--cap', type=click.FloatRange(min=1), default=Config.BRUTE_FORCE_CAP, show_default=True,
              help='Largest number of assignments brute force may enumerate.')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Also write the table as JSON.')
def bench(sizes, trials, seed, cap, out_path):
    """Time brute-force and matching-based assignment on random scenarios."""
    try:
        parsed = benchmark.parse_sizes(sizes)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint='--sizes') from e

    with domain_errors():
        rows = benchmark.run_bench(parsed, trials=trials, seed=seed, cap=cap, progress=True)
    click.echo(benchmark.format_table(rows))
    if out_path:
        dump_json(success_report({"trials": trials, "seed": seed, "cap": cap, "rows": rows}), out_path)
        click.echo(f"report: {out_path}")


@cli.command()
@click.argument('scenario_path', required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--random', 'random_args', nargs=4, type=int, metavar='N M TRIALS SEED',
              help='Random suites: N pursuers, M evaders, TRIALS instances, SEED.')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Write the property results as JSON.')
def verify(scenario_path, random_args, report_path):
    """Run the property suites on a scenario and/or random instances."""
    if scenario_path is None and not random_args:
        raise click.UsageError('give a scenario file or --random N M TRIALS SEED')
    if random_args and not random_args[0] >= random_args[1] >= 1:
        raise click.BadParameter('needs N ≥ M ≥ 1', param_hint='--random')

    scenario = _load(scenario_path) if scenario_path else None
    with domain_errors():
        report = verification.run_suite(scenario=scenario, random=tuple(random_args) if random_args else None)

    for result in report.results:
        click.echo(result.line())
    if report_path:
        dump_json(success_report({"passed": report.passed, "results": report.results}), report_path)

    if not report.passed:
        names = [r.name for r in report.failures]
        raise PropertyFailure(f"{len(names)} properties failed", {"failed": names})
    click.echo(f"all {len(report.results)} properties passed")
