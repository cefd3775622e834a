"""
Property suites behind `reachavoid verify`.

Each check returns a PropertyResult with the worst residual it saw. Degenerate
inputs (coincident players, a pursuer parked on the target) are reported as
skipped cases rather than failures.
"""
import itertools
import logging
from dataclasses import dataclass, field
import numpy as np
from config import Config
from reachavoid.errors import (
    DegenerateGeometryError,
    RegionMismatchError,
    SingularGradientError,
    UnsupportedRegimeError,
)
from reachavoid.models.scenario import Scenario
from . import assignment as assign
from . import benchmark
from . import duel
from . import game
from . import simulation
from .duel import Region

logger = logging.getLogger(__name__)

HJI_TOLERANCE = 1e-9
GRADIENT_TOLERANCE = 1e-5
GRADIENT_STEP = 1e-6
STRAIGHTNESS_TOLERANCE = 1e-6
DRIFT_TOLERANCE = 1e-4
ORACLE_TOLERANCE = 1e-12

# sampling box and rejection thresholds for random duel states
STATE_BOX = 10.0
MIN_SEPARATION = 0.5
MAX_UNEQUAL_ALPHA = 0.95
EQUAL_SPEED_FRACTION = 0.1


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float | None = None
    detail: str = ''
    skipped: bool = False

    @property
    def status(self):
        if self.skipped:
            return 'SKIP'
        return 'PASS' if self.passed else 'FAIL'

    def line(self):
        worst = '' if self.worst is None else f" worst={self.worst:.3e}"
        detail = f" ({self.detail})" if self.detail else ''
        return f"{self.status:<4} {self.name}{worst}{detail}"


@dataclass(frozen=True)
class VerificationReport:
    results: tuple[PropertyResult, ...] = field(default=())

    @property
    def passed(self):
        return all(r.passed or r.skipped for r in self.results)

    @property
    def failures(self):
        return [r for r in self.results if not (r.passed or r.skipped)]

    def by_name(self, name):
        return next(r for r in self.results if r.name == name)


def _skipped(name, detail):
    logger.warning(f"VERIFY_SKIP: {name}: {detail}")
    return PropertyResult(name=name, passed=True, detail=detail, skipped=True)


def _evaluator(region):
    return duel.value_pursuer_region if region is Region.PURSUER_WINS else duel.value_evader_region


def random_duel_states(rng, count, region):
    """Random well-conditioned duel states inside one winning region."""
    states = []
    while len(states) < count:
        x_E = rng.uniform(-STATE_BOX, STATE_BOX, 3)
        x_P = rng.uniform(-STATE_BOX, STATE_BOX, 3)
        V = rng.uniform(1.0, 3.0)
        alpha = 1.0 if rng.random() < EQUAL_SPEED_FRACTION else rng.uniform(0.05, MAX_UNEQUAL_ALPHA)
        state = duel.DuelState(x_E=x_E, x_P=x_P, U=alpha * V, V=V)
        scale = max(state.R_E, state.R_P)
        if min(np.linalg.norm(x_E - x_P), state.R_E, state.R_P) < MIN_SEPARATION:
            continue
        # keep finite-difference stencils away from the barrier surface
        if abs(duel.barrier_1v1(state)) < 1e-3 * scale ** 2:
            continue
        if duel.region_of(state) is region:
            states.append(state)
    return states


def scenario_duel_states(s: Scenario):
    """Supported pair states of a scenario plus labels of the degenerate ones."""
    states, degenerate = [], []
    for i in range(s.m):
        for j in range(s.n):
            state = duel.DuelState.from_scenario(s, i, j)
            region = duel.region_of(state)
            if region is Region.UNSUPPORTED:
                continue
            try:
                _evaluator(region)(state)
            except (DegenerateGeometryError, SingularGradientError):
                degenerate.append(f"E{i + 1}P{j + 1}")
                continue
            states.append(state)
    return states, degenerate


def check_hji_residual(states, tolerance=HJI_TOLERANCE, name='hji-residual'):
    if not states:
        return _skipped(name, 'no supported states')
    worst = max(abs(duel.hji_residual(state)) for state in states)
    return PropertyResult(name=name, passed=worst < tolerance, worst=worst, detail=f"{len(states)} states")


def _central_difference(fn, x, h):
    grad = np.empty(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        grad[k] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return grad


def gradient_error(state):
    """Relative mismatch between analytic and central-difference gradients."""
    region = duel.region_of(state)
    evaluate = _evaluator(region)
    analytic = evaluate(state)
    h = GRADIENT_STEP * max(state.R_E, state.R_P, np.linalg.norm(state.x_E - state.x_P))

    def along_E(x):
        return evaluate(duel.DuelState(x_E=x, x_P=state.x_P, U=state.U, V=state.V)).value

    def along_P(x):
        return evaluate(duel.DuelState(x_E=state.x_E, x_P=x, U=state.U, V=state.V)).value

    errors = []
    for fn, x, g in ((along_E, state.x_E, analytic.grad_E), (along_P, state.x_P, analytic.grad_P)):
        numeric = _central_difference(fn, x, h)
        errors.append(np.linalg.norm(numeric - g) / max(np.linalg.norm(g), 1.0))
    return float(max(errors))


def check_gradients(states, tolerance=GRADIENT_TOLERANCE, name='gradient-fd'):
    if not states:
        return _skipped(name, 'no supported states')
    errors = []
    crossed = 0
    for state in states:
        try:
            errors.append(gradient_error(state))
        except (RegionMismatchError, SingularGradientError):
            crossed += 1
    detail = f"{len(errors)} states" + (f", {crossed} on a region boundary" if crossed else '')
    if not errors:
        # every stencil crossed a boundary, nothing was compared
        return PropertyResult(name=name, passed=False, detail=detail)
    worst = max(errors)
    return PropertyResult(name=name, passed=worst < tolerance, worst=worst, detail=detail)


def check_interception_distance(states, name='interception-distance'):
    """Pursuer-region value is positive and equals the distance of the interception point."""
    states = [st for st in states if duel.region_of(st) is Region.PURSUER_WINS]
    if not states:
        return _skipped(name, 'no pursuer-region states')
    worst = 0.0
    positive = True
    for state in states:
        value = duel.value_pursuer_region(state)
        positive = positive and value.value > 0
        gap = abs(value.value - np.linalg.norm(value.interception_point)) / max(1.0, value.value)
        worst = max(worst, float(gap))
    return PropertyResult(name=name, passed=bool(positive) and worst < HJI_TOLERANCE, worst=worst)


def _random_instances(n, m, trials, rng):
    for _ in range(trials):
        s = benchmark.random_scenario(n, m, rng)
        table = assign.pair_table(s)
        yield s, table, assign.build_payoff_matrix(s, table)


def _all_columns(n, m):
    return np.array(list(itertools.permutations(range(n), m)), dtype=np.intp).reshape(-1, m)


def check_random_assignment(n, m, trials, rng):
    """Oracle equivalence, equal and minimum leakage, refinement and barrier invariance on random instances."""
    columns = _all_columns(n, m)
    rows = np.arange(m)
    oracle_worst = 0.0
    oracle_ok = True
    leakage_equal = True
    leakage_min = True
    refinement_ok = True
    refinement_cases = 0
    invariance_ok = True
    dispersal_cases = 0

    for s, table, payoff in _random_instances(n, m, trials, rng):
        lp = assign.solve_assignment_lp(payoff)
        gamma_star = assign.enumerate_optimal_set(payoff, s.tie_tolerance)
        brute = assign.brute_force_assignment(payoff, s.tie_tolerance)

        lp_total = assign.assignment_payoff(payoff, lp)
        gap = abs(lp_total - brute.team_payoff)
        oracle_worst = max(oracle_worst, gap)
        oracle_ok &= gap <= ORACLE_TOLERANCE * max(1.0, abs(brute.team_payoff))
        oracle_ok &= set(gamma_star) == set(brute)

        counts = {assign.penalty_count(payoff, a) for a in gamma_star}
        leakage_equal &= len(counts) == 1
        fewest = int(payoff.penalized[rows, columns].sum(axis=1).min())
        leakage_min &= counts == {fewest}

        barrier_signs = {game.multiplayer_barrier(s, a, payoff) > 0 for a in gamma_star}
        invariance_ok &= len(barrier_signs) == 1
        dispersal_cases += len(gamma_star) > 1

        if not barrier_signs.pop():
            values = assign.build_value_matrix(s, table, payoff.L_used)
            theta_star = assign.refine_theta_star(gamma_star, values, s.tie_tolerance)
            fewest_unsupported = min(assign.unsupported_count(values, a) for a in gamma_star)
            refinement_ok &= all(assign.unsupported_count(values, a) == fewest_unsupported for a in theta_star)
            refinement_cases += 1

    size = f"{trials} instances n={n} m={m}"
    return [
        PropertyResult('oracle-equivalence', bool(oracle_ok), oracle_worst, size),
        PropertyResult('equal-leakage', bool(leakage_equal), detail=size),
        PropertyResult('minimum-leakage', bool(leakage_min), detail=size),
        PropertyResult('refinement-minimizes-unsupported', bool(refinement_ok),
                       detail=f"{refinement_cases} evader-team instances"),
        PropertyResult('barrier-invariance', bool(invariance_ok), detail=f"{dispersal_cases} dispersal instances"),
    ]


def check_scenario_game(s: Scenario):
    """Game-level properties of one scenario: invariance, refinement, straightness, value conservation."""
    try:
        solution = game.solve(s)
    except DegenerateGeometryError as e:
        reason = f"degenerate geometry ({e})"
        return [_skipped(name, reason) for name in
                ('barrier-invariance', 'refinement-subset', 'straightness', 'value-conservation')]

    results = []
    payoff = assign.build_payoff_matrix(s, penalty_L=solution.penalty_L)
    barriers = [game.multiplayer_barrier(s, a, payoff) for a in solution.gamma_star]
    same_sign = len({b > 0 for b in barriers}) == 1
    results.append(PropertyResult(
        'barrier-invariance', same_sign, detail=f"{len(barriers)} optimal assignments",
    ))

    gamma, theta = set(solution.gamma_star), set(solution.theta_star)
    relation = 'strict subset' if theta < gamma else 'equal'
    results.append(PropertyResult(
        'refinement-subset', theta <= gamma,
        detail=f"{relation}: {','.join(solution.theta_star.labels())} of {','.join(solution.gamma_star.labels())}",
    ))

    trajectory = simulation.simulate(s, solution.chosen)
    deviation = max(simulation.straightness_check(trajectory).values())
    results.append(PropertyResult('straightness', deviation < STRAIGHTNESS_TOLERANCE, deviation))

    try:
        drift = simulation.value_conservation_check(s, solution.chosen)
    except UnsupportedRegimeError as e:
        results.append(_skipped('value-conservation', str(e)))
    else:
        results.append(PropertyResult('value-conservation', drift < DRIFT_TOLERANCE, drift))
    return results


def run_suite(scenario: Scenario | None = None, random: tuple[int, int, int, int] | None = None,
              duel_samples: int | None = None) -> VerificationReport:
    """
    Run the duel, assignment and game suites.

    `random` is (n, m, trials, seed): `duel_samples` random duel states per
    region (VERIFY_DUEL_SAMPLES by default) and trials random n-pursuer,
    m-evader instances.
    """
    if scenario is None and random is None:
        raise ValueError("verify needs a scenario or random parameters")
    results = []

    if random is not None:
        n, m, trials, seed = random
        if not n >= m >= 1:
            raise ValueError(f"random instances need n ≥ m ≥ 1 (n={n}, m={m})")
        logger.info(f"VERIFY_START: random n={n} m={m} trials={trials} seed={seed}")
        rng = np.random.default_rng(seed)
        duel_samples = Config.VERIFY_DUEL_SAMPLES if duel_samples is None else duel_samples
        for region in (Region.PURSUER_WINS, Region.EVADER_WINS):
            states = random_duel_states(rng, duel_samples, region)
            results.append(check_hji_residual(states, name=f"hji-residual[{region.value}]"))
            results.append(check_gradients(states, name=f"gradient-fd[{region.value}]"))
            if region is Region.PURSUER_WINS:
                results.append(check_interception_distance(states))
        results.extend(check_random_assignment(n, m, trials, rng))

    if scenario is not None:
        logger.info(f"VERIFY_START: scenario m={scenario.m} n={scenario.n}")
        states, degenerate = scenario_duel_states(scenario)
        for label in degenerate:
            results.append(_skipped(f"pair[{label}]", 'degenerate geometry'))
        results.append(check_hji_residual(states))
        results.append(check_gradients(states))
        results.extend(check_scenario_game(scenario))

    report = VerificationReport(results=tuple(results))
    for failure in report.failures:
        logger.warning(f"VERIFY_FAIL: {failure.line()}")
    logger.info(f"VERIFY_DONE: {len(results)} properties, {len(report.failures)} failed")
    return report
