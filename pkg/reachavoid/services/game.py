"""
Multiplayer game: barrier family, winning-team classification, game Value and
the pair-wise state-feedback strategies used by the simulator.
"""
import logging
from dataclasses import dataclass
from enum import Enum
import numpy as np
from reachavoid.errors import RegionMismatchError, SingularControlError, SingularGradientError
from reachavoid.models.scenario import Assignment, Scenario
from . import assignment as assign
from . import duel
from .duel import Region

logger = logging.getLogger(__name__)


class Team(str, Enum):
    PURSUER_TEAM = 'PursuerTeam'
    EVADER_TEAM = 'EvaderTeam'


@dataclass(frozen=True)
class PairOutcome:
    i: int
    j: int
    region: Region
    alpha: float
    barrier: float
    pair_value: float | None
    interception_point: np.ndarray | None = None

    @property
    def label(self):
        return f"E{self.i + 1}P{self.j + 1}"


@dataclass(frozen=True)
class GameSolution:
    winner: Team
    barrier_value: float
    gamma_star: assign.OptimalAssignmentSet
    theta_star: assign.OptimalAssignmentSet | None
    value: float | None
    certified: bool
    on_dispersal_surface: bool
    per_pair: tuple[PairOutcome, ...]
    penalty_L: float
    l_star: float
    l_bar: float

    @property
    def chosen(self) -> Assignment:
        """Lexicographically first member of the final optimal set."""
        return (self.theta_star or self.gamma_star).first


@dataclass(frozen=True)
class Capture:
    i: int
    j: int
    t: float
    point: np.ndarray

    kind = 'capture'


@dataclass(frozen=True)
class Reach:
    i: int
    t: float
    point: np.ndarray
    pursuer_point: np.ndarray | None = None

    kind = 'reach'


@dataclass(frozen=True)
class GameOver:
    t: float

    kind = 'game_over'


@dataclass(frozen=True)
class PairPlan:
    """A committed pair and its region, both fixed at t=0."""
    i: int
    j: int
    region: Region


def multiplayer_barrier(s: Scenario, gamma: Assignment, payoff: assign.PayoffMatrix | None = None) -> float:
    """Smallest per-evader payoff under gamma; positive iff every evader is captured."""
    payoff = assign.build_payoff_matrix(s) if payoff is None else payoff
    return float(min(payoff.a[i, j] for i, j in gamma.pairs))


def pair_outcomes(table: assign.PairTable, chosen: Assignment) -> tuple[PairOutcome, ...]:
    outcomes = []
    for i, j in chosen.pairs:
        value = table.value[i, j]
        point = table.interception[i, j]
        outcomes.append(PairOutcome(
            i=i,
            j=j,
            region=table.region[i, j],
            alpha=float(table.alpha[i, j]),
            barrier=float(table.barrier[i, j]),
            pair_value=None if np.isnan(value) else float(value),
            interception_point=None if np.isnan(point).any() else point,
        ))
    return tuple(outcomes)


def _game_of_kind(s: Scenario):
    table = assign.pair_table(s)
    L = assign.resolve_penalty(s, table)
    payoff = assign.build_payoff_matrix(s, table, L)
    gamma_star = assign.enumerate_optimal_set(payoff, s.tie_tolerance)
    barrier = multiplayer_barrier(s, gamma_star.first, payoff)
    winner = Team.PURSUER_TEAM if barrier > 0 else Team.EVADER_TEAM
    return table, L, payoff, gamma_star, barrier, winner


def classify(s: Scenario) -> GameSolution:
    """Winner and optimal assignment set only; value and refinement are left empty."""
    table, L, payoff, gamma_star, barrier, winner = _game_of_kind(s)
    return GameSolution(
        winner=winner,
        barrier_value=barrier,
        gamma_star=gamma_star,
        theta_star=None,
        value=None,
        certified=False,
        on_dispersal_surface=len(gamma_star) > 1,
        per_pair=pair_outcomes(table, gamma_star.first),
        penalty_L=L,
        l_star=assign.best_case_payoff_Lstar(s, table),
        l_bar=assign.refinement_bound_Lbar(s, table),
    )


def solve(s: Scenario) -> GameSolution:
    logger.info(f"SOLVE_START: m={s.m} n={s.n}")
    table, L, payoff, gamma_star, barrier, winner = _game_of_kind(s)

    if winner is Team.PURSUER_TEAM:
        theta_star = gamma_star
        value = gamma_star.team_payoff
        certified = True
    else:
        values = assign.build_value_matrix(s, table, L)
        theta_star = assign.refine_theta_star(gamma_star, values, s.tie_tolerance)
        value = theta_star.team_payoff
        certified = assign.unsupported_count(values, theta_star.first) == 0
        if not certified:
            logger.warning(
                f"SOLVE_UNCERTIFIED: {theta_star.first.label()} contains pairs with speed ratio above one"
            )

    solution = GameSolution(
        winner=winner,
        barrier_value=barrier,
        gamma_star=gamma_star,
        theta_star=theta_star,
        value=value,
        certified=certified,
        on_dispersal_surface=len(theta_star) > 1,
        per_pair=pair_outcomes(table, theta_star.first),
        penalty_L=L,
        l_star=assign.best_case_payoff_Lstar(s, table),
        l_bar=assign.refinement_bound_Lbar(s, table),
    )
    logger.info(
        f"SOLVE_DONE: winner={winner.value} assignment={solution.chosen.label()} "
        f"value={value:.6g} optimal_set={len(gamma_star)} refined_set={len(theta_star)}"
    )
    return solution


def pair_plans(s: Scenario, chosen: Assignment, table: assign.PairTable | None = None) -> tuple[PairPlan, ...]:
    if table is None:
        regions = [duel.region_of(duel.DuelState.from_scenario(s, i, j)) for i, j in chosen.pairs]
    else:
        regions = [table.region[i, j] for i, j in chosen.pairs]
    return tuple(PairPlan(i, j, region) for (i, j), region in zip(chosen.pairs, regions))


def straight_to_target(x, speed):
    R = float(np.linalg.norm(x))
    if R == 0.0:
        return np.zeros(3)
    return -speed * np.asarray(x, dtype=float) / R


def pair_controls(s: Scenario, plan: PairPlan, evader_positions, pursuer_positions):
    """Optimal controls of one committed pair at the current positions."""
    state = duel.DuelState.from_scenario(s, plan.i, plan.j, evader_positions, pursuer_positions)
    if plan.region is Region.UNSUPPORTED:
        return straight_to_target(state.x_E, state.U), straight_to_target(state.x_P, state.V)

    try:
        if plan.region is Region.PURSUER_WINS:
            value = duel.value_pursuer_region(state)
        else:
            value = duel.value_evader_region(state)
    except RegionMismatchError:
        # only reachable when the opponent leaves its optimal strategy
        logger.debug(f"SIM_REGION_CHANGE: E{plan.i + 1}/P{plan.j + 1} left {plan.region.value}")
        value = None
    except SingularGradientError:
        value = None

    try:
        return duel.optimal_controls(state, value)
    except (SingularGradientError, SingularControlError):
        # pursuer parked on the target, or evader already home
        return straight_to_target(state.x_E, state.U), straight_to_target(state.x_P, state.V)


def team_controls(s: Scenario, chosen: Assignment, evader_positions, pursuer_positions,
                  frozen_evaders=(), frozen_pursuers=(), plans=None):
    """
    Controls of every player: matched pairs play their optimal strategies,
    unmatched pursuers hold position and frozen players stay put.
    """
    plans = pair_plans(s, chosen) if plans is None else plans
    frozen_evaders = set(frozen_evaders)
    frozen_pursuers = set(frozen_pursuers)
    u = np.zeros((s.m, 3))
    v = np.zeros((s.n, 3))
    for plan in plans:
        if plan.i in frozen_evaders:
            continue
        u_E, v_P = pair_controls(s, plan, evader_positions, pursuer_positions)
        u[plan.i] = u_E
        if plan.j not in frozen_pursuers:
            v[plan.j] = v_P
    return u, v


def termination_check(evader_positions, pursuer_positions, chosen: Assignment, s: Scenario,
                      resolved=None, t=0.0):
    """
    Events at the given positions. Reaching the target takes precedence over a
    simultaneous capture; GameOver follows once every evader is resolved.
    """
    resolved = np.zeros(chosen.m, dtype=bool) if resolved is None else np.asarray(resolved, dtype=bool).copy()
    capture_radius = s.resolved_capture_radius()
    target_radius = s.resolved_target_radius()
    events = []
    for i, j in chosen.pairs:
        if resolved[i]:
            continue
        x_E = np.asarray(evader_positions[i], dtype=float)
        x_P = np.asarray(pursuer_positions[j], dtype=float)
        if np.linalg.norm(x_E) <= target_radius:
            events.append(Reach(i=i, t=t, point=x_E.copy(), pursuer_point=x_P.copy()))
            resolved[i] = True
        elif np.linalg.norm(x_P - x_E) <= capture_radius:
            events.append(Capture(i=i, j=j, t=t, point=x_E.copy()))
            resolved[i] = True
    if events and resolved.all():
        events.append(GameOver(t=t))
    return events
