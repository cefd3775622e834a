"""
Fixed-step simulator of the multiplayer game.

Controls are re-evaluated at the start of every step and held over it, so each
step moves every player along a straight segment. Capture and target events
inside a step are located exactly on those segments: the closest approach has
a closed form and the first crossing of the event radius is bisected.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable
import numpy as np
from config import Config
from reachavoid.errors import (
    DegenerateGeometryError,
    InadmissibleControlError,
    IntegrationDivergedError,
    NoTerminationError,
    UnsupportedRegimeError,
)
from reachavoid.models.scenario import Assignment, Scenario
from . import duel
from . import game
from .duel import Region
from .game import Capture, GameOver, Reach

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 200
ADMISSIBILITY_TOLERANCE = 1e-9

EVADER_STRATEGIES = ('optimal', 'straight')
PURSUER_STRATEGIES = ('optimal', 'open-loop')


@dataclass(frozen=True)
class StrategyProfile:
    """
    Per-team strategy: a strategy name or a hook
    `hook(t, evader_positions, pursuer_positions) -> controls` returning an
    (m, 3) or (n, 3) array.
    """
    evaders: str | Callable = 'optimal'
    pursuers: str | Callable = 'optimal'

    def __post_init__(self):
        if isinstance(self.evaders, str) and self.evaders not in EVADER_STRATEGIES:
            raise ValueError(f"unknown evader strategy {self.evaders!r}")
        if isinstance(self.pursuers, str) and self.pursuers not in PURSUER_STRATEGIES:
            raise ValueError(f"unknown pursuer strategy {self.pursuers!r}")

    @classmethod
    def named(cls, profile='optimal', pursuers='optimal'):
        """CLI profile names: 'optimal' or 'straight-evaders'."""
        if profile == 'optimal':
            return cls(evaders='optimal', pursuers=pursuers)
        if profile == 'straight-evaders':
            return cls(evaders='straight', pursuers=pursuers)
        raise ValueError(f"unknown profile {profile!r}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    evader_positions: np.ndarray
    pursuer_positions: np.ndarray
    events: tuple
    realized_payoff: float
    pair_payoffs: tuple[float, ...]
    t_f: float
    step: float
    assignment: Assignment = field(default=None)

    @property
    def labels(self):
        n = self.pursuer_positions.shape[1]
        m = self.evader_positions.shape[1]
        return [f"P{j + 1}" for j in range(n)] + [f"E{i + 1}" for i in range(m)]

    def path(self, label):
        index = int(label[1:]) - 1
        source = self.pursuer_positions if label[0] == 'P' else self.evader_positions
        return source[:, index, :]

    def captures(self):
        return [e for e in self.events if isinstance(e, Capture)]

    def reaches(self):
        return [e for e in self.events if isinstance(e, Reach)]


def default_step(s: Scenario):
    scale = s.max_pairwise_distance() or 1.0
    top_speed = max(s.evader_speeds.max(), s.pursuer_speeds.max())
    return Config.STEP_FACTOR * scale / top_speed


def max_time(s: Scenario):
    scale = s.max_pairwise_distance() or 1.0
    slowest = min(s.evader_speeds.min(), s.pursuer_speeds.min())
    return Config.MAX_TIME_FACTOR * scale / slowest


def first_crossing(offset, rate, radius, horizon, tolerance):
    """
    Smallest s in [0, horizon] with |offset + s * rate| <= radius, or None.

    The distance is convex in s, so it decreases up to the closest approach
    and the crossing is unique on that interval.
    """
    if np.linalg.norm(offset) <= radius:
        return 0.0
    speed2 = float(rate @ rate)
    if speed2 == 0.0:
        return None
    closest = min(max(-float(offset @ rate) / speed2, 0.0), horizon)
    if np.linalg.norm(offset + closest * rate) > radius:
        return None
    lo, hi = 0.0, closest
    speed = speed2 ** 0.5
    for _ in range(MAX_BISECTIONS):
        if (hi - lo) * speed <= tolerance:
            break
        mid = 0.5 * (lo + hi)
        if np.linalg.norm(offset + mid * rate) <= radius:
            hi = mid
        else:
            lo = mid
    return hi


def _check_admissible(controls, speeds, live, team):
    norms = np.linalg.norm(controls, axis=1)
    bad = live & (np.abs(norms - speeds) > ADMISSIBILITY_TOLERANCE * speeds)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise InadmissibleControlError(
            f"{team}{k + 1} control has norm {norms[k]:.9g}, speed is {speeds[k]:.9g}"
        )


class _Controller:
    """Evaluates the strategy profile into per-player controls."""

    def __init__(self, s, chosen, plans, profile):
        self.s = s
        self.chosen = chosen
        self.plans = plans
        self.profile = profile
        self.held_pursuers = None

    def __call__(self, t, E, P, live_E, live_P):
        s, profile = self.s, self.profile
        u = np.zeros((s.m, 3))
        v = np.zeros((s.n, 3))
        pair_u = np.zeros((s.m, 3))
        pair_v = np.zeros((s.n, 3))
        needs_pairs = (
            profile.evaders == 'optimal'
            or profile.pursuers == 'optimal'
            or (profile.pursuers == 'open-loop' and self.held_pursuers is None)
        )
        if needs_pairs:
            for plan in self.plans:
                if live_E[plan.i]:
                    pair_u[plan.i], pair_v[plan.j] = game.pair_controls(s, plan, E, P)

        if callable(profile.evaders):
            u = np.asarray(profile.evaders(t, E.copy(), P.copy()), dtype=float).reshape(s.m, 3)
            _check_admissible(u, s.evader_speeds, live_E, 'E')
        elif profile.evaders == 'straight':
            for i in range(s.m):
                u[i] = game.straight_to_target(E[i], s.evaders[i].speed)
        else:
            u = pair_u

        if callable(profile.pursuers):
            v = np.asarray(profile.pursuers(t, E.copy(), P.copy()), dtype=float).reshape(s.n, 3)
            _check_admissible(v, s.pursuer_speeds, live_P, 'P')
        elif profile.pursuers == 'open-loop':
            if self.held_pursuers is None:
                self.held_pursuers = pair_v.copy()
            v = self.held_pursuers
        else:
            v = pair_v

        u = np.where(live_E[:, None], u, 0.0)
        v = np.where(live_P[:, None], v, 0.0)
        return u, v


def simulate(s: Scenario, chosen: Assignment | None = None, profile: StrategyProfile | None = None,
             step: float | None = None, observer: Callable | None = None, time_cap: float | None = None) -> Trajectory:
    if chosen is None:
        chosen = game.solve(s).chosen
    profile = StrategyProfile() if profile is None else profile
    step = default_step(s) if step is None else float(step)
    if not step > 0:
        raise ValueError(f"step must be positive (got {step})")
    time_cap = max_time(s) if time_cap is None else time_cap

    capture_radius = s.resolved_capture_radius()
    target_radius = s.resolved_target_radius()
    tolerance = Config.EVENT_TOLERANCE * (s.max_pairwise_distance() or 1.0)
    plans = game.pair_plans(s, chosen)
    controller = _Controller(s, chosen, plans, profile)

    E = s.evader_positions.copy()
    P = s.pursuer_positions.copy()
    resolved = np.zeros(s.m, dtype=bool)
    # only matched pursuers ever move; unmatched ones hold position for the whole game
    matched = np.zeros(s.n, dtype=bool)
    matched[chosen.columns] = True
    live_P = matched.copy()
    events = []
    t = 0.0

    logger.info(f"SIM_START: assignment={chosen.label()} step={step:.6g} cap={time_cap:.6g}")

    for event in game.termination_check(E, P, chosen, s, resolved, t):
        if isinstance(event, GameOver):
            continue
        events.append(event)
        resolved[event.i] = True
        live_P[chosen.pursuer_of(event.i)] = False

    times = [t]
    E_rows = [E.copy()]
    P_rows = [P.copy()]
    if observer is not None:
        observer(t, E, P, resolved.copy())

    while not resolved.all():
        if t >= time_cap:
            raise NoTerminationError(f"no termination before t={time_cap:.6g}")

        live_E = ~resolved
        forced = []
        try:
            u, v = controller(t, E, P, live_E, live_P)
        except DegenerateGeometryError:
            # exact coincidence that slipped under a zero capture radius
            u, v = np.zeros((s.m, 3)), np.zeros((s.n, 3))
            forced = [i for i, j in chosen.pairs if live_E[i] and np.array_equal(E[i], P[j])]
            if not forced:
                raise

        step_events = []
        for i, j in chosen.pairs:
            if not live_E[i]:
                continue
            if i in forced:
                step_events.append((0.0, 1, i, j))
                continue
            s_reach = first_crossing(E[i], u[i], target_radius, step, tolerance)
            s_capture = first_crossing(P[j] - E[i], v[j] - u[i], capture_radius, step, tolerance)
            if s_reach is not None and (s_capture is None or s_reach <= s_capture):
                step_events.append((s_reach, 0, i, j))
            elif s_capture is not None:
                step_events.append((s_capture, 1, i, j))

        E_start, P_start = E, P
        E = np.where(live_E[:, None], E_start + step * u, E_start)
        P = np.where(live_P[:, None], P_start + step * v, P_start)

        for s_event, kind, i, j in sorted(step_events):
            E[i] = E_start[i] + s_event * u[i]
            P[j] = P_start[j] + s_event * v[j]
            if kind == 0:
                events.append(Reach(i=i, t=t + s_event, point=E[i].copy(), pursuer_point=P[j].copy()))
            else:
                events.append(Capture(i=i, j=j, t=t + s_event, point=E[i].copy()))
            logger.debug(f"SIM_EVENT: {events[-1].kind} E{i + 1}/P{j + 1} at t={t + s_event:.9g}")
            resolved[i] = True
            live_P[j] = False

        if not (np.isfinite(E).all() and np.isfinite(P).all()):
            raise IntegrationDivergedError(f"non-finite state at t={t:.6g}")

        if resolved.all():
            t_end = t + max(s_event for s_event, *_ in step_events)
        else:
            t_end = t + step
        if t_end > t:
            t = t_end
            times.append(t)
            E_rows.append(E.copy())
            P_rows.append(P.copy())
        if observer is not None:
            observer(t, E, P, resolved.copy())

    events.append(GameOver(t=t))
    pair_payoffs = realized_pair_payoffs(events, s.m)
    trajectory = Trajectory(
        times=np.array(times),
        evader_positions=np.array(E_rows),
        pursuer_positions=np.array(P_rows),
        events=tuple(events),
        realized_payoff=float(sum(pair_payoffs)),
        pair_payoffs=pair_payoffs,
        t_f=t,
        step=step,
        assignment=chosen,
    )
    logger.info(f"SIM_DONE: t_f={t:.6g} realized_payoff={trajectory.realized_payoff:.6g} steps={len(times) - 1}")
    return trajectory


def realized_pair_payoffs(events, m):
    """Captured evaders score their distance to the target, evaders that reach it score minus their pursuer's."""
    payoffs = [0.0] * m
    for event in events:
        if isinstance(event, Capture):
            payoffs[event.i] = float(np.linalg.norm(event.point))
        elif isinstance(event, Reach):
            payoffs[event.i] = -float(np.linalg.norm(event.pursuer_point))
    return tuple(payoffs)


def straightness_check(traj: Trajectory) -> dict[str, float]:
    """Largest distance of any sample from the start-end chord, relative to the chord length."""
    deviations = {}
    for label in traj.labels:
        path = traj.path(label)
        chord = path[-1] - path[0]
        length = float(np.linalg.norm(chord))
        if length == 0.0:
            deviations[label] = 0.0
            continue
        direction = chord / length
        offsets = path - path[0]
        perpendicular = offsets - np.outer(offsets @ direction, direction)
        deviations[label] = float(np.linalg.norm(perpendicular, axis=1).max() / length)
    return deviations


def multiplayer_value(s: Scenario, plans, E, P, resolved, terminal):
    """Sum of pair values; resolved pairs keep their realized terminal value."""
    total = 0.0
    for plan in plans:
        if resolved[plan.i]:
            total += terminal[plan.i]
            continue
        state = duel.DuelState.from_scenario(s, plan.i, plan.j, E, P)
        if plan.region is Region.PURSUER_WINS:
            total += duel.value_pursuer_region(state).value
        else:
            total += -state.R_P + state.R_E / state.alpha
    return total


def value_conservation_check(s: Scenario, chosen: Assignment | None = None, step: float | None = None) -> float:
    """
    Maximum drift of the multiplayer value along optimal play.

    Optimal paths are straight with controls constant along them, so the Euler
    step adds only roundoff; the drift is set by the capture radius and does not
    shrink with the step.
    """
    solution = game.solve(s)
    if not solution.certified:
        raise UnsupportedRegimeError("value conservation needs a certified game value")
    chosen = solution.chosen if chosen is None else chosen
    plans = game.pair_plans(s, chosen)
    if any(plan.region is Region.UNSUPPORTED for plan in plans):
        raise UnsupportedRegimeError(f"{chosen.label()} contains pairs with speed ratio above one")

    initial = multiplayer_value(s, plans, s.evader_positions, s.pursuer_positions, np.zeros(s.m, dtype=bool), {})
    drift = [0.0]
    terminal = {}

    def observe(t, E, P, resolved):
        for plan in plans:
            if resolved[plan.i] and plan.i not in terminal:
                if plan.region is Region.PURSUER_WINS:
                    terminal[plan.i] = float(np.linalg.norm(E[plan.i]))
                else:
                    terminal[plan.i] = -float(np.linalg.norm(P[plan.j]))
        current = multiplayer_value(s, plans, E, P, resolved, terminal)
        drift[0] = max(drift[0], abs(current - initial))

    simulate(s, chosen, StrategyProfile(), step, observer=observe)
    return drift[0]
