import json
import logging
from pathlib import Path
import numpy as np
from pydantic import ValidationError
from config import Config
from reachavoid.errors import DegenerateGeometryError, InvalidScenarioError, ScenarioFileError
from reachavoid.models.player import Player, Role
from reachavoid.models.scenario import Scenario, validate_scenario
from reachavoid.services import assignment as assign
from reachavoid.services.duel import Region
from reachavoid.services.game import Capture, GameOver, GameSolution, Reach
from reachavoid.utils import to_jsonable
from .schemas import ScenarioFileSchema

logger = logging.getLogger(__name__)


def _field_path(error):
    return '.'.join(str(part) for part in error.get('loc', ())) or '<root>'


def parse_scenario(text, resolve=True) -> Scenario:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioFileError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
            details={"line": e.lineno, "column": e.colno, "error": e.msg},
        ) from e

    try:
        data = ScenarioFileSchema.model_validate(document)
    except ValidationError as e:
        error_details = json.loads(e.json())
        fields = ', '.join(f"{_field_path(err)}: {err['msg']}" for err in error_details)
        raise ScenarioFileError(f"invalid scenario ({fields})", details=error_details) from e

    tolerances = data.tolerances
    scenario = Scenario(
        evaders=tuple(Player(id=p.id, role=Role.EVADER, position=p.position, speed=p.speed) for p in data.evaders),
        pursuers=tuple(Player(id=p.id, role=Role.PURSUER, position=p.position, speed=p.speed) for p in data.pursuers),
        penalty_L=data.penalty_L,
        capture_radius=tolerances.capture_radius if tolerances else None,
        target_radius=tolerances.target_radius if tolerances else None,
        tie_tolerance=tolerances.tie_tolerance if tolerances and tolerances.tie_tolerance else Config.TIE_TOLERANCE,
        seed=data.seed,
    )

    errors = validate_scenario(scenario)
    if errors:
        raise InvalidScenarioError(errors)
    return resolve_defaults(scenario) if resolve else scenario


def resolve_defaults(s: Scenario) -> Scenario:
    """Fill in the scale-relative radii and the default penalty."""
    update = {
        'capture_radius': s.resolved_capture_radius(),
        'target_radius': s.resolved_target_radius(),
    }
    if s.penalty_L is None:
        try:
            update['penalty_L'] = assign.default_penalty(s)
        except DegenerateGeometryError as e:
            logger.warning(f"SCENARIO_DEFAULT_PENALTY_SKIPPED: {e}")
    return s.model_copy(update=update)


def load_scenario(path, resolve=True) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ScenarioFileError(f"cannot read {path}: {e.strerror}") from e
    try:
        return parse_scenario(text, resolve=resolve)
    except ScenarioFileError as e:
        raise ScenarioFileError(f"{path}: {e}", details=e.details) from e


def scenario_to_document(s: Scenario) -> dict:
    def player(p):
        return {"id": p.id, "position": list(p.position), "speed": p.speed}

    document = {
        "pursuers": [player(p) for p in s.pursuers],
        "evaders": [player(p) for p in s.evaders],
    }
    if s.penalty_L is not None:
        document["penalty_L"] = s.penalty_L
    tolerances = {"tie_tolerance": s.tie_tolerance}
    if s.capture_radius is not None:
        tolerances["capture_radius"] = s.capture_radius
    if s.target_radius is not None:
        tolerances["target_radius"] = s.target_radius
    document["tolerances"] = tolerances
    if s.seed is not None:
        document["seed"] = s.seed
    return document


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_document(s), indent=2) + '\n'


def trajectory_header(traj) -> str:
    columns = ['t']
    for label in traj.labels:
        columns.extend(f"{label}.{axis}" for axis in 'xyz')
    return ','.join(columns)


def write_trajectory_csv(traj, path):
    k = len(traj.times)
    data = np.column_stack([
        traj.times,
        traj.pursuer_positions.reshape(k, -1),
        traj.evader_positions.reshape(k, -1),
    ])
    np.savetxt(path, data, delimiter=',', header=trajectory_header(traj), comments='', fmt='%.17g')


def event_record(event) -> dict:
    record = {"type": event.kind, "t": event.t}
    if isinstance(event, Capture):
        record.update(i=event.i + 1, j=event.j + 1, point=event.point)
    elif isinstance(event, Reach):
        record.update(i=event.i + 1, point=event.point)
    elif not isinstance(event, GameOver):
        raise TypeError(f"unknown event {event!r}")
    return to_jsonable(record)


def events_path(out_path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.name + '.events.json')


def write_events(traj, out_path):
    path = events_path(out_path)
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump([event_record(e) for e in traj.events], fh, indent=2)
        fh.write('\n')
    return path


def solution_report(solution: GameSolution) -> dict:
    """Structured summary of a solved game with 1-based labels."""
    def assignment_set(optimal_set):
        if optimal_set is None:
            return None
        return {
            "assignments": optimal_set.labels(),
            "team_payoff": optimal_set.team_payoff,
            "truncated": optimal_set.truncated,
        }

    pairs = []
    for outcome in solution.per_pair:
        evader_region = outcome.region is Region.EVADER_WINS and outcome.pair_value is not None
        pairs.append({
            "pair": outcome.label,
            "region": outcome.region.value,
            "alpha": outcome.alpha,
            "barrier": outcome.barrier,
            "value": outcome.pair_value,
            "interception_point": outcome.interception_point,
            # pursuer's distance to the target when its evader arrives
            "pursuer_distance_at_arrival": -outcome.pair_value if evader_region else None,
        })

    return to_jsonable({
        "winner": solution.winner.value,
        "barrier_value": solution.barrier_value,
        "assignment": solution.chosen.label(),
        "gamma_star": assignment_set(solution.gamma_star),
        "theta_star": assignment_set(solution.theta_star),
        "value": solution.value,
        "certified": solution.certified,
        "on_dispersal_surface": solution.on_dispersal_surface,
        "penalty_L": solution.penalty_L,
        "L_star": solution.l_star,
        "L_bar": solution.l_bar,
        "pairs": pairs,
    })
