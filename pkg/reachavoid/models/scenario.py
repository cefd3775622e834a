from collections import Counter
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial.distance import pdist
from config import Config
from reachavoid.errors import InvalidScenarioError
from .player import Player, Role


class Scenario(BaseModel):
    """
    One game instance with the target fixed at the origin.

    Optional radii and penalty are None until resolved (see
    scenarios.io.resolve_defaults); the resolved_* accessors fall back to the
    configured scale-relative defaults.
    """

    model_config = ConfigDict(frozen=True)

    evaders: tuple[Player, ...]
    pursuers: tuple[Player, ...]
    penalty_L: float | None = None
    capture_radius: float | None = None
    target_radius: float | None = None
    tie_tolerance: float = Config.TIE_TOLERANCE
    seed: int | None = None

    @property
    def m(self):
        return len(self.evaders)

    @property
    def n(self):
        return len(self.pursuers)

    @property
    def evader_positions(self):
        return np.array([p.position for p in self.evaders], dtype=float).reshape(-1, 3)

    @property
    def pursuer_positions(self):
        return np.array([p.position for p in self.pursuers], dtype=float).reshape(-1, 3)

    @property
    def evader_speeds(self):
        return np.array([p.speed for p in self.evaders], dtype=float)

    @property
    def pursuer_speeds(self):
        return np.array([p.speed for p in self.pursuers], dtype=float)

    def max_pairwise_distance(self):
        points = np.vstack([self.pursuer_positions, self.evader_positions])
        if len(points) < 2:
            return 0.0
        return float(pdist(points).max())

    def resolved_capture_radius(self):
        if self.capture_radius is not None:
            return self.capture_radius
        return Config.CAPTURE_RADIUS_FACTOR * self.max_pairwise_distance()

    def resolved_target_radius(self):
        if self.target_radius is not None:
            return self.target_radius
        return self.resolved_capture_radius()

    def validated(self):
        errors = validate_scenario(self)
        if errors:
            raise InvalidScenarioError(errors)
        return self


class Assignment(BaseModel):
    """
    A feasible pursuer-to-evader matching.

    `pairs` holds 0-based (evader i, pursuer j) tuples sorted by evader, so two
    assignments compare equal iff they match the same players.
    """

    model_config = ConfigDict(frozen=True)

    pairs: tuple[tuple[int, int], ...]
    m: int = Field(ge=1)
    n: int = Field(ge=1)

    @field_validator('pairs')
    @classmethod
    def sort_pairs(cls, v):
        return tuple(sorted((int(i), int(j)) for i, j in v))

    @model_validator(mode='after')
    def check_feasible(self):
        evaders = [i for i, _ in self.pairs]
        pursuers = [j for _, j in self.pairs]
        if sorted(evaders) != list(range(self.m)):
            raise ValueError('each evader must be assigned exactly one pursuer')
        if len(set(pursuers)) != len(pursuers):
            raise ValueError('a pursuer can be assigned to at most one evader')
        if any(j < 0 or j >= self.n for j in pursuers):
            raise ValueError(f'pursuer index out of range for n={self.n}')
        return self

    @classmethod
    def from_columns(cls, columns, n):
        """columns[i] is the pursuer assigned to evader i."""
        return cls(pairs=tuple((i, int(j)) for i, j in enumerate(columns)), m=len(columns), n=n)

    @property
    def columns(self):
        return np.array([j for _, j in self.pairs], dtype=int)

    def pursuer_of(self, i):
        return self.pairs[i][1]

    def evader_of(self, j):
        for i, jj in self.pairs:
            if jj == j:
                return i
        return None

    def label(self):
        """Index-set label, e.g. '{12,21,33}'; indices of 10 or more are separated by '-'."""
        wide = self.m >= 10 or self.n >= 10
        sep = '-' if wide else ''
        return '{' + ','.join(f"{i + 1}{sep}{j + 1}" for i, j in self.pairs) + '}'

    def __lt__(self, other):
        return self.pairs < other.pairs


def validate_scenario(s: Scenario) -> list[str]:
    """Return the violated scenario invariants; an empty list means ok."""
    errors = []
    if s.m < 1:
        errors.append("at least one evader is required")
    if s.n < s.m:
        errors.append(f"n ≥ m violated (n={s.n}, m={s.m})")
    for players, role in ((s.evaders, Role.EVADER), (s.pursuers, Role.PURSUER)):
        for player in players:
            if player.role is not role:
                errors.append(f"{player.label} listed among {role.value}s")
            if player.speed <= 0:
                errors.append(f"speed must be positive ({player.label}: {player.speed})")
        duplicates = sorted(i for i, count in Counter(p.id for p in players).items() if count > 1)
        for dup in duplicates:
            errors.append(f"duplicate {role.value} id {dup}")
    if s.penalty_L is not None and not s.penalty_L > 0:
        errors.append(f"penalty_L must be positive (got {s.penalty_L})")
    if s.capture_radius is not None and not s.capture_radius >= 0:
        errors.append(f"capture_radius must be non-negative (got {s.capture_radius})")
    if s.target_radius is not None and not s.target_radius >= 0:
        errors.append(f"target_radius must be non-negative (got {s.target_radius})")
    if not s.tie_tolerance > 0:
        errors.append(f"tie_tolerance must be positive (got {s.tie_tolerance})")
    return errors
