from enum import Enum
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat
from reachavoid.errors import InvalidScenarioError

Vec3 = tuple[FiniteFloat, FiniteFloat, FiniteFloat]


class Role(str, Enum):
    PURSUER = 'pursuer'
    EVADER = 'evader'


class Player(BaseModel):
    """A constant-speed agent. `id` is the 1-based label used in files and reports."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=1)
    role: Role
    position: Vec3
    # Positivity is a scenario-level rule so that validate_scenario can report it
    speed: FiniteFloat

    @property
    def label(self):
        return f"{'P' if self.role is Role.PURSUER else 'E'}{self.id}"

    @property
    def x(self):
        return np.asarray(self.position, dtype=float)


class SpeedRatio(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: FiniteFloat = Field(gt=0)


def speed_ratio(evader: Player, pursuer: Player) -> SpeedRatio:
    """alpha_ij = U_i / V_j."""
    if evader.speed <= 0 or pursuer.speed <= 0:
        raise InvalidScenarioError(
            f"speed must be positive ({evader.label}: {evader.speed}, {pursuer.label}: {pursuer.speed})"
        )
    return SpeedRatio(alpha=evader.speed / pursuer.speed)
