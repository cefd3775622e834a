"""
The one-pursuer/one-evader reach-avoid game.

The pursuer region (barrier > 0) is valued by the distance from the target to
the Apollonius locus; the evader region (barrier <= 0) by the evader's lead
in reaching the target. Both value functions come with analytic gradients,
from which the state-feedback optimal controls follow.
"""
from dataclasses import dataclass, field
from enum import Enum
import numpy as np
from reachavoid.errors import (
    InvalidScenarioError,
    RegionMismatchError,
    SingularControlError,
    SingularGradientError,
    UnsupportedRegimeError,
)
from . import geometry


class Region(str, Enum):
    PURSUER_WINS = 'PursuerWins'
    EVADER_WINS = 'EvaderWins'
    # speed ratio above one; no value function, pairs only receive the penalty
    UNSUPPORTED = 'Unsupported'


@dataclass(frozen=True)
class DuelState:
    x_E: np.ndarray
    x_P: np.ndarray
    U: float
    V: float

    def __post_init__(self):
        object.__setattr__(self, 'x_E', np.asarray(self.x_E, dtype=float))
        object.__setattr__(self, 'x_P', np.asarray(self.x_P, dtype=float))
        if not (self.U > 0 and self.V > 0):
            raise InvalidScenarioError(f"speed must be positive (U={self.U}, V={self.V})")

    @classmethod
    def from_scenario(cls, s, i, j, evader_positions=None, pursuer_positions=None):
        evader, pursuer = s.evaders[i], s.pursuers[j]
        return cls(
            x_E=evader.position if evader_positions is None else evader_positions[i],
            x_P=pursuer.position if pursuer_positions is None else pursuer_positions[j],
            U=evader.speed,
            V=pursuer.speed,
        )

    @property
    def alpha(self):
        return self.U / self.V

    @property
    def R_E(self):
        return float(np.linalg.norm(self.x_E))

    @property
    def R_P(self):
        return float(np.linalg.norm(self.x_P))


@dataclass(frozen=True)
class DuelValue:
    region: Region
    value: float
    grad_E: np.ndarray
    grad_P: np.ndarray
    interception_point: np.ndarray | None = field(default=None)


def barrier_1v1(s: DuelState) -> float:
    """B = R_E^2 - alpha^2 R_P^2; positive means the pursuer wins."""
    return float(s.x_E @ s.x_E - s.alpha ** 2 * (s.x_P @ s.x_P))


def region_of(s: DuelState) -> Region:
    if not geometry.is_supported(s.alpha):
        return Region.UNSUPPORTED
    return Region.PURSUER_WINS if barrier_1v1(s) > 0 else Region.EVADER_WINS


def _require_supported(s):
    if not geometry.is_supported(s.alpha):
        raise UnsupportedRegimeError(f"no value function for alpha={s.alpha:.6g} > 1")


def value_pursuer_region(s: DuelState, coincidence_radius=0.0) -> DuelValue:
    _require_supported(s)
    if barrier_1v1(s) <= 0:
        raise RegionMismatchError("state is in the evader winning region")

    locus = geometry.apollonius_locus(s.x_E, s.x_P, s.alpha, coincidence_radius)
    w = s.x_E - s.x_P

    if isinstance(locus, geometry.Plane):
        d = float(np.linalg.norm(w))
        value = float((s.x_E @ s.x_E - s.x_P @ s.x_P) / (2.0 * d))
        grad_E = s.x_E / d - value * w / d ** 2
        grad_P = -s.x_P / d + value * w / d ** 2
        point = value * w / d
        return DuelValue(Region.PURSUER_WINS, value, grad_E, grad_P, point)

    point, value = geometry.closest_point_to_origin(locus)
    a2 = s.alpha ** 2
    k = 1.0 - a2
    R_c = float(np.linalg.norm(locus.center))
    r_c = locus.radius
    grad_E = locus.center / (k * R_c) - (a2 / k ** 2) * w / r_c
    grad_P = -(a2 / k) * locus.center / R_c + (a2 / k ** 2) * w / r_c
    return DuelValue(Region.PURSUER_WINS, float(value), grad_E, grad_P, point)


def value_evader_region(s: DuelState) -> DuelValue:
    _require_supported(s)
    if barrier_1v1(s) > 0:
        raise RegionMismatchError("state is in the pursuer winning region")

    R_E, R_P = s.R_E, s.R_P
    value = -R_P + R_E / s.alpha
    # evader already home: its gradient term vanishes
    grad_E = s.x_E / (s.alpha * R_E) if R_E > 0 else np.zeros(3)
    if R_P == 0:
        raise SingularGradientError("pursuer at the target: gradient undefined", value=value)
    grad_P = -s.x_P / R_P
    return DuelValue(Region.EVADER_WINS, float(value), grad_E, grad_P)


def duel_value(s: DuelState, coincidence_radius=0.0) -> DuelValue:
    if region_of(s) is Region.PURSUER_WINS:
        return value_pursuer_region(s, coincidence_radius)
    return value_evader_region(s)


def optimal_controls(s: DuelState, value: DuelValue | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Evader descends, pursuer ascends the value gradient, each at full speed."""
    value = duel_value(s) if value is None else value
    rho_E = float(np.linalg.norm(value.grad_E))
    rho_P = float(np.linalg.norm(value.grad_P))
    if rho_E == 0.0 or rho_P == 0.0:
        raise SingularControlError(f"zero value gradient (rho_E={rho_E:.3g}, rho_P={rho_P:.3g})")
    u_E = -s.U * value.grad_E / rho_E
    v_P = s.V * value.grad_P / rho_P
    return u_E, v_P


def hji_residual(s: DuelState, value: DuelValue | None = None) -> float:
    """-alpha rho_E + rho_P, which vanishes wherever the value is smooth."""
    value = duel_value(s) if value is None else value
    return float(-s.alpha * np.linalg.norm(value.grad_E) + np.linalg.norm(value.grad_P))
