import numpy as np
import pytest
from config import Config
from reachavoid.errors import RegionMismatchError, SingularControlError, SingularGradientError, UnsupportedRegimeError
from reachavoid.services import duel
from reachavoid.services.duel import DuelState, Region
from reachavoid.services.verification import random_duel_states


@pytest.fixture
def collinear():
    return DuelState(x_E=(0, 0, 1), x_P=(0, 0, -1), U=1.0, V=2.0)


def test_collinear_pursuer_region_value(collinear):
    """
    GIVEN an evader at (0,0,1) and a twice-as-fast pursuer at (0,0,-1)
    WHEN the pursuer-region value is evaluated
    THEN value, interception point and both gradients take their closed forms
    """
    assert duel.barrier_1v1(collinear) == pytest.approx(0.75)
    assert duel.region_of(collinear) is Region.PURSUER_WINS

    value = duel.value_pursuer_region(collinear)

    assert value.value == pytest.approx(1 / 3)
    np.testing.assert_allclose(value.interception_point, [0, 0, 1 / 3], atol=1e-12)
    np.testing.assert_allclose(value.grad_E, [0, 0, 2 / 3], atol=1e-12)
    np.testing.assert_allclose(value.grad_P, [0, 0, 1 / 3], atol=1e-12)


def test_collinear_optimal_controls_head_for_interception(collinear):
    """
    GIVEN the collinear duel
    WHEN optimal controls are computed
    THEN both players move along the axis towards (0,0,1/3) at full speed
    """
    u_E, v_P = duel.optimal_controls(collinear)

    np.testing.assert_allclose(u_E, [0, 0, -1], atol=1e-12)
    np.testing.assert_allclose(v_P, [0, 0, 2], atol=1e-12)
    assert abs(duel.hji_residual(collinear)) < 1e-12


def test_barrier_boundary_belongs_to_evader_region():
    """
    GIVEN a state with B exactly zero
    WHEN its region is classified
    THEN it is an evader winning state
    """
    state = DuelState(x_E=(0, 0, 1), x_P=(0, 0, -2), U=1.0, V=2.0)

    assert duel.barrier_1v1(state) == 0.0
    assert duel.region_of(state) is Region.EVADER_WINS


def test_evader_region_value_and_controls():
    """
    GIVEN an evader close to the target and a distant pursuer
    WHEN the evader-region value and controls are evaluated
    THEN the value is -R_P + R_E/alpha and both players run straight to the target
    """
    state = DuelState(x_E=(0, 1, 0), x_P=(3, 0, 4), U=1.0, V=2.0)

    value = duel.value_evader_region(state)
    u_E, v_P = duel.optimal_controls(state, value)

    assert value.region is Region.EVADER_WINS
    assert value.value == pytest.approx(-5 + 2)
    np.testing.assert_allclose(u_E, [0, -1, 0], atol=1e-12)
    np.testing.assert_allclose(v_P, [-1.2, 0, -1.6], atol=1e-12)
    assert np.linalg.norm(u_E) == pytest.approx(state.U)
    assert np.linalg.norm(v_P) == pytest.approx(state.V)


def test_evader_on_target_scores_minus_pursuer_distance():
    """
    GIVEN an evader sitting on the target and a pursuer five units away
    WHEN the evader-region value is evaluated
    THEN the value is -R_P, the evader gradient vanishes and controls are singular
    """
    state = DuelState(x_E=(0, 0, 0), x_P=(3, 0, 4), U=1.0, V=2.0)

    assert duel.region_of(state) is Region.EVADER_WINS
    value = duel.value_evader_region(state)

    assert value.value == pytest.approx(-5.0)
    assert np.array_equal(value.grad_E, np.zeros(3))
    np.testing.assert_allclose(value.grad_P, [-0.6, 0, -0.8])
    with pytest.raises(SingularControlError):
        duel.optimal_controls(state, value)


def test_equal_speed_value_is_bisector_distance():
    """
    GIVEN equal speeds with the evader farther from the target
    WHEN the pursuer-region value is evaluated
    THEN the interception point is the midpoint and the HJI residual vanishes
    """
    state = DuelState(x_E=(0, 0, 2), x_P=(0, 0, -1), U=1.5, V=1.5)

    value = duel.value_pursuer_region(state)

    assert value.value == pytest.approx(0.5)
    np.testing.assert_allclose(value.interception_point, [0, 0, 0.5], atol=1e-12)
    assert abs(duel.hji_residual(state, value)) < 1e-12


def test_example_pair_value(ex2):
    """
    GIVEN evader 1 and pursuer 1 of the 3v3 example
    WHEN their duel is valued
    THEN the pursuer wins with value 1.995661
    """
    state = DuelState.from_scenario(ex2, 0, 0)

    assert state.alpha == pytest.approx(0.988304, abs=1e-6)
    value = duel.duel_value(state)
    assert value.region is Region.PURSUER_WINS
    assert value.value == pytest.approx(1.995661, abs=1e-6)


def test_region_specific_values_refuse_the_other_region(collinear):
    """
    GIVEN a pursuer-region state
    WHEN the evader-region value is requested
    THEN a region mismatch is raised
    """
    with pytest.raises(RegionMismatchError):
        duel.value_evader_region(collinear)


def test_faster_evader_has_no_value():
    """
    GIVEN an evader faster than its pursuer
    WHEN the duel is classified and valued
    THEN the region is unsupported and valuation is refused
    """
    state = DuelState(x_E=(1, 0, 0), x_P=(0, 5, 0), U=2.0, V=1.0)

    assert duel.region_of(state) is Region.UNSUPPORTED
    with pytest.raises(UnsupportedRegimeError):
        duel.duel_value(state)


def test_pursuer_on_target_has_singular_gradient():
    """
    GIVEN an evader already home and the pursuer parked on the target
    WHEN the evader-region value is evaluated
    THEN a singular-gradient error carries the well-defined value
    """
    state = DuelState(x_E=(0, 0, 0), x_P=(0, 0, 0), U=1.0, V=1.0)

    assert duel.region_of(state) is Region.EVADER_WINS
    with pytest.raises(SingularGradientError) as excinfo:
        duel.value_evader_region(state)
    assert excinfo.value.value == 0.0


@pytest.mark.parametrize("region", [Region.PURSUER_WINS, Region.EVADER_WINS])
def test_hji_residual_vanishes_on_random_states(region):
    """
    GIVEN the configured number of seeded random states in one winning region
    WHEN the HJI residual is evaluated
    THEN it stays below 1e-9 and the controls are admissible
    """
    rng = np.random.default_rng(7)

    for state in random_duel_states(rng, Config.VERIFY_DUEL_SAMPLES, region):
        assert abs(duel.hji_residual(state)) < 1e-9
        u_E, v_P = duel.optimal_controls(state)
        assert np.linalg.norm(u_E) == pytest.approx(state.U)
        assert np.linalg.norm(v_P) == pytest.approx(state.V)
