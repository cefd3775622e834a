import numpy as np
import pytest
from reachavoid.errors import InadmissibleControlError, NoTerminationError, UnsupportedRegimeError
from reachavoid.models.scenario import Assignment
from reachavoid.services import assignment as assign
from reachavoid.services import simulation
from reachavoid.services.game import Capture, GameOver, Reach
from reachavoid.services.simulation import StrategyProfile


@pytest.fixture
def collinear(build_scenario):
    return build_scenario(evaders=[((0, 0, 1), 1.0)], pursuers=[((0, 0, -1), 2.0)])


def test_first_crossing_on_a_segment():
    """
    GIVEN a point moving straight through a ball of radius 1
    WHEN its first crossing is located
    THEN it enters at the analytic time, misses when aimed aside and starts inside at zero
    """
    entry = simulation.first_crossing(np.array([-3.0, 0, 0]), np.array([1.0, 0, 0]), 1.0, 5.0, 1e-12)

    assert entry == pytest.approx(2.0, abs=1e-10)
    assert simulation.first_crossing(np.array([-3.0, 2, 0]), np.array([1.0, 0, 0]), 1.0, 5.0, 1e-12) is None
    assert simulation.first_crossing(np.array([-3.0, 0, 0]), np.array([1.0, 0, 0]), 1.0, 1.0, 1e-12) is None
    assert simulation.first_crossing(np.array([0.5, 0, 0]), np.zeros(3), 1.0, 1.0, 1e-12) == 0.0


def test_collinear_duel_is_captured_at_interception_point(collinear):
    """
    GIVEN the collinear duel with a twice-as-fast pursuer
    WHEN it is simulated under optimal play
    THEN capture happens at (0,0,1/3) at t = 2/3 with realized payoff 1/3
    """
    trajectory = simulation.simulate(collinear)

    capture = trajectory.captures()[0]
    np.testing.assert_allclose(capture.point, [0, 0, 1 / 3], atol=1e-5)
    assert trajectory.t_f == pytest.approx(2 / 3, abs=1e-5)
    assert trajectory.realized_payoff == pytest.approx(1 / 3, abs=1e-5)
    assert isinstance(trajectory.events[-1], GameOver)
    assert trajectory.times[-1] == trajectory.t_f


def test_evader_region_duel_reaches_target(build_scenario):
    """
    GIVEN an evader one unit from the target and a pursuer five units away at twice the speed
    WHEN the duel is simulated
    THEN the evader reaches at t = 1 while the pursuer is still 3 away
    """
    s = build_scenario(evaders=[((0, 1, 0), 1.0)], pursuers=[((3, 0, 4), 2.0)])

    trajectory = simulation.simulate(s)

    reach = trajectory.reaches()[0]
    assert reach.t == pytest.approx(1.0, abs=1e-5)
    assert trajectory.realized_payoff == pytest.approx(-3.0, abs=1e-4)


def test_optimal_play_realizes_the_value(ex2):
    """
    GIVEN the 3v3 example
    WHEN it is played out optimally
    THEN every evader is captured and the realized payoff equals the Value
    """
    trajectory = simulation.simulate(ex2)

    assert trajectory.assignment.label() == "{11,23,32}"
    assert len(trajectory.captures()) == 3
    assert not trajectory.reaches()
    assert trajectory.realized_payoff == pytest.approx(17.488361, abs=1e-3)


def test_deviating_evaders_do_no_better(ex2):
    """
    GIVEN the 3v3 example with evaders running straight for the target
    WHEN pursuers keep playing their feedback strategy
    THEN the realized payoff is no lower than the Value
    """
    profile = StrategyProfile.named('straight-evaders')

    trajectory = simulation.simulate(ex2, profile=profile)

    assert trajectory.realized_payoff >= 17.488361 - 1e-3


def test_open_loop_pursuers_match_feedback_under_optimal_play(collinear):
    """
    GIVEN the collinear duel
    WHEN pursuers hold their initial heading against an optimal evader
    THEN the outcome is the same as under feedback
    """
    feedback = simulation.simulate(collinear)
    open_loop = simulation.simulate(collinear, profile=StrategyProfile(pursuers='open-loop'))

    assert open_loop.realized_payoff == pytest.approx(feedback.realized_payoff, abs=1e-9)


@pytest.mark.parametrize("name", ["ex2", "ex4"])
def test_optimal_trajectories_are_straight(name, request):
    """
    GIVEN an example where every pair has a value
    WHEN it is simulated under optimal play
    THEN every player's path stays on its start-end chord
    """
    scenario = request.getfixturevalue(name)

    trajectory = simulation.simulate(scenario)

    assert max(simulation.straightness_check(trajectory).values()) < 1e-6


def test_players_freeze_after_their_pair_resolves(ex4):
    """
    GIVEN the dispersal example
    WHEN it is simulated
    THEN the unmatched pursuer never moves and resolved players stay where the event happened
    """
    trajectory = simulation.simulate(ex4)

    unmatched = trajectory.path("P3")
    assert np.array_equal(unmatched, np.repeat(unmatched[:1], len(unmatched), axis=0))
    for capture in trajectory.captures():
        k = int(np.searchsorted(trajectory.times, capture.t))
        for frozen in (trajectory.evader_positions[k:, capture.i], trajectory.pursuer_positions[k:, capture.j]):
            assert np.array_equal(frozen, np.repeat(frozen[:1], len(frozen), axis=0))
        np.testing.assert_array_equal(trajectory.evader_positions[k, capture.i], capture.point)


def test_capture_points_match_pair_interception_points(ex2):
    """
    GIVEN the 3v3 example under optimal play
    WHEN every pair ends in a capture
    THEN each capture point is the analytic interception point of its pair
    """
    table = assign.pair_table(ex2)

    trajectory = simulation.simulate(ex2)

    assert len(trajectory.captures()) == 3
    for capture in trajectory.captures():
        U, V = ex2.evaders[capture.i].speed, ex2.pursuers[capture.j].speed
        bound = ex2.resolved_capture_radius() + trajectory.step * (U + V)
        assert np.linalg.norm(capture.point - table.interception[capture.i, capture.j]) <= bound


def test_straight_evaders_run_straight(ex2):
    """
    GIVEN evaders heading straight for the target
    WHEN the 3v3 example is simulated
    THEN every evader path has zero straightness deviation
    """
    trajectory = simulation.simulate(ex2, profile=StrategyProfile.named('straight-evaders'))

    deviations = simulation.straightness_check(trajectory)

    assert all(deviations[f"E{i + 1}"] < 1e-9 for i in range(ex2.m))


def test_simulation_is_deterministic(ex4):
    """
    GIVEN the same scenario, assignment and step twice
    WHEN both runs are simulated
    THEN trajectories and events are identical
    """
    first = simulation.simulate(ex4)
    second = simulation.simulate(ex4)

    np.testing.assert_array_equal(first.times, second.times)
    np.testing.assert_array_equal(first.evader_positions, second.evader_positions)
    np.testing.assert_array_equal(first.pursuer_positions, second.pursuer_positions)
    assert [(type(e), e.t, getattr(e, 'i', None)) for e in first.events] == \
        [(type(e), e.t, getattr(e, 'i', None)) for e in second.events]
    for a, b in zip(first.events, second.events):
        if hasattr(a, 'point'):
            np.testing.assert_array_equal(a.point, b.point)
    assert first.realized_payoff == second.realized_payoff


def test_observer_sees_every_step(collinear):
    """
    GIVEN an observer hook
    WHEN a duel is simulated
    THEN it is called once per recorded sample with the resolved mask
    """
    seen = []

    trajectory = simulation.simulate(collinear, observer=lambda t, E, P, resolved: seen.append((t, resolved.all())))

    assert len(seen) == len(trajectory.times)
    assert seen[-1] == (trajectory.t_f, True)


@pytest.mark.parametrize("name", ["ex2", "ex4"])
def test_value_drift_does_not_grow_when_the_step_is_halved(name, request):
    """
    GIVEN a certified pursuer-team example
    WHEN the multiplayer value is tracked at a step and at half that step
    THEN both drifts stay below 1e-4 and the finer step is no worse
    """
    scenario = request.getfixturevalue(name)
    step = 2 * simulation.default_step(scenario)

    coarse = simulation.value_conservation_check(scenario, step=step)
    fine = simulation.value_conservation_check(scenario, step=step / 2)

    assert coarse < 1e-4
    assert fine < 1e-4
    assert fine <= coarse + 1e-9


def test_value_conservation_needs_a_certified_value(ex3):
    """
    GIVEN the evader-team example with an outpaced pursuer in the chosen assignment
    WHEN value conservation is checked
    THEN it is refused
    """
    with pytest.raises(UnsupportedRegimeError):
        simulation.value_conservation_check(ex3)


def test_evader_team_example_plays_out(ex3):
    """
    GIVEN the evader-team example
    WHEN it is simulated
    THEN evaders 1 and 3 reach the target and evader 2 is captured
    """
    trajectory = simulation.simulate(ex3)

    assert sorted(e.i for e in trajectory.reaches()) == [0, 2]
    assert [e.i for e in trajectory.captures()] == [1]


def test_invalid_step_is_rejected(collinear):
    """
    GIVEN a zero step
    WHEN a simulation is requested
    THEN it is refused before integrating
    """
    with pytest.raises(ValueError):
        simulation.simulate(collinear, step=0.0)


def test_time_cap_stops_endless_games(collinear):
    """
    GIVEN a time cap far shorter than the capture time
    WHEN the duel is simulated
    THEN a no-termination error is raised
    """
    with pytest.raises(NoTerminationError):
        simulation.simulate(collinear, time_cap=0.01)


def test_custom_strategy_must_use_full_speed(collinear):
    """
    GIVEN an evader hook that dawdles at half speed
    WHEN the duel is simulated
    THEN the control is rejected as inadmissible
    """
    profile = StrategyProfile(evaders=lambda t, E, P: np.array([[0.0, 0.0, -0.5]]))

    with pytest.raises(InadmissibleControlError):
        simulation.simulate(collinear, profile=profile)


def test_custom_assignment_is_respected(ex4):
    """
    GIVEN an explicit assignment for the dispersal example
    WHEN it is simulated
    THEN the recorded assignment and captures follow it
    """
    chosen = Assignment.from_columns([2, 0], n=3)

    trajectory = simulation.simulate(ex4, chosen)

    assert trajectory.assignment == chosen
    assert {(e.i, e.j) for e in trajectory.captures()} == {(0, 2), (1, 0)}
    assert not any(isinstance(e, Reach) for e in trajectory.events)
    assert all(isinstance(e, (Capture, Reach, GameOver)) for e in trajectory.events)
