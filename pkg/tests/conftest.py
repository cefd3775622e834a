import shutil
from pathlib import Path
import pytest
from click.testing import CliRunner
from reachavoid import create_app
from reachavoid.models.player import Player, Role
from reachavoid.models.scenario import Scenario
from reachavoid.scenarios.io import load_scenario

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'


@pytest.fixture(scope='session')
def app():
    # Testing mode: no log file, Celery tasks run eagerly in-process
    reachavoid_app = create_app({"TESTING": True, "BROKER_URL": None})
    with reachavoid_app.app_context():
        yield reachavoid_app


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope='session')
def ex2():
    return load_scenario(FIXTURES / 'ex2.json')


@pytest.fixture(scope='session')
def ex3():
    return load_scenario(FIXTURES / 'ex3.json')


@pytest.fixture(scope='session')
def ex4():
    return load_scenario(FIXTURES / 'ex4.json')


@pytest.fixture
def scenario_file(tmp_path):
    """Copy a shipped example into a scratch directory so reports land there."""
    def copy(name):
        target = tmp_path / f"{name}.json"
        shutil.copy(FIXTURES / f"{name}.json", target)
        return target
    return copy


def make_scenario(evaders, pursuers, **kwargs):
    """Build a scenario from ((x, y, z), speed) tuples."""
    return Scenario(
        evaders=tuple(Player(id=k + 1, role=Role.EVADER, position=p, speed=u) for k, (p, u) in enumerate(evaders)),
        pursuers=tuple(Player(id=k + 1, role=Role.PURSUER, position=p, speed=v) for k, (p, v) in enumerate(pursuers)),
        **kwargs,
    )


@pytest.fixture
def build_scenario():
    return make_scenario
