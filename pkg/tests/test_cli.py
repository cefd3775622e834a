import json
from reachavoid.cli import cli

COINCIDENT = {
    "pursuers": [
        {"id": 1, "position": [1, 2, 3], "speed": 2.0},
        {"id": 2, "position": [0, 0, 5], "speed": 2.0},
    ],
    "evaders": [{"id": 1, "position": [1, 2, 3], "speed": 1.0}],
}


def test_solve_dispersal_example(app, runner, scenario_file):
    """
    GIVEN the dispersal example file
    WHEN 'solve' is run
    THEN the four tied assignments and the Value are printed and a report is written next to it
    """
    path = scenario_file("ex4")

    result = runner.invoke(cli, ["solve", str(path)], obj=app)

    assert result.exit_code == 0, result.output
    assert "winner:       PursuerTeam" in result.output
    assert "dispersal:    yes" in result.output
    assert "value:        1.539765" in result.output
    report = json.loads((path.parent / "ex4.solution.json").read_text())
    assert report["status"] == "success"
    assert len(report["data"]["theta_star"]["assignments"]) == 4


def test_solve_writes_report_where_asked(app, runner, scenario_file, tmp_path):
    """
    GIVEN the 3v3 example and an explicit report path
    WHEN 'solve' is run
    THEN the report lands at that path
    """
    out = tmp_path / "reports" / "ex2.json"
    out.parent.mkdir()

    result = runner.invoke(cli, ["solve", str(scenario_file("ex2")), "--report", str(out)], obj=app)

    assert result.exit_code == 0, result.output
    assert "assignment:   {11,23,32}" in result.output
    assert json.loads(out.read_text())["data"]["winner"] == "PursuerTeam"


def test_malformed_file_exits_with_parse_error(app, runner, tmp_path):
    """
    GIVEN a scenario document missing its evaders
    WHEN 'solve' is run
    THEN it exits with code 3 and a fail envelope naming the key
    """
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"pursuers": COINCIDENT["pursuers"]}))

    result = runner.invoke(cli, ["solve", str(path)], obj=app)

    assert result.exit_code == 3
    envelope = json.loads(result.stderr.strip().splitlines()[-1])
    assert envelope["status"] == "fail"
    assert "evaders" in json.dumps(envelope["data"])


def test_simulate_writes_trajectory_and_events(app, runner, scenario_file, tmp_path):
    """
    GIVEN the 3v3 example
    WHEN 'simulate' is run with an output path
    THEN the realized payoff is printed and the CSV and event sidecar exist
    """
    out = tmp_path / "ex2.csv"

    result = runner.invoke(cli, ["simulate", str(scenario_file("ex2")), "--out", str(out)], obj=app)

    assert result.exit_code == 0, result.output
    assert "realized payoff: 17.488" in result.output
    assert out.exists()
    assert (tmp_path / "ex2.csv.events.json").exists()


def test_simulate_straight_evaders(app, runner, scenario_file):
    """
    GIVEN the 3v3 example
    WHEN evaders run straight for the target against open-loop pursuers
    THEN the simulation completes and writes its default trajectory file
    """
    path = scenario_file("ex2")

    result = runner.invoke(
        cli, ["simulate", str(path), "--profile", "straight-evaders", "--pursuers", "open-loop"], obj=app,
    )

    assert result.exit_code == 0, result.output
    assert (path.parent / "ex2.trajectory.csv").exists()


def test_simulate_rejects_zero_step(app, runner, scenario_file):
    """
    GIVEN a zero integration step
    WHEN 'simulate' is run
    THEN click reports a usage error
    """
    result = runner.invoke(cli, ["simulate", str(scenario_file("ex2")), "--step", "0"], obj=app)

    assert result.exit_code == 2


def test_bench_reports_na_above_the_cap(app, runner, tmp_path):
    """
    GIVEN a brute-force cap below the (6,5) assignment count
    WHEN 'bench' is run
    THEN the small size is timed, the large one shows NA and the JSON report is written
    """
    out = tmp_path / "bench.json"

    result = runner.invoke(
        cli, ["bench", "--sizes", "(1,1),(6,5)", "--trials", "2", "--seed", "3", "--cap", "100", "--out", str(out)],
        obj=app,
    )

    assert result.exit_code == 0, result.output
    assert "NA" in result.output
    rows = json.loads(out.read_text())["data"]["rows"]
    assert [(r["n"], r["m"]) for r in rows] == [(1, 1), (6, 5)]
    assert rows[0]["brute_force_seconds"] is not None
    assert rows[1]["brute_force_seconds"] is None
    assert rows[0]["payoffs_agree"] is True


def test_bench_rejects_bad_sizes(app, runner):
    """
    GIVEN a size with more evaders than pursuers
    WHEN 'bench' is run
    THEN click reports a usage error
    """
    result = runner.invoke(cli, ["bench", "--sizes", "(2,3)"], obj=app)

    assert result.exit_code == 2


def test_verify_random_suites_pass(app, runner, tmp_path):
    """
    GIVEN seeded random suites
    WHEN 'verify --random' is run
    THEN every property passes and the report is written
    """
    out = tmp_path / "verify.json"

    result = runner.invoke(cli, ["verify", "--random", "4", "3", "20", "42", "--report", str(out)], obj=app)

    assert result.exit_code == 0, result.output
    assert "FAIL" not in result.output
    assert "properties passed" in result.output
    assert json.loads(out.read_text())["data"]["passed"] is True


def test_verify_reports_strict_refinement(app, runner, scenario_file):
    """
    GIVEN the evader-team example
    WHEN 'verify' is run on it
    THEN the refinement is reported as a strict subset
    """
    result = runner.invoke(cli, ["verify", str(scenario_file("ex3"))], obj=app)

    assert result.exit_code == 0, result.output
    assert "refinement-subset (strict subset" in result.output
    assert "SKIP value-conservation" in result.output


def test_verify_skips_degenerate_pairs(app, runner, tmp_path):
    """
    GIVEN a scenario whose evader sits on a pursuer
    WHEN 'verify' is run
    THEN the degenerate cases are skipped rather than failed
    """
    path = tmp_path / "coincident.json"
    path.write_text(json.dumps(COINCIDENT))

    result = runner.invoke(cli, ["verify", str(path)], obj=app)

    assert result.exit_code == 0, result.output
    assert "SKIP pair[E1P1]" in result.output
    assert "FAIL" not in result.output


def test_verify_needs_an_input(app, runner):
    """
    GIVEN neither a scenario nor random parameters
    WHEN 'verify' is run
    THEN click reports a usage error
    """
    result = runner.invoke(cli, ["verify"], obj=app)

    assert result.exit_code == 2
