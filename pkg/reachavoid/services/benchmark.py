"""
Timing comparison of the matching-based assignment against brute-force
enumeration on random scenarios.
"""
import logging
import re
import time
from dataclasses import dataclass
import numpy as np
from tqdm import tqdm
from config import Config
from reachavoid.errors import TooLargeError
from reachavoid.models.player import Player, Role
from reachavoid.models.scenario import Scenario
from . import assignment as assign

logger = logging.getLogger(__name__)

SIZE_PATTERN = re.compile(r'\(\s*(\d+)\s*,\s*(\d+)\s*\)')


@dataclass(frozen=True)
class BenchRow:
    n: int
    m: int
    trials: int
    brute_force_seconds: float | None
    lp_seconds: float
    payoff_matrix_build_seconds: float
    payoffs_agree: bool | None


def parse_sizes(text) -> list[tuple[int, int]]:
    """Parse '(n,m),(n,m),...' into (n, m) tuples."""
    sizes = [(int(n), int(m)) for n, m in SIZE_PATTERN.findall(text)]
    if not sizes or SIZE_PATTERN.sub('', text).strip(' ,') != '':
        raise ValueError(f"sizes must look like '(3,3),(10,8)', got {text!r}")
    for n, m in sizes:
        if not n >= m >= 1:
            raise ValueError(f"size ({n},{m}) needs n ≥ m ≥ 1")
    return sizes


def random_scenario(n, m, rng) -> Scenario:
    box = Config.BENCH_BOX

    def players(count, role, speeds):
        positions = rng.uniform(-box, box, size=(count, 3))
        velocities = rng.uniform(*speeds, size=count)
        return tuple(
            Player(id=k + 1, role=role, position=tuple(positions[k]), speed=float(velocities[k]))
            for k in range(count)
        )

    return Scenario(
        pursuers=players(n, Role.PURSUER, Config.BENCH_PURSUER_SPEEDS),
        evaders=players(m, Role.EVADER, Config.BENCH_EVADER_SPEEDS),
    )


def run_trial(n, m, entropy, cap=None) -> dict:
    """Time one random instance; brute force is None when it exceeds the cap."""
    rng = np.random.default_rng(entropy)
    scenario = random_scenario(n, m, rng)

    started = time.perf_counter()
    payoff = assign.build_payoff_matrix(scenario)
    build_seconds = time.perf_counter() - started

    started = time.perf_counter()
    lp_choice = assign.solve_assignment_lp(payoff)
    lp_seconds = time.perf_counter() - started

    brute_seconds = None
    agree = None
    try:
        started = time.perf_counter()
        brute = assign.brute_force_assignment(payoff, scenario.tie_tolerance, cap=cap, limit=1)
        brute_seconds = time.perf_counter() - started
        agree = bool(assign.within_tolerance(
            assign.assignment_payoff(payoff, lp_choice), brute.team_payoff, scenario.tie_tolerance
        ))
    except TooLargeError:
        pass

    return {
        "n": n,
        "m": m,
        "brute_force_seconds": brute_seconds,
        "lp_seconds": lp_seconds,
        "payoff_matrix_build_seconds": build_seconds,
        "payoffs_agree": agree,
    }


def summarize(n, m, results) -> BenchRow:
    brute = [r["brute_force_seconds"] for r in results]
    agree = [r["payoffs_agree"] for r in results if r["payoffs_agree"] is not None]
    return BenchRow(
        n=n,
        m=m,
        trials=len(results),
        brute_force_seconds=None if any(b is None for b in brute) else float(np.mean(brute)),
        lp_seconds=float(np.mean([r["lp_seconds"] for r in results])),
        payoff_matrix_build_seconds=float(np.mean([r["payoff_matrix_build_seconds"] for r in results])),
        payoffs_agree=all(agree) if agree else None,
    )


def run_bench(sizes, trials=None, seed=0, cap=None, progress=False) -> list[BenchRow]:
    from reachavoid.tasks.bench_tasks import run_bench_trial

    trials = Config.BENCH_TRIALS if trials is None else trials
    cap = Config.BRUTE_FORCE_CAP if cap is None else cap
    logger.info(f"BENCH_START: sizes={sizes} trials={trials} seed={seed} cap={cap}")

    pending = {
        (n, m): [run_bench_trial.delay(n, m, [seed, n, m, k], cap) for k in range(trials)]
        for n, m in sizes
    }
    rows = []
    with tqdm(total=len(sizes) * trials, desc='bench', disable=not progress) as bar:
        for (n, m), handles in pending.items():
            results = []
            for handle in handles:
                results.append(handle.get())
                bar.update(1)
            rows.append(summarize(n, m, results))
    logger.info(f"BENCH_DONE: {len(rows)} sizes")
    return rows


def format_table(rows) -> str:
    lines = [f"{'n':>4} {'m':>4} {'brute force (s)':>16} {'LP (s)':>10} {'build (ms)':>11}"]
    for row in rows:
        brute = 'NA' if row.brute_force_seconds is None else f"{row.brute_force_seconds:.4f}"
        lines.append(
            f"{row.n:>4} {row.m:>4} {brute:>16} {row.lp_seconds:>10.4f} "
            f"{1000 * row.payoff_matrix_build_seconds:>11.3f}"
        )
    return '\n'.join(lines)
