"""
Pursuer-to-evader role assignment.

Builds the payoff and Value matrices from the 1v1 games of every pair, solves
the assignment game as a maximum-weight rectangular matching, enumerates the
complete set of optimal assignments by k-best partitioning and refines it by
the Value matrix when the evaders win. A brute-force enumerator serves as the
oracle.
"""
import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field
import numpy as np
from scipy.optimize import linear_sum_assignment
from config import Config
from reachavoid.errors import DegenerateGeometryError, InvalidScenarioError, SingularGradientError, TooLargeError
from reachavoid.models.player import speed_ratio
from reachavoid.models.scenario import Assignment, Scenario
from . import duel
from .duel import Region

logger = logging.getLogger(__name__)

BRUTE_FORCE_CHUNK = 65536


@dataclass(frozen=True)
class PairTable:
    """Per-pair speed ratio, barrier, region and 1v1 value (NaN when unsupported)."""
    alpha: np.ndarray
    barrier: np.ndarray
    region: np.ndarray
    value: np.ndarray
    interception: np.ndarray

    @property
    def shape(self):
        return self.alpha.shape

    def region_mask(self, region: Region) -> np.ndarray:
        # element-wise == on an object array of str enums compares str(member), never the value
        return np.frompyfunc(lambda r: r is region, 1, 1)(self.region).astype(bool)

    @property
    def pursuer_mask(self):
        return self.region_mask(Region.PURSUER_WINS)

    @property
    def supported_mask(self):
        return ~self.region_mask(Region.UNSUPPORTED)


@dataclass(frozen=True)
class PayoffMatrix:
    a: np.ndarray
    L_used: float
    penalized: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.penalized is None:
            object.__setattr__(self, 'penalized', self.a == -self.L_used)

    @classmethod
    def from_array(cls, a, L_used):
        return cls(a=np.asarray(a, dtype=float), L_used=float(L_used))

    @property
    def shape(self):
        return self.a.shape


@dataclass(frozen=True)
class ValueMatrix:
    v: np.ndarray
    L_used: float
    unsupported: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.unsupported is None:
            object.__setattr__(self, 'unsupported', self.v == -self.L_used)


@dataclass(frozen=True)
class OptimalAssignmentSet:
    assignments: tuple[Assignment, ...]
    team_payoff: float
    truncated: bool = False

    def __len__(self):
        return len(self.assignments)

    def __iter__(self):
        return iter(self.assignments)

    def __contains__(self, item):
        return item in self.assignments

    @property
    def first(self):
        return self.assignments[0]

    def labels(self):
        return [a.label() for a in self.assignments]


def pair_table(s: Scenario) -> PairTable:
    m, n = s.m, s.n
    alpha = np.empty((m, n))
    barrier = np.empty((m, n))
    region = np.empty((m, n), dtype=object)
    value = np.full((m, n), np.nan)
    interception = np.full((m, n, 3), np.nan)

    for i in range(m):
        for j in range(n):
            state = duel.DuelState.from_scenario(s, i, j)
            alpha[i, j] = speed_ratio(s.evaders[i], s.pursuers[j]).alpha
            barrier[i, j] = duel.barrier_1v1(state)
            region[i, j] = duel.region_of(state)
            if region[i, j] is Region.UNSUPPORTED:
                continue
            try:
                result = duel.duel_value(state)
            except SingularGradientError as e:
                value[i, j] = e.value
                continue
            except DegenerateGeometryError as e:
                raise DegenerateGeometryError(f"E{i + 1}/P{j + 1}: {e}", pair=(i, j)) from e
            value[i, j] = result.value
            if result.interception_point is not None:
                interception[i, j] = result.interception_point

    return PairTable(alpha=alpha, barrier=barrier, region=region, value=value, interception=interception)


def best_case_payoff_Lstar(s: Scenario, table: PairTable | None = None) -> float:
    """Sum over evaders of their best pursuer-region value; evaders with none contribute 0."""
    table = pair_table(s) if table is None else table
    winnable = np.where(table.pursuer_mask, table.value, -np.inf)
    best = winnable.max(axis=1, initial=-np.inf)
    return float(np.where(np.isfinite(best), best, 0.0).sum())


def refinement_bound_Lbar(s: Scenario, table: PairTable | None = None) -> float:
    table = pair_table(s) if table is None else table
    magnitudes = np.where(table.supported_mask, np.abs(table.value), -np.inf)
    best = magnitudes.max(axis=1, initial=-np.inf)
    return float(2.0 * np.where(np.isfinite(best), best, 0.0).sum())


def default_penalty(s: Scenario, table: PairTable | None = None) -> float:
    table = pair_table(s) if table is None else table
    bound = max(best_case_payoff_Lstar(s, table), refinement_bound_Lbar(s, table), 1.0)
    return Config.PENALTY_FACTOR * bound


def resolve_penalty(s: Scenario, table: PairTable | None = None) -> float:
    if s.penalty_L is not None:
        return s.penalty_L
    return default_penalty(s, table)


def build_payoff_matrix(s: Scenario, table: PairTable | None = None, penalty_L=None) -> PayoffMatrix:
    table = pair_table(s) if table is None else table
    L = resolve_penalty(s, table) if penalty_L is None else penalty_L
    mask = table.pursuer_mask
    a = np.where(mask, table.value, -L)
    return PayoffMatrix(a=a, L_used=float(L), penalized=~mask)


def build_value_matrix(s: Scenario, table: PairTable | None = None, penalty_L=None) -> ValueMatrix:
    table = pair_table(s) if table is None else table
    L = resolve_penalty(s, table) if penalty_L is None else penalty_L
    mask = table.supported_mask
    v = np.where(mask, table.value, -L)
    return ValueMatrix(v=v, L_used=float(L), unsupported=~mask)


def _matrix(p):
    matrix = np.asarray(getattr(p, 'a', getattr(p, 'v', p)), dtype=float)
    m, n = matrix.shape
    if m > n:
        raise InvalidScenarioError(f"n ≥ m violated (n={n}, m={m})")
    return matrix


def assignment_payoff(p, assignment: Assignment) -> float:
    matrix = np.asarray(getattr(p, 'a', getattr(p, 'v', p)), dtype=float)
    return float(matrix[np.arange(assignment.m), assignment.columns].sum())


def within_tolerance(payoff, optimum, tie_tolerance):
    """Relative comparison when |optimum| > 1, absolute otherwise."""
    return payoff >= optimum - tie_tolerance * max(1.0, abs(optimum))


def solve_assignment_lp(p) -> Assignment:
    """
    One maximizer of the team payoff over feasible assignments.

    Unmatched pursuers contribute nothing, which the rectangular matching
    expresses directly.
    """
    matrix = _matrix(p)
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    return Assignment.from_columns(cols[np.argsort(rows)], n=matrix.shape[1])


def _constrained_solve(matrix, forced, forbidden):
    work = matrix.copy()
    for i, j in forbidden:
        work[i, j] = -np.inf
    for i, j in forced:
        keep = work[i, j]
        work[i, :] = -np.inf
        work[:, j] = -np.inf
        work[i, j] = keep
    try:
        rows, cols = linear_sum_assignment(work, maximize=True)
    except ValueError:
        # no feasible completion of this partition cell
        return None
    cols = cols[np.argsort(rows)]
    payoff = float(matrix[np.arange(len(cols)), cols].sum())
    return cols, payoff


def enumerate_optimal_set(p, tie_tolerance=None, limit=None) -> OptimalAssignmentSet:
    """
    All feasible assignments within tie_tolerance of the optimum.

    k-best enumeration by partitioning: each popped solution splits its cell
    into sub-cells that forbid one of its pairs while forcing the preceding
    ones. Cells whose best completion falls below the tolerance are dropped.
    """
    matrix = _matrix(p)
    tie_tolerance = Config.TIE_TOLERANCE if tie_tolerance is None else tie_tolerance
    limit = Config.OPTIMAL_SET_LIMIT if limit is None else limit
    m, n = matrix.shape

    root_cols, optimum = _constrained_solve(matrix, (), ())
    counter = itertools.count()
    heap = [(-optimum, next(counter), root_cols, (), ())]
    found = []
    truncated = False

    while heap:
        neg_payoff, _, cols, forced, forbidden = heapq.heappop(heap)
        if not within_tolerance(-neg_payoff, optimum, tie_tolerance):
            break
        found.append(Assignment.from_columns(cols, n=n))
        if len(found) >= limit:
            truncated = bool(heap)
            break

        forced_rows = {i for i, _ in forced}
        prefix = list(forced)
        for i in range(m):
            if i in forced_rows:
                continue
            child_forbidden = forbidden + ((i, int(cols[i])),)
            result = _constrained_solve(matrix, tuple(prefix), child_forbidden)
            if result is not None and within_tolerance(result[1], optimum, tie_tolerance):
                heapq.heappush(heap, (-result[1], next(counter), result[0], tuple(prefix), child_forbidden))
            prefix.append((i, int(cols[i])))

    if truncated:
        logger.warning(f"OPTIMAL_SET_TRUNCATED: stopped after {limit} equally optimal assignments ({m}x{n})")

    return OptimalAssignmentSet(assignments=tuple(sorted(found)), team_payoff=optimum, truncated=truncated)


def refine_theta_star(gamma_star: OptimalAssignmentSet, v: ValueMatrix, tie_tolerance=None) -> OptimalAssignmentSet:
    """Keep the members of gamma_star with the best Value-matrix total."""
    tie_tolerance = Config.TIE_TOLERANCE if tie_tolerance is None else tie_tolerance
    totals = [assignment_payoff(v, a) for a in gamma_star]
    best = max(totals)
    kept = tuple(a for a, t in zip(gamma_star, totals) if within_tolerance(t, best, tie_tolerance))
    return OptimalAssignmentSet(assignments=kept, team_payoff=best, truncated=gamma_star.truncated)


def brute_force_assignment(p, tie_tolerance=None, cap=None, limit=None) -> OptimalAssignmentSet:
    """Exhaustive enumeration of every feasible assignment."""
    matrix = _matrix(p)
    tie_tolerance = Config.TIE_TOLERANCE if tie_tolerance is None else tie_tolerance
    cap = Config.BRUTE_FORCE_CAP if cap is None else cap
    limit = Config.OPTIMAL_SET_LIMIT if limit is None else limit
    m, n = matrix.shape

    count = math.perm(n, m)
    if count > cap:
        raise TooLargeError(f"{count} feasible assignments exceed the brute-force cap {int(cap)}")

    rows = np.arange(m)
    permutations = itertools.permutations(range(n), m)
    best = -np.inf
    candidates = []
    while True:
        chunk = np.array(list(itertools.islice(permutations, BRUTE_FORCE_CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        chunk = chunk.reshape(-1, m)
        payoffs = matrix[rows, chunk].sum(axis=1)
        best = max(best, float(payoffs.max()))
        keep = payoffs >= best - tie_tolerance * max(1.0, abs(best))
        candidates.extend(zip(payoffs[keep].tolist(), chunk[keep]))
        candidates = [(pay, cols) for pay, cols in candidates if within_tolerance(pay, best, tie_tolerance)]

    members = sorted(Assignment.from_columns(cols, n=n) for _, cols in candidates)
    truncated = len(members) > limit
    return OptimalAssignmentSet(assignments=tuple(members[:limit]), team_payoff=best, truncated=truncated)


def penalty_count(p: PayoffMatrix, assignment: Assignment) -> int:
    """Number of assigned pairs receiving the -L penalty, i.e. evaders allowed to reach."""
    return int(p.penalized[np.arange(assignment.m), assignment.columns].sum())


def unsupported_count(table_or_values, assignment: Assignment) -> int:
    mask = getattr(table_or_values, 'unsupported', None)
    if mask is None:
        mask = ~table_or_values.supported_mask
    return int(mask[np.arange(assignment.m), assignment.columns].sum())
