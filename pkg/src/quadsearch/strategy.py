"""End-to-end search driver and cross-path verification harness.

The measurement strategy: a power-of-four target count is measured right
at the end of the main phase and succeeds with certainty; otherwise
measure at the main phase when rho >= 1/2 and after one extra iteration
when rho < 1/2, guaranteeing success probability >= 1/2.  The tie at
rho = 1/2 goes to the main-phase measurement (fewer oracle calls at
equal probability).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Union

from . import analytic, cost, statevector
from .embedding import (
    Embedding,
    OracleSet,
    ProblemSpec,
    SymbolMap,
    build_embedding,
    build_oracles,
    build_symbol_map,
)

__all__ = [
    "SearchOutcome",
    "PreparedSearch",
    "PathAgreement",
    "VerifyReport",
    "choose_iterations",
    "prepare",
    "measure",
    "search",
    "verify",
]

PADDING = "padding"


def choose_iterations(embedding: Embedding) -> tuple[int, float]:
    """Iteration count and predicted success probability for an embedding."""
    main = embedding.main_iterations
    if embedding.power_of_four:
        return main, 1.0
    if embedding.rho >= Fraction(1, 2):
        return main, float(embedding.rho)
    return main + 1, float(analytic.prob_one_extra(embedding.rho))


@dataclass(frozen=True)
class SearchOutcome:
    """One search run: what was measured and what it cost."""

    measured_item: Union[int, str]
    is_target: bool
    iterations_used: int
    predicted_probability: float
    oracle_calls_abstract: int
    oracle_calls_recursive_model: int
    seed: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PreparedSearch:
    """The deterministic part of a search: state evolved, costs known.

    Measuring is the only seeded step, so bulk experiments prepare once
    and draw many times.
    """

    spec: ProblemSpec
    embedding: Embedding
    symbol_map: SymbolMap
    oracles: OracleSet
    state: statevector.StateVector
    iterations: int
    predicted_probability: float


def prepare(spec: ProblemSpec) -> PreparedSearch:
    embedding = build_embedding(spec)
    oracles = build_oracles(embedding, spec)
    iterations, predicted = choose_iterations(embedding)
    state = statevector.run_main_phase(embedding, spec, iterations, oracles=oracles)
    return PreparedSearch(
        spec=spec,
        embedding=embedding,
        symbol_map=build_symbol_map(embedding, spec),
        oracles=oracles,
        state=state,
        iterations=iterations,
        predicted_probability=predicted,
    )


def measure(prep: PreparedSearch, seed: int) -> SearchOutcome:
    """Draw one measurement from a prepared search."""
    (index,) = statevector.sample(prep.state, seed, trials=1)
    catalog_item = prep.symbol_map.catalog_item_at(index)
    return SearchOutcome(
        measured_item=catalog_item if catalog_item is not None else PADDING,
        is_target=bool(prep.oracles.oracle(index)),
        iterations_used=prep.iterations,
        predicted_probability=prep.predicted_probability,
        oracle_calls_abstract=prep.iterations,
        oracle_calls_recursive_model=cost.total_calls(prep.iterations),
        seed=seed,
    )


def search(spec: ProblemSpec, seed: int) -> SearchOutcome:
    """Build, run, and measure one search; deterministic given the seed."""
    return measure(prepare(spec), seed)


@dataclass(frozen=True)
class PathAgreement:
    """Success probabilities from independent routes at one iteration count."""

    extras: int
    iterations: int
    analytic: float
    simulated: float
    recursive: float | None
    deviation: float


@dataclass(frozen=True)
class VerifyReport:
    catalog_size: int
    num_targets: int
    rho: float
    power_of_four: bool
    agreements: tuple[PathAgreement, ...]
    counting_checks: dict[str, bool]
    max_deviation: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["agreements"] = [asdict(a) for a in self.agreements]
        return d


# Beyond this many iterations the literal 3**n expansion stops being a
# cheap sanity check; the closed-form count is still reported.
_RECURSIVE_CHECK_LIMIT = 7


def _counting_checks(embedding: Embedding, oracles: OracleSet) -> dict[str, bool]:
    """Exact sign-sum identities behind the uniform-amplitude induction."""
    n_tilde, nu0 = embedding.n_tilde, embedding.nu0
    first = oracles.marked_mask(1)
    checks = {
        "first_level_sign_sum": int((~first).sum() - first.sum())
        == embedding.N_tilde // 2
    }
    ok = True
    for j in range(1, embedding.main_iterations):
        cur, nxt = oracles.marked_mask(j), oracles.marked_mask(j + 1)
        signed = int((cur & ~nxt).sum() - (cur & nxt).sum())
        ok = ok and signed == 2 ** (2 * (n_tilde - j) - 1)
    checks["interior_sign_sums"] = ok
    last = oracles.marked_mask(embedding.main_iterations)
    targets = oracles.target_mask()
    boundary = int((last & ~targets).sum() - (last & targets).sum())
    checks["final_level_sign_sum"] = boundary == embedding.nu - 2 * nu0
    return checks


def verify(
    spec: ProblemSpec, q_max: int = 3, tolerance: float = 1e-10
) -> VerifyReport:
    """Cross-check simulated, analytic, and recursively executed paths.

    Success probabilities are compared for 0..q_max extra iterations;
    the recursive execution joins whenever its expansion is small.
    Failures are reported, never raised.
    """
    if q_max < 0:
        raise ValueError(f"q_max must be >= 0, got {q_max}")
    embedding = build_embedding(spec)
    oracles = build_oracles(embedding, spec)
    rho = embedding.rho

    agreements = []
    state = statevector.run_main_phase(
        embedding, spec, embedding.main_iterations, oracles=oracles
    )
    for q in range(q_max + 1):
        if q > 0:
            state = statevector.iterate(state, oracles)
        n_iter = embedding.main_iterations + q
        simulated = statevector.success_probability(state, oracles)
        predicted = float(analytic.prob_extra(float(rho), q))
        recursive_prob = None
        if n_iter <= _RECURSIVE_CHECK_LIMIT:
            rec_state, _ = cost.recursive_execute(embedding, spec, n_iter)
            recursive_prob = statevector.success_probability(rec_state, oracles)
        deviation = abs(simulated - predicted)
        if recursive_prob is not None:
            deviation = max(deviation, abs(recursive_prob - simulated))
        agreements.append(
            PathAgreement(
                extras=q,
                iterations=n_iter,
                analytic=predicted,
                simulated=simulated,
                recursive=recursive_prob,
                deviation=deviation,
            )
        )

    counting = _counting_checks(embedding, oracles)
    max_dev = max(a.deviation for a in agreements)
    passed = all(counting.values()) and max_dev < tolerance
    return VerifyReport(
        catalog_size=spec.catalog_size,
        num_targets=spec.num_targets,
        rho=float(rho),
        power_of_four=embedding.power_of_four,
        agreements=tuple(agreements),
        counting_checks=counting,
        max_deviation=max_dev,
        tolerance=tolerance,
        passed=passed,
    )
