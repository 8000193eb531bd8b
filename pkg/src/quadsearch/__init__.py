"""Multi-target base-four search: simulator, closed forms, call accounting.

A database of any size is embedded into a register of 4**n_tilde basis
states; each iteration shrinks the marked superset of the targets by a
factor of four.  A power-of-four target count is found with certainty;
any other count with probability at least one half, governed by the
filling fraction rho of the target count inside its enclosing power of
four.  The package simulates the iteration on explicit state vectors,
predicts success probabilities and oracle-call costs in closed form,
and cross-checks the routes against each other at desk scale.
"""

from .analytic import (
    MAX_EXTRA_ITERATIONS,
    CollapsedState,
    ProbabilityCurve,
    advance,
    collapsed_state,
    curves,
    main_phase_amplitude,
    prob_extra,
    prob_main_phase,
    prob_one_extra,
    prob_two_extra,
    seed_coefficients,
)
from .cost import (
    MAX_EXPANSION_ITERATIONS,
    SCALING_EXPONENT,
    CostReport,
    certainty_cost_from_ratio,
    recursive_execute,
    reflection_calls,
    reflection_calls_table,
    single_target_reference,
    strategy_cost,
    total_calls,
)
from .embedding import (
    Embedding,
    OracleSet,
    ProblemSpec,
    SymbolMap,
    build_embedding,
    build_oracles,
    build_symbol_map,
    prefix_bits,
    symbol_of,
)
from .statevector import (
    DENSE_SIZE_GATE,
    SizeGateError,
    StateVector,
    apply_phase_oracle,
    iterate,
    run_main_phase,
    sample,
    success_probability,
    uniform_state,
)
from .strategy import (
    PreparedSearch,
    SearchOutcome,
    VerifyReport,
    choose_iterations,
    measure,
    prepare,
    search,
    verify,
)

__version__ = "0.1.0"
