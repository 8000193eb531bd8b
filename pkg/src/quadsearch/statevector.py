"""Dense real-amplitude simulation of the search iteration.

One iteration is a phase flip on the currently marked set followed by a
reflection about the evolving state, with a global sign:

    s_{j+1} = -(v - 2 <s_j|v> s_j),   v = phase-flipped s_j.

Every operator is a real reflection and the start state is real, so
amplitudes stay real throughout.  During the main phase they are dyadic
rationals (signed powers of two), which float64 represents exactly;
tests may therefore assert bit-exact equality there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import Embedding, OracleSet, ProblemSpec, build_oracles

__all__ = [
    "SizeGateError",
    "StateVector",
    "DENSE_SIZE_GATE",
    "uniform_state",
    "apply_phase_oracle",
    "iterate",
    "run_main_phase",
    "success_probability",
    "sample",
]

# Dense storage only; predictions beyond this size belong to the closed forms.
DENSE_SIZE_GATE = 1 << 22


class SizeGateError(RuntimeError):
    """A requested computation exceeds a deliberate tractability gate."""


@dataclass(frozen=True, eq=False)
class StateVector:
    """N_tilde real amplitudes plus the number of iterations applied."""

    embedding: Embedding
    amplitudes: np.ndarray
    step: int = 0

    def norm_squared(self) -> float:
        return float(np.dot(self.amplitudes, self.amplitudes))


def uniform_state(embedding: Embedding) -> StateVector:
    """Equally-weighted start state; amplitude 2**-n_tilde everywhere."""
    if embedding.N_tilde > DENSE_SIZE_GATE:
        raise SizeGateError(
            f"register size {embedding.N_tilde} exceeds the dense gate "
            f"{DENSE_SIZE_GATE}; use the closed-form model instead"
        )
    amps = np.full(embedding.N_tilde, 2.0 ** (-embedding.n_tilde))
    return StateVector(embedding=embedding, amplitudes=amps, step=0)


def apply_phase_oracle(state: StateVector, oracles: OracleSet, j: int) -> StateVector:
    """Multiply amplitude i by (-1)**level_oracle(i, j+1).

    Counts as exactly one oracle call: the level marker factors into the
    target reflection times a target-independent prefix reflection, so a
    single query suffices no matter how many amplitudes flip.
    """
    if j < 0:
        raise ValueError(f"iteration index must be >= 0, got {j}")
    mask = oracles.marked_mask(j + 1)
    out = state.amplitudes.copy()
    out[mask] = -out[mask]
    oracles.record_oracle_call()
    return StateVector(embedding=state.embedding, amplitudes=out, step=state.step)


def iterate(state: StateVector, oracles: OracleSet) -> StateVector:
    """One full iteration from the tracked current state."""
    flipped = apply_phase_oracle(state, oracles, state.step)
    s, v = state.amplitudes, flipped.amplitudes
    inner = float(np.dot(s, v))
    out = 2.0 * inner * s - v
    return StateVector(embedding=state.embedding, amplitudes=out, step=state.step + 1)


def run_main_phase(
    embedding: Embedding,
    spec: ProblemSpec,
    n_iterations: int,
    oracles: OracleSet | None = None,
) -> StateVector:
    """Apply the iteration n_iterations times starting from uniform."""
    if n_iterations < 0:
        raise ValueError(f"n_iterations must be >= 0, got {n_iterations}")
    if oracles is None:
        oracles = build_oracles(embedding, spec)
    state = uniform_state(embedding)
    for _ in range(n_iterations):
        state = iterate(state, oracles)
    return state


def success_probability(state: StateVector, oracles: OracleSet) -> float:
    """Probability that a measurement yields a target index."""
    amps = state.amplitudes[oracles.target_mask()]
    return float(np.dot(amps, amps))


def sample(state: StateVector, seed: int, trials: int) -> dict[int, int]:
    """Measure `trials` times; deterministic given the seed.

    Returns a sparse index -> count map whose counts sum to trials.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    probs = state.amplitudes * state.amplitudes
    rng = np.random.default_rng(seed)
    draws = rng.choice(state.embedding.N_tilde, size=trials, p=probs)
    counts = np.bincount(draws, minlength=state.embedding.N_tilde)
    return {int(i): int(c) for i, c in enumerate(counts) if c}
