"""Closed-form success probabilities for any register size.

After the main phase the state collapses to two shared amplitude
factors, one on the targets and one on the leftover zero-prefix items,
with rho = nu0/nu the filling fraction of the target count inside its
enclosing power of four.  Measured right away,

    P(rho) = rho                                   (no extra iteration)
    P(rho) = rho * (3 - 4*rho)**2                  (one extra iteration)
    P(rho) = 4*rho*(1 - d)**2 * (1 - C)**2         (two extra iterations)

with d = (4*rho - 1)/2 and C = 8*((1 - d)**2 * rho - d**2 * (1 - rho)).
Beyond that the pair of factors (a on targets, b on the rest) obeys

    a' = (1 - 8*(a**2*rho - b**2*(1 - rho))) * a
    b' = -(1 + 8*(a**2*rho - b**2*(1 - rho))) * b

seeded at (1 - d, -d) after the first extra iteration, and the success
probability is 4*a**2*rho.  All functions accept floats or Fractions and
preserve the type, so exact rational evaluation is available when the
physical rho is a ratio of integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .embedding import Embedding

__all__ = [
    "CollapsedState",
    "ProbabilityCurve",
    "MAX_EXTRA_ITERATIONS",
    "prob_main_phase",
    "prob_one_extra",
    "prob_two_extra",
    "prob_extra",
    "seed_coefficients",
    "advance",
    "collapsed_state",
    "main_phase_amplitude",
    "curves",
]

Ratio = Union[float, Fraction]

# The fixed point at rho = 1/2 shows no benefit from piling on iterations;
# cap the recursion depth rather than let callers spin it unboundedly.
MAX_EXTRA_ITERATIONS = 64


def _check_rho(rho: Ratio) -> None:
    if not Fraction(1, 4) < rho <= 1:
        raise ValueError(f"rho must lie in (1/4, 1], got {rho}")


def _delta(rho: Ratio) -> Ratio:
    return (4 * rho - 1) / 2


def prob_main_phase(rho: Ratio) -> Ratio:
    """Success probability measuring immediately after the main phase."""
    _check_rho(rho)
    return rho


def prob_one_extra(rho: Ratio) -> Ratio:
    """Closed form for one extra iteration: rho * (3 - 4*rho)**2."""
    _check_rho(rho)
    return rho * (3 - 4 * rho) ** 2


def prob_two_extra(rho: Ratio) -> Ratio:
    """Closed form for two extra iterations."""
    _check_rho(rho)
    d = _delta(rho)
    c = 8 * ((1 - d) ** 2 * rho - d**2 * (1 - rho))
    return 4 * rho * (1 - d) ** 2 * (1 - c) ** 2


def seed_coefficients(rho: Ratio) -> tuple[Ratio, Ratio]:
    """(target, residual) amplitude factors after the first extra iteration."""
    _check_rho(rho)
    d = _delta(rho)
    return 1 - d, -d


def advance(a: Ratio, b: Ratio, rho: Ratio) -> tuple[Ratio, Ratio]:
    """One recursion step on the collapsed amplitude factors."""
    gap = 8 * (a * a * rho - b * b * (1 - rho))
    return (1 - gap) * a, -(1 + gap) * b


def prob_extra(rho: Ratio, extras: int) -> Ratio:
    """Success probability with `extras` iterations beyond the main phase.

    extras = 0 reads the state as-is; extras >= 1 runs the coefficient
    recursion from its seed.
    """
    _check_rho(rho)
    if not 0 <= extras <= MAX_EXTRA_ITERATIONS:
        raise ValueError(
            f"extras must lie in [0, {MAX_EXTRA_ITERATIONS}], got {extras}"
        )
    if extras == 0:
        return rho
    a, b = seed_coefficients(rho)
    for _ in range(extras - 1):
        a, b = advance(a, b, rho)
    return 4 * a * a * rho


@dataclass(frozen=True)
class CollapsedState:
    """Two-factor form of the state after the main phase plus extras >= 1.

    The full state is 2**(-p_tilde+1) * (target_coeff on each target +
    residual_coeff on each leftover zero-prefix item), which pins the
    normalization 4*(target_coeff**2*rho + residual_coeff**2*(1-rho)) = 1.
    """

    extras: int
    target_coeff: float
    residual_coeff: float
    rho: float

    def normalization_error(self) -> float:
        a, b, r = self.target_coeff, self.residual_coeff, self.rho
        return abs(4 * (a * a * r + b * b * (1 - r)) - 1)

    def success_probability(self) -> float:
        return 4 * self.target_coeff**2 * self.rho

    def advanced(self) -> "CollapsedState":
        a, b = advance(self.target_coeff, self.residual_coeff, self.rho)
        return CollapsedState(self.extras + 1, a, b, self.rho)


def collapsed_state(rho: Ratio, extras: int) -> CollapsedState:
    """Collapsed representation after `extras` >= 1 extra iterations."""
    _check_rho(rho)
    if not 1 <= extras <= MAX_EXTRA_ITERATIONS:
        raise ValueError(
            f"extras must lie in [1, {MAX_EXTRA_ITERATIONS}], got {extras}"
        )
    a, b = seed_coefficients(rho)
    state = CollapsedState(1, float(a), float(b), float(rho))
    for _ in range(extras - 1):
        state = state.advanced()
    return state


def main_phase_amplitude(embedding: Embedding, j: int) -> float:
    """Shared amplitude 2**(-n_tilde + j) of the j-th main-phase iterate."""
    if not 0 <= j <= embedding.main_iterations:
        raise ValueError(
            f"iteration {j} outside [0, {embedding.main_iterations}]"
        )
    return 2.0 ** (-embedding.n_tilde + j)


@dataclass(frozen=True)
class ProbabilityCurve:
    """One success-probability curve sampled over increasing rho values."""

    extras: int
    samples: tuple[tuple[float, float], ...]


def curves(
    extras_list: Sequence[int], rho_values: Sequence[Ratio]
) -> list[ProbabilityCurve]:
    """Evaluate one curve per requested extra-iteration count.

    The closed forms are polynomials in rho, so evaluating on a smooth
    real grid is sound even though physical rho values are rational.
    """
    rhos = list(rho_values)
    for r in rhos:
        _check_rho(r)
    if any(float(a) >= float(b) for a, b in zip(rhos, rhos[1:])):
        raise ValueError("rho grid must be strictly increasing")
    return [
        ProbabilityCurve(
            extras=q,
            samples=tuple((float(r), float(prob_extra(r, q))) for r in rhos),
        )
        for q in extras_list
    ]
