"""Database embedding, symbol assignment, and oracle bookkeeping.

The search register holds N_tilde = 4**n_tilde basis states, produced by
two enlargements of the user's catalog: first to the nearest power of
four N (the inner database), then once more by a factor of four.  An
item's symbol is the 2*n_tilde-bit binary expansion of its basis index,
so prefix predicates reduce to integer comparisons.

Canonical index layout (a bijection between the 4N items and [0, 4N)):

    [0, nu0)            ground items: all-zero prefix, low bits counting
                        0 .. nu0-1; excluded from every prefix marker
    [nu0, N)            zero-prefix padding from the outer enlargement
    [N, N + catalog)    catalog item i sits at index N + (i - 1)
    [N + catalog, 4N)   remaining filler items

Every member of the inner database (catalog plus inner fillers) lands at
index >= N, i.e. its two leading symbol bits are one of 01/10/11, so no
target ever hides inside the zero-prefix block that the iteration
progressively empties.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

__all__ = [
    "ProblemSpec",
    "Embedding",
    "SymbolMap",
    "OracleSet",
    "build_embedding",
    "build_symbol_map",
    "build_oracles",
    "symbol_of",
    "prefix_bits",
]


@dataclass(frozen=True)
class ProblemSpec:
    """The user's database: catalog size and the 1-based target indices."""

    catalog_size: int
    targets: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(int(t) for t in self.targets))
        if self.catalog_size < 1:
            raise ValueError(f"catalog_size must be >= 1, got {self.catalog_size}")
        if not self.targets:
            raise ValueError("at least one target index is required")
        bad = sorted(t for t in self.targets if not 1 <= t <= self.catalog_size)
        if bad:
            raise ValueError(
                f"target indices {bad} outside the catalog [1, {self.catalog_size}]"
            )

    @property
    def num_targets(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class Embedding:
    """All register sizes and ratios derived from a ProblemSpec.

    ``N = 4**n`` is the smallest power of four >= catalog_size and
    ``nu = 4**p_tilde`` the smallest power of four >= the target count;
    equality is allowed on both, and ``power_of_four`` routes the exact
    (certainty) variant of the search.  ``rho = nu0/nu`` is kept as an
    exact rational because the measurement strategy compares it against
    1/2 exactly.
    """

    nu0: int
    n: int
    N: int
    n_tilde: int
    N_tilde: int
    p_tilde: int
    nu: int
    rho: Fraction
    power_of_four: bool

    @property
    def main_iterations(self) -> int:
        """Iterations of the main phase: n_tilde - p_tilde (always >= 1)."""
        return self.n_tilde - self.p_tilde


def _log4_ceil(x: int) -> int:
    """Smallest k with 4**k >= x, computed in exact integer arithmetic."""
    k, v = 0, 1
    while v < x:
        v *= 4
        k += 1
    return k


def build_embedding(spec: ProblemSpec) -> Embedding:
    """Derive every register size from the catalog size and target count."""
    nu0 = spec.num_targets
    if nu0 < 1 or nu0 > spec.catalog_size:
        raise ValueError(f"target count {nu0} not in [1, {spec.catalog_size}]")
    n = _log4_ceil(spec.catalog_size)
    p_tilde = _log4_ceil(nu0)
    return Embedding(
        nu0=nu0,
        n=n,
        N=4**n,
        n_tilde=n + 1,
        N_tilde=4 ** (n + 1),
        p_tilde=p_tilde,
        nu=4**p_tilde,
        rho=Fraction(nu0, 4**p_tilde),
        power_of_four=(nu0 == 4**p_tilde),
    )


def symbol_of(embedding: Embedding, index: int) -> str:
    """The 2*n_tilde-bit symbol of the item at a basis index."""
    if not 0 <= index < embedding.N_tilde:
        raise ValueError(f"index {index} outside [0, {embedding.N_tilde})")
    return format(index, f"0{2 * embedding.n_tilde}b")


def prefix_bits(embedding: Embedding, index: int, j: int) -> str:
    """The 2j leading bits of an item's symbol, 1 <= j <= n_tilde."""
    if not 1 <= j <= embedding.n_tilde:
        raise ValueError(f"prefix level {j} outside [1, {embedding.n_tilde}]")
    if not 0 <= index < embedding.N_tilde:
        raise ValueError(f"index {index} outside [0, {embedding.N_tilde})")
    return format(index >> 2 * (embedding.n_tilde - j), f"0{2 * j}b")


@dataclass(frozen=True)
class SymbolMap:
    """Canonical bijection between the 4N items and basis indices [0, 4N).

    Items are numbered 1..4N: the catalog first, then the inner fillers
    up to N, then the outer fillers.  Catalog item i maps to N + (i - 1);
    the first nu0 outer fillers become the ground items at indices
    0..nu0-1.
    """

    embedding: Embedding
    ground_set: frozenset[int]
    catalog_offset: int
    catalog_size: int

    def item_to_index(self, item: int) -> int:
        big_n = self.catalog_offset
        if not 1 <= item <= self.embedding.N_tilde:
            raise ValueError(f"item {item} outside [1, {self.embedding.N_tilde}]")
        if item <= big_n:  # inner database: catalog + inner fillers
            return big_n + item - 1
        if item <= 2 * big_n:  # outer fillers covering the zero-prefix block
            return item - big_n - 1
        return item - 1  # remaining outer fillers

    def index_to_item(self, index: int) -> int:
        big_n = self.catalog_offset
        if not 0 <= index < self.embedding.N_tilde:
            raise ValueError(f"index {index} outside [0, {self.embedding.N_tilde})")
        if index < big_n:
            return index + big_n + 1
        if index < 2 * big_n:
            return index - big_n + 1
        return index + 1

    def catalog_item_at(self, index: int) -> int | None:
        """Catalog item number at a basis index, or None for fillers."""
        item = self.index_to_item(index)
        return item if item <= self.catalog_size else None


def build_symbol_map(embedding: Embedding, spec: ProblemSpec) -> SymbolMap:
    return SymbolMap(
        embedding=embedding,
        ground_set=frozenset(range(embedding.nu0)),
        catalog_offset=embedding.N,
        catalog_size=spec.catalog_size,
    )


class OracleSet:
    """The target oracle and its per-level companions.

    Pure predicates plus one atomic counter: ``record_oracle_call`` is
    the only mutation and is lock-protected so parallel sweeps can share
    an instance.  Evaluating the prefix markers never touches the
    counter; they are independent of the target set.
    """

    def __init__(self, embedding: Embedding, target_indices: Iterable[int]):
        self.embedding = embedding
        self.target_indices = frozenset(int(i) for i in target_indices)
        mask = np.zeros(embedding.N_tilde, dtype=bool)
        mask[sorted(self.target_indices)] = True
        self._target_mask = mask
        self._lock = threading.Lock()
        self._call_count = 0

    @property
    def call_count(self) -> int:
        return self._call_count

    def record_oracle_call(self, count: int = 1) -> None:
        with self._lock:
            self._call_count += count

    def oracle(self, index: int) -> int:
        """1 iff the item at this basis index is a target."""
        if not 0 <= index < self.embedding.N_tilde:
            raise ValueError(f"index {index} outside [0, {self.embedding.N_tilde})")
        return int(self._target_mask[index])

    def prefix_marker(self, index: int, level: int) -> int:
        """1 iff the symbol's 2*level-bit prefix is all zeros and the item
        is not a ground item.  Levels beyond n_tilde mark nothing."""
        if level < 1:
            raise ValueError(f"level must be >= 1, got {level}")
        if not 0 <= index < self.embedding.N_tilde:
            raise ValueError(f"index {index} outside [0, {self.embedding.N_tilde})")
        if level > self.embedding.n_tilde:
            return 0
        zero_prefix_end = 4 ** (self.embedding.n_tilde - level)
        return int(self.embedding.nu0 <= index < zero_prefix_end)

    def level_oracle(self, index: int, level: int) -> int:
        """Combined marker amplified at the given level: oracle OR prefix
        marker.  Collapses to the plain oracle once the zero-prefix set
        is exhausted, so extra iterations keep working unchanged."""
        return self.oracle(index) | self.prefix_marker(index, level)

    def marked_mask(self, level: int) -> np.ndarray:
        """Boolean mask of the level oracle over all basis indices."""
        if level < 1:
            raise ValueError(f"level must be >= 1, got {level}")
        mask = self._target_mask.copy()
        if level <= self.embedding.n_tilde:
            zero_prefix_end = 4 ** (self.embedding.n_tilde - level)
            if zero_prefix_end > self.embedding.nu0:
                mask[self.embedding.nu0 : zero_prefix_end] = True
        return mask

    def target_mask(self) -> np.ndarray:
        return self._target_mask.copy()

    def count_marked(self, level: int) -> int:
        """Exhaustive count of the level oracle's marked set; equals
        4**(n_tilde - level) for every level of the main phase."""
        return int(self.marked_mask(level).sum())


def build_oracles(embedding: Embedding, spec: ProblemSpec) -> OracleSet:
    """Place the targets with the canonical map and wrap them in oracles."""
    symbol_map = build_symbol_map(embedding, spec)
    return OracleSet(
        embedding, (symbol_map.item_to_index(t) for t in sorted(spec.targets))
    )
