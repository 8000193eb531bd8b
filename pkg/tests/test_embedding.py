"""Embedding sizes, the canonical symbol map, and the oracle family."""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadsearch import (
    ProblemSpec,
    build_embedding,
    build_oracles,
    build_symbol_map,
    prefix_bits,
    symbol_of,
)


@st.composite
def problem_specs(draw, max_catalog=256, max_targets=20):
    catalog = draw(st.integers(1, max_catalog))
    nu0 = draw(st.integers(1, min(catalog, max_targets)))
    perm = draw(st.permutations(list(range(1, catalog + 1))))
    return ProblemSpec(catalog, frozenset(perm[:nu0]))


def brute_level_oracle(emb, target_indices, index, level):
    """Independent re-derivation of the level oracle from symbol bits."""
    bits = format(index, f"0{2 * emb.n_tilde}b")
    zero_prefix = level <= emb.n_tilde and set(bits[: 2 * level]) <= {"0"}
    return int(index in target_indices or (zero_prefix and index >= emb.nu0))


def target_indices_of(emb, spec):
    return frozenset(emb.N + t - 1 for t in spec.targets)


# ---------------------------------------------------------------- sizes


@pytest.mark.parametrize(
    "catalog,nu0,expected",
    [
        (100, 1, dict(n=4, N=256, n_tilde=5, N_tilde=1024, p_tilde=0, nu=1)),
        (1, 1, dict(n=0, N=1, n_tilde=1, N_tilde=4, p_tilde=0, nu=1)),
        (20, 6, dict(n=3, N=64, n_tilde=4, N_tilde=256, p_tilde=2, nu=16)),
    ],
)
def test_embedding_examples(catalog, nu0, expected):
    emb = build_embedding(ProblemSpec(catalog, frozenset(range(1, nu0 + 1))))
    for name, value in expected.items():
        assert getattr(emb, name) == value
    assert emb.rho == Fraction(nu0, expected["nu"])
    assert emb.power_of_four == (nu0 == expected["nu"])


def test_problem_spec_rejects_malformed():
    with pytest.raises(ValueError):
        ProblemSpec(10, frozenset())
    with pytest.raises(ValueError):
        ProblemSpec(10, frozenset({0}))
    with pytest.raises(ValueError):
        ProblemSpec(10, frozenset({11}))
    with pytest.raises(ValueError):
        ProblemSpec(0, frozenset({1}))


@given(problem_specs())
@settings(max_examples=60)
def test_embedding_size_invariants(spec):
    emb = build_embedding(spec)
    assert emb.N // 4 < spec.catalog_size <= emb.N
    assert emb.nu // 4 < emb.nu0 <= emb.nu
    assert emb.N_tilde == 4 * emb.N == 4**emb.n_tilde
    assert emb.p_tilde <= emb.n_tilde - 1
    assert emb.main_iterations >= 1
    assert emb.rho == Fraction(emb.nu0, emb.nu)


# ----------------------------------------------------------- symbol map


def test_catalog_items_offset_rule():
    spec = ProblemSpec(3, frozenset({1}))
    emb = build_embedding(spec)
    sm = build_symbol_map(emb, spec)
    assert sm.item_to_index(2) == emb.N + 1
    assert sm.catalog_item_at(emb.N + 1) == 2
    assert sm.catalog_item_at(0) is None


def test_ground_set_symbols():
    spec = ProblemSpec(16, frozenset(range(1, 5)))
    emb = build_embedding(spec)
    sm = build_symbol_map(emb, spec)
    assert sm.ground_set == frozenset({0, 1, 2, 3})
    width = 2 * emb.n_tilde
    assert [symbol_of(emb, g) for g in sorted(sm.ground_set)] == [
        "0" * (width - 2) + "00",
        "0" * (width - 2) + "01",
        "0" * (width - 2) + "10",
        "0" * (width - 2) + "11",
    ]
    # low bits of the last ground symbol encode nu0 - 1
    assert int(symbol_of(emb, emb.nu0 - 1), 2) == emb.nu0 - 1


@given(problem_specs(max_catalog=256))
@settings(max_examples=25, deadline=None)
def test_symbol_map_is_a_bijection(spec):
    emb = build_embedding(spec)
    sm = build_symbol_map(emb, spec)
    seen = set()
    for index in range(emb.N_tilde):
        item = sm.index_to_item(index)
        assert 1 <= item <= emb.N_tilde
        assert sm.item_to_index(item) == index
        seen.add(item)
    assert len(seen) == emb.N_tilde


def test_inner_database_never_zero_prefixed():
    # exhaustive over every catalog size up to 256: catalog plus inner
    # fillers all land at index >= N, i.e. leading symbol bits != 00
    for catalog in range(1, 257):
        spec = ProblemSpec(catalog, frozenset({1, catalog}))
        emb = build_embedding(spec)
        sm = build_symbol_map(emb, spec)
        for item in range(1, emb.N + 1):
            index = sm.item_to_index(item)
            assert index >= emb.N
            assert prefix_bits(emb, index, 1) in ("01", "10", "11")


# -------------------------------------------------------------- symbols


def test_prefix_bits_examples():
    emb = build_embedding(ProblemSpec(60, frozenset({1})))  # n_tilde = 4
    assert prefix_bits(emb, 0, 2) == "0000"
    assert prefix_bits(emb, emb.N_tilde - 1, 1) == "11"
    emb3 = build_embedding(ProblemSpec(10, frozenset({1})))  # n_tilde = 3
    assert prefix_bits(emb3, emb3.N, 1) == "01"


def test_prefix_bits_range_errors():
    emb = build_embedding(ProblemSpec(10, frozenset({1})))
    with pytest.raises(ValueError):
        prefix_bits(emb, 0, 0)
    with pytest.raises(ValueError):
        prefix_bits(emb, 0, emb.n_tilde + 1)
    with pytest.raises(ValueError):
        prefix_bits(emb, emb.N_tilde, 1)
    with pytest.raises(ValueError):
        symbol_of(emb, -1)


# -------------------------------------------------------------- oracles


def test_ground_items_never_marked_by_prefix():
    spec = ProblemSpec(20, frozenset(range(1, 7)))
    emb = build_embedding(spec)
    oracles = build_oracles(emb, spec)
    for g in range(emb.nu0):
        for level in range(1, emb.n_tilde + 1):
            assert oracles.prefix_marker(g, level) == 0


def test_power_of_four_final_level_is_plain_oracle():
    spec = ProblemSpec(16, frozenset({3, 7, 11, 16}))
    emb = build_embedding(spec)
    assert emb.power_of_four
    oracles = build_oracles(emb, spec)
    final = emb.main_iterations
    for index in range(emb.N_tilde):
        assert oracles.level_oracle(index, final) == oracles.oracle(index)


def test_non_power_of_four_final_level_marks_superset():
    spec = ProblemSpec(20, frozenset(range(1, 7)))
    emb = build_embedding(spec)
    oracles = build_oracles(emb, spec)
    assert oracles.count_marked(emb.main_iterations) == emb.nu > emb.nu0


def test_levels_past_main_phase_collapse_to_oracle():
    for catalog, nu0 in [(20, 6), (16, 16), (4, 1)]:
        spec = ProblemSpec(catalog, frozenset(range(1, nu0 + 1)))
        emb = build_embedding(spec)
        oracles = build_oracles(emb, spec)
        for level in range(emb.main_iterations + 1, emb.n_tilde + 3):
            for index in range(emb.N_tilde):
                assert oracles.level_oracle(index, level) == oracles.oracle(index)


@given(problem_specs(max_catalog=64))
@settings(max_examples=25, deadline=None)
def test_count_marked_matches_bruteforce(spec):
    emb = build_embedding(spec)
    oracles = build_oracles(emb, spec)
    targets = target_indices_of(emb, spec)
    for level in range(1, emb.main_iterations + 1):
        brute = sum(
            brute_level_oracle(emb, targets, i, level) for i in range(emb.N_tilde)
        )
        assert oracles.count_marked(level) == brute == 4 ** (emb.n_tilde - level)


def test_counting_sums_exhaustive():
    # sign-sum identities behind the induction, on a ladder of register
    # sizes up to N_tilde = 4096, via the independent bit-string oracle
    cases = [
        (1, 1), (2, 1), (3, 2), (4, 4), (5, 5), (15, 4), (16, 9),
        (17, 3), (63, 48), (64, 64), (100, 25), (256, 6), (257, 17),
        (1000, 30), (1024, 1000),
    ]
    for catalog, nu0 in cases:
        spec = ProblemSpec(catalog, frozenset(range(1, nu0 + 1)))
        emb = build_embedding(spec)
        assert emb.N_tilde <= 4096
        targets = target_indices_of(emb, spec)

        def level(i, j):
            return brute_level_oracle(emb, targets, i, j)

        assert sum((-1) ** level(i, 1) for i in range(emb.N_tilde)) == emb.N_tilde // 2
        for j in range(1, emb.main_iterations):
            signed = sum(
                (-1) ** level(i, j + 1) for i in range(emb.N_tilde) if level(i, j)
            )
            assert signed == 2 ** (2 * (emb.n_tilde - j) - 1)
        last = emb.main_iterations
        boundary = sum(
            (-1) ** (i in targets) for i in range(emb.N_tilde) if level(i, last)
        )
        assert boundary == emb.nu - 2 * emb.nu0


def test_marker_evaluation_never_counts_calls():
    spec = ProblemSpec(20, frozenset(range(1, 7)))
    emb = build_embedding(spec)
    oracles = build_oracles(emb, spec)
    for level in range(1, emb.n_tilde + 1):
        for index in range(emb.N_tilde):
            oracles.prefix_marker(index, level)
        oracles.marked_mask(level)
        oracles.count_marked(level)
    assert oracles.call_count == 0


def test_call_counter_is_thread_safe():
    spec = ProblemSpec(8, frozenset({1}))
    oracles = build_oracles(build_embedding(spec), spec)
    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(lambda _: oracles.record_oracle_call(), range(4000)))
    assert oracles.call_count == 4000


def test_oracle_range_checks():
    spec = ProblemSpec(8, frozenset({1}))
    oracles = build_oracles(build_embedding(spec), spec)
    with pytest.raises(ValueError):
        oracles.oracle(-1)
    with pytest.raises(ValueError):
        oracles.prefix_marker(0, 0)
    with pytest.raises(ValueError):
        oracles.marked_mask(0)
