import math

import pytest
from hypothesis import given, settings, strategies as st

from conetrace.cache import EnumerationCache
from conetrace.enumeration import (canonical_word, chain_from_word, dlspec, enumerate_closed_chains,
                                   primitive_decompose, reverse_word, smallest_period)
from conetrace.exceptions import BudgetExceeded, InvalidInputError
from conetrace.objects.cone_graph import ConeGraph


def oracle_words(graph, max_length, slack=1e-9):
    """Every closed walk from every traversal, without symmetry pruning."""
    letters = []
    for i, s in enumerate(graph.segments):
        letters.append((2 * i, s.a, s.b, s.length))
        letters.append((2 * i + 1, s.b, s.a, s.length))

    found = set()

    def extend(word, head, origin, total):
        if head == origin:
            found.add(canonical_word(word))
        for letter, tail, nxt, length in letters:
            if tail == head and total + length <= max_length + slack:
                extend(word + (letter,), nxt, origin, total + length)

    for letter, tail, head, length in letters:
        if length <= max_length + slack:
            extend((letter,), head, tail, length)
    return found


@st.composite
def cone_graphs(draw):
    n_points = draw(st.integers(1, 4))
    graph = ConeGraph()
    for i in range(n_points):
        graph.add_cone_point(f"p{i}", draw(st.floats(0.5, 4 * math.pi)))
    for _ in range(draw(st.integers(1, 6))):
        a = draw(st.integers(0, n_points - 1))
        b = draw(st.integers(0, n_points - 1))
        graph.add_segment(f"p{a}", draw(st.floats(0, 2 * math.pi)), f"p{b}", draw(st.floats(0, 2 * math.pi)),
                          draw(st.floats(1.5, 3.0)))
    return graph


@settings(max_examples=200, deadline=None)
@given(graph=cone_graphs(), max_length=st.floats(1.0, 8.0))
def test_enumeration_matches_oracle(graph, max_length):
    chains = enumerate_closed_chains(graph, max_length)
    assert {c.word for c in chains} == oracle_words(graph, max_length)
    assert all(c.length <= max_length + 1e-9 for c in chains)


@settings(max_examples=50, deadline=None)
@given(graph=cone_graphs(), max_length=st.floats(1.0, 8.0))
def test_iterates_of_primitive_chains(graph, max_length):
    chains = enumerate_closed_chains(graph, max_length)
    words = {c.word for c in chains}
    for chain in chains:
        if chain.multiplicity != 1:
            continue
        m = 2
        while m * chain.length <= max_length - 1e-9:
            assert canonical_word(chain.word * m) in words
            m += 1


@given(word=st.lists(st.integers(0, 7), min_size=1, max_size=6), shift=st.integers(0, 5))
def test_canonical_word_invariance(word, shift):
    shift = shift % len(word)
    rotated = word[shift:] + word[:shift]
    assert canonical_word(rotated) == canonical_word(word)
    assert canonical_word(reverse_word(word)) == canonical_word(word)


def test_smallest_period():
    assert smallest_period((1, 2, 1, 2)) == 2
    assert smallest_period((1, 2, 3)) == 3
    assert smallest_period((4, 4, 4)) == 1


def test_canonical_word_empty():
    with pytest.raises(InvalidInputError):
        canonical_word(())


class TestSquare:

    def test_edge_back_and_forth(self, square):
        chains = enumerate_closed_chains(square, 2.1, max_diffractions=2)
        ids = {c.id for c in chains}
        for i in range(4):
            assert f"e{i}+.e{i}-" in ids
        assert all(c.k <= 2 for c in chains)
        assert all(c.length <= 2.1 for c in chains)

    def test_dlspec(self, square):
        entries = dlspec(square, 2.9)
        lengths = [e.length for e in entries]
        assert any(abs(length - 2) < 1e-9 for length in lengths)
        assert any(abs(length - 2 * math.sqrt(2)) < 1e-9 for length in lengths)
        assert all(b - a > 1e-9 for a, b in zip(lengths, lengths[1:]))

    def test_dlspec_multiplicity(self, square):
        entries = dlspec(square, 2.1)
        two = next(e for e in entries if abs(e.length - 2) < 1e-9)
        # four edge bounces
        assert two.multiplicity == 4
        assert two.diffraction_counts == [2, 2, 2, 2]
        assert not two.any_geometric_transition

    def test_sorted(self, square):
        chains = enumerate_closed_chains(square, 2.9)
        keys = [(c.length, c.word) for c in chains]
        assert keys == sorted(keys)

    def test_budget(self, square):
        with pytest.raises(BudgetExceeded) as excinfo:
            enumerate_closed_chains(square, 2.9, node_budget=1)
        assert excinfo.value.budget == 1

    def test_workers(self, square):
        serial = enumerate_closed_chains(square, 3.5)
        parallel = enumerate_closed_chains(square, 3.5, workers=2)
        assert [c.id for c in parallel] == [c.id for c in serial]
        assert [c.length for c in parallel] == [c.length for c in serial]

    def test_invalid_bounds(self, square):
        with pytest.raises(InvalidInputError):
            enumerate_closed_chains(square, 0.0)
        with pytest.raises(InvalidInputError):
            enumerate_closed_chains(square, 2.0, max_diffractions=0)


class TestPrimitive:

    def test_repeated_chain(self, two_points):
        chains = enumerate_closed_chains(two_points, 4.1)
        assert [c.id for c in chains] == ['s0+.s0-', 's0+.s0-.s0+.s0-']
        repeated = chains[1]
        assert repeated.multiplicity == 2
        assert repeated.primitive_length == pytest.approx(2.0)
        assert repeated.primitive_id == 's0+.s0-'

        primitive, m = primitive_decompose(repeated)
        assert m == 2
        assert primitive.id == 's0+.s0-'
        assert primitive.length == pytest.approx(2.0)
        assert primitive.k == 2

    def test_three_distinct_segments(self, triangle_graph):
        chain = chain_from_word(triangle_graph, (0, 2, 4))
        assert chain.length == pytest.approx(6.0)
        primitive, m = primitive_decompose(chain)
        assert m == 1
        assert primitive is chain

    def test_loop_longer_than_bound(self):
        graph = ConeGraph()
        graph.add_cone_point('p', 3 * math.pi)
        graph.add_segment('p', 0.0, 'p', 1.0, 5.0)
        assert enumerate_closed_chains(graph, 4.0) == []
        assert len(enumerate_closed_chains(graph, 5.0)) == 1


class TestCache:

    def test_cache_roundtrip(self, square, tmp_path):
        cache = EnumerationCache(str(tmp_path / 'chains'))
        assert cache.get(square, 2.9, None) is None
        first = enumerate_closed_chains(square, 2.9, cache=cache)
        assert cache.get(square, 2.9, None) == first
        assert enumerate_closed_chains(square, 2.9, cache=cache) == first

    def test_cache_key(self, square, two_points):
        cache = EnumerationCache('unused')
        assert cache.key(square, 2.9, None) != cache.key(square, 3.0, None)
        assert cache.key(square, 2.9, None) != cache.key(square, 2.9, 2)
        assert cache.key(square, 2.9, None) != cache.key(two_points, 2.9, None)

    def test_cache_dir_from_env(self, isolated_cache):
        assert EnumerationCache().directory == str(isolated_cache)

    def test_unreadable_entry(self, square, tmp_path):
        cache = EnumerationCache(str(tmp_path))
        path = cache.path(cache.key(square, 2.9, None))
        with open(path, 'w') as f:
            f.write('not json')
        assert cache.get(square, 2.9, None) is None
