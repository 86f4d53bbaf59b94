"""
Enumeration of closed diffractive geodesics on a :class:`~conetrace.objects.cone_graph.ConeGraph`.

A directed traversal of segment ``i`` is encoded as the letter ``2 * i`` (from ``a`` to ``b``) or
``2 * i + 1`` (from ``b`` to ``a``). A closed chain is a cyclic word whose consecutive letters meet at
a cone point. Every cyclic word is found from its smallest letter, by a depth-first search that only
appends letters not smaller than the start and prunes on the length bound.
"""
import logging
import math
import multiprocessing as mp
from typing import Dict, Iterable, List, Sequence, Tuple

from conetrace import defaults
from conetrace.exceptions import BudgetExceeded, InvalidInputError
from conetrace.helper import chunks
from conetrace.objects.chain import DiffractiveClosedGeodesic, LengthSpectrumEntry, Transition, Traversal
from conetrace.objects.cone_graph import ConeGraph, TransitionKind, classify_transition, link_distance

log = logging.getLogger(__name__)

Word = Tuple[int, ...]


class _Letters:
    """Flat arrays describing all directed traversals of a graph, cheap to send to worker processes."""

    def __init__(self, graph: ConeGraph):
        self.tails = []
        self.heads = []
        self.lengths = []
        for segment in graph.segments:
            self.tails += [segment.a, segment.b]
            self.heads += [segment.b, segment.a]
            self.lengths += [segment.length, segment.length]
        outgoing: Dict[str, List[int]] = {p: [] for p in graph.cone_points}
        for letter, tail in enumerate(self.tails):
            outgoing[tail].append(letter)
        self.outgoing = outgoing

    def __len__(self):
        return len(self.tails)


def flip(letter: int) -> int:
    """The same segment walked the other way."""
    return letter ^ 1


def reverse_word(word: Sequence[int]) -> Word:
    return tuple(flip(letter) for letter in reversed(word))


def _rotations(word: Sequence[int]):
    for i in range(len(word)):
        yield tuple(word[i:]) + tuple(word[:i])


def canonical_word(word: Sequence[int]) -> Word:
    """Lexicographically smallest rotation over both orientations of a cyclic word."""
    if not word:
        raise InvalidInputError("empty chain")
    return min(min(_rotations(word)), min(_rotations(reverse_word(word))))


def smallest_period(word: Sequence[int]) -> int:
    """Smallest p dividing len(word) with word equal to its rotation by p."""
    k = len(word)
    for p in range(1, k + 1):
        if k % p == 0 and all(word[i] == word[(i + p) % k] for i in range(k)):
            return p
    return k


def is_self_reverse(word: Sequence[int]) -> bool:
    """True if reversing the chain gives back a rotation of it."""
    return reverse_word(word) in set(_rotations(word))


def _search(start: int, letters: _Letters, max_length: float, max_k, budget: int) -> Tuple[List[Word], int]:
    found = []
    nodes = 0
    if letters.lengths[start] > max_length:
        return found, nodes
    target = letters.tails[start]
    stack = [((start,), letters.lengths[start])]
    while stack:
        word, total = stack.pop()
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"chain search from traversal {start} exceeded the node budget of {budget}",
                                 nodes=nodes, budget=budget)
        head = letters.heads[word[-1]]
        if head == target:
            found.append(word)
        if max_k is not None and len(word) >= max_k:
            continue
        for letter in letters.outgoing[head]:
            if letter < start:
                continue
            extended = total + letters.lengths[letter]
            if extended <= max_length:
                stack.append((word + (letter,), extended))
    return found, nodes


def _search_batch(args) -> Tuple[List[Word], int]:
    starts, letters, max_length, max_k, budget = args
    found, nodes = [], 0
    for start in starts:
        words, n = _search(start, letters, max_length, max_k, budget)
        found += words
        nodes += n
    return found, nodes


def chain_from_word(graph: ConeGraph, word: Sequence[int], tol: float = None) -> DiffractiveClosedGeodesic:
    """
    Build the chain record of a closed word, in canonical rotation.

    :param graph: The graph the letters refer to.
    :param word: Letters, see module docs.
    :param tol: Geometric classification tolerance.
    """
    word = canonical_word(word)
    k = len(word)
    traversals = []
    for letter in word:
        segment = graph.segments[letter // 2]
        if letter % 2 == 0:
            traversals.append(Traversal(segment=segment.id, reversed=False, tail=segment.a, head=segment.b,
                                        theta_tail=segment.theta_a, theta_head=segment.theta_b,
                                        length=segment.length))
        else:
            traversals.append(Traversal(segment=segment.id, reversed=True, tail=segment.b, head=segment.a,
                                        theta_tail=segment.theta_b, theta_head=segment.theta_a,
                                        length=segment.length))

    transitions = []
    for j, t in enumerate(traversals):
        following = traversals[(j + 1) % k]
        if following.tail != t.head:
            raise InvalidInputError(f"traversals {t.label} and {following.label} do not meet at a cone point")
        link = graph.cone_points[t.head].link
        transitions.append(Transition(cone_point=t.head, circumference=link.circumference,
                                      theta_in=t.theta_head, theta_out=following.theta_tail,
                                      link_distance=link_distance(link, t.theta_head, following.theta_tail),
                                      kind=classify_transition(link, t.theta_head, following.theta_tail, tol=tol)))

    length = math.fsum(t.length for t in traversals)
    p = smallest_period(word)
    multiplicity = k // p
    return DiffractiveClosedGeodesic(
        id=_word_id(traversals),
        word=word,
        traversals=traversals,
        transitions=transitions,
        length=length,
        k=k,
        primitive_length=length / multiplicity,
        multiplicity=multiplicity,
        primitive_id=_word_id(traversals[:p]),
        orientations=1 if is_self_reverse(word) else 2,
        geometric=any(tr.kind == TransitionKind.GEOMETRIC for tr in transitions),
    )


def _word_id(traversals: Iterable[Traversal]) -> str:
    return '.'.join(t.label for t in traversals)


def primitive_decompose(chain: DiffractiveClosedGeodesic) -> Tuple[DiffractiveClosedGeodesic, int]:
    """
    Split a chain into its primitive and the number of repetitions.

    :return: ``(primitive chain, m)`` with ``chain == primitive ** m``.
    """
    p = smallest_period(chain.word)
    m = chain.k // p
    if m == 1:
        return chain, 1
    word = chain.word[:p]
    traversals = chain.traversals[:p]
    transitions = chain.transitions[:p]
    length = math.fsum(t.length for t in traversals)
    primitive = DiffractiveClosedGeodesic(
        id=chain.primitive_id,
        word=word,
        traversals=traversals,
        transitions=transitions,
        length=length,
        k=p,
        primitive_length=length,
        multiplicity=1,
        primitive_id=chain.primitive_id,
        orientations=1 if is_self_reverse(word) else 2,
        geometric=any(tr.geometric for tr in transitions),
    )
    return primitive, m


def enumerate_closed_chains(graph: ConeGraph, max_length: float, max_diffractions: int = None,
                            tol: float = None, node_budget: int = None, workers: int = None,
                            cache=None) -> List[DiffractiveClosedGeodesic]:
    """
    All closed chains with length at most `max_length` and at most `max_diffractions` transitions.

    Chains with geometric transitions are returned with ``geometric=True``. The result is sorted by
    length and canonical word, so it does not depend on `workers`.

    :param graph: The cone graph.
    :param max_length: Length bound L_max > 0.
    :param max_diffractions: Bound k_max >= 1 on the number of transitions, None for no bound.
    :param tol: Geometric classification tolerance.
    :param node_budget: Abort with :class:`~conetrace.exceptions.BudgetExceeded` above this many search nodes.
    :param workers: Number of worker processes, None or 1 searches in this process.
    :param cache: Optional :class:`~conetrace.cache.EnumerationCache`.
    """
    if not max_length > 0:
        raise InvalidInputError(f"max_length must be positive, got {max_length}")
    if max_diffractions is not None and max_diffractions < 1:
        raise InvalidInputError(f"max_diffractions must be at least 1, got {max_diffractions}")
    if node_budget is None:
        node_budget = defaults.NODE_BUDGET

    if cache is not None:
        cached = cache.get(graph, max_length, max_diffractions, tol=tol)
        if cached is not None:
            return cached

    letters = _Letters(graph)
    bound = max_length + defaults.LENGTH_SLACK
    starts = list(range(len(letters)))
    log.debug(f"Enumerate chains on {graph}, L_max={max_length}, k_max={max_diffractions}")

    tasks = [(list(batch), letters, bound, max_diffractions, node_budget)
             for batch in chunks(starts, defaults.ENUMERATION_BATCH)]
    if workers and workers > 1 and len(tasks) > 1:
        with mp.Pool(processes=workers) as pool:
            results = pool.map(_search_batch, tasks)
    else:
        results = [_search_batch(task) for task in tasks]

    total_nodes = sum(nodes for _, nodes in results)
    if total_nodes > node_budget:
        raise BudgetExceeded(f"chain search visited {total_nodes} nodes, budget is {node_budget}",
                             nodes=total_nodes, budget=node_budget)

    canonical = {}
    for words, _ in results:
        for word in words:
            key = canonical_word(word)
            if key not in canonical:
                canonical[key] = chain_from_word(graph, key, tol=tol)

    chains = sorted(canonical.values(), key=lambda c: (c.length, c.word))
    log.debug(f"Found {len(chains)} closed chains after {total_nodes} search nodes")

    if cache is not None:
        cache.put(graph, max_length, max_diffractions, chains, tol=tol)
    return chains


def group_lengths(chains: Sequence[DiffractiveClosedGeodesic], tol: float = None) -> List[List[DiffractiveClosedGeodesic]]:
    """Group chains whose lengths agree within `tol`, sorted by length."""
    if tol is None:
        tol = defaults.LENGTH_DEDUP_TOL
    groups = []
    for chain in sorted(chains, key=lambda c: (c.length, c.word)):
        if groups and chain.length - groups[-1][0].length <= tol:
            groups[-1].append(chain)
        else:
            groups.append([chain])
    return groups


def dlspec(graph: ConeGraph, max_length: float, max_diffractions: int = None, tol: float = None,
           chains: Sequence[DiffractiveClosedGeodesic] = None, **kwargs) -> List[LengthSpectrumEntry]:
    """
    Diffractive length spectrum: sorted lengths of closed chains, deduplicated within `tol`.

    Pass `chains` to reuse an enumeration, other keyword arguments go to :func:`enumerate_closed_chains`.
    """
    if chains is None:
        chains = enumerate_closed_chains(graph, max_length, max_diffractions, **kwargs)
    entries = []
    for group in group_lengths(chains, tol=tol):
        entries.append(LengthSpectrumEntry(length=group[0].length,
                                           geodesic_ids=[c.id for c in group],
                                           diffraction_counts=[c.k for c in group],
                                           any_geometric_transition=any(c.geometric for c in group)))
    return entries
