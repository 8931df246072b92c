"""Brute-force reference pipeline over the explicit global state space.

Everything here answers questions about the synchronized product the slow
but obviously-correct way: enumerate reachable state vectors, determinize
the projection onto the interface alphabet, minimize, compare languages.
The point is independence: apart from the types in :mod:`ltsum.model`,
nothing is shared with the unrolling engine, so agreement between the two
pipelines is evidence, not tautology.
"""

from __future__ import annotations

import heapq
from collections import deque
from fractions import Fraction
from typing import Iterable, Optional

from .model import Product, global_successors

ZERO = Fraction(0)

DEFAULT_STATE_BOUND = 10_000_000


class StateBoundExceeded(Exception):
    """Raised when exploration would intern more state vectors than allowed."""

    def __init__(self, bound: int) -> None:
        super().__init__(f"explicit state space exceeds {bound} states")
        self.bound = bound


class ExplicitProduct:
    """Reachable fragment of the global state graph, states interned as ints."""

    __slots__ = ("vectors", "edges", "initial", "alphabet", "interface_alphabet")

    def __init__(
        self,
        vectors: list[tuple[int, ...]],
        edges: list[list[tuple[str, int, Fraction]]],
        alphabet: frozenset[str],
        interface_alphabet: frozenset[str],
    ) -> None:
        self.vectors = vectors
        self.edges = edges
        self.initial = 0
        self.alphabet = alphabet
        self.interface_alphabet = interface_alphabet

    def __len__(self) -> int:
        return len(self.vectors)


def explore(product: Product, bound: int = DEFAULT_STATE_BOUND) -> ExplicitProduct:
    """Breadth-first enumeration of all reachable global state vectors."""
    init = product.initial_states()
    index: dict[tuple[int, ...], int] = {init: 0}
    vectors = [init]
    edges: list[list[tuple[str, int, Fraction]]] = [[]]
    queue: deque[int] = deque([0])
    while queue:
        src = queue.popleft()
        for gt, vec in global_successors(product, vectors[src]):
            dst = index.get(vec)
            if dst is None:
                if len(vectors) >= bound:
                    raise StateBoundExceeded(bound)
                dst = len(vectors)
                index[vec] = dst
                vectors.append(vec)
                edges.append([])
                queue.append(dst)
            edges[src].append((gt.label, dst, gt.weight))
    return ExplicitProduct(vectors, edges, product.alphabet, product.interface_alphabet)


class Dfa:
    """Deterministic automaton over a fixed alphabet, total via an explicit sink.

    All states except the sink are accepting, matching the prefix-closed
    trace languages this package deals in.  ``subsets`` keeps, when the
    automaton came out of a determinization, the set of explicit-product
    states behind each automaton state (empty set for the sink); minimized
    automata drop it.
    """

    __slots__ = ("alphabet", "trans", "accepting", "initial", "subsets")

    def __init__(
        self,
        alphabet: tuple[str, ...],
        trans: list[dict[str, int]],
        accepting: list[bool],
        initial: int = 0,
        subsets: Optional[list[frozenset[int]]] = None,
    ) -> None:
        self.alphabet = alphabet
        self.trans = trans
        self.accepting = accepting
        self.initial = initial
        self.subsets = subsets

    def __len__(self) -> int:
        return len(self.trans)

    def accepts(self, word: Iterable[str]) -> bool:
        state = self.initial
        for letter in word:
            state = self.trans[state][letter]
        return self.accepting[state]

    def accepting_count(self) -> int:
        return sum(1 for flag in self.accepting if flag)


def _silent_closures(ep: ExplicitProduct, alphabet: frozenset[str]) -> list[frozenset[int]]:
    """closure[s] = states reachable from s via labels outside ``alphabet``."""
    closures: list[frozenset[int]] = []
    for start in range(len(ep)):
        seen = {start}
        stack = [start]
        while stack:
            s = stack.pop()
            for label, dst, _ in ep.edges[s]:
                if label not in alphabet and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        closures.append(frozenset(seen))
    return closures


def project_determinize(ep: ExplicitProduct, alphabet: frozenset[str]) -> Dfa:
    """Subset construction for the projection of the state graph onto ``alphabet``.

    Labels outside ``alphabet`` are treated as silent moves.  Every subset
    state is accepting; the sink (empty subset) is the single rejecting
    state and is always materialized last so the transition function is
    total.
    """
    letters = tuple(sorted(alphabet))
    closures = _silent_closures(ep, alphabet)
    start = closures[ep.initial]
    index: dict[frozenset[int], int] = {start: 0}
    subsets: list[frozenset[int]] = [start]
    trans: list[dict[str, int]] = [{}]
    queue: deque[int] = deque([0])
    sink_wanted = False
    while queue:
        cur = queue.popleft()
        subset = subsets[cur]
        for letter in letters:
            stepped: set[int] = set()
            for s in subset:
                for label, dst, _ in ep.edges[s]:
                    if label == letter:
                        stepped.update(closures[dst])
            if not stepped:
                sink_wanted = True
                trans[cur][letter] = -1
                continue
            target = frozenset(stepped)
            nxt = index.get(target)
            if nxt is None:
                nxt = len(subsets)
                index[target] = nxt
                subsets.append(target)
                trans.append({})
                queue.append(nxt)
            trans[cur][letter] = nxt
    n = len(subsets)
    accepting = [True] * n
    if sink_wanted:
        for row in trans:
            for letter, dst in row.items():
                if dst == -1:
                    row[letter] = n
        trans.append({letter: n for letter in letters})
        accepting.append(False)
        subsets.append(frozenset())
    return Dfa(letters, trans, accepting, 0, subsets)


def _reachable(dfa: Dfa) -> list[int]:
    seen = {dfa.initial}
    order = [dfa.initial]
    queue: deque[int] = deque(order)
    while queue:
        s = queue.popleft()
        for letter in dfa.alphabet:
            dst = dfa.trans[s][letter]
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
                queue.append(dst)
    return order


def minimize(dfa: Dfa) -> Dfa:
    """Hopcroft partition refinement; unreachable states are dropped first."""
    order = _reachable(dfa)
    remap = {old: new for new, old in enumerate(order)}
    n = len(order)
    trans = [{letter: remap[dfa.trans[old][letter]] for letter in dfa.alphabet} for old in order]
    accepting = [dfa.accepting[old] for old in order]
    initial = remap[dfa.initial]

    preimage: dict[str, list[list[int]]] = {letter: [[] for _ in range(n)] for letter in dfa.alphabet}
    for s in range(n):
        for letter, dst in trans[s].items():
            preimage[letter][dst].append(s)

    acc = frozenset(s for s in range(n) if accepting[s])
    rej = frozenset(s for s in range(n) if not accepting[s])
    partition: set[frozenset[int]] = {block for block in (acc, rej) if block}
    worklist: set[tuple[frozenset[int], str]] = set()
    smaller = min((block for block in partition), key=len, default=frozenset())
    for block in partition:
        for letter in dfa.alphabet:
            worklist.add((block, letter))
    # Seeding the worklist with every (block, letter) pair is the simple
    # (still O(n log n)-ish at these sizes) variant; correctness does not
    # depend on the usual smaller-half optimization.
    del smaller
    while worklist:
        splitter, letter = worklist.pop()
        movers = set()
        for dst in splitter:
            movers.update(preimage[letter][dst])
        if not movers:
            continue
        for block in list(partition):
            inside = block & movers
            if not inside or inside == block:
                continue
            outside = block - movers
            partition.remove(block)
            partition.add(frozenset(inside))
            partition.add(frozenset(outside))
            for sub_letter in dfa.alphabet:
                if (block, sub_letter) in worklist:
                    worklist.remove((block, sub_letter))
                    worklist.add((frozenset(inside), sub_letter))
                    worklist.add((frozenset(outside), sub_letter))
                else:
                    pick = inside if len(inside) <= len(outside) else outside
                    worklist.add((frozenset(pick), sub_letter))

    blocks = sorted(partition, key=min)
    block_of = {}
    for bi, block in enumerate(blocks):
        for s in block:
            block_of[s] = bi
    new_trans = []
    new_acc = []
    for block in blocks:
        rep = min(block)
        new_trans.append({letter: block_of[trans[rep][letter]] for letter in dfa.alphabet})
        new_acc.append(accepting[rep])
    return Dfa(dfa.alphabet, new_trans, new_acc, block_of[initial], None)


def minimize_naive(dfa: Dfa) -> Dfa:
    """Plain iterate-to-fixpoint refinement (Moore); cross-checks ``minimize``."""
    order = _reachable(dfa)
    remap = {old: new for new, old in enumerate(order)}
    n = len(order)
    trans = [{letter: remap[dfa.trans[old][letter]] for letter in dfa.alphabet} for old in order]
    accepting = [dfa.accepting[old] for old in order]
    initial = remap[dfa.initial]

    color = [1 if accepting[s] else 0 for s in range(n)]
    while True:
        signature = {}
        new_color = []
        for s in range(n):
            sig = (color[s],) + tuple(color[trans[s][letter]] for letter in dfa.alphabet)
            if sig not in signature:
                signature[sig] = len(signature)
            new_color.append(signature[sig])
        if new_color == color:
            break
        color = new_color

    classes = sorted(set(color))
    reindex = {}
    for s in range(n):
        if color[s] not in reindex:
            reindex[color[s]] = None
    for bi, c in enumerate(sorted(reindex, key=lambda c: min(s for s in range(n) if color[s] == c))):
        reindex[c] = bi
    assert len(reindex) == len(classes)
    new_trans: list[dict[str, int]] = [{} for _ in classes]
    new_acc = [False] * len(classes)
    for s in range(n):
        bi = reindex[color[s]]
        new_trans[bi] = {letter: reindex[color[trans[s][letter]]] for letter in dfa.alphabet}
        new_acc[bi] = accepting[s]
    return Dfa(dfa.alphabet, new_trans, new_acc, reindex[color[initial]], None)


def equivalent(left: Dfa, right: Dfa) -> Optional[tuple[str, ...]]:
    """``None`` when the two automata accept the same language, otherwise a
    shortest word accepted by exactly one of them."""
    if set(left.alphabet) != set(right.alphabet):
        raise ValueError("cannot compare automata over different alphabets")
    letters = left.alphabet
    start = (left.initial, right.initial)
    parent: dict[tuple[int, int], tuple[tuple[int, int], str]] = {}
    seen = {start}
    queue: deque[tuple[int, int]] = deque([start])
    while queue:
        pair = queue.popleft()
        l, r = pair
        if left.accepting[l] != right.accepting[r]:
            word: list[str] = []
            cur = pair
            while cur != start:
                cur, letter = parent[cur]
                word.append(letter)
            return tuple(reversed(word))
        for letter in letters:
            nxt = (left.trans[l][letter], right.trans[r][letter])
            if nxt not in seen:
                seen.add(nxt)
                parent[nxt] = (pair, letter)
                queue.append(nxt)
    return None


def divergent_states(ep: ExplicitProduct, alphabet: frozenset[str]) -> set[int]:
    """States from which an infinite run of silent moves exists.

    A state qualifies when some cycle in the silent-edge subgraph is
    reachable from it through silent edges alone (reaching the cycle with
    zero silent steps counts).
    """
    n = len(ep)
    silent: list[list[int]] = [[] for _ in range(n)]
    for s in range(n):
        for label, dst, _ in ep.edges[s]:
            if label not in alphabet:
                silent[s].append(dst)

    # Iterative Tarjan SCC over the silent subgraph.
    index_of = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    scc_id = [-1] * n
    counter = 0
    sccs = 0
    cyclic: set[int] = set()
    for root in range(n):
        if index_of[root] != -1:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            node, ei = work[-1]
            if ei == 0:
                index_of[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            while ei < len(silent[node]):
                dst = silent[node][ei]
                ei += 1
                if index_of[dst] == -1:
                    work[-1] = (node, ei)
                    work.append((dst, 0))
                    advanced = True
                    break
                if on_stack[dst]:
                    low[node] = min(low[node], index_of[dst])
            if advanced:
                continue
            work.pop()
            if low[node] == index_of[node]:
                members = []
                while True:
                    m = stack.pop()
                    on_stack[m] = False
                    scc_id[m] = sccs
                    members.append(m)
                    if m == node:
                        break
                sccs += 1
                if len(members) > 1 or any(node2 in silent[node2] for node2 in members):
                    cyclic.add(scc_id[members[0]])
            if work:
                parent_node, _ = work[-1]
                low[parent_node] = min(low[parent_node], low[node])

    divergent = {s for s in range(n) if scc_id[s] in cyclic}
    reverse: list[list[int]] = [[] for _ in range(n)]
    for s in range(n):
        for dst in silent[s]:
            reverse[dst].append(s)
    queue = deque(divergent)
    while queue:
        s = queue.popleft()
        for src in reverse[s]:
            if src not in divergent:
                divergent.add(src)
                queue.append(src)
    return divergent


def _silent_distances(ep: ExplicitProduct, alphabet: frozenset[str]) -> list[dict[int, Fraction]]:
    """Cheapest silent-path cost between every state pair (Dijkstra per source)."""
    n = len(ep)
    silent: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
    for s in range(n):
        for label, dst, weight in ep.edges[s]:
            if label not in alphabet:
                silent[s].append((dst, weight))
    out: list[dict[int, Fraction]] = []
    for source in range(n):
        dist: dict[int, Fraction] = {source: ZERO}
        heap: list[tuple[Fraction, int]] = [(ZERO, source)]
        done: set[int] = set()
        while heap:
            d, s = heapq.heappop(heap)
            if s in done:
                continue
            done.add(s)
            for dst, weight in silent[s]:
                nd = d + weight
                if dst not in dist or nd < dist[dst]:
                    dist[dst] = nd
                    heapq.heappush(heap, (nd, dst))
        out.append(dist)
    return out


def min_weight_per_trace(
    ep: ExplicitProduct, alphabet: frozenset[str], max_len: int
) -> dict[tuple[str, ...], Fraction]:
    """Cheapest run weight for every projected word up to ``max_len``.

    The result maps each word of the projection language (length bounded)
    to the minimum, over all runs whose visible projection is that word,
    of the sum of transition weights; words with no run are simply absent.
    Built by dynamic programming over word prefixes with silent-path
    closure between visible steps, so weights are exact rationals.
    """
    dsil = _silent_distances(ep, alphabet)
    letters = sorted(alphabet)
    visible: dict[str, list[tuple[int, int, Fraction]]] = {letter: [] for letter in letters}
    for s in range(len(ep)):
        for label, dst, weight in ep.edges[s]:
            if label in alphabet:
                visible[label].append((s, dst, weight))

    def close(front: dict[int, Fraction]) -> dict[int, Fraction]:
        closed: dict[int, Fraction] = {}
        for s, d in front.items():
            for t, extra in dsil[s].items():
                nd = d + extra
                if t not in closed or nd < closed[t]:
                    closed[t] = nd
        return closed

    start = close({ep.initial: ZERO})
    result: dict[tuple[str, ...], Fraction] = {(): ZERO}
    layer: dict[tuple[str, ...], dict[int, Fraction]] = {(): start}
    for _ in range(max_len):
        nxt_layer: dict[tuple[str, ...], dict[int, Fraction]] = {}
        for word, profile in layer.items():
            for letter in letters:
                front: dict[int, Fraction] = {}
                for s, dst, weight in visible[letter]:
                    if s in profile:
                        nd = profile[s] + weight
                        if dst not in front or nd < front[dst]:
                            front[dst] = nd
                if not front:
                    continue
                closed = close(front)
                extended = word + (letter,)
                nxt_layer[extended] = closed
                result[extended] = min(closed.values())
        layer = nxt_layer
        if not layer:
            break
    return result
