"""Partial-order unrolling of a synchronized product, pruned to stay finite.

The engine grows an acyclic occurrence structure: *conditions* stand for
"component j sits in state s because of event e", *events* are occurrences
of joint moves consuming one condition per participant and producing one
condition per participant.  Causality is the producer/consumer order,
conflict arises when two events consume the same condition, and two nodes
neither ordered nor in conflict are concurrent.

Growth is pruned by three interchangeable strategies:

``def1``
    only interface events are ever cut off (against an earlier interface
    event reaching the same global state).  Sound and complete for the
    interface language but it need not terminate.
``def2``
    additionally cuts off non-interface events that repeat both the
    global state and the current interface condition.  Terminating, but
    can lose interface words.
``full``
    keeps the ``def1`` rule, and handles the repeating non-interface
    events of ``def2`` as *candidates*: their outputs are frozen rather
    than dead, together with the set of earlier events that justify the
    freeze.  A later interface event concurrent with the candidate but
    not with a justifying event knocks that justification out; when none
    is left, the candidate thaws and its suppressed future is released.
    Terminating and trace-preserving.

Interface events cut off against a companion record a state-equivalence
between their output interface conditions; the summarizer folds along
those equivalences.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from fractions import Fraction
from typing import Iterator, Optional

from .model import GlobalTransition, Product

# Condition lifecycle.
LIVE = "live"
FROZEN = "frozen"
DEAD = "dead"

# Event classification.
NORMAL = "normal"
CUTOFF = "cutoff"
CANDIDATE = "candidate"
FREED = "freed"

# Pruning strategies.
FULL = "full"
DEF1 = "def1"
DEF2 = "def2"
STRATEGIES = (FULL, DEF1, DEF2)

DEFAULT_MAX_EVENTS = 1_000_000
DEFAULT_MAX_SECONDS = 300.0

_LEAF_SIG = ("", (), ())

ZERO = Fraction(0)


class LimitExceeded(Exception):
    """The unrolling hit the event or wall-clock budget before finishing."""

    def __init__(self, reason: str, limit, events_done: int) -> None:
        super().__init__(f"unrolling exceeded {reason} limit ({limit}) after {events_done} events")
        self.reason = reason
        self.limit = limit
        self.events_done = events_done


class Condition:
    """One token slot: component ``comp`` in state ``state``.

    ``producer`` is the event that put the token there (``None`` for the
    initial conditions).  ``co`` holds the ids of all conditions this one
    is concurrent with; ``acc_size``/``acc_cost`` accumulate, along the
    per-component producer chain, each ancestor event's share of the
    configuration size and weight (an event split evenly over its
    participants), which lets the engine price an extension without
    walking its history.
    """

    __slots__ = ("id", "comp", "state", "producer", "status", "depth", "acc_size", "acc_cost", "co")

    def __init__(
        self,
        cid: int,
        comp: int,
        state: int,
        producer: Optional["Event"],
        depth: int,
        acc_size: int,
        acc_cost: Optional[Fraction],
    ) -> None:
        self.id = cid
        self.comp = comp
        self.state = state
        self.producer = producer
        self.status = LIVE
        self.depth = depth
        self.acc_size = acc_size
        self.acc_cost = acc_cost
        self.co: set[int] = set()

    def __repr__(self) -> str:
        return f"c{self.id}({self.comp}:{self.state},{self.status})"


class Event:
    """An occurrence of a joint move, with its classification."""

    __slots__ = (
        "id",
        "gt",
        "parts",
        "inputs",
        "outputs",
        "past_size",
        "cut",
        "st",
        "ip",
        "is_interface",
        "status",
        "companion",
        "blocks",
        "cost",
        "sig",
    )

    def __init__(self) -> None:
        self.companion: Optional[Event] = None
        self.blocks: Optional[set[Event]] = None

    def __repr__(self) -> str:
        return f"e{self.id}[{self.gt.label},{self.status}]"


class ExtensionRecord:
    """A joint move that could be appended: inputs plus precomputed data.

    ``pre_cut`` is the frontier of the would-be event's history *before*
    its own outputs exist (participant coordinates hold the inputs);
    ``past_size``/``cost``/``st``/``ip``/``sig`` are what the event will
    carry, derived incrementally from the producers' stored frontiers.
    """

    __slots__ = ("gt", "parts", "inputs", "st", "pre_cut", "ip", "past_size", "cost", "sig", "serial")

    def __repr__(self) -> str:
        ins = ",".join(str(b.id) for b in self.inputs)
        return f"ext[{self.gt.label}:{ins}]"


class UnionFind:
    """Disjoint sets over condition ids, path-halving find, union by size."""

    __slots__ = ("parent", "size")

    def __init__(self) -> None:
        self.parent: dict[int, int] = {}
        self.size: dict[int, int] = {}

    def add(self, x: int) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


class Prefix:
    """The growing occurrence structure plus every index the engine needs."""

    __slots__ = (
        "product",
        "strategy",
        "tie_seed",
        "n",
        "interface",
        "weighted",
        "lcm",
        "conditions",
        "events",
        "initial",
        "pools",
        "states_with_action",
        "pending",
        "parked",
        "serials",
        "interface_equiv",
        "coc",
        "first_ievent_by_st",
        "noncutoff_ievents",
        "events_by_st_ip",
        "event_keys",
    )

    def __init__(self, product: Product, strategy: str, tie_seed: Optional[int]) -> None:
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.product = product
        self.strategy = strategy
        self.tie_seed = tie_seed
        self.n = len(product.components)
        self.interface = product.interface
        self.weighted = product.weighted
        self.lcm = math.lcm(*range(1, self.n + 1))
        self.conditions: list[Condition] = []
        self.events: list[Event] = []
        self.pools: dict[tuple[int, int], list[Condition]] = {}
        self.states_with_action: dict[tuple[int, str], tuple[int, ...]] = {}
        for j, comp in enumerate(product.components):
            for action in comp.actions:
                states = tuple(
                    s for s in range(len(comp.state_names)) if comp.successors(s, action)
                )
                self.states_with_action[(j, action)] = states
        self.pending: list[tuple] = []
        self.parked: dict[int, list[tuple]] = {}
        self.serials = 0
        self.interface_equiv = UnionFind()
        self.coc: set[Event] = set()
        self.first_ievent_by_st: dict[tuple[int, ...], Event] = {}
        self.noncutoff_ievents: list[Event] = []
        self.events_by_st_ip: dict[tuple[tuple[int, ...], int], list[Event]] = {}
        self.event_keys: set[tuple] = set()
        self.initial = tuple(
            self._new_condition(j, comp.initial, None, 0, 0, ZERO if self.weighted else None)
            for j, comp in enumerate(product.components)
        )
        ids = [c.id for c in self.initial]
        for c in self.initial:
            c.co.update(i for i in ids if i != c.id)
        self.interface_equiv.add(self.initial[self.interface].id)

    def _new_condition(
        self,
        comp: int,
        state: int,
        producer: Optional[Event],
        depth: int,
        acc_size: int,
        acc_cost: Optional[Fraction],
    ) -> Condition:
        cond = Condition(len(self.conditions), comp, state, producer, depth, acc_size, acc_cost)
        self.conditions.append(cond)
        self.pools.setdefault((comp, state), []).append(cond)
        return cond

    def counts(self) -> tuple[int, int, int]:
        """(events, cutoffs, candidates still frozen)"""
        cutoffs = sum(1 for e in self.events if e.status == CUTOFF)
        return len(self.events), cutoffs, len(self.coc)

    def interface_conditions(self) -> list[Condition]:
        return [c for c in self.conditions if c.comp == self.interface]


# --------------------------------------------------------------------------
# concurrency tests


def condition_concurrent(prefix: Prefix, a: Condition, b: Condition) -> bool:
    return b.id in a.co


def _preset_concurrent(inputs_a, inputs_b) -> bool:
    """Presets disjoint and pairwise concurrent: the two (would-be) events
    are concurrent exactly under this test."""
    ids_b = {b.id for b in inputs_b}
    for a in inputs_a:
        if a.id in ids_b:
            return False
        co = a.co
        for b in inputs_b:
            if b.id not in co:
                return False
    return True


def event_concurrent(prefix: Prefix, left: Event, right: Event) -> bool:
    """Neither causally ordered nor in conflict."""
    if left is right:
        return False
    return _preset_concurrent(left.inputs, right.inputs)


def _condition_event_concurrent(cond: Condition, inputs) -> bool:
    """A condition is concurrent with an event iff it is outside the preset
    and concurrent with every preset condition."""
    co = cond.co
    for b in inputs:
        if b is cond or b.id not in co:
            return False
    return True


def interface_concurrent_events(prefix: Prefix, inputs) -> list[Event]:
    """All non-cut-off interface events concurrent with the (would-be) event
    whose preset is ``inputs``."""
    return [f for f in prefix.noncutoff_ievents if _preset_concurrent(f.inputs, inputs)]


# --------------------------------------------------------------------------
# extension generation


def _coset_choices(
    prefix: Prefix, trigger: Condition, others: list[int], action: str
) -> Iterator[dict[int, Condition]]:
    """Every way to pick, per remaining participant, one condition that is
    concurrent with the trigger and with each other, restricted to ids
    below the trigger (each co-set is found once, from its newest member)."""
    limit = trigger.id
    chosen: list[Condition] = []

    def rec(k: int) -> Iterator[dict[int, Condition]]:
        if k == len(others):
            yield dict(zip(others, chosen))
            return
        j = others[k]
        for state in prefix.states_with_action[(j, action)]:
            for cond in prefix.pools.get((j, state), ()):
                if cond.id >= limit:
                    break  # pool is id-ascending
                if cond.status == DEAD or limit not in cond.co:
                    continue
                if any(c.id not in cond.co for c in chosen):
                    continue
                chosen.append(cond)
                yield from rec(k + 1)
                chosen.pop()

    return rec(0)


def _make_record(
    prefix: Prefix,
    action: str,
    parts: tuple[int, ...],
    inputs_by_comp: dict[int, Condition],
    chosen: tuple[tuple[int, Fraction], ...],
) -> ExtensionRecord:
    n = prefix.n
    inputs = tuple(inputs_by_comp[j] for j in parts)
    dsts = tuple(dst for (dst, _) in chosen)
    weight = ZERO
    gt_parts: list[Optional[tuple[int, int]]] = [None] * n
    for j, b, (dst, w) in zip(parts, inputs, chosen):
        gt_parts[j] = (b.state, dst)
        weight += w
    gt = GlobalTransition(action, tuple(gt_parts), weight)

    pre_cut: list[Optional[Condition]] = [None] * n
    for j, b in zip(parts, inputs):
        pre_cut[j] = b
    for j in range(n):
        if pre_cut[j] is None:
            best = prefix.initial[j]
            for b in inputs:
                producer = b.producer
                if producer is not None:
                    cand = producer.cut[j]
                    if cand.depth > best.depth:
                        best = cand
                    elif cand.depth == best.depth and cand is not best:
                        raise AssertionError("two frontier conditions at equal depth")
            pre_cut[j] = best

    total = sum(c.acc_size for c in pre_cut) + prefix.lcm
    if total % prefix.lcm:
        raise AssertionError("configuration size accumulator out of step")

    record = ExtensionRecord()
    record.gt = gt
    record.parts = parts
    record.inputs = inputs
    record.pre_cut = tuple(pre_cut)
    record.past_size = total // prefix.lcm
    record.cost = (
        sum((c.acc_cost for c in record.pre_cut), ZERO) + weight if prefix.weighted else None
    )
    st = [c.state for c in record.pre_cut]
    for j, dst in zip(parts, dsts):
        st[j] = dst
    record.st = tuple(st)
    record.ip = None if prefix.interface in parts else record.pre_cut[prefix.interface]
    record.sig = (
        action,
        dsts,
        tuple(b.producer.sig if b.producer is not None else _LEAF_SIG for b in inputs),
    )
    record.serial = None
    return record


def _scan_records(prefix: Prefix, trigger: Condition) -> Iterator[ExtensionRecord]:
    """All extension records that include ``trigger`` and otherwise only
    lower-id conditions.  Pure: no queues are touched."""
    comp = trigger.comp
    lts = prefix.product.components[comp]
    for action in sorted(lts.actions):
        own = lts.successors(trigger.state, action)
        if not own:
            continue
        parts = prefix.product.action_components[action]
        others = [j for j in parts if j != comp]
        for combo in _coset_choices(prefix, trigger, others, action):
            inputs_by_comp = dict(combo)
            inputs_by_comp[comp] = trigger
            alt_pools = []
            for j in parts:
                alts = prefix.product.components[j].successors(inputs_by_comp[j].state, action)
                alt_pools.append(alts)
            for chosen in itertools.product(*alt_pools):
                record = _make_record(prefix, action, parts, inputs_by_comp, chosen)
                if (record.gt, tuple(b.id for b in record.inputs)) in prefix.event_keys:
                    continue
                yield record


def possible_extensions(prefix: Prefix, trigger: Condition) -> list[ExtensionRecord]:
    """New appendable joint moves involving ``trigger``: co-sets of live
    conditions with a lower id than the trigger (plus the trigger itself),
    one record per joint-move alternative, none of them already present as
    an event."""
    return [
        record
        for record in _scan_records(prefix, trigger)
        if all(b.status == LIVE for b in record.inputs)
    ]


def _tie_key(seed: Optional[int], serial: int) -> int:
    if seed is None:
        return 0
    x = ((serial + 1) * 0x9E3779B97F4A7C15 ^ (seed & 0xFFFFFFFFFFFFFFFF) * 0xBF58476D1CE4E5B9) & (
        (1 << 64) - 1
    )
    x ^= x >> 31
    x = (x * 0x94D049BB133111EB) & ((1 << 64) - 1)
    return x ^ (x >> 29)


def _enqueue(prefix: Prefix, record: ExtensionRecord) -> None:
    record.serial = prefix.serials
    prefix.serials += 1
    entry = (record.past_size, record.sig, _tie_key(prefix.tie_seed, record.serial), record.serial, record)
    frozen = [b for b in record.inputs if b.status == FROZEN]
    if frozen:
        owner = min(frozen, key=lambda c: c.id)
        prefix.parked.setdefault(owner.id, []).append(entry)
    else:
        if any(b.status == DEAD for b in record.inputs):
            raise AssertionError("extension over a dead condition")
        heapq.heappush(prefix.pending, entry)


def _scan_and_enqueue(prefix: Prefix, trigger: Condition) -> None:
    for record in _scan_records(prefix, trigger):
        _enqueue(prefix, record)


# --------------------------------------------------------------------------
# frontier and strong-cause machinery


def _past_events(event_or_inputs) -> set[Event]:
    if isinstance(event_or_inputs, Event):
        seeds = [event_or_inputs]
    else:
        seeds = [b.producer for b in event_or_inputs if b.producer is not None]
    seen: set[Event] = set(seeds)
    stack = list(seeds)
    while stack:
        f = stack.pop()
        for b in f.inputs:
            p = b.producer
            if p is not None and p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def past_events(prefix: Prefix, event: Event) -> set[Event]:
    """The event's history: itself plus every causal ancestor event."""
    return _past_events(event)


def _traverse_cut_and_ind(
    prefix: Prefix,
    past: set[Event],
    virtual_parts: tuple[int, ...] = (),
    virtual_inputs: tuple[Condition, ...] = (),
) -> tuple[list[Condition], dict[int, frozenset[int]]]:
    """Reverse-topological sweep over a history computing its frontier and,
    per swept condition, the set of components whose frontier condition
    sits causally above it.

    ``virtual_parts``/``virtual_inputs`` describe a not-yet-added event to
    be treated as the newest element of the history.
    """
    marked: set[int] = set()
    ind: dict[int, frozenset[int]] = {}
    cut: list[Condition] = []
    if virtual_parts:
        share = frozenset(virtual_parts)
        for b in virtual_inputs:
            marked.add(b.id)
            ind[b.id] = share
    for f in sorted(past, key=lambda e: e.id, reverse=True):
        reach: set[int] = set()
        for o in f.outputs:
            if o.id not in marked:
                cut.append(o)
                ind[o.id] = frozenset((o.comp,))
            reach |= ind[o.id]
        share = frozenset(reach)
        for b in f.inputs:
            marked.add(b.id)
            ind[b.id] = share
    for b0 in prefix.initial:
        if b0.id not in marked:
            cut.append(b0)
            ind[b0.id] = frozenset((b0.comp,))
    return cut, ind


def compute_cut_and_ind(
    prefix: Prefix, event: Event
) -> tuple[tuple[Condition, ...], dict[int, frozenset[int]]]:
    """Frontier of ``[event]`` plus, for every condition swept on the way,
    the components whose frontier condition lies at or above it.

    The sweep works backwards through the history in reverse insertion
    order (a valid linearization of causality): an event's unmarked
    outputs join the frontier, the union of its outputs' component sets
    flows to its inputs, and unmarked initial conditions close the gaps.
    """
    past = _past_events(event)
    cut, ind = _traverse_cut_and_ind(prefix, past)
    by_comp = sorted(cut, key=lambda c: c.comp)
    if len(by_comp) != prefix.n:
        raise AssertionError("frontier does not have one condition per component")
    return tuple(by_comp), ind


def strong_cause(prefix: Prefix, earlier: Event, later: Event) -> bool:
    """``earlier`` is causally below ``later`` with the stronger frontier
    condition: every frontier condition ``later`` keeps from ``earlier``'s
    frontier lies causally below every coordinate where the two frontiers
    differ."""
    if earlier is later:
        return False
    past = _past_events(later)
    if earlier not in past:
        return False
    _, ind = _traverse_cut_and_ind(prefix, past)
    return _strong_cause_from_ind(prefix, earlier, later.cut, ind)


def _strong_cause_from_ind(
    prefix: Prefix,
    earlier: Event,
    later_cut,
    ind: dict[int, frozenset[int]],
) -> bool:
    differing = {
        j for j in range(prefix.n) if later_cut[j] is None or later_cut[j] is not earlier.cut[j]
    }
    kept_ids = {c.id for c in later_cut if c is not None}
    for b in earlier.cut:
        if b.id in kept_ids:
            continue
        if not differing <= ind[b.id]:
            return False
    return True


# --------------------------------------------------------------------------
# classification


def is_cutoff(prefix: Prefix, st: tuple[int, ...]) -> Optional[Event]:
    """The earliest non-cut-off interface event already reaching global
    state ``st``, if any: an interface event about to be added with this
    state vector is a cut-off against exactly that companion."""
    return prefix.first_ievent_by_st.get(st)


def _candidate_blocks_for(
    prefix: Prefix,
    st: tuple[int, ...],
    ip: Condition,
    inputs: tuple[Condition, ...],
    pre_cut,
    parts: tuple[int, ...],
) -> set[Event]:
    key = (st, ip.id)
    pool = prefix.events_by_st_ip.get(key)
    if not pool:
        return set()
    past = _past_events(inputs)
    matches = [e for e in pool if e in past]
    if not matches:
        return set()
    virtual_cut = list(pre_cut)
    for j in parts:
        virtual_cut[j] = None
    cut, ind = _traverse_cut_and_ind(prefix, past, tuple(parts), inputs)
    for c in cut:
        if virtual_cut[c.comp] is not None and virtual_cut[c.comp] is not c:
            raise AssertionError("incremental frontier disagrees with sweep")
    concurrent_now = interface_concurrent_events(prefix, inputs)
    blocks: set[Event] = set()
    for e_prime in matches:
        if not _strong_cause_from_ind(prefix, e_prime, virtual_cut, ind):
            continue
        if all(_preset_concurrent(f.inputs, e_prime.inputs) for f in concurrent_now):
            blocks.add(e_prime)
    return blocks


def candidate_blocks(prefix: Prefix, event: Event) -> set[Event]:
    """Earlier events that justify freezing ``event``: strong causes with
    the same global state and interface condition whose concurrent
    non-cut-off interface events include all of ``event``'s."""
    if event.is_interface:
        return set()
    return _candidate_blocks_for(
        prefix, event.st, event.ip, event.inputs, event.cut, event.parts
    )


# --------------------------------------------------------------------------
# insertion


def add_event(prefix: Prefix, record: ExtensionRecord) -> Event:
    """Append the joint move, classify it, and maintain every index."""
    n = prefix.n
    parts = record.parts
    nparts = len(parts)
    event = Event()
    event.id = len(prefix.events)
    event.gt = record.gt
    event.parts = parts
    event.inputs = record.inputs
    event.past_size = record.past_size
    event.st = record.st
    event.cost = record.cost
    event.sig = record.sig
    event.is_interface = prefix.interface in parts

    key = (record.gt, tuple(b.id for b in record.inputs))
    if key in prefix.event_keys:
        raise AssertionError("duplicate event")
    prefix.event_keys.add(key)

    share = prefix.lcm // nparts
    outputs = []
    for j, b in zip(parts, record.inputs):
        dst = record.st[j]
        acc_cost = None
        if prefix.weighted:
            acc_cost = b.acc_cost + Fraction(record.gt.weight, nparts)
        outputs.append(
            prefix._new_condition(j, dst, event, b.depth + 1, b.acc_size + share, acc_cost)
        )
    event.outputs = tuple(outputs)
    cut = list(record.pre_cut)
    for j, o in zip(parts, outputs):
        cut[j] = o
    event.cut = tuple(cut)
    event.ip = event.cut[prefix.interface]
    if event.ip.comp != prefix.interface:
        raise AssertionError("interface coordinate mix-up")

    if event.is_interface:
        prefix.interface_equiv.add(event.ip.id)

    # Classify.
    event.status = NORMAL
    if event.is_interface:
        companion = prefix.first_ievent_by_st.get(event.st)
        if companion is not None:
            event.status = CUTOFF
            event.companion = companion
    elif prefix.strategy == DEF2:
        pool = prefix.events_by_st_ip.get((event.st, event.ip.id))
        if pool:
            past = _past_events(event.inputs)
            for e_prime in pool:
                if e_prime in past:
                    event.status = CUTOFF
                    event.companion = e_prime
                    break
    elif prefix.strategy == FULL:
        blocks = _candidate_blocks_for(
            prefix, event.st, event.ip, event.inputs, record.pre_cut, parts
        )
        if blocks:
            event.status = CANDIDATE
            event.blocks = blocks

    prefix.events.append(event)
    prefix.events_by_st_ip.setdefault((event.st, event.ip.id), []).append(event)

    if event.status == CUTOFF:
        for o in outputs:
            o.status = DEAD
        prefix.interface_equiv.add(event.companion.ip.id)
        prefix.interface_equiv.union(event.ip.id, event.companion.ip.id)
        return event

    # Non-cut-off: outputs join the structure and the concurrency relation.
    running: Optional[set[int]] = None
    for b in event.inputs:
        running = set(b.co) if running is None else running & b.co
    inherited = running if running is not None else set()
    sibling_ids = [o.id for o in outputs]
    for o in outputs:
        o.co = inherited | {i for i in sibling_ids if i != o.id}
    for cid in inherited:
        prefix.conditions[cid].co.update(sibling_ids)

    if event.status == CANDIDATE:
        for o in outputs:
            o.status = FROZEN
        prefix.coc.add(event)
    else:
        if event.is_interface:
            prefix.first_ievent_by_st[event.st] = event
            prefix.noncutoff_ievents.append(event)
            _refilter_candidates(prefix, event)

    for o in outputs:
        _scan_and_enqueue(prefix, o)
    return event


def _refilter_candidates(prefix: Prefix, new_ievent: Event) -> None:
    """A fresh non-cut-off interface event can invalidate a candidate's
    justification: any justifying event not concurrent with it, while the
    candidate is, stops justifying.  Empty justification thaws."""
    for cand in sorted(prefix.coc, key=lambda e: e.id):
        if not _preset_concurrent(new_ievent.inputs, cand.inputs):
            continue
        for e_prime in [e for e in cand.blocks if not _preset_concurrent(new_ievent.inputs, e.inputs)]:
            cand.blocks.discard(e_prime)
        if not cand.blocks:
            _thaw(prefix, cand)


def _thaw(prefix: Prefix, cand: Event) -> None:
    prefix.coc.discard(cand)
    cand.status = FREED
    for o in cand.outputs:
        o.status = LIVE
    for o in cand.outputs:
        for entry in prefix.parked.pop(o.id, ()):
            record: ExtensionRecord = entry[-1]
            still_frozen = [b for b in record.inputs if b.status == FROZEN]
            if still_frozen:
                owner = min(still_frozen, key=lambda c: c.id)
                prefix.parked.setdefault(owner.id, []).append(entry)
            else:
                heapq.heappush(prefix.pending, entry)


# --------------------------------------------------------------------------
# driver


def initial_prefix(
    product: Product, strategy: str = FULL, tie_seed: Optional[int] = None
) -> Prefix:
    """The empty unrolling: one initial condition per component, all
    mutually concurrent, with every initially enabled joint move queued."""
    prefix = Prefix(product, strategy, tie_seed)
    for cond in prefix.initial:
        _scan_and_enqueue(prefix, cond)
    return prefix


def unfold(
    product: Product,
    strategy: str = FULL,
    max_events: int = DEFAULT_MAX_EVENTS,
    max_seconds: float = DEFAULT_MAX_SECONDS,
    tie_seed: Optional[int] = None,
) -> Prefix:
    """Run the chosen strategy to exhaustion (or budget) and return the
    finished prefix."""
    prefix = initial_prefix(product, strategy, tie_seed)
    started = time.monotonic()
    pops = 0
    while prefix.pending:
        entry = heapq.heappop(prefix.pending)
        record: ExtensionRecord = entry[-1]
        if len(prefix.events) >= max_events:
            raise LimitExceeded("events", max_events, len(prefix.events))
        pops += 1
        if pops % 256 == 0 and time.monotonic() - started > max_seconds:
            raise LimitExceeded("seconds", max_seconds, len(prefix.events))
        add_event(prefix, record)
    return prefix
