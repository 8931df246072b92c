"""Folding a finished prefix into a small summary of the interface component.

Restricting the unrolling to the interface component's conditions and
events yields a tree-shaped transition system (every interface event has
exactly one interface input and output).  Cut-off interface events
recorded a state-equivalence between their own interface output and their
companion's; folding the tree along those equivalences produces the
summary: a finite transition system over the interface alphabet whose
traces are exactly the system's traces projected to the interface.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .model import Lts, Product
from .unfolder import (
    FULL,
    Condition,
    Event,
    Prefix,
    _condition_event_concurrent,
)

ZERO = Fraction(0)


class StrategyMismatch(Exception):
    """Divergence information needs the full strategy's candidate records."""


class NegativeEventCost(Exception):
    """Internal error: an interface step priced below zero."""


class InterfaceNet:
    """The prefix seen through the interface component only.

    ``events`` pairs every interface event with its single interface input
    and output condition; ``conditions`` lists all interface conditions in
    creation order (the first one is initial).
    """

    __slots__ = ("conditions", "events", "initial")

    def __init__(
        self,
        conditions: list[Condition],
        events: list[tuple[Event, Condition, Condition]],
        initial: Condition,
    ) -> None:
        self.conditions = conditions
        self.events = events
        self.initial = initial


class Summary:
    """A finite transition system over the interface alphabet.

    States are ``0..states-1`` with ``initial`` starting (class S0 by
    construction).  ``divergent`` marks classes with a hidden infinite run
    when divergence detection ran; ``weights`` prices each transition when
    the system is weighted.
    """

    __slots__ = ("states", "initial", "transitions", "alphabet", "divergent", "weights")

    def __init__(
        self,
        states: int,
        initial: int,
        transitions: list[tuple[int, str, int]],
        alphabet: tuple[str, ...],
        divergent: Optional[set[int]] = None,
        weights: Optional[dict[tuple[int, str, int], Fraction]] = None,
    ) -> None:
        self.states = states
        self.initial = initial
        self.transitions = transitions
        self.alphabet = alphabet
        self.divergent = divergent
        self.weights = weights

    def __repr__(self) -> str:
        return f"Summary({self.states} states, {len(self.transitions)} transitions)"


def interface_projection(prefix: Prefix) -> InterfaceNet:
    """Restrict the prefix to the interface component, checking shape."""
    i = prefix.interface
    conditions = prefix.interface_conditions()
    events = []
    for e in prefix.events:
        if not e.is_interface:
            continue
        ins = [b for b in e.inputs if b.comp == i]
        outs = [o for o in e.outputs if o.comp == i]
        if len(ins) != 1 or len(outs) != 1:
            raise AssertionError("interface event without unique interface input/output")
        events.append((e, ins[0], outs[0]))
    return InterfaceNet(conditions, events, prefix.initial[i])


def _class_map(prefix: Prefix, net: InterfaceNet) -> tuple[dict[int, int], int]:
    """Condition id -> class index, classes numbered in discovery order
    over interface conditions scanned by creation order."""
    uf = prefix.interface_equiv
    class_of: dict[int, int] = {}
    roots: dict[int, int] = {}
    for cond in net.conditions:
        root = uf.find(cond.id)
        if root not in roots:
            roots[root] = len(roots)
        class_of[cond.id] = roots[root]
    return class_of, len(roots)


def fold(prefix: Prefix, net: Optional[InterfaceNet] = None) -> Summary:
    """Quotient the interface projection by the companion equivalence."""
    if net is None:
        net = interface_projection(prefix)
    class_of, n_classes = _class_map(prefix, net)
    initial = class_of[net.initial.id]
    if initial != 0:
        raise AssertionError("initial class must be discovered first")
    transitions = sorted(
        {(class_of[src.id], e.gt.label, class_of[dst.id]) for (e, src, dst) in net.events}
    )
    alphabet = tuple(sorted(prefix.product.interface_alphabet))
    return Summary(n_classes, initial, transitions, alphabet)


def divergent_classes(prefix: Prefix, net: Optional[InterfaceNet] = None) -> set[int]:
    """Classes from which the system can run silently forever.

    A candidate that stayed frozen to the end witnesses a hidden loop; the
    interface conditions concurrent both with the candidate and with one
    of its justifying events are exactly where that loop can spin, and
    their classes are the divergent ones.  Only the full strategy keeps
    the candidate records, hence the strategy check.
    """
    if prefix.strategy != FULL:
        raise StrategyMismatch("divergence detection needs strategy 'full'")
    if net is None:
        net = interface_projection(prefix)
    class_of, _ = _class_map(prefix, net)
    marked: set[int] = set()
    for cand in prefix.coc:
        for justifier in cand.blocks:
            for cond in net.conditions:
                if cond.id in marked:
                    continue
                if _condition_event_concurrent(cond, cand.inputs) and _condition_event_concurrent(
                    cond, justifier.inputs
                ):
                    marked.add(cond.id)
    return {class_of[cid] for cid in marked}


def weighted_fold(prefix: Prefix, net: Optional[InterfaceNet] = None) -> Summary:
    """Like :func:`fold`, but each transition carries the cheapest price of
    an interface step between its classes.

    An interface event is priced as the weight of its whole history minus
    the history of its interface input's producer: the cost of everything
    the system must run, beyond what was already paid, to take this step.
    Parallel same-labelled transitions between the same classes collapse
    to the minimum price.
    """
    if not prefix.weighted:
        raise ValueError("weighted_fold needs a weighted system")
    if net is None:
        net = interface_projection(prefix)
    class_of, n_classes = _class_map(prefix, net)
    initial = class_of[net.initial.id]
    if initial != 0:
        raise AssertionError("initial class must be discovered first")
    weights: dict[tuple[int, str, int], Fraction] = {}
    for e, src, dst in net.events:
        base = src.producer.cost if src.producer is not None else ZERO
        step = e.cost - base
        if step < 0:
            raise NegativeEventCost(f"event {e.id} priced at {step}")
        key = (class_of[src.id], e.gt.label, class_of[dst.id])
        if key not in weights or step < weights[key]:
            weights[key] = step
    transitions = sorted(weights)
    alphabet = tuple(sorted(prefix.product.interface_alphabet))
    return Summary(n_classes, initial, transitions, alphabet, None, weights)


def summarize(prefix: Prefix, divergence: bool = False) -> Summary:
    """One-stop folding: weighted when the system is, divergence-marked on
    request."""
    net = interface_projection(prefix)
    summary = weighted_fold(prefix, net) if prefix.weighted else fold(prefix, net)
    if divergence:
        summary.divergent = divergent_classes(prefix, net)
    return summary


def summary_to_product(summary: Summary, name: str = "summary") -> Product:
    """Re-express a summary as a one-component system (so the reference
    pipeline can explore, determinize and compare it)."""
    transitions = []
    for (src, label, dst) in summary.transitions:
        weight = summary.weights[(src, label, dst)] if summary.weights is not None else ZERO
        transitions.append((src, label, dst, weight))
    lts = Lts(
        name,
        [f"S{k}" for k in range(summary.states)],
        transitions,
        summary.initial,
        actions=summary.alphabet,
    )
    return Product([lts], 0, summary.weights is not None)
