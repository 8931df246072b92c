"""Core system model: sequential components and their synchronized product.

A system is a finite family of labelled transition systems that move in
lockstep on shared action names: every component whose alphabet contains
an action must take part in each occurrence of that action, and all other
components stand still.  One designated component is the interface; the
whole package exists to compute what the system looks like through the
interface component's alphabet.

Everything in this module is immutable after construction and free of
side effects, so values can be shared freely between the unrolling engine
and the brute-force reference pipeline.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional, Sequence

ZERO = Fraction(0)


class Lts:
    """One sequential component: a finite labelled transition system.

    States are kept as indices into ``state_names``; transitions are
    ``(src, label, dst, weight)`` tuples.  The alphabet is normally
    inferred from the transition labels but can be widened explicitly,
    which makes the component a (blocking) participant of actions it
    never fires.
    """

    __slots__ = ("name", "state_names", "initial", "transitions", "actions", "_out")

    def __init__(
        self,
        name: str,
        state_names: Sequence[str],
        transitions: Iterable[tuple[int, str, int, Fraction]],
        initial: int = 0,
        actions: Optional[Iterable[str]] = None,
    ) -> None:
        self.name = name
        self.state_names = tuple(state_names)
        self.initial = initial
        self.transitions = tuple(
            (src, label, dst, Fraction(weight)) for (src, label, dst, weight) in transitions
        )
        inferred = {label for (_, label, _, _) in self.transitions}
        self.actions = frozenset(inferred if actions is None else set(actions) | inferred)
        self._validate()
        out: dict[tuple[int, str], list[tuple[int, Fraction]]] = {}
        for src, label, dst, weight in self.transitions:
            out.setdefault((src, label), []).append((dst, weight))
        self._out = {key: tuple(val) for key, val in out.items()}

    def _validate(self) -> None:
        n = len(self.state_names)
        if n == 0:
            raise ValueError(f"component {self.name!r} has no states")
        if not 0 <= self.initial < n:
            raise ValueError(f"component {self.name!r}: initial state index {self.initial} out of range")
        if len(set(self.state_names)) != n:
            raise ValueError(f"component {self.name!r} has duplicate state names")
        seen: set[tuple[int, str, int]] = set()
        for src, label, dst, weight in self.transitions:
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError(f"component {self.name!r}: transition {src}->{dst} out of range")
            if weight < 0:
                raise ValueError(f"component {self.name!r}: negative weight on {self.state_names[src]} -{label}-> {self.state_names[dst]}")
            key = (src, label, dst)
            if key in seen:
                raise ValueError(f"component {self.name!r}: duplicate transition {self.state_names[src]} -{label}-> {self.state_names[dst]}")
            seen.add(key)

    def successors(self, state: int, label: str) -> tuple[tuple[int, Fraction], ...]:
        """All ``(dst, weight)`` pairs for ``label``-moves out of ``state``."""
        return self._out.get((state, label), ())

    def state_index(self, name: str) -> int:
        try:
            return self.state_names.index(name)
        except ValueError:
            raise KeyError(f"component {self.name!r} has no state {name!r}") from None

    def __repr__(self) -> str:
        return f"Lts({self.name!r}, {len(self.state_names)} states, {len(self.transitions)} transitions)"


class GlobalTransition:
    """A joint move of every participant of one action.

    ``parts[j]`` is ``(src, dst)`` for participating component ``j`` and
    ``None`` for bystanders; ``weight`` is the sum of the participants'
    local transition weights.  Identity (equality/hash) is the label plus
    the full parts tuple, which pins down each local transition uniquely
    because components never carry duplicate (src, label, dst) entries.
    """

    __slots__ = ("label", "parts", "weight", "_hash")

    def __init__(self, label: str, parts: tuple[Optional[tuple[int, int]], ...], weight: Fraction) -> None:
        self.label = label
        self.parts = parts
        self.weight = weight
        self._hash = hash((label, parts))

    @property
    def participants(self) -> tuple[int, ...]:
        return tuple(j for j, part in enumerate(self.parts) if part is not None)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GlobalTransition)
            and self.label == other.label
            and self.parts == other.parts
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ",".join("*" if p is None else f"{p[0]}>{p[1]}" for p in self.parts)
        return f"<{self.label}:{body}>"


class Product:
    """A synchronized system of components with one interface component."""

    __slots__ = ("components", "interface", "weighted", "alphabet", "action_components")

    def __init__(self, components: Sequence[Lts], interface: int, weighted: bool = False) -> None:
        self.components = tuple(components)
        self.interface = interface
        self.weighted = weighted
        if not self.components:
            raise ValueError("a system needs at least one component")
        if not 0 <= interface < len(self.components):
            raise ValueError(f"interface index {interface} out of range")
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            raise ValueError("component names must be unique")
        self.alphabet = frozenset().union(*(c.actions for c in self.components))
        self.action_components = {
            label: tuple(j for j, c in enumerate(self.components) if label in c.actions)
            for label in sorted(self.alphabet)
        }

    @property
    def interface_alphabet(self) -> frozenset[str]:
        return self.components[self.interface].actions

    def initial_states(self) -> tuple[int, ...]:
        return tuple(c.initial for c in self.components)

    def __repr__(self) -> str:
        return f"Product({len(self.components)} components, interface={self.components[self.interface].name!r})"


def global_successors(
    product: Product, states: tuple[int, ...]
) -> list[tuple[GlobalTransition, tuple[int, ...]]]:
    """Enabled joint moves at a state vector, in a deterministic order.

    An action is enabled when every component that knows the action has at
    least one matching local move from its current state; the result pairs
    each enabled joint move with the successor state vector.  Order: action
    names sorted, then local alternatives in declaration order.
    """
    out: list[tuple[GlobalTransition, tuple[int, ...]]] = []
    for label, comps in product.action_components.items():
        pools = []
        for j in comps:
            alts = product.components[j].successors(states[j], label)
            if not alts:
                pools = []
                break
            pools.append(alts)
        if not pools:
            continue
        for combo in itertools.product(*pools):
            parts: list[Optional[tuple[int, int]]] = [None] * len(product.components)
            weight = ZERO
            succ = list(states)
            for j, (dst, wt) in zip(comps, combo):
                parts[j] = (states[j], dst)
                weight += wt
                succ[j] = dst
            out.append((GlobalTransition(label, tuple(parts), weight), tuple(succ)))
    return out


def project_word(word: Iterable[str], alphabet: frozenset[str] | set[str]) -> tuple[str, ...]:
    """Drop every letter outside ``alphabet``, keeping order."""
    return tuple(a for a in word if a in alphabet)
