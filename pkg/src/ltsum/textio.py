"""Text formats: the ``.sys`` system description, DOT export, stats JSON.

The ``.sys`` format is line-oriented.  ``#`` starts a comment, blank lines
are ignored, tokens are whitespace-separated::

    system ring3
    option weighted on
    component station0
    state idle initial
    state busy
    trans idle grab0 busy 1/2
    trans busy release0 idle 0
    component station1
    ...
    interface station0

The first ``state`` of a component is its initial state unless another
one carries the ``initial`` flag.  Transition weights are exact rationals
(``3``, ``0.5`` and ``1/2`` all work) and are only legal after
``option weighted on``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import TYPE_CHECKING, Optional

from .model import Lts, Product

if TYPE_CHECKING:  # pragma: no cover
    from .summarizer import Summary

_TOKEN = re.compile(r"\S+")


class SysParseError(Exception):
    """A ``.sys`` file was malformed; carries 1-based line and column."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class SystemFile:
    """A parsed ``.sys`` file: the system name plus the product it denotes."""

    __slots__ = ("name", "product")

    def __init__(self, name: str, product: Product) -> None:
        self.name = name
        self.product = product


class _ComponentDraft:
    __slots__ = ("name", "states", "state_pos", "initial", "transitions", "seen_trans", "line")

    def __init__(self, name: str, line: int) -> None:
        self.name = name
        self.states: list[str] = []
        self.state_pos: dict[str, int] = {}
        self.initial: Optional[int] = None
        self.transitions: list[tuple[int, str, int, Fraction]] = []
        self.seen_trans: set[tuple[int, str, int]] = set()
        self.line = line


def parse_system(text: str) -> SystemFile:
    """Parse a ``.sys`` description into a :class:`SystemFile`.

    Raises :class:`SysParseError` with position information on any
    malformed input: unknown directives, wrong arities, undeclared states
    or components, duplicate declarations, negative weights, a weight in
    an unweighted file, or a missing ``interface`` line.
    """
    name = "system"
    weighted = False
    comps: list[_ComponentDraft] = []
    by_name: dict[str, _ComponentDraft] = {}
    interface_name: Optional[str] = None
    saw_any = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0]
        tokens = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(stripped)]
        if not tokens:
            continue
        (word, col0) = tokens[0]
        args = tokens[1:]

        def fail(message: str, col: int = col0) -> SysParseError:
            return SysParseError(message, lineno, col)

        if word == "system":
            if saw_any:
                raise fail("'system' must be the first directive")
            if len(args) != 1:
                raise fail("expected: system <name>")
            name = args[0][0]
        elif word == "option":
            if comps:
                raise fail("'option' must precede component declarations")
            if len(args) != 2 or args[0][0] != "weighted":
                raise fail("expected: option weighted on|off")
            flag = args[1][0]
            if flag not in ("on", "off"):
                raise fail("expected on or off", args[1][1])
            weighted = flag == "on"
        elif word == "component":
            if len(args) != 1:
                raise fail("expected: component <name>")
            cname = args[0][0]
            if cname in by_name:
                raise fail(f"duplicate component {cname!r}", args[0][1])
            draft = _ComponentDraft(cname, lineno)
            comps.append(draft)
            by_name[cname] = draft
        elif word == "state":
            if not comps:
                raise fail("'state' before any 'component'")
            if len(args) not in (1, 2):
                raise fail("expected: state <name> [initial]")
            sname = args[0][0]
            draft = comps[-1]
            if sname in draft.state_pos:
                raise fail(f"duplicate state {sname!r}", args[0][1])
            draft.state_pos[sname] = len(draft.states)
            draft.states.append(sname)
            if len(args) == 2:
                if args[1][0] != "initial":
                    raise fail("only the 'initial' flag may follow a state name", args[1][1])
                if draft.initial is not None:
                    raise fail("component already has an initial state", args[1][1])
                draft.initial = draft.state_pos[sname]
        elif word == "trans":
            if not comps:
                raise fail("'trans' before any 'component'")
            if len(args) not in (3, 4):
                raise fail("expected: trans <src> <action> <dst> [<weight>]")
            draft = comps[-1]
            (src_name, src_col) = args[0]
            (action, _) = args[1]
            (dst_name, dst_col) = args[2]
            if src_name not in draft.state_pos:
                raise fail(f"undeclared state {src_name!r}", src_col)
            if dst_name not in draft.state_pos:
                raise fail(f"undeclared state {dst_name!r}", dst_col)
            weight = Fraction(0)
            if len(args) == 4:
                (wtok, wcol) = args[3]
                if not weighted:
                    raise fail("weight given but 'option weighted' is off", wcol)
                try:
                    weight = Fraction(wtok)
                except (ValueError, ZeroDivisionError):
                    raise fail(f"bad weight {wtok!r}", wcol) from None
                if weight < 0:
                    raise fail(f"negative weight {wtok!r}", wcol)
            key = (draft.state_pos[src_name], action, draft.state_pos[dst_name])
            if key in draft.seen_trans:
                raise fail(f"duplicate transition {src_name} -{action}-> {dst_name}")
            draft.seen_trans.add(key)
            draft.transitions.append(key + (weight,))
        elif word == "interface":
            if len(args) != 1:
                raise fail("expected: interface <component-name>")
            if interface_name is not None:
                raise fail("duplicate 'interface' directive")
            interface_name = args[0][0]
        else:
            raise fail(f"unknown directive {word!r}")
        saw_any = True

    if not comps:
        raise SysParseError("no components declared", 1, 1)
    if interface_name is None:
        raise SysParseError("missing 'interface' directive", 1, 1)
    if interface_name not in by_name:
        raise SysParseError(f"interface names undeclared component {interface_name!r}", 1, 1)
    for draft in comps:
        if not draft.states:
            raise SysParseError(f"component {draft.name!r} has no states", draft.line, 1)

    ltss = [
        Lts(d.name, d.states, d.transitions, d.initial if d.initial is not None else 0)
        for d in comps
    ]
    product = Product(ltss, [d.name for d in comps].index(interface_name), weighted)
    return SystemFile(name, product)


def serialize_system(product: Product, name: str = "system") -> str:
    """Canonical ``.sys`` text for a product; parses back to an equal system."""
    lines = [f"system {name}"]
    if product.weighted:
        lines.append("option weighted on")
    for comp in product.components:
        lines.append(f"component {comp.name}")
        for idx, sname in enumerate(comp.state_names):
            flag = " initial" if idx == comp.initial and comp.initial != 0 else ""
            lines.append(f"state {sname}{flag}")
        for src, action, dst, weight in comp.transitions:
            suffix = f" {weight}" if product.weighted else ""
            lines.append(f"trans {comp.state_names[src]} {action} {comp.state_names[dst]}{suffix}")
    lines.append(f"interface {product.components[product.interface].name}")
    return "\n".join(lines) + "\n"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_summary_dot(summary: "Summary", name: str = "summary") -> str:
    """Graphviz rendering of a summary.

    Classes are nodes ``S0..Sk`` (S0 initial, marked by an entry arrow);
    divergent classes get doubled peripheries; weighted transitions label
    edges as ``action/weight``.
    """
    divergent = summary.divergent or set()
    lines = [
        f"digraph {_quote(name)} {{",
        "  rankdir=LR;",
        "  node [shape=circle];",
        '  __start [shape=point, label=""];',
        f"  __start -> S{summary.initial};",
    ]
    for state in range(summary.states):
        attrs = [f"label={_quote(f'S{state}')}"]
        if state in divergent:
            attrs.append("peripheries=2")
        lines.append(f"  S{state} [{', '.join(attrs)}];")
    for src, action, dst in sorted(summary.transitions):
        label = action
        if summary.weights is not None:
            label = f"{action}/{summary.weights[(src, action, dst)]}"
        lines.append(f"  S{src} -> S{dst} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


class RunReport:
    """The statistics block one run produces; ``None`` fields are omitted
    from the JSON so reports stay byte-comparable across timed runs."""

    __slots__ = (
        "events",
        "cutoffs",
        "candidates_final",
        "summary_states",
        "summary_transitions",
        "minimized_states",
        "oracle_markings",
        "wall_time_ms",
    )

    def __init__(
        self,
        events: int,
        cutoffs: int,
        candidates_final: int,
        summary_states: int,
        summary_transitions: int,
        minimized_states: Optional[int] = None,
        oracle_markings: Optional[int] = None,
        wall_time_ms: Optional[int] = None,
    ) -> None:
        self.events = events
        self.cutoffs = cutoffs
        self.candidates_final = candidates_final
        self.summary_states = summary_states
        self.summary_transitions = summary_transitions
        self.minimized_states = minimized_states
        self.oracle_markings = oracle_markings
        self.wall_time_ms = wall_time_ms


def export_stats_json(report: RunReport) -> str:
    """Fixed-key-order JSON for a :class:`RunReport`; optional fields that
    are ``None`` are left out entirely."""
    payload: dict[str, int] = {
        "events": report.events,
        "cutoffs": report.cutoffs,
        "candidates_final": report.candidates_final,
        "summary_states": report.summary_states,
        "summary_transitions": report.summary_transitions,
    }
    for key in ("minimized_states", "oracle_markings", "wall_time_ms"):
        value = getattr(report, key)
        if value is not None:
            payload[key] = value
    return json.dumps(payload, indent=2) + "\n"
