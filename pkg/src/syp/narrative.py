"""Compile a beat sheet into a playable knot graph and Ink-syntax script.

One knot per entry: linear entries divert, diverging gateways become
choices, end events divert to the END marker. A small reader for the same
Ink subset (knots, choices, diverts, END) supports round-trip checks.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import errors
from .beatsheet import BeatEntry, BeatSheet, NextRef
from .bpmn import NodeKind

_SCHEMA_VERSION = 1

END_MARKER = "END"


@dataclass(frozen=True)
class ChoiceEdge:
    label: str
    target: str


@dataclass(frozen=True)
class Divert:
    target: str


@dataclass(frozen=True)
class Choices:
    choices: tuple[ChoiceEdge, ...]


@dataclass(frozen=True)
class EndExit:
    pass


Exit = Divert | Choices | EndExit


@dataclass(frozen=True)
class Knot:
    id: str
    body: str
    exits: Exit
    note: str | None = None


@dataclass(frozen=True)
class CompiledNarrative:
    title: str
    start_knot: str
    knots: tuple[Knot, ...]

    def knot(self, knot_id: str) -> Knot:
        for k in self.knots:
            if k.id == knot_id:
                return k
        raise KeyError(knot_id)


def sanitize_knot_id(label: str, entry_id: int) -> str:
    """Lowercase, non-alphanumerics to underscores, entry-id suffix."""
    base = re.sub(r"[^a-z0-9]", "_", label.lower())
    return f"{base}_{entry_id}" if base else f"knot_{entry_id}"


def entry_knot_id(entry: BeatEntry) -> str:
    return sanitize_knot_id(entry.sentence.complements[0].text, entry.id)


def _linearize_parallels(sheet: BeatSheet) -> tuple[dict[int, tuple[NextRef, ...]], set[int]]:
    """Rewire parallel splits into one branch after another.

    Returns the adjusted next map and the ids of rewired split entries.
    Branch bodies must be straight chains meeting at a common parallel
    join; anything else is rejected.
    """
    next_map = {e.id: e.next for e in sheet.entries}
    by_id = {e.id: e for e in sheet.entries}
    rewired: set[int] = set()

    splits = [
        e
        for e in sheet.entries
        if e.sentence.source_kind is NodeKind.PARALLEL_GATEWAY and len(e.next) > 1
    ]
    for split in splits:
        join_id: int | None = None
        segments: list[tuple[int, int] | None] = []  # (head, tail) or None for empty branch
        for ref in split.next:
            cur = ref.target
            head = cur
            tail: int | None = None
            walked: set[int] = set()
            while True:
                entry = by_id[cur]
                kind = entry.sentence.source_kind
                if kind is NodeKind.PARALLEL_GATEWAY and len(entry.next) <= 1:
                    break  # reached the join
                if len(entry.next) != 1:
                    raise errors.UnstructuredParallel(
                        f"parallel split {split.id}: branch through entry {cur} is not a straight chain"
                    )
                walked.add(cur)
                tail = cur
                cur = entry.next[0].target
                if cur == split.id or cur in walked:
                    raise errors.UnstructuredParallel(
                        f"parallel split {split.id}: branch loops back on itself"
                    )
            if join_id is None:
                join_id = cur
            elif join_id != cur:
                raise errors.UnstructuredParallel(
                    f"parallel split {split.id}: branches meet at different joins"
                )
            segments.append(None if head == cur else (head, tail if tail is not None else head))

        assert join_id is not None
        chain = [seg for seg in segments if seg is not None]
        prev = split.id
        for head, tail in chain:
            next_map[prev] = (NextRef(head),)
            prev = tail
        next_map[prev] = (NextRef(join_id),)
        rewired.add(split.id)

    return next_map, rewired


def compile_narrative(sheet: BeatSheet, title: str | None = None) -> CompiledNarrative:
    """Build the knot graph for a complete, well-numbered beat sheet."""
    if not sheet.entries:
        raise errors.IncompleteSheet("beat sheet has no entries")
    ids = sorted(e.id for e in sheet.entries)
    if ids != list(range(1, len(ids) + 1)):
        raise errors.IncompleteSheet(f"entry ids are not 1..{len(ids)} without gaps")
    starts = [e for e in sheet.entries if e.sentence.source_kind is NodeKind.START_EVENT]
    if len(starts) != 1 or starts[0].id != 1:
        raise errors.IncompleteSheet("entry 1 must be the unique start event")
    if title is None:
        title = starts[0].sentence.subject_text  # start events speak for the process

    next_map, rewired = _linearize_parallels(sheet)
    knot_ids = {e.id: entry_knot_id(e) for e in sheet.entries}

    knots: list[Knot] = []
    for entry in sorted(sheet.entries, key=lambda e: e.id):
        refs = next_map[entry.id]
        kind = entry.sentence.source_kind
        exits: Exit
        if not refs:
            if kind is not NodeKind.END_EVENT:
                raise errors.DeadEnd(f"entry {entry.id} has no next and is not an end event")
            exits = EndExit()
        elif kind is NodeKind.END_EVENT:
            raise errors.IncompleteSheet(f"end-event entry {entry.id} has next pointers")
        elif len(refs) == 1:
            exits = Divert(knot_ids[refs[0].target])
        else:
            choices = []
            for ref in refs:
                label = (ref.option_label or "").strip()
                if not label:
                    raise errors.UnlabeledChoice(
                        f"entry {entry.id}: branch to {ref.target} has no option label"
                    )
                choices.append(ChoiceEdge(label, knot_ids[ref.target]))
            exits = Choices(tuple(choices))
        note = "parallel branches linearized in document order" if entry.id in rewired else None
        knots.append(Knot(id=knot_ids[entry.id], body=entry.sentence.rendered, exits=exits, note=note))

    narrative = CompiledNarrative(
        title=title,
        start_knot=knot_ids[1],
        knots=tuple(knots),
    )
    _reject_divert_only_cycles(narrative)
    return narrative


def _reject_divert_only_cycles(narrative: CompiledNarrative) -> None:
    """Auto-advance must terminate: no cycle may consist purely of diverts."""
    edges = {
        k.id: [k.exits.target] if isinstance(k.exits, Divert) else []
        for k in narrative.knots
    }
    state: dict[str, int] = {}  # 0 visiting, 1 done

    for root in edges:
        if root in state:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        while stack:
            node, i = stack.pop()
            if i == 0:
                state[node] = 0
            targets = edges[node]
            if i < len(targets):
                stack.append((node, i + 1))
                nxt = targets[i]
                if state.get(nxt) == 0:
                    raise errors.InfiniteLoop(f"divert-only cycle through knot {nxt!r}")
                if nxt not in state:
                    stack.append((nxt, 0))
            else:
                state[node] = 1


# --- Ink emission and the minimal subset reader ---

def emit_ink(narrative: CompiledNarrative) -> str:
    """Serialize to Ink syntax (knots, choices, diverts, END only)."""
    lines = [f"// {narrative.title}", f"-> {narrative.start_knot}"]
    for knot in narrative.knots:
        lines.append("")
        lines.append(f"=== {knot.id} ===")
        if knot.note:
            lines.append(f"// {knot.note}")
        lines.append(knot.body)
        if isinstance(knot.exits, EndExit):
            lines.append(f"-> {END_MARKER}")
        elif isinstance(knot.exits, Divert):
            lines.append(f"-> {knot.exits.target}")
        else:
            for choice in knot.exits.choices:
                lines.append(f"* [{choice.label}] -> {choice.target}")
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^=+\s*(\S+?)\s*=*\s*$")
_CHOICE_RE = re.compile(r"^\*\s*\[(?P<label>[^\]]*)\]\s*->\s*(?P<target>\S+)\s*$")
_DIVERT_RE = re.compile(r"^->\s*(\S+)\s*$")


def read_ink(text: str) -> CompiledNarrative:
    """Parse the emitted Ink subset back into a narrative graph."""
    title = ""
    start: str | None = None
    knots: list[Knot] = []
    current: dict | None = None

    def close(current: dict) -> None:
        body = "\n".join(current["body"]).strip()
        if current["choices"]:
            exits: Exit = Choices(tuple(current["choices"]))
        elif current["divert"] == END_MARKER:
            exits = EndExit()
        elif current["divert"]:
            exits = Divert(current["divert"])
        else:
            raise ValueError(f"knot {current['id']!r} has no exit")
        knots.append(Knot(current["id"], body, exits, current["note"]))

    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        header = _HEADER_RE.match(line)
        if header and line.startswith("==") :
            if current is not None:
                close(current)
            current = {"id": header.group(1), "body": [], "choices": [], "divert": None, "note": None}
            continue
        if line.startswith("//"):
            comment = line[2:].strip()
            if current is None:
                if not title:
                    title = comment
            elif current["note"] is None and not current["body"]:
                current["note"] = comment
            continue
        choice = _CHOICE_RE.match(line)
        if choice:
            if current is None:
                raise ValueError("choice line outside of a knot")
            label = choice.group("label").strip()
            current["choices"].append(ChoiceEdge(label, choice.group("target")))
            continue
        divert = _DIVERT_RE.match(line)
        if divert:
            if current is None:
                if start is not None:
                    raise ValueError("multiple opening diverts")
                start = divert.group(1)
            else:
                current["divert"] = divert.group(1)
            continue
        if current is None:
            raise ValueError(f"unexpected line outside of a knot: {raw!r}")
        current["body"].append(line)

    if current is not None:
        close(current)
    if start is None:
        raise ValueError("script has no opening divert")
    known = {k.id for k in knots}
    for k in knots:
        targets = exit_targets(k.exits)
        for t in targets:
            if t not in known:
                raise ValueError(f"knot {k.id!r} diverts to unknown knot {t!r}")
    if start not in known:
        raise ValueError(f"opening divert targets unknown knot {start!r}")
    return CompiledNarrative(title=title, start_knot=start, knots=tuple(knots))


def exit_targets(exits: Exit) -> tuple[str, ...]:
    if isinstance(exits, Divert):
        return (exits.target,)
    if isinstance(exits, Choices):
        return tuple(c.target for c in exits.choices)
    return ()


def graphs_isomorphic(a: CompiledNarrative, b: CompiledNarrative) -> bool:
    """Same knot ids, same exits (kind, labels, targets), same start."""
    def shape(n: CompiledNarrative) -> tuple:
        return (
            n.start_knot,
            tuple(sorted((k.id, _exit_shape(k.exits)) for k in n.knots)),
        )

    return shape(a) == shape(b)


def _exit_shape(exits: Exit) -> tuple:
    if isinstance(exits, Divert):
        return ("divert", exits.target)
    if isinstance(exits, Choices):
        return ("choices", tuple((c.label, c.target) for c in exits.choices))
    return ("end",)


def isomorphic_to_sheet(narrative: CompiledNarrative, sheet: BeatSheet) -> bool:
    """Knot graph mirrors the sheet's next relation (no parallels involved)."""
    if len(narrative.knots) != len(sheet.entries):
        return False
    mapping = {e.id: entry_knot_id(e) for e in sheet.entries}
    by_id = {k.id: k for k in narrative.knots}
    for entry in sheet.entries:
        knot = by_id.get(mapping[entry.id])
        if knot is None:
            return False
        want = tuple(mapping[r.target] for r in entry.next)
        if exit_targets(knot.exits) != want:
            return False
    return True


# --- serialization ---

def _exit_to_dict(exits: Exit) -> dict:
    if isinstance(exits, Divert):
        return {"type": "divert", "target": exits.target}
    if isinstance(exits, Choices):
        return {
            "type": "choices",
            "choices": [{"label": c.label, "target": c.target} for c in exits.choices],
        }
    return {"type": "end"}


def _exit_from_dict(data: dict) -> Exit:
    if data["type"] == "divert":
        return Divert(data["target"])
    if data["type"] == "choices":
        return Choices(tuple(ChoiceEdge(c["label"], c["target"]) for c in data["choices"]))
    if data["type"] == "end":
        return EndExit()
    raise ValueError(f"unknown exit type {data['type']!r}")


def narrative_core_dict(narrative: CompiledNarrative) -> dict:
    """Hash-relevant content, without the schema envelope."""
    knots = []
    for k in narrative.knots:
        item = {"id": k.id, "body": k.body, "exits": _exit_to_dict(k.exits)}
        if k.note is not None:
            item["note"] = k.note
        knots.append(item)
    return {"title": narrative.title, "start_knot": narrative.start_knot, "knots": knots}


def narrative_to_dict(narrative: CompiledNarrative) -> dict:
    return {"schema_version": _SCHEMA_VERSION, **narrative_core_dict(narrative)}


def narrative_to_json(narrative: CompiledNarrative) -> str:
    return json.dumps(narrative_to_dict(narrative), indent=2, ensure_ascii=False) + "\n"


def narrative_from_dict(data: dict) -> CompiledNarrative:
    try:
        knots = tuple(
            Knot(k["id"], k["body"], _exit_from_dict(k["exits"]), k.get("note"))
            for k in data["knots"]
        )
        narrative = CompiledNarrative(
            title=data["title"], start_knot=data["start_knot"], knots=knots
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"invalid narrative JSON: {exc}") from exc
    known = {k.id for k in narrative.knots}
    if narrative.start_knot not in known:
        raise ValueError("start knot missing from knot list")
    for k in narrative.knots:
        for t in exit_targets(k.exits):
            if t not in known:
                raise ValueError(f"knot {k.id!r} targets unknown knot {t!r}")
    return narrative


def narrative_from_json(text: str) -> CompiledNarrative:
    return narrative_from_dict(json.loads(text))
