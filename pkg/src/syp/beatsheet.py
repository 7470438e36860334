"""Beat sheet assembly: order extracted sentences along the process flow.

Entries are numbered either by depth-first traversal from the start event
(`dfs`) or by extraction-list order with the start event first (`list`);
next-pointers mirror the sequence flows, and gateway options keep the
outgoing-flow document order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace

from . import errors
from .bpmn import NodeKind, ProcessModel
from .sentences import Sentence, sentence_from_dict, sentence_to_dict

_SCHEMA_VERSION = 1

NUMBERINGS = ("dfs", "list")


@dataclass(frozen=True)
class NextRef:
    target: int
    option_label: str | None = None


@dataclass(frozen=True)
class BeatEntry:
    sentence: Sentence
    next: tuple[NextRef, ...]

    @property
    def id(self) -> int:
        return self.sentence.id


@dataclass(frozen=True)
class BeatSheet:
    model_ref: str
    entries: tuple[BeatEntry, ...]

    def entry(self, entry_id: int) -> BeatEntry:
        for e in self.entries:
            if e.id == entry_id:
                return e
        raise KeyError(entry_id)


@dataclass(frozen=True)
class CompletenessReport:
    expected: int
    found: int
    missing_node_ids: tuple[str, ...]

    @property
    def complete(self) -> bool:
        return not self.missing_node_ids


def _dfs_order(model: ProcessModel, start_id: str) -> list[str]:
    """Preorder of nodes reachable from the start, branches in document order."""
    order: list[str] = []
    seen: set[str] = set()
    stack = [start_id]
    while stack:
        node_id = stack.pop()
        if node_id in seen:
            continue
        seen.add(node_id)
        order.append(node_id)
        targets = [f.target for f in model.outgoing(node_id)]
        stack.extend(reversed(targets))
    return order


def script_sentences(
    model: ProcessModel,
    sentences: list[Sentence],
    numbering: str = "dfs",
) -> BeatSheet:
    """Turn the sentence list into a beat sheet with next-pointers.

    Only nodes reachable from the start event become entries; anything
    unreachable is left for check_completeness to report.
    """
    if numbering not in NUMBERINGS:
        raise ValueError(f"numbering must be one of {NUMBERINGS}, got {numbering!r}")
    if len(sentences) != len(model.flow_nodes):
        raise errors.CountMismatch(
            f"got {len(sentences)} sentences for {len(model.flow_nodes)} flow nodes"
        )
    by_node = {s.source_node: s for s in sentences}
    if set(by_node) != {n.id for n in model.flow_nodes}:
        raise errors.CountMismatch("sentences do not cover the model's flow nodes")
    starts = model.start_events()
    if len(starts) != 1:
        raise errors.NoStartEvent(f"model must have exactly one start event, found {len(starts)}")
    start_id = starts[0].id

    reach_order = _dfs_order(model, start_id)
    if numbering == "dfs":
        ordered = reach_order
    else:
        reachable = set(reach_order)
        ordered = [
            n.id
            for n in sorted(model.flow_nodes, key=lambda n: (n.id != start_id, n.document_order))
            if n.id in reachable
        ]
    entry_id = {node_id: i + 1 for i, node_id in enumerate(ordered)}

    entries: list[BeatEntry] = []
    for node_id in ordered:
        node = model.node(node_id)
        outgoing = model.outgoing(node_id)
        diverging_gateway = (
            node.kind in (NodeKind.EXCLUSIVE_GATEWAY, NodeKind.PARALLEL_GATEWAY)
            and len(outgoing) > 1
        )
        refs = tuple(
            NextRef(
                target=entry_id[f.target],
                option_label=f.condition_label if diverging_gateway else None,
            )
            for f in outgoing
        )
        sentence = replace(by_node[node_id], id=entry_id[node_id])
        entries.append(BeatEntry(sentence=sentence, next=refs))

    return BeatSheet(model_ref=model.process_id, entries=tuple(entries))


def check_completeness(model: ProcessModel, sheet: BeatSheet) -> CompletenessReport:
    """Compare the sheet against the flow-node count it must cover."""
    covered = {e.sentence.source_node for e in sheet.entries}
    missing = tuple(
        n.id
        for n in sorted(model.flow_nodes, key=lambda n: n.document_order)
        if n.id not in covered
    )
    return CompletenessReport(
        expected=len(model.flow_nodes),
        found=len(sheet.entries),
        missing_node_ids=missing,
    )


# --- serialization ---

def sheet_to_dict(sheet: BeatSheet) -> dict:
    return {
        "schema_version": _SCHEMA_VERSION,
        "model_ref": sheet.model_ref,
        "entries": [
            {
                "id": e.id,
                "next": [{"target": r.target, "option_label": r.option_label} for r in e.next],
                "sentence": sentence_to_dict(e.sentence),
            }
            for e in sheet.entries
        ],
    }


def sheet_to_json(sheet: BeatSheet) -> str:
    return json.dumps(sheet_to_dict(sheet), indent=2, ensure_ascii=False) + "\n"


def sheet_from_dict(data: dict) -> BeatSheet:
    """Load a sheet; partial sheets are allowed, dangling next targets are not."""
    entries = []
    for item in data["entries"]:
        sentence = sentence_from_dict(item["sentence"])
        if sentence.id != item["id"]:
            sentence = replace(sentence, id=item["id"])
        refs = tuple(NextRef(r["target"], r.get("option_label")) for r in item["next"])
        entries.append(BeatEntry(sentence=sentence, next=refs))
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate entry ids in beat sheet")
    known = set(ids)
    for e in entries:
        for r in e.next:
            if r.target not in known:
                raise ValueError(f"entry {e.id} points at missing entry {r.target}")
    return BeatSheet(model_ref=data["model_ref"], entries=tuple(entries))


def sheet_from_json(text: str) -> BeatSheet:
    return sheet_from_dict(json.loads(text))


def _next_cell(entry: BeatEntry) -> str:
    if not entry.next:
        return "-"
    return " - ".join(str(r.target) for r in entry.next)


def sheet_to_csv(sheet: BeatSheet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["#", "Sentences", "BPMN Element", "Next"])
    for e in sheet.entries:
        writer.writerow([e.id, e.sentence.rendered, e.sentence.source_kind.display, _next_cell(e)])
    return buf.getvalue()
