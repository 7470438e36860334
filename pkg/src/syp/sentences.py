"""Sentence extraction: one subject+verb+complements sentence per flow node.

Subjects follow the element kind: the process itself speaks for start and
end events, the lane speaks for activities, and gateways/intermediate
events get an impersonal subject. Resources attached to an activity become
extra complements joined by a connector verb.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, replace
from enum import Enum

from . import errors
from .bpmn import FlowNode, NodeKind, ProcessModel

_SCHEMA_VERSION = 1


class SubjectKind(str, Enum):
    SIMPLE = "Simple"
    UNDEFINED = "Undefined"


class ComplementOrigin(str, Enum):
    ELEMENT_LABEL = "ElementLabel"
    GATE_OPTION = "GateOption"
    RESOURCE = "Resource"


@dataclass(frozen=True)
class Complement:
    text: str
    origin: ComplementOrigin
    connector_verb: str | None = None


@dataclass(frozen=True)
class Sentence:
    id: int
    source_node: str
    source_kind: NodeKind
    subject_kind: SubjectKind
    subject_text: str
    verb: str
    complements: tuple[Complement, ...]
    rendered: str


@dataclass(frozen=True)
class VerbLexicon:
    """Default verbs per element kind; authors may override any entry."""

    start_event: str = "starts"
    end_event: str = "ends"
    activity: str = "needs"
    gateway: str = "It is decided"
    gateway_join: str = "It continues"
    intermediate_event: str = "It happens"
    resource_connector: str = "using"

    @classmethod
    def from_json(cls, text: str) -> "VerbLexicon":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("lexicon JSON must be an object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown lexicon keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


DEFAULT_LEXICON = VerbLexicon()


def _impersonal(phrase: str) -> tuple[str, str]:
    """Split an undefined-subject phrase like "It is decided" into subject and verb."""
    head, _, rest = phrase.partition(" ")
    if head.lower() == "it" and rest:
        return head, rest
    return "It", phrase


def _quote(text: str) -> str:
    return f'"{text}"'


def render_sentence(
    kind: NodeKind,
    subject_text: str,
    verb: str,
    complements: tuple[Complement, ...],
) -> str:
    """Rebuild the rendered text from sentence parts (kind-specific template)."""
    if kind in (NodeKind.START_EVENT, NodeKind.END_EVENT):
        return f"The {subject_text} {verb} when {_quote(complements[0].text)}"
    if kind is NodeKind.ACTIVITY:
        parts = [f"The {subject_text} {verb} to {_quote(complements[0].text)}"]
        for comp in complements[1:]:
            parts.append(f"{comp.connector_verb} the {_quote(comp.text)}")
        return " ".join(parts)
    if kind is NodeKind.INTERMEDIATE_EVENT:
        return f"{subject_text} {verb} that {_quote(complements[0].text)}"
    # gateways
    if complements[0].origin is ComplementOrigin.GATE_OPTION:
        options = " OR ".join(_quote(c.text) for c in complements)
        return f"{subject_text} {verb} among {options}"
    return f"{subject_text} {verb} after {_quote(complements[0].text)}"


def _extract_one(model: ProcessModel, node: FlowNode, sid: int, lexicon: VerbLexicon) -> Sentence:
    kind = node.kind
    if kind in (NodeKind.START_EVENT, NodeKind.END_EVENT):
        subject_kind = SubjectKind.SIMPLE
        subject = model.process_name
        verb = lexicon.start_event if kind is NodeKind.START_EVENT else lexicon.end_event
        complements = (Complement(node.label, ComplementOrigin.ELEMENT_LABEL),)
    elif kind is NodeKind.ACTIVITY:
        subject_kind = SubjectKind.SIMPLE
        subject = model.lane(node.lane_id).name
        verb = lexicon.activity
        complements = [Complement(node.label, ComplementOrigin.ELEMENT_LABEL)]
        for res in model.resources_of(node.id):
            complements.append(
                Complement(res.label, ComplementOrigin.RESOURCE, lexicon.resource_connector)
            )
        complements = tuple(complements)
    elif kind is NodeKind.INTERMEDIATE_EVENT:
        subject_kind = SubjectKind.UNDEFINED
        subject, verb = _impersonal(lexicon.intermediate_event)
        complements = (Complement(node.label, ComplementOrigin.ELEMENT_LABEL),)
    else:
        subject_kind = SubjectKind.UNDEFINED
        outgoing = model.outgoing(node.id)
        diverging_exclusive = kind is NodeKind.EXCLUSIVE_GATEWAY and len(outgoing) > 1
        if diverging_exclusive:
            subject, verb = _impersonal(lexicon.gateway)
            complements = []
            for flow in outgoing:
                label = (flow.condition_label or "").strip()
                if not label:
                    raise errors.MissingGateLabel(
                        f"gateway {node.id!r}: outgoing flow {flow.id!r} has no option label"
                    )
                complements.append(Complement(label, ComplementOrigin.GATE_OPTION))
            complements = tuple(complements)
        else:
            # converging gateways and parallel gateways pass the story along
            subject, verb = _impersonal(lexicon.gateway_join)
            complements = (Complement(node.label, ComplementOrigin.ELEMENT_LABEL),)

    rendered = render_sentence(kind, subject, verb, complements)
    return Sentence(
        id=sid,
        source_node=node.id,
        source_kind=kind,
        subject_kind=subject_kind,
        subject_text=subject,
        verb=verb,
        complements=complements,
        rendered=rendered,
    )


def extract_sentences(model: ProcessModel, lexicon: VerbLexicon = DEFAULT_LEXICON) -> list[Sentence]:
    """Extract exactly one sentence per flow node, in document order."""
    return [
        _extract_one(model, node, i + 1, lexicon)
        for i, node in enumerate(sorted(model.flow_nodes, key=lambda n: n.document_order))
    ]


_QUOTED_RE = re.compile(r'"[^"]*"')


def refine_sentence(
    sentences: list[Sentence],
    sentence_id: int,
    new_verb: str | None = None,
    new_rendered: str | None = None,
) -> list[Sentence]:
    """Lexically refine one sentence, leaving structure untouched.

    A new verb alone re-renders the sentence from its template; a new
    rendered text is accepted as long as it keeps one quoted slot per
    complement (dropping or inventing complements is a structural edit).
    """
    index = next((i for i, s in enumerate(sentences) if s.id == sentence_id), None)
    if index is None:
        raise errors.UnknownSentenceId(f"no sentence with id {sentence_id}")
    if new_verb is None and new_rendered is None:
        return list(sentences)

    current = sentences[index]
    verb = new_verb if new_verb is not None else current.verb
    if new_rendered is not None:
        slots = len(_QUOTED_RE.findall(new_rendered))
        if slots != len(current.complements):
            raise errors.StructuralEdit(
                f"rendered text has {slots} quoted complements, sentence has {len(current.complements)}"
            )
        rendered = new_rendered
    else:
        rendered = render_sentence(current.source_kind, current.subject_text, verb, current.complements)

    updated = list(sentences)
    updated[index] = replace(current, verb=verb, rendered=rendered)
    return updated


# --- serialization ---

def sentence_to_dict(s: Sentence) -> dict:
    return {
        "id": s.id,
        "source_node": s.source_node,
        "source_kind": s.source_kind.value,
        "subject_kind": s.subject_kind.value,
        "subject_text": s.subject_text,
        "verb": s.verb,
        "complements": [
            {"text": c.text, "origin": c.origin.value, "connector_verb": c.connector_verb}
            for c in s.complements
        ],
        "rendered": s.rendered,
    }


def sentence_from_dict(data: dict) -> Sentence:
    return Sentence(
        id=data["id"],
        source_node=data["source_node"],
        source_kind=NodeKind(data["source_kind"]),
        subject_kind=SubjectKind(data["subject_kind"]),
        subject_text=data["subject_text"],
        verb=data["verb"],
        complements=tuple(
            Complement(c["text"], ComplementOrigin(c["origin"]), c.get("connector_verb"))
            for c in data["complements"]
        ),
        rendered=data["rendered"],
    )


def sentences_to_json(sentences: list[Sentence], model_ref: str) -> str:
    payload = {
        "schema_version": _SCHEMA_VERSION,
        "model_ref": model_ref,
        "sentences": [sentence_to_dict(s) for s in sentences],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def sentences_from_json(text: str) -> tuple[list[Sentence], str]:
    data = json.loads(text)
    return [sentence_from_dict(s) for s in data["sentences"]], data.get("model_ref", "")


def sentences_to_csv(sentences: list[Sentence]) -> str:
    """Table with the beat-sheet columns; Next stays empty until scripting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["#", "Sentences", "BPMN Element", "Next"])
    for s in sentences:
        writer.writerow([s.id, s.rendered, s.source_kind.display, ""])
    return buf.getvalue()
