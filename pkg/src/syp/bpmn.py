"""BPMN 2.0 parsing and validation.

Reads a .bpmn XML document (OMG namespace, prefixed or default) into an
immutable ProcessModel covering the supported subset: start/end/intermediate
events, tasks of any subtype, exclusive and parallel gateways, lanes,
sequence flows, and data objects/stores/annotations linked to activities.
Anything else (sub-processes, boundary events, message flows, extra pools)
is rejected with UnsupportedElement.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum

from . import errors

BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"
_SCHEMA_VERSION = 1

_TASK_TAGS = {
    "task",
    "userTask",
    "serviceTask",
    "scriptTask",
    "manualTask",
    "businessRuleTask",
    "sendTask",
    "receiveTask",
}
_UNSUPPORTED_TAGS = {
    "subProcess",
    "adHocSubProcess",
    "transaction",
    "callActivity",
    "boundaryEvent",
    "inclusiveGateway",
    "complexGateway",
    "eventBasedGateway",
    "messageFlow",
}


class NodeKind(str, Enum):
    START_EVENT = "StartEvent"
    END_EVENT = "EndEvent"
    INTERMEDIATE_EVENT = "IntermediateEvent"
    ACTIVITY = "Activity"
    EXCLUSIVE_GATEWAY = "ExclusiveGateway"
    PARALLEL_GATEWAY = "ParallelGateway"

    @property
    def display(self) -> str:
        """Human-facing kind name, as used in beat-sheet tables."""
        return _KIND_DISPLAY[self]


_KIND_DISPLAY = {
    NodeKind.START_EVENT: "Start Event",
    NodeKind.END_EVENT: "End Event",
    NodeKind.INTERMEDIATE_EVENT: "Intermediate Event",
    NodeKind.ACTIVITY: "Activity",
    NodeKind.EXCLUSIVE_GATEWAY: "Gateway",
    NodeKind.PARALLEL_GATEWAY: "Parallel Gateway",
}


class ResourceKind(str, Enum):
    DATA_OBJECT = "DataObject"
    DATA_STORE = "DataStore"
    TEXT_ANNOTATION = "TextAnnotation"


@dataclass(frozen=True)
class Lane:
    id: str
    name: str


@dataclass(frozen=True)
class FlowNode:
    id: str
    kind: NodeKind
    label: str
    lane_id: str | None
    document_order: int


@dataclass(frozen=True)
class SequenceFlow:
    id: str
    source: str
    target: str
    condition_label: str | None = None


@dataclass(frozen=True)
class Resource:
    id: str
    kind: ResourceKind
    label: str


@dataclass(frozen=True)
class ResourceLink:
    flow_node_id: str
    resource_id: str
    direction: str  # "input" | "output"


@dataclass(frozen=True)
class ProcessModel:
    process_id: str
    process_name: str
    lanes: tuple[Lane, ...]
    flow_nodes: tuple[FlowNode, ...]
    sequence_flows: tuple[SequenceFlow, ...]
    resources: tuple[Resource, ...] = ()
    resource_links: tuple[ResourceLink, ...] = ()

    def node(self, node_id: str) -> FlowNode:
        for n in self.flow_nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def outgoing(self, node_id: str) -> tuple[SequenceFlow, ...]:
        """Outgoing flows of a node, in document order."""
        return tuple(f for f in self.sequence_flows if f.source == node_id)

    def incoming(self, node_id: str) -> tuple[SequenceFlow, ...]:
        return tuple(f for f in self.sequence_flows if f.target == node_id)

    def lane(self, lane_id: str) -> Lane:
        for lane in self.lanes:
            if lane.id == lane_id:
                return lane
        raise KeyError(lane_id)

    def resources_of(self, node_id: str) -> tuple[Resource, ...]:
        """Resources linked to a node, input links first, in link order."""
        by_id = {r.id: r for r in self.resources}
        ordered = sorted(
            (link for link in self.resource_links if link.flow_node_id == node_id),
            key=lambda link: link.direction != "input",
        )
        return tuple(by_id[link.resource_id] for link in ordered if link.resource_id in by_id)

    def start_events(self) -> tuple[FlowNode, ...]:
        return tuple(n for n in self.flow_nodes if n.kind is NodeKind.START_EVENT)

    def end_events(self) -> tuple[FlowNode, ...]:
        return tuple(n for n in self.flow_nodes if n.kind is NodeKind.END_EVENT)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    node_id: str | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "error")

    @property
    def warnings(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors


def _local(tag: str) -> str | None:
    """Local element name, or None when the element is from a foreign namespace."""
    if tag.startswith("{"):
        ns, _, name = tag[1:].partition("}")
        return name if ns == BPMN_NS else None
    return tag


def synthetic_label(kind: NodeKind, document_order: int) -> str:
    return f"unnamed {kind.display.lower()} {document_order}"


_SYNTHETIC_RE = re.compile(
    r"^unnamed (start event|end event|intermediate event|activity|gateway|parallel gateway|lane) \d+$"
)


def parse_bpmn(xml_bytes: bytes) -> ProcessModel:
    """Parse BPMN 2.0 XML into a ProcessModel.

    Raises MalformedXml for broken or inconsistent documents,
    UnsupportedElement for constructs outside the supported subset, and
    MissingLane for activities not contained in a lane.
    """
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise errors.MalformedXml(f"not well-formed XML: {exc}") from exc

    root_tag = _local(root.tag)
    if root_tag == "process":
        processes = [root]
        collaborations = []
        definitions_children = [root]
    elif root_tag == "definitions":
        processes = [el for el in root if _local(el.tag) == "process"]
        collaborations = [el for el in root if _local(el.tag) == "collaboration"]
        definitions_children = list(root)
    else:
        raise errors.MalformedXml(f"unexpected root element {root.tag!r}")

    participant_name = None
    for collab in collaborations:
        participants = [el for el in collab if _local(el.tag) == "participant"]
        with_ref = [p for p in participants if p.get("processRef")]
        if len(with_ref) > 1:
            extra = with_ref[1]
            raise errors.UnsupportedElement(extra.get("id", "?"), "participant (multiple pools)")
        if with_ref:
            participant_name = with_ref[0].get("name")
        for el in collab:
            if _local(el.tag) == "messageFlow":
                raise errors.UnsupportedElement(el.get("id", "?"), "messageFlow")

    non_empty = [p for p in processes if len(p)]
    if len(non_empty) > 1:
        raise errors.UnsupportedElement(non_empty[1].get("id", "?"), "process (multiple pools)")
    if not processes:
        raise errors.MalformedXml("document contains no process")
    process = non_empty[0] if non_empty else processes[0]

    # data stores/objects may live at definitions level; remember their names
    global_data_names: dict[str, str] = {}
    for el in definitions_children:
        if _local(el.tag) in ("dataStore", "dataObject"):
            global_data_names[el.get("id", "")] = el.get("name") or ""

    nodes: list[FlowNode] = []
    node_lane: dict[str, str] = {}
    lanes: list[Lane] = []
    flows: list[SequenceFlow] = []
    resources: list[Resource] = []
    links: list[ResourceLink] = []
    referenced_data: set[str] = set()
    local_data_names = dict(global_data_names)
    order = 0

    def collect_lanes(lane_set: ET.Element) -> None:
        for lane_el in lane_set:
            if _local(lane_el.tag) != "lane":
                continue
            lane_id = lane_el.get("id", f"lane{len(lanes) + 1}")
            name = lane_el.get("name") or f"unnamed lane {len(lanes) + 1}"
            lanes.append(Lane(id=lane_id, name=name))
            for child in lane_el:
                tag = _local(child.tag)
                if tag == "flowNodeRef" and child.text:
                    ref = child.text.strip()
                    if ref and ref not in node_lane:
                        node_lane[ref] = lane_id
                elif tag == "childLaneSet":
                    collect_lanes(child)

    def node_kind(tag: str) -> NodeKind | None:
        if tag == "startEvent":
            return NodeKind.START_EVENT
        if tag == "endEvent":
            return NodeKind.END_EVENT
        if tag in ("intermediateCatchEvent", "intermediateThrowEvent"):
            return NodeKind.INTERMEDIATE_EVENT
        if tag in _TASK_TAGS:
            return NodeKind.ACTIVITY
        if tag == "exclusiveGateway":
            return NodeKind.EXCLUSIVE_GATEWAY
        if tag == "parallelGateway":
            return NodeKind.PARALLEL_GATEWAY
        return None

    def collect_task_data_links(task_el: ET.Element, task_id: str) -> None:
        for child in task_el:
            tag = _local(child.tag)
            if tag == "dataInputAssociation":
                for ref in child:
                    if _local(ref.tag) == "sourceRef" and ref.text:
                        links.append(ResourceLink(task_id, ref.text.strip(), "input"))
            elif tag == "dataOutputAssociation":
                for ref in child:
                    if _local(ref.tag) == "targetRef" and ref.text:
                        links.append(ResourceLink(task_id, ref.text.strip(), "output"))

    associations: list[tuple[str, str]] = []

    for el in process:
        tag = _local(el.tag)
        if tag is None:
            continue
        if tag in _UNSUPPORTED_TAGS:
            raise errors.UnsupportedElement(el.get("id", "?"), tag)
        if tag == "laneSet":
            collect_lanes(el)
            continue
        if tag == "sequenceFlow":
            flows.append(
                SequenceFlow(
                    id=el.get("id", f"flow{len(flows) + 1}"),
                    source=el.get("sourceRef", ""),
                    target=el.get("targetRef", ""),
                    condition_label=el.get("name") or None,
                )
            )
            continue
        if tag in ("dataObjectReference", "dataStoreReference"):
            kind = ResourceKind.DATA_OBJECT if tag == "dataObjectReference" else ResourceKind.DATA_STORE
            backing = el.get("dataObjectRef") or el.get("dataStoreRef") or ""
            referenced_data.add(backing)
            label = el.get("name") or local_data_names.get(backing) or ""
            rid = el.get("id", f"res{len(resources) + 1}")
            resources.append(Resource(rid, kind, label or f"unnamed {kind.value.lower()} {rid}"))
            continue
        if tag in ("dataObject", "dataStore"):
            local_data_names[el.get("id", "")] = el.get("name") or ""
            continue
        if tag == "textAnnotation":
            text = ""
            for child in el:
                if _local(child.tag) == "text" and child.text:
                    text = child.text.strip()
            rid = el.get("id", f"ann{len(resources) + 1}")
            resources.append(
                Resource(rid, ResourceKind.TEXT_ANNOTATION, text or f"unnamed annotation {rid}")
            )
            continue
        if tag == "association":
            associations.append((el.get("sourceRef", ""), el.get("targetRef", "")))
            continue

        kind = node_kind(tag)
        if kind is None:
            continue  # documentation, extensionElements, ...
        order += 1
        node_id = el.get("id", f"node{order}")
        label = el.get("name") or synthetic_label(kind, order)
        nodes.append(FlowNode(id=node_id, kind=kind, label=label, lane_id=None, document_order=order))
        if kind is NodeKind.ACTIVITY:
            collect_task_data_links(el, node_id)

    # standalone dataObject/dataStore inside the process with no reference element
    for data_id, name in local_data_names.items():
        if data_id and data_id not in referenced_data and data_id not in global_data_names:
            resources.append(
                Resource(data_id, ResourceKind.DATA_OBJECT, name or f"unnamed dataobject {data_id}")
            )

    node_ids = {n.id for n in nodes}
    resolved: list[FlowNode] = []
    for n in nodes:
        lane_id = node_lane.get(n.id)
        if n.kind is NodeKind.ACTIVITY and lane_id is None:
            raise errors.MissingLane(n.id)
        resolved.append(FlowNode(n.id, n.kind, n.label, lane_id, n.document_order))

    for flow in flows:
        if flow.source not in node_ids:
            raise errors.MalformedXml(
                f"sequence flow {flow.id!r} references unknown source {flow.source!r}"
            )
        if flow.target not in node_ids:
            raise errors.MalformedXml(
                f"sequence flow {flow.id!r} references unknown target {flow.target!r}"
            )

    resource_ids = {r.id for r in resources}
    annotation_ids = {r.id for r in resources if r.kind is ResourceKind.TEXT_ANNOTATION}
    for source, target in associations:
        if source in annotation_ids and target in node_ids:
            links.append(ResourceLink(target, source, "input"))
        elif target in annotation_ids and source in node_ids:
            links.append(ResourceLink(source, target, "output"))
    links = [l for l in links if l.resource_id in resource_ids and l.flow_node_id in node_ids]

    process_id = process.get("id", "process")
    process_name = process.get("name") or participant_name or process_id

    return ProcessModel(
        process_id=process_id,
        process_name=process_name,
        lanes=tuple(lanes),
        flow_nodes=tuple(resolved),
        sequence_flows=tuple(flows),
        resources=tuple(resources),
        resource_links=tuple(links),
    )


def _adjacency(model: ProcessModel) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {n.id: [] for n in model.flow_nodes}
    for f in model.sequence_flows:
        adj[f.source].append(f.target)
    return adj


def reachable_from(model: ProcessModel, start_id: str) -> set[str]:
    adj = _adjacency(model)
    seen = {start_id}
    stack = [start_id]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def _strongly_connected_components(adj: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    for root in adj:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(adj[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                sccs.append(comp)
    return sccs


def validate_model(model: ProcessModel, mode: str = "strict") -> ValidationReport:
    """Check a parsed model against pipeline assumptions.

    Strict mode errors on parallel gateways, unreachable nodes, multiple
    start events, and cycles that cannot reach any end event; lenient mode
    downgrades those to warnings. Structural defects that would break the
    pipeline outright (no start, no end, dead ends, unlabeled gate options)
    are errors in both modes.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be 'strict' or 'lenient', got {mode!r}")
    downgrade = "warning" if mode == "lenient" else "error"
    diags: list[Diagnostic] = []

    starts = model.start_events()
    ends = model.end_events()
    if not model.flow_nodes:
        diags.append(Diagnostic("error", None, "model has no flow nodes"))
        return ValidationReport(tuple(diags))
    if not starts:
        diags.append(Diagnostic("error", None, "model has no start event"))
    elif len(starts) > 1:
        for extra in starts[1:]:
            diags.append(Diagnostic(downgrade, extra.id, "multiple start events"))
    if not ends:
        diags.append(Diagnostic("error", None, "model has no end event"))

    outgoing = {n.id: model.outgoing(n.id) for n in model.flow_nodes}
    incoming = {n.id: model.incoming(n.id) for n in model.flow_nodes}

    for n in model.flow_nodes:
        if n.kind is NodeKind.PARALLEL_GATEWAY:
            diags.append(Diagnostic(downgrade, n.id, "parallel gateway is outside the demonstrated subset"))
        if n.kind is NodeKind.END_EVENT and outgoing[n.id]:
            diags.append(Diagnostic("error", n.id, "end event has outgoing flow"))
        if n.kind is not NodeKind.END_EVENT and not outgoing[n.id]:
            diags.append(Diagnostic("error", n.id, "dead end: no outgoing flow"))
        if n.kind is NodeKind.EXCLUSIVE_GATEWAY and len(outgoing[n.id]) > 1:
            for f in outgoing[n.id]:
                if not (f.condition_label or "").strip():
                    diags.append(Diagnostic("error", n.id, f"unlabeled gate option (flow {f.id!r})"))
        if n.kind is NodeKind.EXCLUSIVE_GATEWAY and len(outgoing[n.id]) <= 1 and len(incoming[n.id]) > 1:
            diags.append(
                Diagnostic("warning", n.id, "converging gateway: pass-through sentence will be synthesized")
            )
        if _SYNTHETIC_RE.match(n.label):
            diags.append(Diagnostic("warning", n.id, "flow node has no name; synthetic label assigned"))

    if len(starts) == 1:
        reach = reachable_from(model, starts[0].id)
        for n in model.flow_nodes:
            if n.id not in reach:
                diags.append(Diagnostic(downgrade, n.id, "unreachable"))

    adj = _adjacency(model)
    end_ids = {n.id for n in ends}
    for comp in _strongly_connected_components(adj):
        cyclic = len(comp) > 1 or comp[0] in adj[comp[0]]
        if not cyclic:
            continue
        if mode == "lenient":
            diags.append(Diagnostic("warning", comp[0], "cycle"))
            continue
        seen = set(comp)
        stack = list(comp)
        escapes = False
        while stack and not escapes:
            for nxt in adj[stack.pop()]:
                if nxt in end_ids:
                    escapes = True
                    break
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if end_ids & set(comp):
            escapes = True
        if not escapes:
            diags.append(Diagnostic("error", comp[0], "cycle bypasses all end events"))

    return ValidationReport(tuple(diags))


# --- canonical JSON form ---

def model_to_dict(model: ProcessModel) -> dict:
    return {
        "schema_version": _SCHEMA_VERSION,
        "process_id": model.process_id,
        "process_name": model.process_name,
        "lanes": [{"id": l.id, "name": l.name} for l in model.lanes],
        "flow_nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "label": n.label,
                "lane_id": n.lane_id,
                "document_order": n.document_order,
            }
            for n in model.flow_nodes
        ],
        "sequence_flows": [
            {
                "id": f.id,
                "source": f.source,
                "target": f.target,
                "condition_label": f.condition_label,
            }
            for f in model.sequence_flows
        ],
        "resources": [{"id": r.id, "kind": r.kind.value, "label": r.label} for r in model.resources],
        "resource_links": [
            {
                "flow_node_id": l.flow_node_id,
                "resource_id": l.resource_id,
                "direction": l.direction,
            }
            for l in model.resource_links
        ],
    }


def model_to_json(model: ProcessModel) -> str:
    return json.dumps(model_to_dict(model), indent=2, ensure_ascii=False) + "\n"


def model_from_dict(data: dict) -> ProcessModel:
    try:
        return ProcessModel(
            process_id=data["process_id"],
            process_name=data["process_name"],
            lanes=tuple(Lane(l["id"], l["name"]) for l in data["lanes"]),
            flow_nodes=tuple(
                FlowNode(
                    n["id"],
                    NodeKind(n["kind"]),
                    n["label"],
                    n.get("lane_id"),
                    n["document_order"],
                )
                for n in data["flow_nodes"]
            ),
            sequence_flows=tuple(
                SequenceFlow(f["id"], f["source"], f["target"], f.get("condition_label"))
                for f in data["sequence_flows"]
            ),
            resources=tuple(
                Resource(r["id"], ResourceKind(r["kind"]), r["label"]) for r in data["resources"]
            ),
            resource_links=tuple(
                ResourceLink(l["flow_node_id"], l["resource_id"], l["direction"])
                for l in data["resource_links"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"invalid model JSON: {exc}") from exc


def model_from_json(text: str) -> ProcessModel:
    return model_from_dict(json.loads(text))
