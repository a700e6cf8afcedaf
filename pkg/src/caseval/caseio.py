"""Canonical on-disk case format: parser, serializer, and DOT rendering.

Case documents are UTF-8 JSON with a flat node array (cross-links make
nesting lossy).  Serialization is canonical — fixed key order, nodes and
blocks sorted by id, LF line endings — so equal graphs serialize to
byte-identical documents and round-trips are exact.

Strict parsing rejects unknown fields; lenient parsing preserves them so
interactive autosave never destroys data it does not understand.
"""

from __future__ import annotations

import json
import textwrap
from dataclasses import dataclass, field
from typing import Any, Optional

from .model import (
    ArgumentBlock,
    BlockKind,
    CaseGraph,
    ClaimNode,
    ConfirmationAnnotation,
    ConfirmationMode,
    DecompositionMode,
    DefeatKind,
    DefeaterNode,
    DefeaterStatus,
    Designation,
    EvidenceNode,
    ExternalSubcaseRef,
    Node,
    QualitativeLevel,
    Verdict,
)

FORMAT_VERSION = "1.0"


class ParseError(ValueError):
    """Malformed case document; carries the offending field path."""

    def __init__(self, message: str, path: str = "", line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.path = path
        self.line = line
        self.column = column
        location = ""
        if path:
            location = f" at {path}"
        if line is not None:
            location += f" (line {line}, column {column})"
        super().__init__(message + location)


@dataclass
class CaseDocument:
    format_version: str
    case: CaseGraph
    overrides: dict[str, float] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict, compare=False)


class _Reader:
    """Pulls typed fields out of a JSON object, tracking the field path."""

    def __init__(self, obj: dict, path: str, strict: bool) -> None:
        if not isinstance(obj, dict):
            raise ParseError("expected an object", path)
        self.obj = obj
        self.path = path
        self.strict = strict
        self.seen: set[str] = set()

    def _get(self, key: str, expected: type, required: bool, default: Any = None) -> Any:
        self.seen.add(key)
        if key not in self.obj:
            if required:
                raise ParseError(f"missing required field {key!r}", self.path)
            return default
        value = self.obj[key]
        if value is None and not required:
            return default
        if expected is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, expected) or (expected is not bool and isinstance(value, bool)):
            raise ParseError(
                f"field {key!r} must be {expected.__name__}", self.path
            )
        return value

    def string(self, key: str, *, required: bool = True, default: Optional[str] = None) -> Any:
        return self._get(key, str, required, default)

    def number(self, key: str, *, required: bool = True, default: Optional[float] = None) -> Any:
        return self._get(key, float, required, default)

    def boolean(self, key: str, *, required: bool = True, default: Optional[bool] = None) -> Any:
        return self._get(key, bool, required, default)

    def array(self, key: str, *, required: bool = True, default: Any = None) -> Any:
        return self._get(key, list, required, default if default is not None else [])

    def mapping(self, key: str, *, required: bool = True) -> Any:
        return self._get(key, dict, required, {})

    def enum(self, key: str, enum_type: type, *, required: bool = True, default: Any = None) -> Any:
        raw = self.string(key, required=required, default=None)
        if raw is None:
            return default
        try:
            return enum_type(raw)
        except ValueError:
            allowed = ", ".join(e.value for e in enum_type)
            raise ParseError(
                f"field {key!r} must be one of: {allowed}", self.path
            ) from None

    def finish(self) -> dict[str, Any]:
        unknown = {k: v for k, v in self.obj.items() if k not in self.seen}
        if unknown and self.strict:
            names = ", ".join(sorted(unknown))
            raise ParseError(f"unknown field(s): {names}", self.path)
        return unknown


def _parse_confirmation(raw: dict, path: str, strict: bool) -> ConfirmationAnnotation:
    reader = _Reader(raw, path, strict)
    annotation = ConfirmationAnnotation(
        mode=reader.enum("mode", ConfirmationMode),
        qualitative_level=reader.enum("qualitative_level", QualitativeLevel, required=False),
        p_e_given_c=reader.number("p_e_given_c", required=False),
        p_e_given_not_c=reader.number("p_e_given_not_c", required=False),
        prior_c=reader.number("prior_c", required=False),
    )
    reader.finish()
    return annotation


def _parse_node(raw: dict, path: str, strict: bool) -> Node:
    reader = _Reader(raw, path, strict)
    node_type = reader.string("type")
    node_id = reader.string("id")
    if not node_id:
        raise ParseError("node id must be non-empty", path)
    node: Node
    if node_type == "claim":
        node = ClaimNode(
            id=node_id,
            text=reader.string("text"),
            designation=reader.enum("designation", Designation, required=False, default=Designation.ORDINARY),
            assumption_justification=reader.string("assumption_justification", required=False),
        )
    elif node_type == "defeater":
        node = DefeaterNode(
            id=node_id,
            text=reader.string("text"),
            target=reader.string("target", required=False),
            kind=reader.enum("kind", DefeatKind, required=False, default=DefeatKind.EXPLORATORY),
            status=reader.enum("status", DefeaterStatus, required=False, default=DefeaterStatus.ACTIVE),
            residual_justification=reader.string("residual_justification", required=False),
        )
    elif node_type == "evidence":
        node = EvidenceNode(
            id=node_id,
            description=reader.string("description"),
            present=reader.boolean("present", required=False, default=True),
            artifact_ref=reader.string("artifact_ref", required=False),
        )
    elif node_type == "external":
        node = ExternalSubcaseRef(
            id=node_id,
            case_ref=reader.string("case_ref"),
            imported_assessment=reader.enum("imported_assessment", Verdict, required=False),
            imported_confidence=reader.number("imported_confidence", required=False),
        )
    else:
        raise ParseError(f"unknown node type {node_type!r}", path)
    reader.finish()
    return node


def _parse_block(raw: dict, path: str, strict: bool) -> ArgumentBlock:
    reader = _Reader(raw, path, strict)
    block_id = reader.string("id")
    kind = reader.enum("kind", BlockKind)
    subchildren = reader.array("subchildren")
    sideclaims = reader.array("sideclaims", required=False)
    for i, child in enumerate(list(subchildren) + list(sideclaims)):
        if not isinstance(child, str):
            raise ParseError("child references must be strings", f"{path}.subchildren[{i}]")
    confirmation_raw = reader.mapping("confirmation", required=False)
    confirmation = (
        _parse_confirmation(confirmation_raw, f"{path}.confirmation", strict)
        if confirmation_raw
        else None
    )
    block = ArgumentBlock(
        id=block_id,
        kind=kind,
        parent=reader.string("parent"),
        subchildren=tuple(subchildren),
        sideclaims=tuple(sideclaims),
        decomposition_mode=reader.enum("decomposition_mode", DecompositionMode, required=False),
        justification=reader.string("justification", required=False, default="") or "",
        confirmation=confirmation,
    )
    reader.finish()
    return block


def parse_document(text: str | bytes, *, strict: bool = True) -> CaseDocument:
    """Parse a case document; raises ParseError with position/path info."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if not text.strip():
        raise ParseError("empty input")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    reader = _Reader(raw, "$", strict)
    version = reader.string("format_version")
    major = version.split(".", 1)[0]
    if major != FORMAT_VERSION.split(".", 1)[0]:
        raise ParseError(
            f"unsupported format_version {version!r} (expected {FORMAT_VERSION.split('.', 1)[0]}.x)",
            "$.format_version",
        )
    case_raw = reader.mapping("case")
    case_reader = _Reader(case_raw, "$.case", strict)
    name = case_reader.string("name", required=False, default="") or ""
    case_version = case_reader.string("version", required=False, default="") or ""
    top = case_reader.string("top")
    nodes: dict[str, Node] = {}
    for i, node_raw in enumerate(case_reader.array("nodes")):
        node = _parse_node(node_raw, f"$.case.nodes[{i}]", strict)
        if node.id in nodes:
            raise ParseError(f"duplicate node id {node.id!r}", f"$.case.nodes[{i}]")
        nodes[node.id] = node
    blocks: list[ArgumentBlock] = []
    seen_block_ids: set[str] = set()
    for i, block_raw in enumerate(case_reader.array("blocks", required=False)):
        block = _parse_block(block_raw, f"$.case.blocks[{i}]", strict)
        if block.id in seen_block_ids or block.id in nodes:
            raise ParseError(f"duplicate node id {block.id!r}", f"$.case.blocks[{i}]")
        seen_block_ids.add(block.id)
        blocks.append(block)
    case_extra = case_reader.finish()

    overrides_raw = reader.mapping("overrides", required=False)
    overrides: dict[str, float] = {}
    for key in sorted(overrides_raw):
        value = overrides_raw[key]
        if isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, float) or not (0.0 <= value <= 1.0):
            raise ParseError("override values must be numbers in [0, 1]", f"$.overrides.{key}")
        overrides[key] = value
    notes_raw = reader.mapping("notes", required=False)
    notes: dict[str, str] = {}
    for key in sorted(notes_raw):
        if not isinstance(notes_raw[key], str):
            raise ParseError("notes must be strings", f"$.notes.{key}")
        notes[key] = notes_raw[key]
    extra = reader.finish()
    if case_extra:
        extra["case"] = case_extra

    graph = CaseGraph(
        top=top,
        nodes=nodes,
        blocks=tuple(sorted(blocks, key=lambda b: b.id)),
        name=name,
        version=case_version,
    )
    return CaseDocument(
        format_version=version,
        case=graph,
        overrides=overrides,
        notes=notes,
        extra=extra,
    )


def parse_case(text: str | bytes, *, strict: bool = True) -> CaseGraph:
    """Parse a document and return just the graph."""
    return parse_document(text, strict=strict).case


def _confirmation_to_dict(annotation: ConfirmationAnnotation) -> dict:
    out: dict[str, Any] = {"mode": annotation.mode.value}
    if annotation.qualitative_level is not None:
        out["qualitative_level"] = annotation.qualitative_level.value
    if annotation.p_e_given_c is not None:
        out["p_e_given_c"] = annotation.p_e_given_c
    if annotation.p_e_given_not_c is not None:
        out["p_e_given_not_c"] = annotation.p_e_given_not_c
    if annotation.prior_c is not None:
        out["prior_c"] = annotation.prior_c
    return out


def _node_to_dict(node: Node) -> dict:
    out: dict[str, Any]
    if isinstance(node, ClaimNode):
        out = {"type": "claim", "id": node.id, "text": node.text}
        if node.designation is not Designation.ORDINARY:
            out["designation"] = node.designation.value
        if node.assumption_justification is not None:
            out["assumption_justification"] = node.assumption_justification
    elif isinstance(node, DefeaterNode):
        out = {"type": "defeater", "id": node.id, "text": node.text}
        if node.target is not None:
            out["target"] = node.target
        out["kind"] = node.kind.value
        out["status"] = node.status.value
        if node.residual_justification is not None:
            out["residual_justification"] = node.residual_justification
    elif isinstance(node, EvidenceNode):
        out = {
            "type": "evidence",
            "id": node.id,
            "description": node.description,
            "present": node.present,
        }
        if node.artifact_ref is not None:
            out["artifact_ref"] = node.artifact_ref
    elif isinstance(node, ExternalSubcaseRef):
        out = {"type": "external", "id": node.id, "case_ref": node.case_ref}
        if node.imported_assessment is not None:
            out["imported_assessment"] = node.imported_assessment.value
        if node.imported_confidence is not None:
            out["imported_confidence"] = node.imported_confidence
    else:  # pragma: no cover - exhaustive over Node
        raise TypeError(f"unknown node kind {type(node)!r}")
    return out


def _block_to_dict(block: ArgumentBlock) -> dict:
    out: dict[str, Any] = {
        "id": block.id,
        "kind": block.kind.value,
        "parent": block.parent,
        "subchildren": list(block.subchildren),
    }
    if block.sideclaims:
        out["sideclaims"] = list(block.sideclaims)
    if block.decomposition_mode is not None:
        out["decomposition_mode"] = block.decomposition_mode.value
    if block.justification:
        out["justification"] = block.justification
    if block.confirmation is not None:
        out["confirmation"] = _confirmation_to_dict(block.confirmation)
    return out


def document_to_dict(document: CaseDocument) -> dict:
    graph = document.case
    case_obj: dict[str, Any] = {
        "name": graph.name,
        "version": graph.version,
        "top": graph.top,
        "nodes": [_node_to_dict(graph.nodes[n]) for n in sorted(graph.nodes)],
        "blocks": [_block_to_dict(b) for b in sorted(graph.blocks, key=lambda b: b.id)],
    }
    case_extra = document.extra.get("case") if document.extra else None
    if case_extra:
        case_obj.update({k: case_extra[k] for k in sorted(case_extra)})
    out: dict[str, Any] = {
        "format_version": document.format_version,
        "case": case_obj,
    }
    if document.overrides:
        out["overrides"] = {k: document.overrides[k] for k in sorted(document.overrides)}
    if document.notes:
        out["notes"] = {k: document.notes[k] for k in sorted(document.notes)}
    for key in sorted(document.extra):
        if key != "case":
            out[key] = document.extra[key]
    return out


def serialize_document(document: CaseDocument) -> str:
    """Canonical UTF-8 text: stable field order, sorted nodes, final LF."""
    return json.dumps(document_to_dict(document), indent=2, ensure_ascii=False) + "\n"


def serialize_case(graph: CaseGraph) -> str:
    return serialize_document(CaseDocument(format_version=FORMAT_VERSION, case=graph))


# --- Graphviz rendering ----------------------------------------------------

_VERDICT_FILL = {
    Verdict.TRUE: "#c8e6c9",
    Verdict.FALSE: "#ffcdd2",
    Verdict.UNSUPPORTED: "#fff3c4",
}


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot_label(text: str, width: int = 26) -> str:
    wrapped = textwrap.fill(text, width=width)
    return _dot_escape(wrapped).replace("\n", "\\n")


def render_graphviz(
    graph: CaseGraph,
    assessments: Optional[dict[str, Verdict]] = None,
) -> str:
    """Render the case as deterministic Graphviz DOT.

    Claims and defeaters are ovals (defeaters with a red border), argument
    blocks rounded rectangles, evidence notes.  When assessments are given,
    claim-bearing nodes are filled by verdict.
    """
    lines = [
        "digraph assurance_case {",
        "  rankdir=TB;",
        '  node [fontname="Helvetica", fontsize=10];',
        '  edge [fontname="Helvetica", fontsize=9];',
    ]
    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        attrs: list[str] = []
        if isinstance(node, ClaimNode):
            attrs.append(f'label="{_dot_label(node.text)}"')
            attrs.append("shape=ellipse")
            if node.designation is Designation.ASSUMPTION:
                attrs.append("style=\"filled,dashed\"")
            else:
                attrs.append("style=filled")
            attrs.append('color="#1565c0"')
        elif isinstance(node, DefeaterNode):
            attrs.append(f'label="{_dot_label(node.text)}"')
            attrs.append("shape=ellipse")
            attrs.append("style=filled")
            attrs.append('color="#b71c1c"')
            attrs.append("penwidth=2")
            if node.status is not DefeaterStatus.ACTIVE:
                attrs.append(f'xlabel="{node.status.value}"')
        elif isinstance(node, EvidenceNode):
            marker = "" if node.present else " (absent)"
            attrs.append(f'label="{_dot_label(node.description + marker)}"')
            attrs.append("shape=note")
            attrs.append("style=filled")
            attrs.append('fillcolor="#eeeeee"' if node.present else 'fillcolor="#fafafa"')
            attrs.append('color="#455a64"')
        else:
            assert isinstance(node, ExternalSubcaseRef)
            attrs.append(f'label="{_dot_label("external: " + node.case_ref)}"')
            attrs.append("shape=folder")
            attrs.append("style=filled")
            attrs.append('color="#6a1b9a"')
        if not isinstance(node, EvidenceNode):
            verdict = (assessments or {}).get(node_id)
            if verdict is not None:
                attrs.append(f'fillcolor="{_VERDICT_FILL[verdict]}"')
            elif isinstance(node, DefeaterNode):
                attrs.append('fillcolor="#ffebee"')
            elif isinstance(node, ClaimNode):
                attrs.append('fillcolor="#e3f2fd"')
            else:
                attrs.append('fillcolor="#f3e5f5"')
        lines.append(f'  "{_dot_escape(node_id)}" [{", ".join(attrs)}];')
    for block in sorted(graph.blocks, key=lambda b: b.id):
        label = block.kind.value
        if block.kind is BlockKind.DECOMPOSITION:
            label += f" ({block.effective_mode().value})"
        lines.append(
            f'  "{_dot_escape(block.id)}" [label="{_dot_label(label)}", '
            'shape=box, style="rounded,filled", fillcolor="#ffffff", color="#37474f"];'
        )
        lines.append(f'  "{_dot_escape(block.parent)}" -> "{_dot_escape(block.id)}" [dir=none];')
        for child in block.subchildren:
            lines.append(f'  "{_dot_escape(block.id)}" -> "{_dot_escape(child)}";')
        for child in block.sideclaims:
            lines.append(f'  "{_dot_escape(block.id)}" -> "{_dot_escape(child)}" [style=dotted];')
    for defeater in graph.defeaters():
        if defeater.target is None:
            continue
        style = "dashed" if defeater.kind is DefeatKind.EXPLORATORY else "bold"
        lines.append(
            f'  "{_dot_escape(defeater.id)}" -> "{_dot_escape(defeater.target)}" '
            f'[color="#b71c1c", style={style}, arrowhead=onormal, constraint=false];'
        )
    if assessments is not None:
        lines.append(
            '  legend [shape=plaintext, label="TRUE = green   FALSE = red   UNSUPPORTED = yellow"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
