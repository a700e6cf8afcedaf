"""HTTP API for interactive case editing and live re-assessment.

Cases live on disk as canonical case documents (the files are the
interchange format; there is no database).  Each case carries a revision
counter for optimistic concurrency: a mutation request names the revision
it was computed against and is rejected with 409 if the case has moved
on.  Mutations are applied to a copy, revalidated, and reassessed
atomically — either every op lands and the revision advances by one, or
nothing changes.  What-if requests run the same pipeline against a copy
and never touch the store.
"""

from __future__ import annotations

import threading
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .aspexport import export_program, render_program
from .caseio import (
    CaseDocument,
    ParseError,
    document_to_dict,
    parse_document,
    render_graphviz,
    serialize_document,
)
from .caseio import _parse_block, _parse_confirmation, _parse_node  # shared field parsing
from .confidence import propagate_confidence
from .model import (
    ArgumentBlock,
    DefeaterNode,
    DefeaterStatus,
    EvidenceNode,
    Node,
    has_errors,
    validate_structure,
)
from .propagate import AssessmentResult, assess, case_status

__all__ = ["CaseStore", "create_app"]


class MutationRequest(BaseModel):
    revision: int
    ops: list[dict[str, Any]] = Field(default_factory=list)


class WhatIfRequest(BaseModel):
    ops: list[dict[str, Any]] = Field(default_factory=list)


class CreateRequest(BaseModel):
    id: Optional[str] = None
    document: dict[str, Any]


class OpError(ValueError):
    """A mutation op that cannot be applied to the current graph."""


def _require(op: dict[str, Any], key: str) -> Any:
    if key not in op:
        raise OpError(f"op {op.get('op', '?')!r} requires field {key!r}")
    return op[key]


def _apply_op(document: CaseDocument, op: dict[str, Any]) -> CaseDocument:
    graph = document.case
    nodes: dict[str, Node] = dict(graph.nodes)
    blocks = list(graph.blocks)
    overrides = dict(document.overrides)
    kind = op.get("op")

    if kind == "add_node":
        raw = _require(op, "node")
        if not isinstance(raw, dict):
            raise OpError("add_node needs a node object")
        if raw.get("type") == "argument":
            payload = {k: v for k, v in raw.items() if k != "type"}
            try:
                block = _parse_block_payload(payload)
            except ParseError as exc:
                raise OpError(str(exc)) from exc
            if block.id in nodes or any(b.id == block.id for b in blocks):
                raise OpError(f"id {block.id!r} already exists")
            blocks.append(block)
        else:
            try:
                node = _parse_node(raw, "$.node", strict=True)
            except ParseError as exc:
                raise OpError(str(exc)) from exc
            if node.id in nodes or any(b.id == node.id for b in blocks):
                raise OpError(f"id {node.id!r} already exists")
            nodes[node.id] = node
    elif kind == "remove_node":
        node_id = _require(op, "id")
        if node_id in nodes:
            del nodes[node_id]
        elif any(b.id == node_id for b in blocks):
            blocks = [b for b in blocks if b.id != node_id]
        else:
            raise OpError(f"no node or block {node_id!r}")
        overrides.pop(node_id, None)
    elif kind == "set_defeater_status":
        node_id = _require(op, "id")
        node = nodes.get(node_id)
        if not isinstance(node, DefeaterNode):
            raise OpError(f"{node_id!r} is not a defeater")
        try:
            status = DefeaterStatus(_require(op, "status"))
        except ValueError:
            raise OpError(f"unknown defeater status {op.get('status')!r}") from None
        justification = op.get("justification", node.residual_justification)
        nodes[node_id] = replace(node, status=status, residual_justification=justification)
    elif kind == "set_evidence_present":
        node_id = _require(op, "id")
        node = nodes.get(node_id)
        if not isinstance(node, EvidenceNode):
            raise OpError(f"{node_id!r} is not evidence")
        present = _require(op, "present")
        if not isinstance(present, bool):
            raise OpError("present must be a boolean")
        nodes[node_id] = replace(node, present=present)
    elif kind == "set_confirmation":
        block_id = _require(op, "id")
        index = next((i for i, b in enumerate(blocks) if b.id == block_id), None)
        if index is None:
            raise OpError(f"no block {block_id!r}")
        raw = op.get("confirmation")
        if raw is None:
            confirmation = None
        else:
            try:
                confirmation = _parse_confirmation(raw, "$.confirmation", strict=True)
            except ParseError as exc:
                raise OpError(str(exc)) from exc
        blocks[index] = replace(blocks[index], confirmation=confirmation)
    elif kind == "set_override":
        node_id = _require(op, "id")
        value = op.get("value")
        if value is None:
            overrides.pop(node_id, None)
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not (0.0 <= value <= 1.0):
                raise OpError("override value must be a number in [0, 1]")
            overrides[node_id] = float(value)
    elif kind == "retarget_defeater":
        node_id = _require(op, "id")
        node = nodes.get(node_id)
        if not isinstance(node, DefeaterNode):
            raise OpError(f"{node_id!r} is not a defeater")
        target = op.get("target")
        if target is not None and not isinstance(target, str):
            raise OpError("target must be a node id or null")
        nodes[node_id] = replace(node, target=target)
    else:
        raise OpError(f"unknown op {kind!r}")

    graph = replace(graph, nodes=nodes, blocks=tuple(blocks))
    return replace(document, case=graph, overrides=overrides)


def _parse_block_payload(raw: dict[str, Any]) -> ArgumentBlock:
    return _parse_block(raw, "$.node", strict=True)


def _case_payload(document: CaseDocument, revision: int, result: AssessmentResult) -> dict:
    graph = document.case
    status = case_status(graph, result)
    confidence = propagate_confidence(graph, result.assessments, document.overrides)
    return {
        "id": graph.name,
        "revision": revision,
        "document": document_to_dict(document),
        "assessments": result.to_json_dict(),
        "status": status.to_json_dict(),
        "confidence": confidence.to_json_dict(),
    }


def _verdict_delta(before: AssessmentResult, after: AssessmentResult) -> dict[str, Optional[str]]:
    delta: dict[str, Optional[str]] = {}
    for node_id, verdict in after.assessments.items():
        if before.assessments.get(node_id) != verdict:
            delta[node_id] = verdict.value
    for node_id in before.assessments:
        if node_id not in after.assessments:
            delta[node_id] = None
    return delta


class _Session:
    def __init__(self, document: CaseDocument) -> None:
        self.document = document
        self.revision = 0
        self.lock = threading.Lock()
        self.result = assess(document.case)


class CaseStore:
    """Disk-backed case collection with per-case mutation serialization."""

    def __init__(self, data_dir: Path) -> None:
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, _Session] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.data_dir.glob("*.json")):
            try:
                document = parse_document(path.read_text("utf-8"), strict=False)
            except ParseError:
                continue
            diagnostics = validate_structure(document.case)
            if has_errors(diagnostics):
                continue
            self._sessions[path.stem] = _Session(document)

    def ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def get(self, case_id: str) -> _Session:
        with self._registry_lock:
            session = self._sessions.get(case_id)
        if session is None:
            raise KeyError(case_id)
        return session

    def create(self, case_id: str, document: CaseDocument) -> _Session:
        with self._registry_lock:
            if case_id in self._sessions:
                raise FileExistsError(case_id)
            session = _Session(document)
            self._sessions[case_id] = session
        self._persist(case_id, document)
        return session

    def _persist(self, case_id: str, document: CaseDocument) -> None:
        path = self.data_dir / f"{case_id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(serialize_document(document), "utf-8")
        tmp.replace(path)


def _reassess(document: CaseDocument, ops: list[dict[str, Any]]) -> tuple[CaseDocument, AssessmentResult]:
    for op in ops:
        if not isinstance(op, dict):
            raise OpError("each op must be an object")
        document = _apply_op(document, op)
    diagnostics = validate_structure(document.case)
    if has_errors(diagnostics):
        raise OpError("; ".join(str(d) for d in diagnostics))
    return document, assess(document.case)


def create_app(data_dir: Path | str = "./cases") -> FastAPI:
    store = CaseStore(Path(data_dir))
    app = FastAPI(title="caseval", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/cases")
    def list_cases() -> dict:
        out = []
        for case_id in store.ids():
            session = store.get(case_id)
            out.append(
                {
                    "id": case_id,
                    "name": session.document.case.name,
                    "revision": session.revision,
                }
            )
        return {"cases": out}

    @app.post("/cases", status_code=201)
    def create_case(request: CreateRequest) -> dict:
        import json as json_module

        try:
            document = parse_document(json_module.dumps(request.document), strict=False)
        except ParseError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        diagnostics = validate_structure(document.case)
        if has_errors(diagnostics):
            raise HTTPException(
                status_code=422, detail=[str(d) for d in diagnostics]
            )
        case_id = request.id or document.case.name or "case"
        try:
            session = store.create(case_id, document)
        except FileExistsError:
            raise HTTPException(status_code=409, detail=f"case {case_id!r} already exists") from None
        return _case_payload(session.document, session.revision, session.result)

    def _session_or_404(case_id: str) -> _Session:
        try:
            return store.get(case_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown case {case_id!r}") from None

    @app.get("/cases/{case_id}")
    def get_case(case_id: str) -> dict:
        session = _session_or_404(case_id)
        with session.lock:
            return _case_payload(session.document, session.revision, session.result)

    @app.post("/cases/{case_id}/mutations")
    def mutate(case_id: str, request: MutationRequest) -> dict:
        session = _session_or_404(case_id)
        with session.lock:
            if request.revision != session.revision:
                raise HTTPException(
                    status_code=409,
                    detail=f"stale revision {request.revision} (current {session.revision})",
                )
            try:
                document, result = _reassess(session.document, request.ops)
            except OpError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            delta = _verdict_delta(session.result, result)
            session.document = document
            session.result = result
            session.revision += 1
            store._persist(case_id, document)
            payload = _case_payload(document, session.revision, result)
            payload["delta"] = {"verdicts": delta}
            return payload

    @app.post("/cases/{case_id}/whatif")
    def whatif(case_id: str, request: WhatIfRequest) -> dict:
        session = _session_or_404(case_id)
        with session.lock:
            baseline_document = session.document
            baseline_result = session.result
            revision = session.revision
        try:
            document, result = _reassess(baseline_document, request.ops)
        except OpError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        status = case_status(document.case, result)
        return {
            "revision": revision,
            "delta": {"verdicts": _verdict_delta(baseline_result, result)},
            "assessments": result.to_json_dict(),
            "status": status.to_json_dict(),
        }

    @app.get("/cases/{case_id}/export")
    def export_case(case_id: str, to: str = Query(...)) -> Any:
        from fastapi.responses import PlainTextResponse

        session = _session_or_404(case_id)
        with session.lock:
            graph = session.document.case
            if to == "asp":
                return PlainTextResponse(render_program(export_program(graph)))
            if to == "dot":
                return PlainTextResponse(render_graphviz(graph, session.result.assessments))
        raise HTTPException(status_code=422, detail=f"unknown export target {to!r}")

    return app
