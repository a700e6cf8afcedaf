"""Convenience builder for assembling case graphs in code."""

from __future__ import annotations

from typing import Optional, Sequence

from .model import (
    ArgumentBlock,
    BlockKind,
    CaseGraph,
    ClaimNode,
    ConfirmationAnnotation,
    DecompositionMode,
    DefeatKind,
    DefeaterNode,
    DefeaterStatus,
    Designation,
    EvidenceNode,
    ExternalSubcaseRef,
    Node,
    Verdict,
)


class CaseBuilder:
    """Accumulates nodes and blocks, then freezes them into a CaseGraph.

    Ids may be supplied explicitly or auto-generated (c1, d1, e1, ...).
    The builder does not validate; run validate_structure on the result.
    """

    def __init__(self, name: str = "", version: str = "0") -> None:
        self.name = name
        self.version = version
        self._nodes: dict[str, Node] = {}
        self._blocks: list[ArgumentBlock] = []
        self._top: Optional[str] = None
        self._counter = 0

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    def get(self, node_id: str) -> Optional[Node]:
        return self._nodes.get(node_id)

    def _fresh(self, prefix: str) -> str:
        while True:
            self._counter += 1
            candidate = f"{prefix}{self._counter}"
            if candidate not in self._nodes:
                return candidate

    def _add(self, node: Node) -> str:
        if node.id in self._nodes:
            raise ValueError(f"duplicate node id {node.id!r}")
        self._nodes[node.id] = node
        return node.id

    def claim(self, text: str, *, id: Optional[str] = None) -> str:
        return self._add(ClaimNode(id=id or self._fresh("c"), text=text))

    def assumption(self, text: str, justification: str = "accepted without further support", *, id: Optional[str] = None) -> str:
        return self._add(
            ClaimNode(
                id=id or self._fresh("a"),
                text=text,
                designation=Designation.ASSUMPTION,
                assumption_justification=justification,
            )
        )

    def evidence(self, description: str, *, present: bool = True, artifact_ref: Optional[str] = None, id: Optional[str] = None) -> str:
        return self._add(
            EvidenceNode(
                id=id or self._fresh("e"),
                description=description,
                present=present,
                artifact_ref=artifact_ref,
            )
        )

    def external(self, case_ref: str, *, imported: Optional[Verdict] = None, confidence: Optional[float] = None, id: Optional[str] = None) -> str:
        return self._add(
            ExternalSubcaseRef(
                id=id or self._fresh("x"),
                case_ref=case_ref,
                imported_assessment=imported,
                imported_confidence=confidence,
            )
        )

    def defeater(
        self,
        text: str,
        target: Optional[str],
        *,
        kind: DefeatKind = DefeatKind.EXPLORATORY,
        status: DefeaterStatus = DefeaterStatus.ACTIVE,
        residual_justification: Optional[str] = None,
        id: Optional[str] = None,
    ) -> str:
        return self._add(
            DefeaterNode(
                id=id or self._fresh("d"),
                text=text,
                target=target,
                kind=kind,
                status=status,
                residual_justification=residual_justification,
            )
        )

    def block(
        self,
        kind: BlockKind,
        parent: str,
        subchildren: Sequence[str],
        *,
        sideclaims: Sequence[str] = (),
        mode: Optional[DecompositionMode] = None,
        justification: str = "",
        confirmation: Optional[ConfirmationAnnotation] = None,
        id: Optional[str] = None,
    ) -> str:
        block_id = id or self._fresh("b")
        if any(b.id == block_id for b in self._blocks) or block_id in self._nodes:
            raise ValueError(f"duplicate block id {block_id!r}")
        self._blocks.append(
            ArgumentBlock(
                id=block_id,
                kind=kind,
                parent=parent,
                subchildren=tuple(subchildren),
                sideclaims=tuple(sideclaims),
                decomposition_mode=mode,
                justification=justification,
                confirmation=confirmation,
            )
        )
        return block_id

    def incorporate_evidence(self, parent: str, evidence_id: str, *, justification: str = "", id: Optional[str] = None) -> str:
        return self.block(
            BlockKind.EVIDENCE_INCORPORATION,
            parent,
            [evidence_id],
            justification=justification,
            id=id,
        )

    def top(self, node_id: str) -> None:
        self._top = node_id

    def finish(self) -> CaseGraph:
        if self._top is None:
            raise ValueError("no top claim designated")
        return CaseGraph(
            top=self._top,
            nodes=dict(self._nodes),
            blocks=tuple(self._blocks),
            name=self.name,
            version=self.version,
        )
