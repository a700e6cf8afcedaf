"""Argument-graph data model and structural well-formedness checks.

An assurance case is a DAG of claims, argument blocks, evidence, and
external subcase references, decorated with defeaters that record doubts
about other nodes.  Graphs are immutable values: every node and block is a
frozen dataclass, and "mutation" means building a new graph.  All checks
here are pure functions of the graph.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union


class Designation(str, enum.Enum):
    ORDINARY = "ordinary"
    ASSUMPTION = "assumption"


class DefeatKind(str, enum.Enum):
    EXPLORATORY = "exploratory"
    EXACT = "exact"


class DefeaterStatus(str, enum.Enum):
    ACTIVE = "active"
    ADDRESSED = "addressed"
    RESIDUAL_RISK = "residual_risk"


class BlockKind(str, enum.Enum):
    CONCRETION = "concretion"
    SUBSTITUTION = "substitution"
    DECOMPOSITION = "decomposition"
    CALCULATION = "calculation"
    EVIDENCE_INCORPORATION = "evidence_incorporation"


class DecompositionMode(str, enum.Enum):
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"


class Verdict(str, enum.Enum):
    """Three-valued assessment of a claim-bearing node."""

    TRUE = "TRUE"
    FALSE = "FALSE"
    UNSUPPORTED = "UNSUPPORTED"


class ConfirmationMode(str, enum.Enum):
    QUALITATIVE = "qualitative"
    NUMERIC = "numeric"


class QualitativeLevel(str, enum.Enum):
    STRONGLY_POSITIVE = "strongly_positive"
    NEUTRAL = "neutral"
    STRONGLY_NEGATIVE = "strongly_negative"


@dataclass(frozen=True)
class ConfirmationAnnotation:
    """How strongly evidence discriminates a useful claim from its negation.

    Numeric mode carries the two likelihoods P(E|C) and P(E|not C) (and an
    optional prior for C); qualitative mode carries a judged level directly.
    """

    mode: ConfirmationMode
    qualitative_level: Optional[QualitativeLevel] = None
    p_e_given_c: Optional[float] = None
    p_e_given_not_c: Optional[float] = None
    prior_c: Optional[float] = None


@dataclass(frozen=True)
class ClaimNode:
    id: str
    text: str
    designation: Designation = Designation.ORDINARY
    assumption_justification: Optional[str] = None


@dataclass(frozen=True)
class DefeaterNode:
    """A doubt or counter-claim pointing at another node.

    ``target`` may be None while the defeater is being placed (detached);
    detached defeaters take no part in propagation.  Exact defeaters assert
    the precise negation of the claim they point to.
    """

    id: str
    text: str
    target: Optional[str] = None
    kind: DefeatKind = DefeatKind.EXPLORATORY
    status: DefeaterStatus = DefeaterStatus.ACTIVE
    residual_justification: Optional[str] = None


@dataclass(frozen=True)
class EvidenceNode:
    id: str
    description: str
    present: bool = True
    artifact_ref: Optional[str] = None


@dataclass(frozen=True)
class ExternalSubcaseRef:
    """Reference to a case developed elsewhere; inherits its delivered verdict."""

    id: str
    case_ref: str
    imported_assessment: Optional[Verdict] = None
    imported_confidence: Optional[float] = None


@dataclass(frozen=True)
class ArgumentBlock:
    """One reasoning step linking a parent claim/defeater to its support.

    ``subchildren`` are the subclaims (or, for evidence incorporation,
    exactly one evidence node); ``sideclaims`` provide side conditions.
    """

    id: str
    kind: BlockKind
    parent: str
    subchildren: tuple[str, ...]
    sideclaims: tuple[str, ...] = ()
    decomposition_mode: Optional[DecompositionMode] = None
    justification: str = ""
    confirmation: Optional[ConfirmationAnnotation] = None

    def effective_mode(self) -> DecompositionMode:
        """Decomposition mode with the conjunctive default applied."""
        return self.decomposition_mode or DecompositionMode.CONJUNCTIVE


Node = Union[ClaimNode, DefeaterNode, EvidenceNode, ExternalSubcaseRef]

#: Node kinds that carry a three-valued verdict.
CLAIM_BEARING = (ClaimNode, DefeaterNode, ExternalSubcaseRef)


@dataclass(frozen=True)
class CaseGraph:
    """A whole argument: nodes, blocks, and the designated top claim.

    Blocks are kept sorted by id so that equal graphs compare equal no
    matter the construction order.
    """

    top: str
    nodes: dict[str, Node]
    blocks: tuple[ArgumentBlock, ...]
    name: str = ""
    version: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "blocks", tuple(sorted(self.blocks, key=lambda b: b.id))
        )

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def block_by_id(self, block_id: str) -> Optional[ArgumentBlock]:
        for block in self.blocks:
            if block.id == block_id:
                return block
        return None

    def block_of(self, parent_id: str) -> Optional[ArgumentBlock]:
        """The (at most one) block supporting a claim or defeater."""
        for block in self.blocks:
            if block.parent == parent_id:
                return block
        return None

    def claim_bearing_ids(self) -> list[str]:
        return sorted(
            node_id
            for node_id, node in self.nodes.items()
            if isinstance(node, CLAIM_BEARING)
        )

    def defeaters(self) -> list[DefeaterNode]:
        return sorted(
            (n for n in self.nodes.values() if isinstance(n, DefeaterNode)),
            key=lambda d: d.id,
        )

    def defeaters_targeting(self, node_id: str) -> list[DefeaterNode]:
        return [d for d in self.defeaters() if d.target == node_id]

    def active_exact_defeater(self, node_id: str) -> Optional[DefeaterNode]:
        """The active exact defeater pointing directly at ``node_id``, if any."""
        for d in self.defeaters_targeting(node_id):
            if d.kind is DefeatKind.EXACT and d.status is DefeaterStatus.ACTIVE:
                return d
        return None

    def with_nodes(self, nodes: dict[str, Node]) -> "CaseGraph":
        return replace(self, nodes=nodes)


class Severity(str, enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    node: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value} {self.node}: {self.message}"


class StructureError(ValueError):
    """Raised when an operation needs structure the graph does not have."""


def _blocks_incorporating(graph: CaseGraph, evidence_id: str) -> list[ArgumentBlock]:
    return [b for b in graph.blocks if evidence_id in b.subchildren]


def affected_claim(graph: CaseGraph, defeater_id: str) -> str:
    """Resolve the claim whose verdict a defeater can override.

    The target itself when it is claim-like (claim, defeater, or external
    subcase reference); the parent claim/defeater when the target is an
    argument block; for an evidence node, the parent of the block that
    incorporates it.
    """
    node = graph.nodes.get(defeater_id)
    if not isinstance(node, DefeaterNode):
        raise StructureError(f"{defeater_id} is not a defeater")
    if node.target is None:
        raise StructureError(f"defeater {defeater_id} is detached (no target)")
    target = node.target
    if target in graph.nodes:
        hit = graph.nodes[target]
        if isinstance(hit, CLAIM_BEARING):
            return target
        if isinstance(hit, EvidenceNode):
            owners = _blocks_incorporating(graph, target)
            if len(owners) != 1:
                raise StructureError(
                    f"evidence {target} is incorporated by {len(owners)} blocks; "
                    "affected claim is ambiguous"
                )
            return owners[0].parent
        raise StructureError(f"unknown node kind for {target}")
    block = graph.block_by_id(target)
    if block is not None:
        return block.parent
    raise StructureError(f"defeater {defeater_id} targets unknown node {target}")


def dependency_edges(graph: CaseGraph) -> list[tuple[str, str]]:
    """Edges (dependent, dependency) of the support+defeat relation.

    A parent depends on every child of its block; an affected claim depends
    on each defeater that points into it.  Dangling references are skipped
    here and reported by validate_structure.
    """
    edges: list[tuple[str, str]] = []
    for block in sorted(graph.blocks, key=lambda b: b.id):
        for child in tuple(block.subchildren) + tuple(block.sideclaims):
            if block.parent in graph.nodes and child in graph.nodes:
                edges.append((block.parent, child))
    for defeater in graph.defeaters():
        if defeater.target is None:
            continue
        try:
            affected = affected_claim(graph, defeater.id)
        except StructureError:
            continue
        edges.append((affected, defeater.id))
    return edges


def _cycle_participants(node_ids: Iterable[str], edges: list[tuple[str, str]]) -> list[str]:
    """Nodes left after repeatedly stripping dependency-free nodes (Kahn)."""
    remaining = set(node_ids)
    dep_count = {n: 0 for n in remaining}
    dependents: dict[str, list[str]] = {n: [] for n in remaining}
    for dependent, dependency in edges:
        if dependent in remaining and dependency in remaining:
            dep_count[dependent] += 1
            dependents[dependency].append(dependent)
    queue = sorted(n for n, c in dep_count.items() if c == 0)
    while queue:
        n = queue.pop()
        remaining.discard(n)
        for m in dependents[n]:
            dep_count[m] -= 1
            if dep_count[m] == 0:
                queue.append(m)
    return sorted(remaining)


def topological_order(graph: CaseGraph) -> list[str]:
    """All node ids ordered so dependencies precede dependents.

    Ties are broken by node id, so the order is deterministic.  Raises
    StructureError on a cyclic graph.
    """
    ids = sorted(graph.nodes)
    edges = dependency_edges(graph)
    dep_count = {n: 0 for n in ids}
    dependents: dict[str, list[str]] = {n: [] for n in ids}
    for dependent, dependency in edges:
        dep_count[dependent] += 1
        dependents[dependency].append(dependent)
    ready = [n for n, c in dep_count.items() if c == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for m in sorted(dependents[n]):
            dep_count[m] -= 1
            if dep_count[m] == 0:
                heapq.heappush(ready, m)
    if len(order) != len(ids):
        raise StructureError("support cycle: graph has no topological order")
    return order


def _probability_ok(value: Optional[float], lo_open: bool, hi_closed: bool) -> bool:
    if value is None:
        return True
    if lo_open and not value > 0.0:
        return False
    if not lo_open and not value >= 0.0:
        return False
    if hi_closed and not value <= 1.0:
        return False
    if not hi_closed and not value < 1.0:
        return False
    return True


def validate_structure(graph: CaseGraph) -> list[Diagnostic]:
    """Check every structural invariant; return ordered diagnostics.

    Empty result means the graph is well formed (a few permitted-but-unusual
    constructions are reported at WARNING severity and do not invalidate).
    Deterministic: diagnostics are sorted by node id then message.
    """
    out: list[Diagnostic] = []

    def error(node: str, message: str) -> None:
        out.append(Diagnostic(Severity.ERROR, node, message))

    def warn(node: str, message: str) -> None:
        out.append(Diagnostic(Severity.WARNING, node, message))

    block_ids = [b.id for b in graph.blocks]
    all_ids = set(graph.nodes) | set(block_ids)

    for node_id in graph.nodes:
        if not node_id:
            error(node_id, "empty node id")
    seen_blocks: set[str] = set()
    for block in graph.blocks:
        if not block.id:
            error(block.id, "empty block id")
        if block.id in graph.nodes:
            error(block.id, "block id collides with a node id")
        if block.id in seen_blocks:
            error(block.id, "duplicate block id")
        seen_blocks.add(block.id)

    # Per-node invariants.
    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        if isinstance(node, ClaimNode):
            if node.designation is Designation.ASSUMPTION:
                if graph.block_of(node_id) is not None:
                    error(node_id, "assumption claim must be a leaf (it has a supporting block)")
                if not (node.assumption_justification or "").strip():
                    error(node_id, "assumption claim requires a justification")
        elif isinstance(node, DefeaterNode):
            if node.target is None:
                warn(node_id, "detached defeater (no target); excluded from propagation")
            else:
                if node.target == node_id:
                    error(node_id, "defeater targets itself")
                elif node.target not in all_ids:
                    error(node_id, f"defeater targets unknown node {node.target!r}")
                else:
                    target = graph.nodes.get(node.target)
                    if node.kind is DefeatKind.EXACT and not isinstance(
                        target, (ClaimNode, DefeaterNode)
                    ):
                        error(node_id, "exact defeater must point at a claim or defeater")
                    if isinstance(target, ExternalSubcaseRef):
                        warn(node_id, "defeater targets an external subcase reference; treated as claim-like")
                    if isinstance(target, EvidenceNode):
                        owners = _blocks_incorporating(graph, node.target)
                        if len(owners) != 1:
                            error(
                                node_id,
                                "defeater targets evidence incorporated by "
                                f"{len(owners)} blocks; affected claim is ambiguous",
                            )
            if node.status is DefeaterStatus.RESIDUAL_RISK:
                if graph.block_of(node_id) is not None:
                    error(node_id, "residual-risk defeater must have no subcase")
                if not (node.residual_justification or "").strip():
                    error(node_id, "residual-risk defeater requires a justification")
        elif isinstance(node, ExternalSubcaseRef):
            if not _probability_ok(node.imported_confidence, lo_open=False, hi_closed=True):
                error(node_id, "imported confidence must lie in [0, 1]")

    # Block invariants.
    parents_seen: dict[str, str] = {}
    for block in sorted(graph.blocks, key=lambda b: b.id):
        parent = graph.nodes.get(block.parent)
        if block.parent not in graph.nodes:
            error(block.id, f"block parent {block.parent!r} does not exist")
        elif not isinstance(parent, (ClaimNode, DefeaterNode)):
            error(block.id, "block parent must be a claim or defeater")
        if block.parent in parents_seen:
            error(block.id, f"{block.parent} is already supported by block {parents_seen[block.parent]}")
        else:
            parents_seen[block.parent] = block.id
        for child in tuple(block.subchildren) + tuple(block.sideclaims):
            if child not in graph.nodes:
                error(block.id, f"block references unknown node {child!r}")
        if block.kind is BlockKind.EVIDENCE_INCORPORATION:
            if len(block.subchildren) != 1 or not isinstance(
                graph.nodes.get(block.subchildren[0]), EvidenceNode
            ):
                error(block.id, "evidence incorporation needs exactly one evidence subchild")
            if block.sideclaims:
                error(block.id, "evidence incorporation blocks do not take sideclaims")
        else:
            if not block.subchildren:
                error(block.id, "block has no subclaims")
            for child in block.subchildren:
                if isinstance(graph.nodes.get(child), EvidenceNode):
                    error(block.id, f"evidence {child} may only feed an evidence incorporation block")
        for child in block.sideclaims:
            if isinstance(graph.nodes.get(child), EvidenceNode):
                error(block.id, f"evidence {child} cannot be a sideclaim")
        if block.decomposition_mode is not None and block.kind is not BlockKind.DECOMPOSITION:
            error(block.id, "decomposition_mode is only meaningful on decomposition blocks")
        if block.confirmation is not None:
            if block.kind is not BlockKind.SUBSTITUTION:
                error(block.id, "confirmation annotations belong on substitution blocks")
            elif len(block.subchildren) != 1:
                error(block.id, "confirmation requires a single measured subclaim")
            ann = block.confirmation
            if ann is not None:
                if ann.mode is ConfirmationMode.NUMERIC:
                    if ann.p_e_given_c is None or ann.p_e_given_not_c is None:
                        error(block.id, "numeric confirmation requires both likelihoods")
                    if not _probability_ok(ann.p_e_given_c, lo_open=True, hi_closed=True):
                        error(block.id, "p_e_given_c must lie in (0, 1]")
                    if not _probability_ok(ann.p_e_given_not_c, lo_open=True, hi_closed=True):
                        error(block.id, "p_e_given_not_c must lie in (0, 1]")
                    if ann.prior_c is not None and not (0.0 < ann.prior_c < 1.0):
                        error(block.id, "prior_c must lie in (0, 1)")
                else:
                    if ann.qualitative_level is None:
                        error(block.id, "qualitative confirmation requires a level")

    # Evidence sharing: each evidence node belongs to at most one block.
    for node_id in sorted(graph.nodes):
        if isinstance(graph.nodes[node_id], EvidenceNode):
            owners = _blocks_incorporating(graph, node_id)
            if len(owners) > 1:
                error(node_id, f"evidence incorporated by {len(owners)} blocks; must be exactly one")

    # Exact defeaters: at most one active per target; chained targets flagged.
    exact_by_target: dict[str, list[str]] = {}
    for defeater in graph.defeaters():
        if (
            defeater.kind is DefeatKind.EXACT
            and defeater.status is DefeaterStatus.ACTIVE
            and defeater.target is not None
        ):
            exact_by_target.setdefault(defeater.target, []).append(defeater.id)
    for target, exacts in sorted(exact_by_target.items()):
        if len(exacts) > 1:
            for extra in exacts[1:]:
                error(extra, f"second active exact defeater on {target} (only one is allowed)")
        target_node = graph.nodes.get(target)
        if isinstance(target_node, ClaimNode) and graph.block_of(target) is not None:
            warn(exacts[0], f"target {target} has a subcase; it is ignored while the exact defeater is active")
    for defeater in graph.defeaters():
        if (
            defeater.kind is DefeatKind.EXPLORATORY
            and defeater.status is DefeaterStatus.ACTIVE
            and defeater.target is not None
            and defeater.target in exact_by_target
            and isinstance(graph.nodes.get(defeater.target), DefeaterNode)
        ):
            warn(defeater.id, f"doubt raised against exactly-defeated defeater {defeater.target}")

    # Top claim.
    top = graph.nodes.get(graph.top)
    if top is None:
        error(graph.top, "top claim does not exist")
    elif not isinstance(top, ClaimNode):
        error(graph.top, "top of the case must be a claim")
    else:
        for block in graph.blocks:
            if graph.top in block.subchildren or graph.top in block.sideclaims:
                error(graph.top, f"top claim may not be a child of block {block.id}")

    # Acyclicity over the union of support and defeat dependencies.
    cyclic = _cycle_participants(graph.nodes.keys(), dependency_edges(graph))
    if cyclic:
        error(cyclic[0], "support cycle through " + ", ".join(cyclic))

    return sorted(out, key=lambda d: (d.node, d.severity.value, d.message))


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def _transitive_dependencies(edges: list[tuple[str, str]], start: str) -> set[str]:
    by_dependent: dict[str, list[str]] = {}
    for dependent, dependency in edges:
        by_dependent.setdefault(dependent, []).append(dependency)
    seen: set[str] = set()
    stack = [start]
    while stack:
        n = stack.pop()
        for dep in by_dependent.get(n, ()):
            if dep not in seen:
                seen.add(dep)
                stack.append(dep)
    return seen


def attachment_points(graph: CaseGraph, defeater_id: str) -> set[str]:
    """Node ids a defeater may point at without creating a dependency cycle.

    The defeater's current target (if any) is disregarded, so the result is
    also the legal retarget set.  Exact defeaters are further restricted to
    claims and defeaters that do not already carry an active exact defeater.
    """
    node = graph.nodes.get(defeater_id)
    if not isinstance(node, DefeaterNode):
        raise StructureError(f"{defeater_id} is not a defeater")
    detached = graph.with_nodes(
        {**graph.nodes, defeater_id: replace(node, target=None)}
    )
    edges = dependency_edges(detached)
    closure = _transitive_dependencies(edges, defeater_id) | {defeater_id}

    candidates: set[str] = set()
    for candidate in sorted(graph.nodes) + sorted(b.id for b in graph.blocks):
        if candidate == defeater_id:
            continue
        if node.kind is DefeatKind.EXACT:
            hit = graph.nodes.get(candidate)
            if not isinstance(hit, (ClaimNode, DefeaterNode)):
                continue
            existing = detached.active_exact_defeater(candidate)
            if existing is not None:
                continue
        probe = detached.with_nodes(
            {**detached.nodes, defeater_id: replace(node, target=candidate)}
        )
        try:
            affected = affected_claim(probe, defeater_id)
        except StructureError:
            continue
        if affected in closure:
            continue
        candidates.add(candidate)
    return candidates
