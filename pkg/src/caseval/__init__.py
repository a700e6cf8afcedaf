"""caseval: assurance-case evaluation with defeaters.

A case graph of claims, argument blocks, evidence, and defeaters is
assessed with a three-valued logic (TRUE / FALSE / UNSUPPORTED); the same
graph can be translated to a strict-negation clause program whose least
model serves as an independent oracle.  Confidence propagates separately
as a sum of doubts.
"""

from __future__ import annotations

from importlib import resources

from .aspexport import Atom, Clause, ClauseProgram, Literal, export_program, mangle_atom, render_program
from .build import CaseBuilder
from .caseio import (
    FORMAT_VERSION,
    CaseDocument,
    ParseError,
    parse_case,
    parse_document,
    render_graphviz,
    serialize_case,
    serialize_document,
)
from .confidence import (
    ConfidenceConfig,
    ConfidenceEntry,
    ConfidenceReport,
    good_measure,
    posterior_confidence,
    propagate_confidence,
)
from .generate import random_case, random_positive_tree
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
    Diagnostic,
    EvidenceNode,
    ExternalSubcaseRef,
    QualitativeLevel,
    Severity,
    Verdict,
    affected_claim,
    attachment_points,
    validate_structure,
)
from .oracle import InconsistentProgramError, LiteralModel, least_model, oracle_assess, parse_program
from .propagate import (
    DEFAULT_THRESHOLDS,
    AssessmentResult,
    ConfirmationThresholds,
    InvalidCaseError,
    StatusReport,
    assess,
    case_status,
    classify_confirmation,
    replay_trace,
)

__version__ = "0.1.0"

FIXTURE_NAMES = ("lightbulb", "eliminative_light")


def load_fixture(name: str) -> str:
    """Return the text of a bundled example case document."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    return (
        resources.files(__name__).joinpath("fixtures", f"{name}.json").read_text("utf-8")
    )
