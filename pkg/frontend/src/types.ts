/** Payload shapes of the caseval HTTP API. */

export type Verdict = "TRUE" | "FALSE" | "UNSUPPORTED";

export type NodeKind = "claim" | "defeater" | "evidence" | "external";

export interface NodePayload {
  type: NodeKind;
  id: string;
  text?: string;
  designation?: "ordinary" | "assumption";
  assumption_justification?: string;
  target?: string | null;
  kind?: "exploratory" | "exact";
  status?: "active" | "addressed" | "residual_risk";
  residual_justification?: string;
  description?: string;
  present?: boolean;
  artifact_ref?: string;
  case_ref?: string;
  imported_assessment?: Verdict;
  imported_confidence?: number;
}

export interface BlockPayload {
  id: string;
  kind: string;
  parent: string;
  subchildren: string[];
  sideclaims?: string[];
  decomposition_mode?: "conjunctive" | "disjunctive";
  justification?: string;
  confirmation?: Record<string, unknown>;
}

export interface CaseDocumentPayload {
  format_version: string;
  case: {
    name: string;
    version: string;
    top: string;
    nodes: NodePayload[];
    blocks: BlockPayload[];
  };
  overrides?: Record<string, number>;
  notes?: Record<string, string>;
}

export interface AssessmentEntry {
  verdict: Verdict;
  rule: string;
}

export interface StatusReason {
  kind: string;
  node: string;
  message: string;
}

export interface StatusPayload {
  closed: boolean;
  reasons: StatusReason[];
}

export interface ConfidencePayload {
  entries: Record<string, { confidence: number; doubt: number; source: string }>;
  warnings: string[];
}

export interface VerdictDelta {
  verdicts: Record<string, Verdict | null>;
}

export interface CasePayload {
  id: string;
  revision: number;
  document: CaseDocumentPayload;
  assessments: Record<string, AssessmentEntry>;
  status: StatusPayload;
  confidence: ConfidencePayload;
  delta?: VerdictDelta;
}

export interface WhatIfResponse {
  revision: number;
  delta: VerdictDelta;
  assessments: Record<string, AssessmentEntry>;
  status: StatusPayload;
}

export interface CaseListEntry {
  id: string;
  name: string;
  revision: number;
}

export type MutationOp =
  | { op: "add_node"; node: NodePayload | ({ type: "argument" } & BlockPayload) }
  | { op: "remove_node"; id: string }
  | { op: "set_defeater_status"; id: string; status: string; justification?: string }
  | { op: "set_evidence_present"; id: string; present: boolean }
  | { op: "set_confirmation"; id: string; confirmation: Record<string, unknown> | null }
  | { op: "set_override"; id: string; value: number | null }
  | { op: "retarget_defeater"; id: string; target: string | null };
