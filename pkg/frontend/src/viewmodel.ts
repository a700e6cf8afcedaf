import { ApiClient, ApiError } from "./api.js";
import { colorForVerdict } from "./colors.js";
import { defeaterSubtree } from "./layout.js";
import type {
  AssessmentEntry,
  CaseDocumentPayload,
  CaseListEntry,
  MutationOp,
  StatusPayload,
  Verdict,
} from "./types.js";

/**
 * Client state for one open case.
 *
 * Verdicts — and therefore colors — come exclusively from the server: the
 * last committed AssessmentMap, overlaid with the verdict delta of the
 * pending what-if preview. The view model never evaluates an argument
 * rule; toggling anything round-trips through POST /whatif, and commit
 * replays the queued ops through POST /mutations.
 */
export class CaseViewModel {
  caseId = "";
  revision = -1;
  document: CaseDocumentPayload | null = null;
  assessments: Record<string, AssessmentEntry> = {};
  status: StatusPayload | null = null;
  confidence: Record<string, number> = {};

  selection: string | null = null;
  pendingOps: MutationOp[] = [];
  previewDelta: Record<string, Verdict | null> | null = null;
  previewStatus: StatusPayload | null = null;

  defeatersHidden = false;
  collapsedDefeaters = new Set<string>();
  inlineErrors: Record<string, string> = {};
  toasts: string[] = [];

  constructor(private readonly api: ApiClient) {}

  async listCases(): Promise<CaseListEntry[]> {
    return this.api.listCases();
  }

  async loadCase(caseId: string): Promise<void> {
    try {
      const payload = await this.api.getCase(caseId);
      this.caseId = caseId;
      this.adopt(payload);
    } catch (error) {
      this.toast(error instanceof ApiError && error.status === 404
        ? `No case named "${caseId}" on the server.`
        : `Cannot reach the server: ${String(error)}`);
      throw error;
    }
  }

  private adopt(payload: {
    revision: number;
    document: CaseDocumentPayload;
    assessments: Record<string, AssessmentEntry>;
    status: StatusPayload;
    confidence?: { entries: Record<string, { confidence: number }> };
  }): void {
    this.revision = payload.revision;
    this.document = payload.document;
    this.assessments = payload.assessments;
    this.status = payload.status;
    this.confidence = Object.fromEntries(
      Object.entries(payload.confidence?.entries ?? {}).map(([k, v]) => [k, v.confidence]),
    );
    this.pendingOps = [];
    this.previewDelta = null;
    this.previewStatus = null;
    this.inlineErrors = {};
  }

  /** Served verdict with the pending preview applied on top. */
  verdictOf(nodeId: string): Verdict | undefined {
    if (this.previewDelta && nodeId in this.previewDelta) {
      return this.previewDelta[nodeId] ?? undefined;
    }
    return this.assessments[nodeId]?.verdict;
  }

  /** Fill color for a node; a pure lookup on the server-sent verdict. */
  colorOf(nodeId: string): string {
    return colorForVerdict(this.verdictOf(nodeId));
  }

  isPreviewed(nodeId: string): boolean {
    return this.previewDelta !== null && nodeId in this.previewDelta;
  }

  /** Queue one more what-if op and fetch the preview for the whole stack. */
  async queueWhatIf(op: MutationOp): Promise<void> {
    if (!this.document) throw new Error("no case loaded");
    const attempt = [...this.pendingOps, op];
    this.inlineErrors = {};
    try {
      const preview = await this.api.whatIf(this.caseId, attempt);
      this.pendingOps = attempt;
      this.previewDelta = preview.delta.verdicts;
      this.previewStatus = preview.status;
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        const at = "id" in op && typeof op.id === "string" ? op.id : "";
        this.inlineErrors[at] = String(error.detail);
        return;
      }
      throw error;
    }
  }

  /** Commit the queued ops; on a stale revision, re-sync and keep nothing. */
  async commit(): Promise<void> {
    if (this.pendingOps.length === 0) return;
    try {
      const payload = await this.api.mutate(this.caseId, this.revision, this.pendingOps);
      this.adopt(payload);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.toast("The case changed elsewhere; reloading the latest revision.");
        this.revert();
        await this.loadCase(this.caseId);
        return;
      }
      if (error instanceof ApiError && error.status === 422) {
        this.toast(`Rejected: ${String(error.detail)}`);
        return;
      }
      throw error;
    }
  }

  revert(): void {
    this.pendingOps = [];
    this.previewDelta = null;
    this.previewStatus = null;
    this.inlineErrors = {};
  }

  toggleAllDefeaters(): void {
    this.defeatersHidden = !this.defeatersHidden;
  }

  toggleCollapse(defeaterId: string): void {
    if (this.collapsedDefeaters.has(defeaterId)) this.collapsedDefeaters.delete(defeaterId);
    else this.collapsedDefeaters.add(defeaterId);
  }

  /** Node ids not drawn: collapsed subcases, or all defeater material. */
  hiddenIds(): Set<string> {
    const hidden = new Set<string>();
    if (!this.document) return hidden;
    const defeaters = this.document.case.nodes.filter((n) => n.type === "defeater");
    for (const defeater of defeaters) {
      const collapsed = this.collapsedDefeaters.has(defeater.id);
      if (this.defeatersHidden || collapsed) {
        for (const id of defeaterSubtree(this.document, defeater.id)) hidden.add(id);
      }
      if (this.defeatersHidden) hidden.add(defeater.id);
    }
    return hidden;
  }

  select(nodeId: string | null): void {
    this.selection = nodeId;
  }

  toast(message: string): void {
    this.toasts.push(message);
    if (this.toasts.length > 4) this.toasts.shift();
  }
}
