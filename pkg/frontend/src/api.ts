import type {
  CaseDocumentPayload,
  CaseListEntry,
  CasePayload,
  MutationOp,
  WhatIfResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`API error ${status}: ${typeof detail === "string" ? detail : JSON.stringify(detail)}`);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail: unknown = response.statusText;
    try {
      const body = (await response.json()) as { detail?: unknown };
      if (body && body.detail !== undefined) detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

/** Thin typed client over the caseval HTTP API; the UI's only data source. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async listCases(): Promise<CaseListEntry[]> {
    const body = await asJson<{ cases: CaseListEntry[] }>(
      await this.fetchImpl(this.url("/cases")),
    );
    return body.cases;
  }

  async getCase(caseId: string): Promise<CasePayload> {
    return asJson(await this.fetchImpl(this.url(`/cases/${encodeURIComponent(caseId)}`)));
  }

  async createCase(caseId: string | null, document: CaseDocumentPayload): Promise<CasePayload> {
    return asJson(
      await this.fetchImpl(this.url("/cases"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ id: caseId, document }),
      }),
    );
  }

  async mutate(caseId: string, revision: number, ops: MutationOp[]): Promise<CasePayload> {
    return asJson(
      await this.fetchImpl(this.url(`/cases/${encodeURIComponent(caseId)}/mutations`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ revision, ops }),
      }),
    );
  }

  async whatIf(caseId: string, ops: MutationOp[]): Promise<WhatIfResponse> {
    return asJson(
      await this.fetchImpl(this.url(`/cases/${encodeURIComponent(caseId)}/whatif`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ ops }),
      }),
    );
  }

  exportUrl(caseId: string, target: "asp" | "dot"): string {
    return this.url(`/cases/${encodeURIComponent(caseId)}/export?to=${target}`);
  }
}
