// Typed client for the contribkit HTTP service. All semantics
// (validation, flattening, statistics) live server-side; this module
// only moves JSON around.

export type Severity = "ERROR" | "WARNING";

export interface Diagnostic {
  code: string;
  severity: Severity;
  path: string;
  message: string;
}

export interface EvidenceSpan {
  sentence: string;
  section?: string;
}

export interface TripleUnit {
  kind: string | null;
  label: string;
}

export interface Triple {
  paper_id: string;
  unit: TripleUnit;
  subject: string;
  predicate: string;
  object: string;
  path: number[];
  evidence: EvidenceSpan[];
  object_evidence?: EvidenceSpan[];
  object_role?: string;
  object_table?: string;
}

export interface ValidateResponse {
  diagnostics: Diagnostic[];
}

export interface TriplifyResponse {
  triples: Triple[];
  diagnostics: Diagnostic[];
}

export interface PaperSummary {
  id: string;
  title: string;
  task: string;
}

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly diagnostics: Diagnostic[],
  ) {
    super(`service responded ${status}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "http://127.0.0.1:8040",
    private readonly fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  async validate(documentText: string): Promise<ValidateResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/validate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: documentText,
    });
    if (!response.ok) {
      throw new ServiceError(response.status, []);
    }
    return response.json();
  }

  // Resolves only for documents without blocking errors; 400/422 carry
  // the diagnostics explaining the refusal.
  async triplify(documentText: string): Promise<TriplifyResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/triplify`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: documentText,
    });
    const body = await response.json();
    if (!response.ok) {
      throw new ServiceError(response.status, body.diagnostics ?? []);
    }
    return body;
  }

  async listPapers(): Promise<PaperSummary[]> {
    const response = await this.fetchImpl(`${this.baseUrl}/papers`);
    if (!response.ok) {
      throw new ServiceError(response.status, []);
    }
    const body = await response.json();
    return body.papers;
  }
}
