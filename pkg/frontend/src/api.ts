/** Typed client for the decompiler service HTTP API. */

export const VIEWS = [
  "bytecode",
  "disassembly",
  "low_level",
  "interface",
  "decompiled",
] as const;

export type ViewName = (typeof VIEWS)[number];

export interface JobProgress {
  done: number;
  total: number;
}

export interface Job {
  job_id: string;
  package_id: string;
  state: "queued" | "fetching" | "decompiling" | "verifying" | "complete" | "failed";
  progress: JobProgress;
  reason: string;
}

export interface UploadModule {
  low_level: string;
  disassembly?: string;
  bytecode_b64?: string;
  name?: string;
}

export interface ApiError {
  error: string;
  detail?: string;
}

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, detail?: string) {
    super(detail ? `${code}: ${detail}` : code);
    this.code = code;
    this.status = status;
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(`${this.base}${path}`, init);
    if (!resp.ok) {
      let code = `HTTP${resp.status}`;
      let detail: string | undefined;
      try {
        const body = (await resp.json()) as ApiError;
        if (body.error) {
          code = body.error;
          detail = body.detail;
        }
      } catch {
        // non-JSON error body: keep the status code
      }
      throw new ServiceError(resp.status, code, detail);
    }
    return resp;
  }

  async submitUploads(modules: UploadModule[], arm?: string): Promise<Job> {
    const body: Record<string, unknown> = { modules };
    if (arm) body.config = { arm };
    const resp = await this.request("/api/decompile", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await resp.json()) as Job;
  }

  async submitPackage(packageId: string, arm?: string): Promise<Job> {
    const body: Record<string, unknown> = { package_id: packageId };
    if (arm) body.config = { arm };
    const resp = await this.request("/api/decompile", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await resp.json()) as Job;
  }

  async job(jobId: string): Promise<Job> {
    const resp = await this.request(`/api/jobs/${jobId}`);
    return (await resp.json()) as Job;
  }

  async modules(packageId: string): Promise<string[]> {
    const resp = await this.request(`/api/packages/${packageId}/modules`);
    const body = (await resp.json()) as { modules: string[] };
    return body.modules;
  }

  async view(packageId: string, module: string, view: ViewName): Promise<string> {
    const resp = await this.request(
      `/api/packages/${packageId}/modules/${module}/views/${view}`,
    );
    return resp.text();
  }

  async redecompile(packageId: string, module: string, fn: string, seed?: number): Promise<Job> {
    const resp = await this.request(
      `/api/packages/${packageId}/modules/${module}/functions/${fn}/redecompile`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(seed === undefined ? {} : { seed }),
      },
    );
    return (await resp.json()) as Job;
  }
}

/** `0x` + 64 hex chars; the service rejects anything else. */
export function isValidPackageId(id: string): boolean {
  return /^0x[0-9a-fA-F]{64}$/.test(id);
}
