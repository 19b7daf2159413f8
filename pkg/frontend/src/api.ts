// Thin typed client over the engine's HTTP API. Every number the
// console displays comes from one of these responses.

import type {
  FaultDoc,
  FieldError,
  ModelsDoc,
  NodeDoc,
  SnapshotDoc,
  StatusDoc,
  TraceDoc,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface PutConfigResult {
  ok: boolean;
  doc?: Record<string, unknown>;
  detail?: string;
  fields: FieldError[];
}

export interface InjectFaultResult {
  ok: boolean;
  faultId?: string;
  error?: string;
  detail?: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new Error(`GET ${path} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  status(): Promise<StatusDoc> {
    return this.getJson("/api/status");
  }

  graph(): Promise<SnapshotDoc> {
    return this.getJson("/api/graph");
  }

  component(id: string): Promise<NodeDoc> {
    return this.getJson(`/api/component/${encodeURIComponent(id)}`);
  }

  trace(id: string): Promise<TraceDoc> {
    return this.getJson(`/api/component/${encodeURIComponent(id)}/trace`);
  }

  models(): Promise<ModelsDoc> {
    return this.getJson("/api/models");
  }

  faults(): Promise<FaultDoc[]> {
    return this.getJson<{ faults: FaultDoc[] }>("/api/simulator/faults").then((d) => d.faults);
  }

  async updateModels(): Promise<boolean> {
    const response = await this.fetchFn(this.baseUrl + "/api/pipeline/update-models", {
      method: "POST",
    });
    return response.ok;
  }

  async updateGraph(): Promise<boolean> {
    const response = await this.fetchFn(this.baseUrl + "/api/pipeline/update-graph", {
      method: "POST",
    });
    return response.ok;
  }

  getConfig(): Promise<Record<string, unknown>> {
    return this.getJson("/api/config");
  }

  async putConfig(doc: Record<string, unknown>): Promise<PutConfigResult> {
    const response = await this.fetchFn(this.baseUrl + "/api/config", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
    const body = (await response.json()) as Record<string, unknown>;
    if (response.ok) {
      return { ok: true, doc: body, fields: [] };
    }
    return {
      ok: false,
      detail: String(body.detail ?? ""),
      fields: (body.fields as FieldError[]) ?? [],
    };
  }

  async injectFault(spec: {
    target_pod: string;
    fault_kind: string;
    workers?: number;
    duration?: number | null;
  }): Promise<InjectFaultResult> {
    const response = await this.fetchFn(this.baseUrl + "/api/simulator/fault", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec),
    });
    const body = (await response.json()) as Record<string, unknown>;
    if (response.status === 201) {
      return { ok: true, faultId: String(body.fault_id) };
    }
    return { ok: false, error: String(body.error ?? ""), detail: String(body.detail ?? "") };
  }

  async clearFault(faultId: string): Promise<boolean> {
    const response = await this.fetchFn(
      this.baseUrl + `/api/simulator/fault/${encodeURIComponent(faultId)}`,
      { method: "DELETE" },
    );
    return response.status === 204;
  }
}
