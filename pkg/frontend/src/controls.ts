// Operator controls. State here only ever reflects confirmed server
// responses: no optimistic rendering anywhere.

import type { ApiClient, InjectFaultResult } from "./api.js";
import type { ConsoleEvent, FaultDoc, FieldError } from "./types.js";

export class FaultPanel {
  active: FaultDoc[] = [];
  lastError: string | null = null;
  visible = false;

  constructor(private readonly api: ApiClient) {}

  setMode(mode: string): void {
    this.visible = mode === "simulate";
  }

  async refresh(): Promise<void> {
    if (!this.visible) return;
    this.active = await this.api.faults();
  }

  async inject(spec: {
    target_pod: string;
    fault_kind: string;
    workers?: number;
  }): Promise<InjectFaultResult> {
    const result = await this.api.injectFault(spec);
    this.lastError = result.ok ? null : result.detail ?? result.error ?? "fault rejected";
    if (result.ok) {
      await this.refresh(); // list only what the server confirms
    }
    return result;
  }

  async clear(faultId: string): Promise<boolean> {
    const ok = await this.api.clearFault(faultId);
    if (ok) {
      await this.refresh();
    }
    return ok;
  }
}

export class RetrainButton {
  /** disabled between the trigger and the model_retrained event */
  waiting = false;

  constructor(private readonly api: ApiClient) {}

  async click(): Promise<boolean> {
    if (this.waiting) return false;
    const accepted = await this.api.updateModels();
    if (accepted) {
      this.waiting = true;
    }
    return accepted;
  }

  onEvent(event: ConsoleEvent): void {
    if (event.event === "model_retrained") {
      this.waiting = false;
    }
  }
}

export class ConfigEditor {
  doc: Record<string, unknown> | null = null;
  fieldErrors: FieldError[] = [];
  detail: string | null = null;

  constructor(private readonly api: ApiClient) {}

  async load(): Promise<void> {
    this.doc = await this.api.getConfig();
    this.fieldErrors = [];
    this.detail = null;
  }

  async save(doc: Record<string, unknown>): Promise<boolean> {
    const result = await this.api.putConfig(doc);
    if (result.ok) {
      this.doc = result.doc ?? doc;
      this.fieldErrors = [];
      this.detail = null;
      return true;
    }
    // surface server-side 422 errors inline; local doc stays dirty
    this.fieldErrors = result.fields;
    this.detail = result.detail ?? null;
    return false;
  }

  errorFor(field: string): string | null {
    const hit = this.fieldErrors.find((f) => f.field === field);
    return hit ? hit.message : null;
  }
}
