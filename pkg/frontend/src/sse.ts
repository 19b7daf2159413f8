// Server-sent event subscription over fetch + ReadableStream, with
// Last-Event-ID resume so a dropped connection misses nothing the
// server still buffers. Works in browsers and in node 20, which is
// what lets the integration tests drive the real client code.

import type { ConsoleEvent } from "./types.js";
import type { FetchLike } from "./api.js";

export interface EventStreamOptions {
  fetchFn?: FetchLike;
  onEvent: (event: ConsoleEvent) => void;
  onStatusChange?: (connected: boolean) => void;
  reconnectDelayMs?: number;
  nowFn?: () => number;
}

export function parseSseChunk(
  buffer: string,
): { events: { id?: number; event: string; data: string }[]; rest: string } {
  const events: { id?: number; event: string; data: string }[] = [];
  const frames = buffer.split("\n\n");
  const rest = frames.pop() ?? "";
  for (const frame of frames) {
    let id: number | undefined;
    let eventName = "message";
    const dataLines: string[] = [];
    for (const line of frame.split("\n")) {
      if (line.startsWith("id:")) id = parseInt(line.slice(3).trim(), 10);
      else if (line.startsWith("event:")) eventName = line.slice(6).trim();
      else if (line.startsWith("data:")) dataLines.push(line.slice(5).trim());
      // lines starting with ":" are keep-alive comments
    }
    if (dataLines.length > 0) {
      events.push({ id, event: eventName, data: dataLines.join("\n") });
    }
  }
  return { events, rest };
}

export class EventStream {
  lastEventId = 0;
  lastEventAt = 0;
  connected = false;
  received = 0;

  private running = false;
  private controller: AbortController | null = null;
  private readonly fetchFn: FetchLike;
  private readonly nowFn: () => number;
  private readonly reconnectDelayMs: number;

  constructor(
    private readonly baseUrl: string,
    private readonly options: EventStreamOptions,
  ) {
    this.fetchFn = options.fetchFn ?? ((input, init) => fetch(input, init));
    this.nowFn = options.nowFn ?? (() => Date.now());
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    void this.loop();
  }

  stop(): void {
    this.running = false;
    this.controller?.abort();
  }

  /** Abort the current connection but keep running: the loop
   * reconnects with Last-Event-ID, so no buffered event is lost. */
  dropConnection(): void {
    this.controller?.abort();
  }

  isStale(staleAfterMs: number): boolean {
    return this.lastEventAt > 0 && this.nowFn() - this.lastEventAt > staleAfterMs;
  }

  private setConnected(connected: boolean) {
    if (this.connected !== connected) {
      this.connected = connected;
      this.options.onStatusChange?.(connected);
    }
  }

  private async loop(): Promise<void> {
    while (this.running) {
      this.controller = new AbortController();
      try {
        const response = await this.fetchFn(this.baseUrl + "/api/events", {
          headers: this.lastEventId > 0 ? { "Last-Event-ID": String(this.lastEventId) } : {},
          signal: this.controller.signal,
        } as RequestInit);
        if (!response.ok || !response.body) {
          throw new Error(`events stream -> ${response.status}`);
        }
        this.setConnected(true);
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          const { events, rest } = parseSseChunk(buffer);
          buffer = rest;
          for (const raw of events) {
            const event: ConsoleEvent = {
              id: raw.id ?? this.lastEventId + 1,
              event: raw.event,
              data: JSON.parse(raw.data) as Record<string, unknown>,
            };
            this.lastEventId = event.id;
            this.lastEventAt = this.nowFn();
            this.received += 1;
            this.options.onEvent(event);
          }
        }
      } catch {
        // dropped or refused; fall through to reconnect
      }
      this.setConnected(false);
      if (!this.running) return;
      await new Promise((resolve) => setTimeout(resolve, this.reconnectDelayMs));
    }
  }
}
