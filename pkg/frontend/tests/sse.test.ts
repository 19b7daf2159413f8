import { describe, expect, it } from "vitest";

import { EventStream, parseSseChunk } from "../src/sse.js";
import type { ConsoleEvent } from "../src/types.js";

function frame(id: number, event: string, data: unknown): string {
  return `id: ${id}\nevent: ${event}\ndata: ${JSON.stringify(data)}\n\n`;
}

function streamResponse(chunks: string[]): Response {
  const encoder = new TextEncoder();
  const body = new ReadableStream<Uint8Array>({
    start(controller) {
      for (const chunk of chunks) controller.enqueue(encoder.encode(chunk));
      controller.close();
    },
  });
  return new Response(body, { status: 200, headers: { "content-type": "text/event-stream" } });
}

describe("sse frame parsing", () => {
  it("parses id, event and data fields", () => {
    const { events, rest } = parseSseChunk(frame(3, "score_update", { a: 1 }));
    expect(rest).toBe("");
    expect(events).toEqual([{ id: 3, event: "score_update", data: '{"a": 1}'.replace(": ", ":") }]);
  });

  it("keeps incomplete frames in the buffer", () => {
    const text = frame(1, "x", {}) + "id: 2\nevent: y";
    const { events, rest } = parseSseChunk(text);
    expect(events).toHaveLength(1);
    expect(rest).toBe("id: 2\nevent: y");
  });

  it("ignores keep-alive comments", () => {
    const { events } = parseSseChunk(": keep-alive\n\n" + frame(1, "x", {}));
    expect(events).toHaveLength(1);
  });
});

describe("event stream resume", () => {
  it("reconnects with Last-Event-ID and loses nothing", async () => {
    const seenHeaders: (string | undefined)[] = [];
    let call = 0;
    const fetchFn = async (_: string, init?: RequestInit): Promise<Response> => {
      const headers = (init?.headers ?? {}) as Record<string, string>;
      seenHeaders.push(headers["Last-Event-ID"]);
      call += 1;
      if (call === 1) {
        return streamResponse([frame(1, "score_update", { scores: {} }),
                               frame(2, "score_update", { scores: {} })]);
      }
      if (call === 2) {
        return streamResponse([frame(3, "fault_injected", { fault_id: "f1" })]);
      }
      // afterwards: hang forever so the loop stays connected
      return new Response(new ReadableStream<Uint8Array>({ start() {} }), { status: 200 });
    };

    const received: ConsoleEvent[] = [];
    const stream = new EventStream("http://engine", {
      fetchFn,
      onEvent: (e) => received.push(e),
      reconnectDelayMs: 5,
    });
    stream.start();
    await new Promise((resolve) => setTimeout(resolve, 100));
    stream.stop();

    expect(received.map((e) => e.id)).toEqual([1, 2, 3]);
    expect(seenHeaders[0]).toBeUndefined();
    expect(seenHeaders[1]).toBe("2"); // resumed exactly after the last seen id
    const ids = received.map((e) => e.id);
    for (let i = 1; i < ids.length; i++) {
      expect(ids[i]).toBe(ids[i - 1] + 1); // no gaps across the reconnect
    }
  });

  it("tracks staleness against an injected clock", async () => {
    let now = 5;
    const fetchFn = async (): Promise<Response> =>
      streamResponse([frame(1, "score_update", { scores: {} })]);
    const stream = new EventStream("http://engine", {
      fetchFn,
      onEvent: () => undefined,
      reconnectDelayMs: 10_000,
      nowFn: () => now,
    });
    stream.start();
    await new Promise((resolve) => setTimeout(resolve, 30));
    stream.stop();
    expect(stream.lastEventAt).toBe(5);
    now = 100;
    expect(stream.isStale(50)).toBe(true);
    expect(stream.isStale(200)).toBe(false);
  });
});
