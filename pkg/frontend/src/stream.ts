// Newline-delimited JSON snapshot stream with resume-from-tick reconnect.

import type { GatewayClient } from "./api.js";
import type { SnapshotFrame } from "./types.js";

export async function* ndjsonFrames<T>(body: ReadableStream<Uint8Array>): AsyncGenerator<T> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let newline = buffer.indexOf("\n");
      while (newline >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (line.length > 0) yield JSON.parse(line) as T;
        newline = buffer.indexOf("\n");
      }
    }
    const tail = buffer.trim();
    if (tail.length > 0) yield JSON.parse(tail) as T;
  } finally {
    reader.releaseLock();
  }
}

export interface StreamOptions {
  fromTick?: number;
  maxReconnects?: number;
  onReconnect?: (fromTick: number) => void;
  fetchImpl?: typeof fetch;
}

/**
 * Ordered snapshot frames for a run. A dropped connection resumes from the
 * last rendered tick; the generator ends after the final frame.
 */
export async function* streamSnapshots(
  client: GatewayClient,
  runId: string,
  options: StreamOptions = {},
): AsyncGenerator<SnapshotFrame> {
  const fetchImpl = options.fetchImpl ?? fetch;
  let cursor = options.fromTick;
  let reconnectsLeft = options.maxReconnects ?? 5;
  for (;;) {
    let response: Response;
    try {
      response = await fetchImpl(client.streamUrl(runId, cursor));
    } catch (err) {
      if (reconnectsLeft-- <= 0) throw err;
      options.onReconnect?.(cursor ?? -1);
      continue;
    }
    if (!response.ok || response.body === null) {
      throw new Error(`stream failed with status ${response.status}`);
    }
    let sawFinal = false;
    try {
      for await (const frame of ndjsonFrames<SnapshotFrame>(response.body)) {
        cursor = frame.tick;
        yield frame;
        if (frame.final) {
          sawFinal = true;
          return;
        }
      }
    } catch (err) {
      if (reconnectsLeft-- <= 0) throw err;
      options.onReconnect?.(cursor ?? -1);
      continue;
    }
    if (sawFinal) return;
    // stream ended without a final frame: resume from the last tick
    if (reconnectsLeft-- <= 0) return;
    options.onReconnect?.(cursor ?? -1);
  }
}
