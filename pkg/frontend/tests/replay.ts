/** Record/replay fetch for the workspace tests: serves the exchanges the
 * real service produced, and fails the test the moment the client sends
 * anything that was not in the recording. */

import { expect } from "vitest";
import type { FetchFn } from "../src/api.js";
import type { StateDoc } from "../src/types.js";

export interface RecordedStep {
  state: StateDoc;
  post: Record<string, unknown>;
  response: StateDoc;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export class ReplayService {
  cursor = 0;

  constructor(
    private readonly sessionId: string,
    private readonly steps: RecordedStep[],
    private readonly finalState: StateDoc,
    private readonly results?: unknown,
  ) {}

  get done(): boolean {
    return this.cursor >= this.steps.length;
  }

  fetch: FetchFn = async (url, init) => {
    const method = init?.method ?? "GET";
    if (method === "GET" && url === `/sessions/${this.sessionId}`) {
      const state = this.done ? this.finalState : this.steps[this.cursor]!.state;
      return jsonResponse(200, state);
    }
    if (method === "GET" && url === `/sessions/${this.sessionId}/results`) {
      return jsonResponse(200, this.results ?? {});
    }
    if (method === "POST" && url === `/sessions/${this.sessionId}/answers`) {
      expect(this.done, "client answered after the recording ended").toBe(false);
      const step = this.steps[this.cursor]!;
      const body = JSON.parse(String(init?.body));
      expect(body).toEqual(step.post);  // exact verdict payloads, nothing more
      this.cursor += 1;
      return jsonResponse(200, step.response);
    }
    throw new Error(`unexpected request ${method} ${url}`);
  };
}

/** Serves one fixed state and answers every POST with a canned error. */
export class ErrorService {
  constructor(
    private readonly sessionId: string,
    private readonly state: StateDoc,
    private readonly status: number,
    private readonly detail: unknown,
  ) {}

  fetch: FetchFn = async (url, init) => {
    const method = init?.method ?? "GET";
    if (method === "GET" && url === `/sessions/${this.sessionId}`) {
      return jsonResponse(200, this.state);
    }
    if (method === "POST") {
      return jsonResponse(this.status, { detail: this.detail });
    }
    throw new Error(`unexpected request ${method} ${url}`);
  };
}
