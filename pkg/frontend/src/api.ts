/** Thin typed client for the session service.  The fetch function is
 * injectable so tests can replay recorded exchanges. */

import type { AnswerPayload, ResultsDoc, ServiceError as _SE, StateDoc } from "./types.js";
import { ServiceError } from "./types.js";

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchFn = (...args) => globalThis.fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ServiceError(response.status, payload.detail ?? payload);
    }
    return payload as T;
  }

  getState(sessionId: string): Promise<StateDoc> {
    return this.request<StateDoc>("GET", `/sessions/${sessionId}`);
  }

  postAnswer(sessionId: string, payload: AnswerPayload): Promise<StateDoc> {
    return this.request<StateDoc>("POST", `/sessions/${sessionId}/answers`, payload);
  }

  getResults(sessionId: string): Promise<ResultsDoc> {
    return this.request<ResultsDoc>("GET", `/sessions/${sessionId}/results`);
  }

  uploadExamples(sessionId: string, expert: string, token: string, cxt: string): Promise<StateDoc> {
    return this.request<StateDoc>(
      "POST",
      `/sessions/${sessionId}/experts/${encodeURIComponent(expert)}/examples`,
      { token, cxt },
    );
  }
}
