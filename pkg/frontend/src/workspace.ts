/** One expert's workspace: polls the session state, exposes the question
 * card to render, builds the verdict payloads, and keeps the last
 * validation error for inline display.  All judgement about validity
 * comes back from the service; the workspace only forwards and renders. */

import { ApiClient } from "./api.js";
import { CounterexampleEditor } from "./editor.js";
import { ServiceError } from "./types.js";
import type { AnswerPayload, StateDoc } from "./types.js";

export interface QuestionCard {
  premise: string[];
  /** One answer row per attribute still possibly shared. */
  rows: { attribute: string; mine: boolean }[];
}

export interface InlineError {
  code: string;
  message: string;
  /** Attributes whose cells the editor should highlight. */
  highlight: string[];
  /** (object, attribute) pairs reported by the service, if any. */
  cells: [string, string][];
}

export class ExpertWorkspace {
  state: StateDoc | null = null;
  editor: CounterexampleEditor | null = null;
  error: InlineError | null = null;

  constructor(
    private readonly client: ApiClient,
    readonly sessionId: string,
    readonly expert: string,
    private readonly token: string,
  ) {}

  async refresh(): Promise<void> {
    this.state = await this.client.getState(this.sessionId);
  }

  /** The card currently shown: premise chips plus one row per pending
   * attribute, flagged when this expert still owes an answer. */
  get card(): QuestionCard | null {
    const question = this.state?.question;
    if (!question) return null;
    const mine = new Set(question.remaining[this.expert] ?? []);
    return {
      premise: question.premise,
      rows: question.pending.map((attribute) => ({ attribute, mine: mine.has(attribute) })),
    };
  }

  get outstanding(): string[] {
    return this.state?.question?.remaining[this.expert] ?? [];
  }

  get done(): boolean {
    return this.state?.done ?? false;
  }

  private payload(attribute: string, verdict: AnswerPayload["verdict"]): AnswerPayload {
    const question = this.state?.question;
    if (!question) throw new Error("no active question");
    return {
      expert: this.expert,
      token: this.token,
      premise: question.premise,
      attribute,
      verdict,
    };
  }

  private async send(payload: AnswerPayload): Promise<boolean> {
    try {
      this.state = await this.client.postAnswer(this.sessionId, payload);
      this.error = null;
      return true;
    } catch (err) {
      if (err instanceof ServiceError) {
        this.error = this.describe(err);
        return false;
      }
      throw err;
    }
  }

  /** Confirm or pass on one attribute of the active question. */
  answer(attribute: string, verdict: "yes" | "unknown"): Promise<boolean> {
    return this.send(this.payload(attribute, verdict));
  }

  /** Start a rejection: the editor comes back premise-locked to x and the
   * rejected attribute locked to o. */
  openEditor(attribute: string): CounterexampleEditor {
    const question = this.state?.question;
    if (!question) throw new Error("no active question");
    if (!this.state) throw new Error("not joined");
    this.editor = new CounterexampleEditor(
      this.state.attributes,
      question.premise,
      attribute,
    );
    return this.editor;
  }

  /** Submit the editor row as a "no" verdict for its target attribute. */
  async submitRejection(): Promise<boolean> {
    if (!this.editor) throw new Error("no counterexample editor open");
    const payload = this.payload(this.editor.target, "no");
    payload.counterexample = this.editor.payload();
    const ok = await this.send(payload);
    if (ok) this.editor = null;
    return ok;
  }

  /** Map a service error onto the inline display: message, code and which
   * editor cells to highlight. */
  private describe(err: ServiceError): InlineError {
    const detail = typeof err.detail === "string" ? { message: err.detail } : err.detail;
    const code = err.code;
    let highlight: string[] = [];
    if (code === "E_PREMISE_NOT_CERTAIN" && this.editor) {
      highlight = [...this.editor.premise];
    } else if (code === "E_ATTRIBUTE_NOT_REFUTED" && this.editor) {
      highlight = [this.editor.target];
    } else if (detail.cells) {
      highlight = detail.cells.map(([, attribute]) => attribute);
    }
    return {
      code,
      message: detail.message ?? String(err.message),
      highlight,
      cells: detail.cells ?? detail.conflicts ?? [],
    };
  }
}
