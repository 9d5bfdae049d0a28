/** Wire types of the session service; the console renders these verbatim
 * and never derives logical facts on its own. */

export type CellChar = "x" | "o" | "?";

export interface QuestionDoc {
  premise: string[];
  pending: string[];
  remaining: Record<string, string[]>;
}

export interface StateDoc {
  id: string;
  mode: "group" | "system";
  attributes: string[];
  experts: string[];
  phase: "asking" | "advancing" | "done";
  done: boolean;
  subset: string[] | null;
  question: QuestionDoc | null;
  accepted: string[] | Record<string, string[]>;
  created: string;
  updated: string;
}

export interface CounterexamplePayload {
  name: string;
  cells: Record<string, CellChar>;
}

export interface AnswerPayload {
  expert: string;
  token: string;
  premise: string[];
  attribute: string;
  verdict: "yes" | "no" | "unknown";
  counterexample?: CounterexamplePayload;
}

export interface LatticeNodeDoc {
  experts: string[];
  implications: string[];
}

export interface ResultsDoc {
  in_progress: boolean;
  id: string;
  mode: string;
  accepted: Record<string, string[]>;
  shared_lattice: LatticeNodeDoc[];
  conflict_report: {
    artificial_only: { premise: string[]; attribute: string; experts: string[] }[];
    majority_confirmed: { premise: string[]; attribute: string; confirmed_by: string[] }[];
    controversial_cells: { object: string; attribute: string; values: Record<string, string> }[];
    cross_conflicts: {
      premise: string[]; attribute: string;
      confirmer: string; refuter: string; counterexample: string;
    }[];
  };
  artifacts: Record<string, string>;
}

/** Machine-readable error detail the service returns with 4xx answers. */
export interface ErrorDetail {
  code?: string;
  message?: string;
  cells?: [string, string][];
  conflicts?: [string, string][];
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: ErrorDetail | string,
  ) {
    super(typeof detail === "string" ? detail : (detail.message ?? detail.code ?? "request failed"));
  }

  get code(): string {
    if (typeof this.detail === "string") return `HTTP_${this.status}`;
    return this.detail.code ?? `HTTP_${this.status}`;
  }
}
