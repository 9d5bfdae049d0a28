/** Counterexample editor model: a named row over all attributes with
 * three-state cells.  Premise cells are locked to x and the rejected
 * attribute to o, so rows violating the counterexample rules for those
 * cells cannot be built at all; everything else starts unknown and cycles
 * x -> o -> ? -> x. */

import type { CellChar, CounterexamplePayload } from "./types.js";

const CYCLE: Record<CellChar, CellChar> = { x: "o", o: "?", "?": "x" };

export class CounterexampleEditor {
  name = "";
  private readonly values: Map<string, CellChar> = new Map();
  private readonly lockedCells: Set<string> = new Set();

  constructor(
    readonly attributes: readonly string[],
    readonly premise: readonly string[],
    readonly target: string,
  ) {
    for (const attr of attributes) this.values.set(attr, "?");
    for (const attr of premise) {
      this.values.set(attr, "x");
      this.lockedCells.add(attr);
    }
    this.values.set(target, "o");
    this.lockedCells.add(target);
  }

  cell(attr: string): CellChar {
    const value = this.values.get(attr);
    if (value === undefined) throw new Error(`unknown attribute ${attr}`);
    return value;
  }

  locked(attr: string): boolean {
    return this.lockedCells.has(attr);
  }

  /** Pointer path: advance the three-state cycle; locked cells stay put. */
  cycle(attr: string): CellChar {
    const current = this.cell(attr);
    if (this.locked(attr)) return current;
    const next = CYCLE[current];
    this.values.set(attr, next);
    return next;
  }

  set(attr: string, value: CellChar): CellChar {
    const current = this.cell(attr);
    if (this.locked(attr)) return current;
    this.values.set(attr, value);
    return value;
  }

  /** Keyboard path: Space/Enter cycle, x/o/? set the cell directly. */
  handleKey(attr: string, key: string): CellChar {
    if (key === " " || key === "Enter") return this.cycle(attr);
    if (key === "x" || key === "o" || key === "?") return this.set(attr, key);
    return this.cell(attr);
  }

  /** Row as the service expects it; unknown cells are simply absent. */
  payload(): CounterexamplePayload {
    const cells: Record<string, CellChar> = {};
    for (const attr of this.attributes) {
      const value = this.cell(attr);
      if (value !== "?") cells[attr] = value;
    }
    return { name: this.name, cells };
  }
}
