/** Result board models: accepted implications, the shared-context heat
 * table (parsed from the downloadable .cxt artifact) and a layered layout
 * of the shared-implication lattice.  Pure presentation of server
 * payloads. */

import type { CellChar, LatticeNodeDoc, ResultsDoc } from "./types.js";

export interface HeatTable {
  objects: string[];
  attributes: string[];
  cells: CellChar[][];
}

const CXT_CELL: Record<string, CellChar> = { X: "x", ".": "o", "?": "?" };

/** Parse a Burmeister-style .cxt document for display. */
export function parseCxt(text: string): HeatTable {
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") lines.pop();
  if (lines[0] !== "B") throw new Error("not a context file");
  const nObjects = Number(lines[2]);
  const nAttrs = Number(lines[3]);
  if (!Number.isInteger(nObjects) || !Number.isInteger(nAttrs)) {
    throw new Error("bad counts");
  }
  const objects = lines.slice(4, 4 + nObjects);
  const attributes = lines.slice(4 + nObjects, 4 + nObjects + nAttrs);
  const rows = lines.slice(4 + nObjects + nAttrs);
  if (rows.length !== nObjects) throw new Error("row count mismatch");
  const cells = rows.map((row, i) => {
    if (row.length !== nAttrs) throw new Error(`row ${i + 1} length mismatch`);
    return [...row].map((ch) => {
      const cell = CXT_CELL[ch];
      if (!cell) throw new Error(`bad cell ${ch}`);
      return cell;
    });
  });
  return { objects, attributes, cells };
}

export interface LatticeLayout {
  /** Nodes grouped by expert-set size, largest sets first (bottom-up). */
  levels: LatticeNodeDoc[][];
  /** Cover edges as [lower, upper] indices into the flat node list. */
  edges: [number, number][];
  nodes: LatticeNodeDoc[];
}

/** Layer the lattice payload for drawing; covers are computed on the
 * implication sets the server sent, nothing is re-derived. */
export function layoutLattice(nodes: LatticeNodeDoc[]): LatticeLayout {
  const sorted = [...nodes].sort(
    (a, b) => b.experts.length - a.experts.length
      || a.experts.join(",").localeCompare(b.experts.join(",")),
  );
  const levels = new Map<number, LatticeNodeDoc[]>();
  for (const node of sorted) {
    const level = levels.get(node.experts.length) ?? [];
    level.push(node);
    levels.set(node.experts.length, level);
  }
  const sets = sorted.map((n) => new Set(n.implications));
  const below = (i: number, j: number) =>
    sets[i]!.size < sets[j]!.size && [...sets[i]!].every((x) => sets[j]!.has(x));
  const edges: [number, number][] = [];
  for (let i = 0; i < sorted.length; i++) {
    for (let j = 0; j < sorted.length; j++) {
      if (i === j || !below(i, j)) continue;
      let covered = true;
      for (let k = 0; k < sorted.length; k++) {
        if (k !== i && k !== j && below(i, k) && below(k, j)) {
          covered = false;
          break;
        }
      }
      if (covered) edges.push([i, j]);
    }
  }
  return {
    levels: [...levels.keys()].sort((a, b) => b - a).map((k) => levels.get(k)!),
    edges,
    nodes: sorted,
  };
}

export interface BoardModel {
  inProgress: boolean;
  accepted: { subset: string; implications: string[] }[];
  heat: HeatTable | null;
  lattice: LatticeLayout;
  report: ResultsDoc["conflict_report"];
}

export function buildBoard(results: ResultsDoc): BoardModel {
  const logText = results.artifacts["shared-log.cxt"];
  return {
    inProgress: results.in_progress,
    accepted: Object.entries(results.accepted).map(([subset, implications]) => ({
      subset: subset || "(whole group)",
      implications,
    })),
    heat: logText ? parseCxt(logText) : null,
    lattice: layoutLattice(results.shared_lattice),
    report: results.conflict_report,
  };
}
