import { describe, expect, it } from "vitest";
import { buildBoard, layoutLattice, parseCxt } from "../src/board.js";
import type { ResultsDoc } from "../src/types.js";
import fixture from "./fixtures/block1.json";

const results = fixture.results as unknown as ResultsDoc;

describe("heat table from the .cxt artifact", () => {
  it("parses the shared log", () => {
    const heat = parseCxt(results.artifacts["shared-log.cxt"]!);
    expect(heat.attributes).toEqual(fixture.experts);
    expect(heat.objects.length).toBeGreaterThan(0);
    for (const row of heat.cells) {
      expect(row.length).toBe(heat.attributes.length);
      for (const cell of row) expect(["x", "o", "?"]).toContain(cell);
    }
    // the unanimous rows of the accepted base show as all-x
    const i = heat.objects.indexOf("19 21 -> 22");
    expect(i).toBeGreaterThanOrEqual(0);
    expect(heat.cells[i]).toEqual(["x", "x", "x", "x"]);
  });

  it("rejects malformed documents", () => {
    expect(() => parseCxt("not a context")).toThrow();
    expect(() => parseCxt("B\n\n1\n2\ng\na\nb\nX\n")).toThrow(/length/);
  });
});

describe("lattice layout", () => {
  it("layers by expert-set size, largest first", () => {
    const layout = layoutLattice(results.shared_lattice);
    const sizes = layout.levels.map((level) => level[0]!.experts.length);
    expect(sizes).toEqual([...sizes].sort((a, b) => b - a));
    for (const level of layout.levels) {
      for (const node of level) {
        expect(node.experts.length).toBe(level[0]!.experts.length);
      }
    }
  });

  it("cover edges go strictly upward in implication sets", () => {
    const layout = layoutLattice(results.shared_lattice);
    for (const [low, high] of layout.edges) {
      const small = new Set(layout.nodes[low]!.implications);
      const large = new Set(layout.nodes[high]!.implications);
      expect(small.size).toBeLessThan(large.size);
      for (const imp of small) expect(large.has(imp)).toBe(true);
    }
  });

  it("keeps the group facts visible", () => {
    const layout = layoutLattice(results.shared_lattice);
    const everyone = layout.nodes.find(
      (n) => n.experts.length === (fixture.experts as string[]).length)!;
    expect(everyone.implications).toContain("19 21 -> 22");
    expect(everyone.implications).not.toContain("22 -> 21");
  });
});

describe("board assembly", () => {
  it("collects accepted bases, heat table, lattice and report", () => {
    const board = buildBoard(results);
    expect(board.inProgress).toBe(false);
    expect(board.accepted[0]!.implications).toEqual(
      fixture.final_state.accepted);
    expect(board.heat).not.toBeNull();
    expect(board.lattice.nodes.length).toBeGreaterThan(0);
    expect(board.report.majority_confirmed.length).toBeGreaterThan(0);
  });
});
