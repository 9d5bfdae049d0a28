/** DOM bindings: render the workspace models into plain elements.  No
 * framework; every mutation re-renders from the current server state. */

import type { BoardModel } from "./board.js";
import type { CounterexampleEditor } from "./editor.js";
import type { ExpertWorkspace, InlineError } from "./workspace.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderError(error: InlineError | null): HTMLElement {
  const box = el("div", "error-box");
  if (!error) return box;
  box.classList.add("active");
  box.append(
    el("strong", "error-code", error.code),
    el("span", "error-message", " " + error.message),
  );
  if (error.cells.length) {
    box.append(el("div", "error-cells",
      error.cells.map(([g, m]) => `${g}/${m}`).join(", ")));
  }
  return box;
}

export function renderEditor(editor: CounterexampleEditor,
                             highlight: string[],
                             onSubmit: () => void,
                             onCancel: () => void): HTMLElement {
  const panel = el("div", "editor");
  panel.append(el("h3", undefined,
    `counterexample against ${editor.premise.join(" ") || "∅"} -> ${editor.target}`));
  const nameInput = el("input");
  nameInput.placeholder = "object name";
  nameInput.value = editor.name;
  nameInput.addEventListener("input", () => { editor.name = nameInput.value; });
  panel.append(nameInput);
  const row = el("div", "cells");
  for (const attr of editor.attributes) {
    const cell = el("button", "cell", `${attr}: ${editor.cell(attr)}`);
    cell.dataset.attr = attr;
    if (editor.locked(attr)) cell.classList.add("locked");
    if (highlight.includes(attr)) cell.classList.add("highlight");
    cell.addEventListener("click", () => {
      editor.cycle(attr);
      cell.textContent = `${attr}: ${editor.cell(attr)}`;
    });
    cell.addEventListener("keydown", (event) => {
      editor.handleKey(attr, event.key);
      cell.textContent = `${attr}: ${editor.cell(attr)}`;
    });
    row.append(cell);
  }
  panel.append(row);
  const submit = el("button", "submit", "reject with this row");
  submit.addEventListener("click", onSubmit);
  const cancel = el("button", "cancel", "cancel");
  cancel.addEventListener("click", onCancel);
  panel.append(submit, cancel);
  return panel;
}

export function renderCard(workspace: ExpertWorkspace,
                           rerender: () => void): HTMLElement {
  const container = el("div", "question-card");
  const card = workspace.card;
  if (workspace.done) {
    container.append(el("p", "done", "exploration finished - see results"));
    return container;
  }
  if (!card) {
    container.append(el("p", "idle", "waiting for the next question"));
    return container;
  }
  const chips = el("div", "premise");
  chips.append(el("span", undefined, "does "));
  for (const attr of card.premise) chips.append(el("span", "chip", attr));
  if (!card.premise.length) chips.append(el("span", "chip empty", "∅"));
  chips.append(el("span", undefined, " imply ..."));
  container.append(chips);
  for (const row of card.rows) {
    const line = el("div", "answer-row");
    line.append(el("span", "attr", row.attribute));
    if (!row.mine) {
      line.append(el("span", "answered", "answered"));
      container.append(line);
      continue;
    }
    for (const [label, verdict] of [["yes", "yes"], ["unknown", "unknown"]] as const) {
      const button = el("button", verdict, label);
      button.addEventListener("click", async () => {
        await workspace.answer(row.attribute, verdict);
        rerender();
      });
      line.append(button);
    }
    const no = el("button", "no", "no, counterexample...");
    no.addEventListener("click", () => {
      workspace.openEditor(row.attribute);
      rerender();
    });
    line.append(no);
    container.append(line);
  }
  if (workspace.editor) {
    container.append(renderEditor(
      workspace.editor,
      workspace.error?.highlight ?? [],
      async () => { await workspace.submitRejection(); rerender(); },
      () => { workspace.editor = null; rerender(); },
    ));
  }
  container.append(renderError(workspace.error));
  return container;
}

export function renderBoard(board: BoardModel): HTMLElement {
  const container = el("div", "result-board");
  container.append(el("h2", undefined,
    board.inProgress ? "results so far (in progress)" : "results"));
  for (const block of board.accepted) {
    container.append(el("h3", undefined, `accepted for ${block.subset}`));
    const list = el("ul", "accepted");
    for (const imp of block.implications) list.append(el("li", undefined, imp));
    if (!block.implications.length) list.append(el("li", "none", "nothing new"));
    container.append(list);
  }
  if (board.heat) {
    container.append(el("h3", undefined, "answers (questions × experts)"));
    const table = el("table", "heat");
    const head = el("tr");
    head.append(el("th"));
    for (const expert of board.heat.attributes) head.append(el("th", undefined, expert));
    table.append(head);
    board.heat.objects.forEach((name, i) => {
      const tr = el("tr");
      tr.append(el("th", undefined, name));
      board.heat!.cells[i]!.forEach((cell) => {
        tr.append(el("td", `cell-${cell === "?" ? "q" : cell}`, cell));
      });
      table.append(tr);
    });
    container.append(table);
  }
  container.append(el("h3", undefined, "system of shared implications"));
  const lattice = el("div", "lattice");
  for (const level of board.lattice.levels) {
    const row = el("div", "lattice-level");
    for (const node of level) {
      const box = el("div", "lattice-node");
      box.append(el("div", "experts", node.experts.join(", ") || "(nobody)"));
      box.append(el("div", "count", `${node.implications.length} implications`));
      box.title = node.implications.join("\n");
      row.append(box);
    }
    lattice.append(row);
  }
  container.append(lattice);
  const sections: [string, string[]][] = [
    ["only artificial counterexamples", board.report.artificial_only.map(
      (q) => `${q.premise.join(" ")} -> ${q.attribute} (${q.experts.join(", ")})`)],
    ["confirmed by most experts", board.report.majority_confirmed.map(
      (q) => `${q.premise.join(" ")} -> ${q.attribute} (${q.confirmed_by.join(", ")})`)],
    ["controversial object cells", board.report.controversial_cells.map(
      (c) => `${c.object}/${c.attribute}`)],
    ["confirmed vs. counterexample", board.report.cross_conflicts.map(
      (p) => `${p.premise.join(" ")} -> ${p.attribute}: ${p.confirmer} vs ${p.refuter}`)],
  ];
  for (const [title, lines] of sections) {
    container.append(el("h3", undefined, `conflicts: ${title}`));
    const list = el("ul", "report");
    for (const line of lines) list.append(el("li", undefined, line));
    if (!lines.length) list.append(el("li", "none", "none"));
    container.append(list);
  }
  return container;
}
