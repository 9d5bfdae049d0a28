/** Entry point: join a session from the URL parameters and keep polling.
 *
 *   index.html?session=ID&expert=NAME&token=TOKEN[&poll=MS]
 */

import { ApiClient } from "./api.js";
import { buildBoard } from "./board.js";
import { renderBoard, renderCard } from "./render.js";
import { ExpertWorkspace } from "./workspace.js";

function param(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

async function run(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const sessionId = param("session");
  const expert = param("expert");
  const token = param("token");
  if (!sessionId || !expert || !token) {
    root.textContent = "open as index.html?session=ID&expert=NAME&token=TOKEN";
    return;
  }
  const client = new ApiClient("");
  const workspace = new ExpertWorkspace(client, sessionId, expert, token);
  const pollMs = Number(param("poll") ?? "2000");

  const rerender = async () => {
    root.replaceChildren();
    root.append(renderCard(workspace, () => { void rerender(); }));
    if (workspace.done) {
      const results = await client.getResults(sessionId);
      root.append(renderBoard(buildBoard(results)));
    }
  };

  const tick = async () => {
    try {
      // editing a counterexample must not be clobbered by the poller
      if (!workspace.editor) {
        await workspace.refresh();
        await rerender();
      }
    } finally {
      if (!workspace.done) setTimeout(tick, pollMs);
    }
  };
  await tick();
}

void run();
