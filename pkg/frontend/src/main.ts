// Browser entry point: tabs, polling, and decision buttons. All logic
// lives in the imported modules; this file only touches the DOM.

import { ApiClient } from "./api.js";
import { renderAttempts, renderBanner, renderPatch, renderQueue, renderStats } from "./render.js";
import { Dashboard, Poller } from "./state.js";

const client = new ApiClient("");
const dashboard = new Dashboard(client);

const tabs = ["queue", "stats", "attempts"] as const;
type Tab = (typeof tabs)[number];
let activeTab: Tab = "queue";
let openPatch: string | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function renderShell(): void {
  el("banner").innerHTML = dashboard.view.error
    ? renderBanner(`API unreachable: ${dashboard.view.error}`)
    : "";
  for (const tab of tabs) {
    el(`tab-${tab}`).classList.toggle("active", tab === activeTab);
  }
}

async function renderMain(): Promise<void> {
  renderShell();
  const main = el("content");
  if (activeTab === "queue") {
    if (openPatch !== null) {
      try {
        const detail = await client.patch(openPatch);
        main.innerHTML =
          `<button id="back">&larr; back to queue</button>` + renderPatch(detail);
        el("back").addEventListener("click", () => {
          openPatch = null;
          void renderMain();
        });
        wireDecisionButtons(main);
        return;
      } catch {
        openPatch = null;
      }
    }
    main.innerHTML = renderQueue(dashboard.view.queue);
    for (const row of Array.from(main.querySelectorAll<HTMLElement>(".queue-row"))) {
      row.addEventListener("click", () => {
        openPatch = row.dataset["patch"] ?? null;
        void renderMain();
      });
    }
  } else if (activeTab === "stats") {
    main.innerHTML = dashboard.view.stats
      ? renderStats(dashboard.view.stats, dashboard.view.lastUpdated ?? "never")
      : `<p class="empty">waiting for first poll…</p>`;
  } else {
    const attempts = await client.attempts().catch(() => []);
    main.innerHTML = renderAttempts(attempts);
  }
}

function wireDecisionButtons(main: HTMLElement): void {
  for (const selector of [".approve", ".reject"] as const) {
    const button = main.querySelector<HTMLButtonElement>(selector);
    if (!button || button.disabled) continue;
    button.addEventListener("click", async () => {
      const patchId = button.dataset["patch"];
      if (!patchId || dashboard.decisionPending(patchId)) return;
      button.disabled = true;
      const decision = selector === ".approve" ? "approve" : "reject";
      const result = await dashboard
        .decide(patchId, decision, "dashboard")
        .catch((err) => {
          el("banner").innerHTML = renderBanner(String(err));
          return null;
        });
      if (result && result !== "in-flight" && result !== "already-decided") {
        openPatch = null;
      }
      await renderMain();
      if (result && typeof result === "object" && result.pr_id) {
        el("banner").innerHTML =
          `<div class="banner ok">pull request ${result.pr_id} opened</div>`;
      }
    });
  }
}

function boot(): void {
  for (const tab of tabs) {
    el(`tab-${tab}`).addEventListener("click", () => {
      activeTab = tab;
      openPatch = null;
      void renderMain();
    });
  }
  dashboard.onChange(() => {
    // re-render passive views on poll; patch view refreshes on navigation
    if (openPatch === null) void renderMain();
    else renderShell();
  });
  const poller = new Poller(() => dashboard.refresh());
  poller.start();
}

boot();
