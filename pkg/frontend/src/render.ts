// HTML renderers: pure string builders over API payloads, so they are
// testable without a DOM.

import {
  escapeHtml as esc,
  hhmm,
  parseUnifiedDiff,
  raceContext,
  ratio,
  sideBySide,
} from "./format.js";
import type { Attempt, PatchDetail, PatchSummary, Stats } from "./types.js";

export function renderQueue(patches: PatchSummary[]): string {
  if (patches.length === 0) {
    return `<p class="empty">No pending patches — the queue is clear.</p>`;
  }
  const rows = patches
    .map(
      (p) => `
    <tr class="queue-row" data-patch="${esc(p.patch_id)}">
      <td class="mono">${esc(p.patch_id)}</td>
      <td>${esc(p.project_id)}</td>
      <td>${esc(p.operator)}</td>
      <td>${p.suspiciousness.toFixed(3)}</td>
      <td>${hhmm(p.found_at)}</td>
      <td>${p.overfitting === true ? `<span class="flag">overfitting?</span>` : ""}</td>
    </tr>`,
    )
    .join("");
  return `
  <table class="queue">
    <thead><tr>
      <th>patch</th><th>project</th><th>operator</th>
      <th>score</th><th>found</th><th></th>
    </tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

function verdictBadge(status: string): string {
  return `<span class="verdict verdict-${esc(status)}">${esc(status)}</span>`;
}

export function renderPatch(detail: PatchDetail): string {
  const decided = detail.status !== "pending_review";
  const disabled = decided ? "disabled" : "";
  const files = parseUnifiedDiff(detail.diff);
  const panes = files
    .map((file) => {
      const { before, after } = sideBySide(file);
      const pane = (lines: typeof before) =>
        lines
          .map((l) => `<div class="line line-${l.tag === "@" ? "hunk" : l.tag === "+" ? "add" : l.tag === "-" ? "del" : "ctx"}">${esc(l.text)}</div>`)
          .join("");
      return `
      <h4 class="mono">${esc(file.path)}</h4>
      <div class="panes">
        <div class="pane"><h5>before</h5>${pane(before)}</div>
        <div class="pane"><h5>after</h5>${pane(after)}</div>
      </div>`;
    })
    .join("");

  const rawDiff = `<pre class="diff mono">${esc(detail.diff)}</pre>`;
  const report = detail.report
    ? detail.report.verdicts
        .map((v) => `<li>${verdictBadge(v.status)} ${esc(v.name)}${v.at ? ` <span class="mono">${esc(v.at)}</span>` : ""}</li>`)
        .join("")
    : "<li>no report</li>";
  const originallyFailing = detail.failing_tests
    .map((name) => `<li>${verdictBadge("fail")} ${esc(name)} <span class="muted">(before patch)</span></li>`)
    .join("");

  const prLine = detail.pr_id
    ? `<p>pull request: <span class="mono">${esc(detail.pr_id)}</span></p>`
    : "";
  const overfit =
    detail.overfitting === true
      ? `<p class="flag">passes the build suite but fails held-out tests</p>`
      : "";

  return `
  <div class="patch-view" data-status="${esc(detail.status)}">
    <h3 class="mono">${esc(detail.patch_id)} <span class="status">${esc(detail.status)}</span></h3>
    <p>${esc(detail.project_id)} @ ${esc(detail.base_commit)} — build ${esc(detail.build_id)}</p>
    <p>operator ${esc(detail.operator)}, suspiciousness ${detail.suspiciousness.toFixed(3)},
       candidate #${detail.candidate_index}, found at ${hhmm(detail.found_at)}</p>
    <p class="race">${esc(raceContext(detail.found_at, detail.human_fix_at, detail.now))}</p>
    ${overfit}
    ${prLine}
    <div class="actions">
      <button class="approve" data-patch="${esc(detail.patch_id)}" ${disabled}>Approve &rarr; open PR</button>
      <button class="reject" data-patch="${esc(detail.patch_id)}" ${disabled}>Reject</button>
    </div>
    <h4>tests before, then after the patch</h4>
    <ul class="report">${originallyFailing}${report}</ul>
    ${panes}
    <h4>unified diff (exactly what the PR will contain)</h4>
    ${rawDiff}
  </div>`;
}

export function renderStats(stats: Stats, lastUpdated: string): string {
  const rate = ratio(stats.reproduction_rate);
  const cells: Array<[string, string | number]> = [
    ["attempts", stats.attempts],
    ["reproduced", stats.reproduced],
    ["reproduction rate", rate],
    ["plausible patches", stats.plausible_patches],
    ["attempts with a patch", stats.with_plausible],
    ["overfitting patches", stats.overfitting_patches],
    ["PRs opened", stats.prs_opened],
    ["merged", stats.merged],
    ["rejected", stats.rejected],
    ["human-competitive", stats.human_competitive],
  ];
  const grid = cells
    .map(([k, v]) => `<div class="stat"><div class="num">${esc(String(v))}</div><div class="label">${esc(k)}</div></div>`)
    .join("");
  return `
  <div class="stats-grid">${grid}</div>
  <p class="muted">last updated ${esc(lastUpdated)}</p>`;
}

export function renderAttempts(attempts: Attempt[]): string {
  if (attempts.length === 0) {
    return `<p class="empty">No repair attempts yet.</p>`;
  }
  const rows = [...attempts]
    .reverse()
    .map(
      (a) => `
    <tr>
      <td class="mono">${esc(a.attempt_id)}</td>
      <td>${esc(a.project_id)}</td>
      <td>${esc(a.terminal)}</td>
      <td>${a.candidates_tried}</td>
      <td>${a.plausible}</td>
      <td>${a.human_competitive === true ? "yes" : a.human_competitive === false ? "no" : "—"}</td>
    </tr>`,
    )
    .join("");
  return `
  <table class="attempts">
    <thead><tr>
      <th>attempt</th><th>project</th><th>outcome</th>
      <th>candidates</th><th>plausible</th><th>competitive</th>
    </tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderBanner(message: string): string {
  return `<div class="banner">${esc(message)} — retrying…</div>`;
}
