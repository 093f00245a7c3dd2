import assert from "node:assert/strict";
import { test } from "node:test";

import { renderAttempts, renderPatch, renderQueue, renderStats } from "../src/render.js";
import { ratio } from "../src/format.js";
import { fixture } from "./helpers.js";
import type { Attempt, PatchDetail, PatchSummary, Stats } from "../src/types.js";

const queueFixture = fixture<PatchSummary[]>("queue.json");
const patchFixture = fixture<PatchDetail>("patch.json");
const statsFixture = fixture<Stats>("stats.json");
const attemptsFixture = fixture<Attempt[]>("attempts.json");

test("empty queue renders an explicit empty state", () => {
  assert.match(renderQueue([]), /No pending patches/);
});

test("queue rows carry the patch id for navigation", () => {
  const html = renderQueue(queueFixture);
  for (const patch of queueFixture) {
    assert.ok(html.includes(`data-patch="${patch.patch_id}"`));
  }
});

test("patch view embeds the exact served diff text", () => {
  const html = renderPatch(patchFixture);
  // the raw diff pane shows the byte-exact (html-escaped) served diff
  const escaped = patchFixture.diff
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
  assert.ok(html.includes(escaped));
});

test("action buttons enabled only while pending review", () => {
  const pending = renderPatch({ ...patchFixture, status: "pending_review" });
  assert.ok(!/class="approve"[^>]*disabled/.test(pending));
  for (const status of ["merged", "rejected", "approved"] as const) {
    const html = renderPatch({ ...patchFixture, status });
    assert.match(html, /class="approve"[^>]*disabled/);
    assert.match(html, /class="reject"[^>]*disabled/);
  }
});

test("patch view shows provenance and race context", () => {
  const html = renderPatch(patchFixture);
  assert.ok(html.includes(patchFixture.operator));
  assert.ok(html.includes(`candidate #${patchFixture.candidate_index}`));
  assert.match(html, /human fix/);
  for (const name of patchFixture.failing_tests) {
    assert.ok(html.includes(name), `failing test ${name} must be listed`);
  }
});

test("stats screen shows every number straight from the API payload", () => {
  const html = renderStats(statsFixture, "t0");
  for (const value of [
    statsFixture.attempts,
    statsFixture.reproduced,
    statsFixture.plausible_patches,
    statsFixture.prs_opened,
    statsFixture.merged,
    statsFixture.human_competitive,
  ]) {
    assert.ok(html.includes(`>${value}<`), `stat ${value} missing`);
  }
  assert.ok(html.includes(ratio(statsFixture.reproduction_rate)));
  assert.match(html, /last updated t0/);
});

test("attempts feed renders newest first", () => {
  const html = renderAttempts(attemptsFixture);
  const first = attemptsFixture[0]!;
  const last = attemptsFixture[attemptsFixture.length - 1]!;
  assert.ok(html.indexOf(last.attempt_id) < html.indexOf(first.attempt_id));
  assert.match(renderAttempts([]), /No repair attempts/);
});
