// End-to-end review round trip against the real bot API.
//
// Needs the Python package installed (the `repairbot` CLI on PATH); the
// suite skips itself cleanly when it is not. Covers the full gate:
// enqueue -> patch visible within 5s -> approve -> PR in the forge inbox
// with a byte-identical diff; reject -> no PR; stats screen == CLI stats.

import assert from "node:assert/strict";
import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";

import { ApiClient } from "../src/api.js";
import { Dashboard, POLL_INTERVAL_MS } from "../src/state.js";

const haveBot = spawnSync("repairbot", ["--help"], { stdio: "ignore" }).status === 0;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitFor<T>(
  what: string,
  probe: () => Promise<T | null>,
  timeoutMs: number,
  stepMs = 250,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = await probe().catch(() => null);
    if (value !== null) return value;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await sleep(stepMs);
  }
}

test("review round trip over the live API", { skip: !haveBot }, async (t) => {
  const forgeDir = mkdtempSync(join(tmpdir(), "repairbot-e2e-"));

  const seeded = spawnSync(
    "repairbot",
    ["seed", "--projects", "8", "--fail-rate", "0.5", "--flaky-rate", "0",
     "--seed", "77", "--out", forgeDir],
    { encoding: "utf-8" },
  );
  assert.equal(seeded.status, 0, seeded.stderr);

  const bot = spawn(
    "repairbot",
    ["run", "--forge", forgeDir, "--review-mode", "human",
     "--serve", "127.0.0.1:0"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  t.after(() => bot.kill("SIGKILL"));

  let stdout = "";
  bot.stdout.on("data", (chunk) => {
    stdout += String(chunk);
  });

  const base = await waitFor(
    "api address on stdout",
    async () => {
      const match = stdout.match(/api listening on (http:\/\/[\d.]+:\d+)/);
      return match ? match[1]! : null;
    },
    30_000,
  );
  await waitFor(
    "pipeline completion",
    async () => (stdout.includes("pipeline done") ? true : null),
    60_000,
  );

  const client = new ApiClient(base);
  const dashboard = new Dashboard(client);

  // enqueue -> visible within the 5s gate (we allow one poll interval)
  const pollStart = Date.now();
  const queue = await waitFor(
    "pending patches in the dashboard",
    async () => {
      await dashboard.refresh();
      return dashboard.view.queue.length >= 2 ? dashboard.view.queue : null;
    },
    POLL_INTERVAL_MS + 2000,
  );
  assert.ok(Date.now() - pollStart <= 5000, "queue must appear within 5s");
  assert.ok(dashboard.view.stats, "stats arrive with the same poll");

  // approve the first patch: PR lands in the forge inbox, diff byte-identical
  const first = queue[0]!;
  const detail = await client.patch(first.patch_id);
  const approved = await dashboard.decide(first.patch_id, "approve", "e2e");
  assert.ok(approved && typeof approved === "object", String(approved));
  assert.ok(approved.pr_id, "approval must open a pull request");

  const prFile = join(forgeDir, "inbox", `${approved.pr_id}.json`);
  const pr = JSON.parse(readFileSync(prFile, "utf-8"));
  assert.equal(pr.diff, detail.diff, "PR diff must be byte-identical");
  assert.equal(pr.project_id, detail.project_id);

  // double-decide is rejected by the API with 409
  const repeat = await dashboard.decide(first.patch_id, "approve", "e2e");
  assert.equal(repeat, "already-decided");

  // reject the second patch: no new PR appears
  const inboxBefore = readdirSync(join(forgeDir, "inbox")).length;
  const second = dashboard.view.queue[0]!;
  const rejected = await dashboard.decide(second.patch_id, "reject", "e2e");
  assert.ok(rejected && typeof rejected === "object");
  assert.equal((rejected as { pr_id: string | null }).pr_id, null);
  assert.equal(readdirSync(join(forgeDir, "inbox")).length, inboxBefore);

  // stats screen numbers equal `repairbot stats` on the same attempt log
  const apiStats = await client.stats();
  const cli = spawnSync(
    "repairbot",
    ["stats", "--attempts", join(forgeDir, "attempts.jsonl")],
    { encoding: "utf-8" },
  );
  assert.equal(cli.status, 0, cli.stderr);
  assert.deepEqual(apiStats, JSON.parse(cli.stdout));
});
