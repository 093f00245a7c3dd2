// Payload shapes of the bot's HTTP API. The dashboard performs no repair
// logic: every number displayed originates from one of these responses.

export type PatchStatus =
  | "candidate"
  | "plausible"
  | "pending_review"
  | "approved"
  | "rejected"
  | "merged";

export interface PatchSummary {
  patch_id: string;
  project_id: string;
  build_id: string;
  operator: string;
  suspiciousness: number;
  candidate_index: number;
  found_at: number;
  status: PatchStatus;
  overfitting: boolean | null;
  now: number;
}

export interface PatchEdit {
  kind: string;
  stmt_id: number;
  path: Array<string | number>;
  operator: string;
  before: string;
  after: string | null;
}

export interface TestVerdict {
  name: string;
  status: "pass" | "fail" | "error" | "budget_exceeded";
  at?: string;
  kind?: string;
}

export interface PatchDetail {
  patch_id: string;
  project_id: string;
  base_commit: string;
  build_id: string;
  edits: PatchEdit[];
  operator: string;
  suspiciousness: number;
  candidate_index: number;
  found_at: number;
  status: PatchStatus;
  overfitting: boolean | null;
  report: { verdicts: TestVerdict[]; total_steps: number } | null;
  pr_id: string | null;
  diff: string;
  failing_tests: string[];
  human_fix_at: number | null;
  now: number;
}

export interface DecisionResponse {
  patch_id: string;
  status: PatchStatus;
  pr_id: string | null;
}

export interface Stats {
  attempts: number;
  eligible: number;
  reproduced: number;
  reproduction_rate: number;
  with_plausible: number;
  plausible_patches: number;
  overfitting_patches: number;
  prs_opened: number;
  merged: number;
  rejected: number;
  human_competitive: number;
  terminal: Record<string, number>;
}

export interface Attempt {
  attempt_id: string;
  build_id: string;
  project_id: string;
  classification: string;
  failing_tests: string[];
  reproduction: string | null;
  candidates_tried: number;
  plausible: number;
  patch_ids: string[];
  top_patch: string | null;
  overfitting_patch_ids: string[];
  patch_found_at: number | null;
  pr_id: string | null;
  merged_at: number | null;
  human_fix_at: number | null;
  human_competitive: boolean | null;
  terminal: string;
}

export interface RaceOutcome {
  build_id: string;
  patch_found_at: number;
  pr_opened_at: number | null;
  human_fix_at: number;
  decision: "merged" | "rejected" | "open";
  human_competitive: boolean;
}
