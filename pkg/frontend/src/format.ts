// Pure formatting helpers: logical time, ratios, race context, and the
// unified-diff parser feeding the side-by-side panes. The diff is always
// rendered from the served text, never recomputed here.

export function hhmm(minutes: number): string {
  const h = Math.floor(minutes / 60) % 24;
  const m = Math.floor(minutes % 60);
  return `${String(h).padStart(2, "0")}:${String(m).padStart(2, "0")}`;
}

export function ratio(value: number): string {
  return (value * 100).toFixed(1) + "%";
}

export function raceContext(
  foundAt: number,
  humanFixAt: number | null,
  now: number,
): string {
  if (humanFixAt === null) {
    return "no human fix scheduled";
  }
  const lead = humanFixAt - foundAt;
  if (lead > 0) {
    const pending = humanFixAt > now ? "pending" : "landed";
    return `human fix ${pending} at ${hhmm(humanFixAt)} — bot leads by ${lead} min`;
  }
  return `human fixed first at ${hhmm(humanFixAt)} — bot late by ${-lead} min`;
}

export interface DiffLine {
  tag: " " | "+" | "-" | "@";
  text: string;
}

export interface FileDiff {
  path: string;
  lines: DiffLine[];
}

export function parseUnifiedDiff(diff: string): FileDiff[] {
  const files: FileDiff[] = [];
  let current: FileDiff | null = null;
  for (const raw of diff.split("\n")) {
    if (raw.startsWith("--- ")) {
      continue;
    }
    if (raw.startsWith("+++ ")) {
      let path = raw.slice(4).trim();
      if (path.startsWith("b/")) {
        path = path.slice(2);
      }
      current = { path, lines: [] };
      files.push(current);
      continue;
    }
    if (current === null || raw === "") {
      continue;
    }
    if (raw.startsWith("@@")) {
      current.lines.push({ tag: "@", text: raw });
    } else if (raw.startsWith("+")) {
      current.lines.push({ tag: "+", text: raw.slice(1) });
    } else if (raw.startsWith("-")) {
      current.lines.push({ tag: "-", text: raw.slice(1) });
    } else {
      current.lines.push({ tag: " ", text: raw.startsWith(" ") ? raw.slice(1) : raw });
    }
  }
  return files;
}

export interface SideBySide {
  before: DiffLine[];
  after: DiffLine[];
}

// Context and deletions feed the left pane; context and additions the right.
export function sideBySide(file: FileDiff): SideBySide {
  const before: DiffLine[] = [];
  const after: DiffLine[] = [];
  for (const line of file.lines) {
    if (line.tag === "@") {
      before.push(line);
      after.push(line);
    } else if (line.tag === " ") {
      before.push(line);
      after.push(line);
    } else if (line.tag === "-") {
      before.push(line);
    } else {
      after.push(line);
    }
  }
  return { before, after };
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
