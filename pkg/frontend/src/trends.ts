/** Filtering helpers for the team shot-trends scatter. */

import type { TrendsRow } from "./types.js";

export interface TrendsFilter {
  team?: string | null;
  region?: string | null;
}

export function filterTrends(rows: TrendsRow[], filter: TrendsFilter): TrendsRow[] {
  return rows.filter(
    (r) =>
      (!filter.team || r.team === filter.team) &&
      (!filter.region || r.region === filter.region),
  );
}

export function teamsIn(rows: TrendsRow[]): string[] {
  return [...new Set(rows.map((r) => r.team))].sort();
}

export function regionsIn(rows: TrendsRow[]): string[] {
  return [...new Set(rows.map((r) => r.region))];
}

/** Attempt-share totals per (team, season); served shares sum to 1 for any
 * team-season with shots, which tooltips surface as a sanity check. */
export function shareSums(rows: TrendsRow[]): Map<string, number> {
  const sums = new Map<string, number>();
  for (const r of rows) {
    const key = `${r.team}:${r.season}`;
    sums.set(key, (sums.get(key) ?? 0) + r.attempt_share);
  }
  return sums;
}
