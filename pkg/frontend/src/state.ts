/** Comparison selection state and its URL-hash round trip.
 *
 * The selection (season, up to four players, active view) is the single
 * source of truth for every view; it serializes into the location hash so
 * comparisons are shareable links.
 */

export const MAX_PLAYERS = 4;

export const VIEWS = ["density", "table", "trends", "timeseries"] as const;
export type View = (typeof VIEWS)[number];

export interface ComparisonSelection {
  season: number | null;
  players: string[];
  view: View;
}

export function emptySelection(): ComparisonSelection {
  return { season: null, players: [], view: "density" };
}

/** Add a player; a fifth player (or a duplicate) is rejected unchanged. */
export function addPlayer(
  sel: ComparisonSelection,
  player: string,
): { selection: ComparisonSelection; added: boolean; reason?: string } {
  if (sel.players.includes(player)) {
    return { selection: sel, added: false, reason: "already selected" };
  }
  if (sel.players.length >= MAX_PLAYERS) {
    return {
      selection: sel,
      added: false,
      reason: `at most ${MAX_PLAYERS} players can be compared`,
    };
  }
  return {
    selection: { ...sel, players: [...sel.players, player] },
    added: true,
  };
}

export function removePlayer(sel: ComparisonSelection, player: string): ComparisonSelection {
  return { ...sel, players: sel.players.filter((p) => p !== player) };
}

export function setSeason(sel: ComparisonSelection, season: number | null): ComparisonSelection {
  return { ...sel, season };
}

export function setView(sel: ComparisonSelection, view: View): ComparisonSelection {
  return { ...sel, view };
}

export function toHash(sel: ComparisonSelection): string {
  const params = new URLSearchParams();
  params.set("view", sel.view);
  if (sel.season !== null) params.set("season", String(sel.season));
  if (sel.players.length > 0) params.set("players", sel.players.join(","));
  return "#" + params.toString();
}

export function fromHash(hash: string): ComparisonSelection {
  const sel = emptySelection();
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!raw) return sel;
  const params = new URLSearchParams(raw);
  const view = params.get("view");
  if (view && (VIEWS as readonly string[]).includes(view)) {
    sel.view = view as View;
  }
  const season = params.get("season");
  if (season && /^\d+$/.test(season)) {
    sel.season = parseInt(season, 10);
  }
  const players = params.get("players");
  if (players) {
    for (const p of players.split(",")) {
      const trimmed = p.trim();
      if (trimmed && sel.players.length < MAX_PLAYERS && !sel.players.includes(trimmed)) {
        sel.players.push(trimmed);
      }
    }
  }
  return sel;
}
