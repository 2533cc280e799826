/** Typed client for the hoopstat service plus a stale-response guard. */

import type {
  CatalogResponse,
  DensityResponse,
  TableResponse,
  TimeseriesResponse,
  TrendsResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string) => Promise<Response>;

async function getJson<T>(fetchFn: FetchLike, url: string): Promise<T> {
  const response = await fetchFn(url);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export interface ApiClient {
  catalog(): Promise<CatalogResponse>;
  density(season: number, players: string[]): Promise<DensityResponse>;
  table(season: number): Promise<TableResponse>;
  trends(filter?: { team?: string; season?: number }): Promise<TrendsResponse>;
  timeseries(players: string[]): Promise<TimeseriesResponse>;
  drawsUrl(season: number, player: string): string;
}

export function createClient(baseUrl: string, fetchFn?: FetchLike): ApiClient {
  const base = baseUrl.replace(/\/+$/, "");
  const doFetch: FetchLike = fetchFn ?? ((url) => fetch(url));
  return {
    catalog: () => getJson<CatalogResponse>(doFetch, `${base}/api/catalog`),
    density: (season, players) =>
      getJson<DensityResponse>(
        doFetch,
        `${base}/api/epaa/density?season=${season}&players=${encodeURIComponent(players.join(","))}`,
      ),
    table: (season) => getJson<TableResponse>(doFetch, `${base}/api/epaa/table?season=${season}`),
    trends: (filter = {}) => {
      const params = new URLSearchParams();
      if (filter.team) params.set("team", filter.team);
      if (filter.season !== undefined) params.set("season", String(filter.season));
      const query = params.toString();
      return getJson<TrendsResponse>(doFetch, `${base}/api/teams/trends${query ? "?" + query : ""}`);
    },
    timeseries: (players) =>
      getJson<TimeseriesResponse>(
        doFetch,
        `${base}/api/epaa/timeseries?players=${encodeURIComponent(players.join(","))}`,
      ),
    drawsUrl: (season, player) =>
      `${base}/api/epaa/draws?season=${season}&player=${encodeURIComponent(player)}`,
  };
}

/** Monotone revision counter: in-flight fetches carry the revision they were
 * issued under, and responses from superseded revisions are discarded. */
export interface RevisionGate {
  next(): number;
  isCurrent(revision: number): boolean;
}

export function createRevisionGate(): RevisionGate {
  let current = 0;
  return {
    next: () => ++current,
    isCurrent: (revision: number) => revision === current,
  };
}

/** Resolve the API base: ?api=... query parameter, else same origin. */
export function resolveApiBase(search: string): string {
  const params = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  return params.get("api") ?? "";
}
