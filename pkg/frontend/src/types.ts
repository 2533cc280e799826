/** Payload shapes of the hoopstat JSON API. */

export interface CatalogResponse {
  seasons: number[];
  entities: Record<string, { players: string[]; teams: string[] }>;
  fingerprints: Record<string, Record<string, string>>;
}

export interface DensityBins {
  edges: number[];
  counts: number[];
}

export interface DensityPlayer {
  player: string;
  label: string;
  n: number;
  n_shots: number;
  games_divisor: number;
  epaa_mean: number;
  epaa_mean_per_game: number;
  kind: "raw" | "binned";
  values?: number[];
  bins?: DensityBins;
}

export interface DensityResponse {
  season: number;
  players: DensityPlayer[];
}

export interface TableRow {
  label: string;
  player: string;
  rank: number;
  mean: number;
  median: number;
  sd: number;
  ci80_lo: number;
  ci80_hi: number;
  ci95_lo: number;
  ci95_hi: number;
}

export interface TableResponse {
  season: number;
  rows: TableRow[];
}

export interface TrendsRow {
  team: string;
  season: number;
  region: string;
  attempt_share: number;
  make_rate: number | null;
}

export interface TrendsResponse {
  rows: TrendsRow[];
}

export interface TimeseriesPoint {
  season: number;
  epaa_mean: number;
  epaa_mean_per_game: number;
  rank: number;
}

export interface TimeseriesSeries {
  player: string;
  points: TimeseriesPoint[];
}

export interface TimeseriesResponse {
  series: TimeseriesSeries[];
}
