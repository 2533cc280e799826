/** Per-player EPAA-over-time series with a fetch-once cache.
 *
 * Deselecting a player only drops its line; the remaining series stay cached
 * so no refetch happens for them.
 */

import type { ApiClient } from "./api.js";
import type { TimeseriesSeries } from "./types.js";

export type SeriesCache = Map<string, TimeseriesSeries>;

/** Ensure every selected player's series is cached; fetches only the missing
 * ones (single batched request). Returns series in selection order. */
export async function syncSeries(
  cache: SeriesCache,
  players: string[],
  client: Pick<ApiClient, "timeseries">,
): Promise<TimeseriesSeries[]> {
  const missing = players.filter((p) => !cache.has(p));
  if (missing.length > 0) {
    const response = await client.timeseries(missing);
    for (const series of response.series) {
      cache.set(series.player, series);
    }
  }
  return players.map(
    (p) => cache.get(p) ?? { player: p, points: [] },
  );
}
