/** Density curves from served samples or served histogram bins.
 *
 * Statistics stay server-authoritative: this module only bins raw values for
 * the axis (when the service sent them unbinned) and applies display-level
 * kernel smoothing over the bins, with Scott's-rule bandwidth computed from
 * the binned moments.
 */

import type { DensityBins, DensityPlayer } from "./types.js";

export function binValues(values: number[], binCount = 60): DensityBins {
  if (values.length === 0) {
    return { edges: [0, 1], counts: [0] };
  }
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const edges: number[] = [];
  for (let i = 0; i <= binCount; i++) {
    edges.push(lo + ((hi - lo) * i) / binCount);
  }
  const counts = new Array<number>(binCount).fill(0);
  const width = (hi - lo) / binCount;
  for (const v of values) {
    let k = Math.floor((v - lo) / width);
    if (k >= binCount) k = binCount - 1;
    if (k < 0) k = 0;
    counts[k] += 1;
  }
  return { edges, counts };
}

export function binMidpoints(bins: DensityBins): number[] {
  const mids: number[] = [];
  for (let i = 0; i + 1 < bins.edges.length; i++) {
    mids.push((bins.edges[i] + bins.edges[i + 1]) / 2);
  }
  return mids;
}

/** Scott's rule on the served bins: h = sigma * n^(-1/5) * (4/3)^(1/5),
 * with sigma and n taken from the binned sample moments. */
export function scottBandwidth(bins: DensityBins): number {
  const mids = binMidpoints(bins);
  const n = bins.counts.reduce((a, b) => a + b, 0);
  if (n === 0) return 1;
  const mean = mids.reduce((acc, m, i) => acc + m * bins.counts[i], 0) / n;
  const variance =
    mids.reduce((acc, m, i) => acc + bins.counts[i] * (m - mean) ** 2, 0) / n;
  const sigma = Math.sqrt(variance);
  if (sigma === 0) {
    const width = bins.edges[1] - bins.edges[0];
    return width > 0 ? width : 1;
  }
  return sigma * Math.pow(4 / 3, 1 / 5) * Math.pow(n, -1 / 5);
}

export interface Curve {
  x: number[];
  y: number[];
}

/** Gaussian-kernel density over bin midpoints, normalized to integrate to 1. */
export function smoothDensity(bins: DensityBins, bandwidth?: number, gridSize = 160): Curve {
  const mids = binMidpoints(bins);
  const n = bins.counts.reduce((a, b) => a + b, 0);
  const h = bandwidth ?? scottBandwidth(bins);
  const lo = bins.edges[0] - 3 * h;
  const hi = bins.edges[bins.edges.length - 1] + 3 * h;
  const x: number[] = [];
  const y: number[] = [];
  const norm = 1 / (n * h * Math.sqrt(2 * Math.PI));
  for (let g = 0; g < gridSize; g++) {
    const xv = lo + ((hi - lo) * g) / (gridSize - 1);
    let density = 0;
    for (let i = 0; i < mids.length; i++) {
      if (bins.counts[i] === 0) continue;
      const t = (xv - mids[i]) / h;
      density += bins.counts[i] * Math.exp(-0.5 * t * t);
    }
    x.push(xv);
    y.push(density * norm);
  }
  return { x, y };
}

export interface PlayerCurve {
  player: string;
  label: string;
  mean: number;
  curve: Curve;
}

/** One smoothed curve per served player, in selection (payload) order. */
export function playerCurves(players: DensityPlayer[]): PlayerCurve[] {
  return players.map((p) => {
    const bins = p.kind === "binned" && p.bins ? p.bins : binValues(p.values ?? []);
    return {
      player: p.player,
      label: p.label,
      mean: p.epaa_mean,
      curve: smoothDensity(bins),
    };
  });
}
