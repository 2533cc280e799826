/** Minimal SVG string builders for the four chart views. */

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[]): Extent {
  if (values.length === 0) return { min: 0, max: 1 };
  let min = values[0];
  let max = values[0];
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { min, max };
}

export function linearScale(domain: Extent, range: [number, number]): (v: number) => number {
  const span = domain.max - domain.min || 1;
  return (v) => range[0] + ((v - domain.min) / span) * (range[1] - range[0]);
}

export function polylinePoints(xs: number[], ys: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${xs[i].toFixed(2)},${ys[i].toFixed(2)}`);
  }
  return parts.join(" ");
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export interface ChartSeries {
  label: string;
  color: string;
  xs: number[];
  ys: number[];
  marker?: number; // x position for a vertical marker (e.g. the mean)
}

const W = 720;
const H = 360;
const PAD = { left: 56, right: 16, top: 18, bottom: 42 };

function axisTicks(domain: Extent, n = 6): number[] {
  const ticks: number[] = [];
  for (let i = 0; i <= n; i++) {
    ticks.push(domain.min + ((domain.max - domain.min) * i) / n);
  }
  return ticks;
}

function frame(
  xDomain: Extent,
  yDomain: Extent,
  xLabel: string,
  yLabel: string,
): { sx: (v: number) => number; sy: (v: number) => number; parts: string[] } {
  const sx = linearScale(xDomain, [PAD.left, W - PAD.right]);
  const sy = linearScale(yDomain, [H - PAD.bottom, PAD.top]);
  const parts: string[] = [];
  for (const t of axisTicks(xDomain)) {
    const x = sx(t);
    parts.push(
      `<line x1="${x.toFixed(1)}" y1="${PAD.top}" x2="${x.toFixed(1)}" y2="${H - PAD.bottom}" class="grid"/>`,
      `<text x="${x.toFixed(1)}" y="${H - PAD.bottom + 16}" class="tick" text-anchor="middle">${formatTick(t)}</text>`,
    );
  }
  for (const t of axisTicks(yDomain, 5)) {
    const y = sy(t);
    parts.push(
      `<line x1="${PAD.left}" y1="${y.toFixed(1)}" x2="${W - PAD.right}" y2="${y.toFixed(1)}" class="grid"/>`,
      `<text x="${PAD.left - 6}" y="${(y + 4).toFixed(1)}" class="tick" text-anchor="end">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(PAD.left + W - PAD.right) / 2}" y="${H - 6}" class="axis-label" text-anchor="middle">${esc(xLabel)}</text>`,
    `<text x="14" y="${(PAD.top + H - PAD.bottom) / 2}" class="axis-label" text-anchor="middle" transform="rotate(-90 14 ${(PAD.top + H - PAD.bottom) / 2})">${esc(yLabel)}</text>`,
  );
  return { sx, sy, parts };
}

function formatTick(v: number): string {
  if (Math.abs(v) >= 1000) return v.toFixed(0);
  if (Math.abs(v) >= 10) return v.toFixed(1);
  return v.toFixed(2);
}

export function lineChartSvg(
  series: ChartSeries[],
  xLabel: string,
  yLabel: string,
  invertY = false,
): string {
  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const xDomain = extent(allX);
  let yDomain = extent(allY);
  if (invertY) yDomain = { min: yDomain.max, max: yDomain.min };
  const { sx, sy, parts } = frame(xDomain, yDomain, xLabel, yLabel);
  const legend: string[] = [];
  series.forEach((s, i) => {
    if (s.xs.length === 0) return;
    parts.push(
      `<polyline fill="none" stroke="${s.color}" stroke-width="2" points="${polylinePoints(
        s.xs.map(sx),
        s.ys.map(sy),
      )}"/>`,
    );
    for (let k = 0; k < s.xs.length; k++) {
      parts.push(
        `<circle cx="${sx(s.xs[k]).toFixed(1)}" cy="${sy(s.ys[k]).toFixed(1)}" r="3.5" fill="${s.color}"/>`,
      );
    }
    if (s.marker !== undefined) {
      const x = sx(s.marker);
      parts.push(
        `<line x1="${x.toFixed(1)}" y1="${PAD.top}" x2="${x.toFixed(1)}" y2="${H - PAD.bottom}" stroke="${s.color}" stroke-dasharray="4 3"/>`,
      );
    }
    legend.push(
      `<g transform="translate(${PAD.left + 8 + i * 160}, ${PAD.top + 4})">` +
        `<rect width="10" height="10" fill="${s.color}"/>` +
        `<text x="14" y="9" class="legend">${esc(s.label)}</text></g>`,
    );
  });
  return `<svg viewBox="0 0 ${W} ${H}" xmlns="http://www.w3.org/2000/svg">${parts.join("")}${legend.join("")}</svg>`;
}

export interface ScatterPoint {
  x: number;
  y: number;
  color: string;
  title: string;
}

export function scatterSvg(
  points: ScatterPoint[],
  xLabel: string,
  yLabel: string,
): string {
  const xDomain = extent(points.map((p) => p.x));
  const yDomain = extent(points.map((p) => p.y));
  const { sx, sy, parts } = frame(xDomain, yDomain, xLabel, yLabel);
  for (const p of points) {
    parts.push(
      `<circle cx="${sx(p.x).toFixed(1)}" cy="${sy(p.y).toFixed(1)}" r="4" fill="${p.color}" fill-opacity="0.75"><title>${esc(p.title)}</title></circle>`,
    );
  }
  return `<svg viewBox="0 0 ${W} ${H}" xmlns="http://www.w3.org/2000/svg">${parts.join("")}</svg>`;
}
