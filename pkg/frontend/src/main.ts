/** App shell: wires the selection state to the four views over the JSON API. */

import { ApiError, createClient, createRevisionGate, resolveApiBase } from "./api.js";
import { playerCurves } from "./density.js";
import { downloadFilename, fetchDrawsVerified, saveToDisk } from "./download.js";
import {
  ComparisonSelection,
  MAX_PLAYERS,
  VIEWS,
  View,
  addPlayer,
  fromHash,
  removePlayer,
  setSeason,
  setView,
  toHash,
} from "./state.js";
import { SERIES_COLORS, lineChartSvg, scatterSvg } from "./svg.js";
import { SortState, initialSort, sortRows, toggleSort } from "./table.js";
import { SeriesCache, syncSeries } from "./timeseries.js";
import { filterTrends, regionsIn, teamsIn } from "./trends.js";
import type { CatalogResponse, TableRow, TrendsRow } from "./types.js";

const client = createClient(resolveApiBase(window.location.search));
const gate = createRevisionGate();

let selection: ComparisonSelection = fromHash(window.location.hash);
let catalog: CatalogResponse | null = null;
let sortState: SortState = initialSort();
let tableRows: TableRow[] = [];
let trendsRows: TrendsRow[] | null = null;
let trendsTeam: string | null = null;
let trendsRegion: string | null = null;
let trendsMetric: "attempt_share" | "make_rate" = "attempt_share";
let timeseriesMetric: "rank" | "epaa_mean" = "rank";
const seriesCache: SeriesCache = new Map();

const el = {
  season: document.getElementById("season-select") as HTMLSelectElement,
  playerPick: document.getElementById("player-pick") as HTMLSelectElement,
  addPlayer: document.getElementById("add-player") as HTMLButtonElement,
  tabs: document.getElementById("view-tabs") as HTMLElement,
  chips: document.getElementById("selection-chips") as HTMLElement,
  message: document.getElementById("message") as HTMLElement,
  root: document.getElementById("view-root") as HTMLElement,
};

function showMessage(text: string, kind: "error" | "info" = "error"): void {
  el.message.textContent = text;
  el.message.className = kind;
  el.message.classList.remove("hidden");
}

function clearMessage(): void {
  el.message.classList.add("hidden");
}

function update(next: ComparisonSelection): void {
  selection = next;
  history.replaceState(null, "", toHash(selection));
  render();
}

function seasonPlayers(): string[] {
  if (!catalog || selection.season === null) return [];
  return catalog.entities[String(selection.season)]?.players ?? [];
}

function renderControls(): void {
  if (!catalog) return;
  el.season.innerHTML = catalog.seasons
    .map((s) => `<option value="${s}" ${s === selection.season ? "selected" : ""}>${s}</option>`)
    .join("");
  const players = seasonPlayers();
  el.playerPick.innerHTML =
    `<option value="">add player...</option>` +
    players
      .filter((p) => !selection.players.includes(p))
      .map((p) => `<option value="${p}">${p}</option>`)
      .join("");
  el.tabs.innerHTML = VIEWS.map(
    (v) =>
      `<button data-view="${v}" class="${v === selection.view ? "active" : ""}">${v}</button>`,
  ).join("");
  el.chips.innerHTML = selection.players
    .map(
      (p, i) =>
        `<span class="chip" style="border-color:${SERIES_COLORS[i]}">` +
        `${p}` +
        `<button data-download="${p}" title="download ${downloadFilename(p, selection.season ?? 0)}">&#8681;</button>` +
        `<button data-remove="${p}" title="remove">&times;</button></span>`,
    )
    .join("");
  el.chips.querySelectorAll<HTMLButtonElement>("[data-remove]").forEach((btn) => {
    btn.onclick = () => update(removePlayer(selection, btn.dataset.remove!));
  });
  el.chips.querySelectorAll<HTMLButtonElement>("[data-download]").forEach((btn) => {
    btn.onclick = () => void downloadDraws(btn.dataset.download!);
  });
  el.tabs.querySelectorAll<HTMLButtonElement>("[data-view]").forEach((btn) => {
    btn.onclick = () => update(setView(selection, btn.dataset.view as View));
  });
}

async function downloadDraws(player: string): Promise<void> {
  if (selection.season === null) return;
  try {
    const verified = await fetchDrawsVerified(
      client.drawsUrl(selection.season, player),
      player,
      selection.season,
    );
    saveToDisk(verified, document);
    showMessage(`downloaded ${verified.filename} (sha256 verified)`, "info");
  } catch (err) {
    showMessage(err instanceof Error ? err.message : String(err));
  }
}

async function renderDensity(): Promise<void> {
  if (selection.players.length === 0) {
    el.root.innerHTML = `<p class="empty">Pick up to ${MAX_PLAYERS} players to compare EPAA densities.</p>`;
    return;
  }
  if (selection.season === null) return;
  const revision = gate.next();
  try {
    const data = await client.density(selection.season, selection.players);
    if (!gate.isCurrent(revision)) return;
    clearMessage();
    const curves = playerCurves(data.players);
    const svg = lineChartSvg(
      curves.map((c, i) => ({
        label: `${c.player} (mean ${c.mean.toFixed(1)})`,
        color: SERIES_COLORS[i],
        xs: c.curve.x,
        ys: c.curve.y,
        marker: c.mean,
      })),
      "EPAA (points over the season's shots)",
      "density",
    );
    el.root.innerHTML = svg;
  } catch (err) {
    if (!gate.isCurrent(revision)) return;
    if (err instanceof ApiError) {
      showMessage(`density request failed: ${err.message}`);
    } else {
      showMessage(String(err));
    }
  }
}

function renderTableRows(): void {
  const rows = sortRows(tableRows as unknown as Record<string, unknown>[], sortState);
  const columns: (keyof TableRow)[] = [
    "rank", "player", "mean", "median", "sd", "ci80_lo", "ci80_hi", "ci95_lo", "ci95_hi",
  ];
  const header = columns
    .map((c) => {
      const mark = sortState.column === c ? (sortState.direction === "desc" ? " ▼" : " ▲") : "";
      return `<th data-col="${c}">${c}${mark}</th>`;
    })
    .join("");
  const body = rows
    .map((r) => {
      const cells = columns
        .map((c) => {
          const v = r[c];
          return `<td>${typeof v === "number" && !Number.isInteger(v) ? (v as number).toFixed(2) : v}</td>`;
        })
        .join("");
      return `<tr data-player="${r.player}">${cells}</tr>`;
    })
    .join("");
  el.root.innerHTML = `<table id="epaa-table"><thead><tr>${header}</tr></thead><tbody>${body}</tbody></table>`;
  el.root.querySelectorAll<HTMLTableCellElement>("th[data-col]").forEach((th) => {
    th.onclick = () => {
      sortState = toggleSort(sortState, th.dataset.col!);
      renderTableRows();
    };
  });
  el.root.querySelectorAll<HTMLTableRowElement>("tr[data-player]").forEach((tr) => {
    tr.onclick = () => {
      const result = addPlayer(selection, tr.dataset.player!);
      if (!result.added) {
        showMessage(result.reason ?? "cannot add player");
      } else {
        clearMessage();
        update(result.selection);
      }
    };
  });
}

async function renderTable(): Promise<void> {
  if (selection.season === null) return;
  const revision = gate.next();
  try {
    const data = await client.table(selection.season);
    if (!gate.isCurrent(revision)) return;
    tableRows = data.rows;
    renderTableRows();
  } catch (err) {
    if (gate.isCurrent(revision)) showMessage(`table request failed: ${err}`);
  }
}

async function renderTrends(): Promise<void> {
  const revision = gate.next();
  try {
    if (trendsRows === null) {
      const data = await client.trends();
      if (!gate.isCurrent(revision)) return;
      trendsRows = data.rows;
    }
    const rows = trendsRows;
    const teams = teamsIn(rows);
    const regions = regionsIn(rows);
    const filtered = filterTrends(rows, { team: trendsTeam, region: trendsRegion }).filter(
      (r) => trendsMetric === "attempt_share" || r.make_rate !== null,
    );
    const colorOf = new Map(regions.map((r, i) => [r, SERIES_COLORS[i % SERIES_COLORS.length]]));
    const svg = scatterSvg(
      filtered.map((r) => ({
        x: r.season,
        y: trendsMetric === "attempt_share" ? r.attempt_share : (r.make_rate as number),
        color: colorOf.get(r.region) ?? "#555",
        title: `${r.team} ${r.season} ${r.region}: ${trendsMetric === "attempt_share" ? r.attempt_share.toFixed(3) : (r.make_rate as number).toFixed(3)}`,
      })),
      "season",
      trendsMetric === "attempt_share" ? "share of shots taken" : "make rate",
    );
    el.root.innerHTML =
      `<div class="filters">` +
      `<select id="trends-team"><option value="">all teams</option>${teams
        .map((t) => `<option ${t === trendsTeam ? "selected" : ""}>${t}</option>`)
        .join("")}</select>` +
      `<select id="trends-region"><option value="">all regions</option>${regions
        .map((r) => `<option ${r === trendsRegion ? "selected" : ""}>${r}</option>`)
        .join("")}</select>` +
      `<select id="trends-metric">` +
      `<option value="attempt_share" ${trendsMetric === "attempt_share" ? "selected" : ""}>shot taking</option>` +
      `<option value="make_rate" ${trendsMetric === "make_rate" ? "selected" : ""}>accuracy</option>` +
      `</select></div>` +
      svg;
    (document.getElementById("trends-team") as HTMLSelectElement).onchange = (e) => {
      trendsTeam = (e.target as HTMLSelectElement).value || null;
      void renderTrends();
    };
    (document.getElementById("trends-region") as HTMLSelectElement).onchange = (e) => {
      trendsRegion = (e.target as HTMLSelectElement).value || null;
      void renderTrends();
    };
    (document.getElementById("trends-metric") as HTMLSelectElement).onchange = (e) => {
      trendsMetric = (e.target as HTMLSelectElement).value as typeof trendsMetric;
      void renderTrends();
    };
  } catch (err) {
    if (gate.isCurrent(revision)) showMessage(`trends request failed: ${err}`);
  }
}

async function renderTimeseries(): Promise<void> {
  if (selection.players.length === 0) {
    el.root.innerHTML = `<p class="empty">Pick players to see their EPAA over time.</p>`;
    return;
  }
  const revision = gate.next();
  try {
    const series = await syncSeries(seriesCache, selection.players, client);
    if (!gate.isCurrent(revision)) return;
    const svg = lineChartSvg(
      series.map((s, i) => ({
        label: s.player,
        color: SERIES_COLORS[i],
        xs: s.points.map((p) => p.season),
        ys: s.points.map((p) => (timeseriesMetric === "rank" ? p.rank : p.epaa_mean)),
      })),
      "season",
      timeseriesMetric === "rank" ? "rank (1 = best)" : "mean EPAA",
      timeseriesMetric === "rank",
    );
    el.root.innerHTML =
      `<div class="filters"><select id="ts-metric">` +
      `<option value="rank" ${timeseriesMetric === "rank" ? "selected" : ""}>rank by season</option>` +
      `<option value="epaa_mean" ${timeseriesMetric === "epaa_mean" ? "selected" : ""}>mean EPAA</option>` +
      `</select></div>` +
      svg;
    (document.getElementById("ts-metric") as HTMLSelectElement).onchange = (e) => {
      timeseriesMetric = (e.target as HTMLSelectElement).value as typeof timeseriesMetric;
      void renderTimeseries();
    };
  } catch (err) {
    if (gate.isCurrent(revision)) showMessage(`timeseries request failed: ${err}`);
  }
}

function render(): void {
  renderControls();
  switch (selection.view) {
    case "density":
      void renderDensity();
      break;
    case "table":
      void renderTable();
      break;
    case "trends":
      void renderTrends();
      break;
    case "timeseries":
      void renderTimeseries();
      break;
  }
}

async function start(): Promise<void> {
  try {
    catalog = await client.catalog();
  } catch (err) {
    showMessage(
      err instanceof ApiError && err.status === 503
        ? "the service has no artifacts loaded yet"
        : `cannot reach the API: ${err}`,
    );
    return;
  }
  if (selection.season === null && catalog.seasons.length > 0) {
    selection = setSeason(selection, catalog.seasons[catalog.seasons.length - 1]);
  }
  el.season.onchange = () => {
    seriesCache.clear();
    update(setSeason(selection, parseInt(el.season.value, 10)));
  };
  el.addPlayer.onclick = () => {
    const pick = el.playerPick.value;
    if (!pick) return;
    const result = addPlayer(selection, pick);
    if (!result.added) {
      showMessage(result.reason ?? "cannot add player");
      return;
    }
    clearMessage();
    update(result.selection);
  };
  window.addEventListener("hashchange", () => {
    selection = fromHash(window.location.hash);
    render();
  });
  render();
}

void start();
