/** Sortable table logic: pure, stable sorting recomputed from server order.
 *
 * Clicking a header sorts descending, clicking again flips to ascending;
 * because sorting is always applied to the server's original row order with
 * a stable comparator, toggling twice lands back on the order shown after
 * the first click, and equal keys never shuffle.
 */

export type SortDirection = "asc" | "desc";

export interface SortState {
  column: string | null;
  direction: SortDirection;
}

export function initialSort(): SortState {
  return { column: null, direction: "desc" };
}

export function toggleSort(state: SortState, column: string): SortState {
  if (state.column !== column) {
    return { column, direction: "desc" };
  }
  return { column, direction: state.direction === "desc" ? "asc" : "desc" };
}

/** Stable sort of the server rows by the state's column; null state returns
 * the server order untouched. */
export function sortRows<T extends Record<string, unknown>>(rows: T[], state: SortState): T[] {
  if (state.column === null) {
    return rows.slice();
  }
  const column = state.column;
  const sign = state.direction === "desc" ? -1 : 1;
  const decorated = rows.map((row, index) => ({ row, index }));
  decorated.sort((a, b) => {
    const va = a.row[column];
    const vb = b.row[column];
    let cmp = 0;
    if (typeof va === "number" && typeof vb === "number") {
      cmp = va - vb;
    } else {
      cmp = String(va) < String(vb) ? -1 : String(va) > String(vb) ? 1 : 0;
    }
    if (cmp !== 0) return sign * cmp;
    return a.index - b.index; // stability under equal keys
  });
  return decorated.map((d) => d.row);
}
