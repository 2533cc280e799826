import { describe, expect, it } from "vitest";

import {
  MAX_PLAYERS,
  addPlayer,
  emptySelection,
  fromHash,
  removePlayer,
  setSeason,
  setView,
  toHash,
} from "../src/state.js";

describe("player selection", () => {
  it("accepts up to four players and rejects the fifth", () => {
    let sel = emptySelection();
    for (const p of ["a", "b", "c", "d"]) {
      const result = addPlayer(sel, p);
      expect(result.added).toBe(true);
      sel = result.selection;
    }
    expect(sel.players).toEqual(["a", "b", "c", "d"]);
    const fifth = addPlayer(sel, "e");
    expect(fifth.added).toBe(false);
    expect(fifth.reason).toContain(String(MAX_PLAYERS));
    expect(fifth.selection.players).toEqual(["a", "b", "c", "d"]);
  });

  it("rejects duplicates without consuming a slot", () => {
    const sel = addPlayer(emptySelection(), "curry").selection;
    const again = addPlayer(sel, "curry");
    expect(again.added).toBe(false);
    expect(again.selection.players).toEqual(["curry"]);
  });

  it("removes players and preserves order of the rest", () => {
    let sel = emptySelection();
    for (const p of ["a", "b", "c"]) sel = addPlayer(sel, p).selection;
    sel = removePlayer(sel, "b");
    expect(sel.players).toEqual(["a", "c"]);
  });
});

describe("url hash round trip", () => {
  it("serializes and parses back identically", () => {
    let sel = emptySelection();
    sel = setSeason(sel, 2021);
    sel = setView(sel, "timeseries");
    for (const p of ["alice", "bob"]) sel = addPlayer(sel, p).selection;
    const hash = toHash(sel);
    expect(fromHash(hash)).toEqual(sel);
  });

  it("parses an empty hash to the empty selection", () => {
    expect(fromHash("")).toEqual(emptySelection());
    expect(fromHash("#")).toEqual(emptySelection());
  });

  it("caps players parsed from a crafted hash at four", () => {
    const sel = fromHash("#view=density&players=a,b,c,d,e,f");
    expect(sel.players).toEqual(["a", "b", "c", "d"]);
  });

  it("ignores unknown views and keeps the default", () => {
    expect(fromHash("#view=pivot").view).toBe("density");
  });
});
