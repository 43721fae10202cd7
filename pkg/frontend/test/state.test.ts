import { describe, expect, test } from "vitest";

import { decodeHash, encodeHash, parseView, viewToString } from "../src/state";

describe("view spec text form", () => {
  test("round trips", () => {
    for (const text of ["overview", "scene:s2", "character:john"]) {
      expect(viewToString(parseView(text))).toBe(text);
    }
  });

  test("rejects malformed", () => {
    for (const bad of ["", "scene:", "zoom:s1"]) {
      expect(() => parseView(bad)).toThrow();
    }
  });
});

describe("URL hash encoding", () => {
  test("full state round trips", () => {
    const state = {
      story: "yellow-wallpaper",
      view: { kind: "character" as const, target: "john" },
      selection: { event: "s2e1", character: "john" }
    };
    expect(decodeHash(encodeHash(state))).toEqual(state);
  });

  test("selection omitted when empty", () => {
    const state = {
      story: "open-boat",
      view: { kind: "overview" as const },
      selection: null
    };
    const hash = encodeHash(state);
    expect(hash).not.toContain("sel=");
    expect(decodeHash(hash)).toEqual(state);
  });

  test("ids with separators survive encoding", () => {
    const state = {
      story: "a b&c",
      view: { kind: "scene" as const, target: "s 1=x" },
      selection: { event: "e#1", character: "per/son" }
    };
    const decoded = decodeHash(encodeHash(state));
    expect(decoded.story).toBe(state.story);
    expect(decoded.view).toEqual(state.view);
    // The selection separator is the first slash; character ids keep the rest.
    expect(decoded.selection).toEqual({ event: "e#1", character: "per/son" });
  });

  test("malformed hash degrades to defaults", () => {
    const decoded = decodeHash("#view=diagonal&sel=no-slash");
    expect(decoded.view).toEqual({ kind: "overview" });
    expect(decoded.selection).toBeNull();
    expect(decoded.story).toBeNull();
  });
});
