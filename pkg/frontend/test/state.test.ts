import { describe, expect, it } from "vitest";

import {
  initialState,
  selectDiff,
  selectModule,
  selectView,
  withPackage,
  withProgress,
} from "../src/state.js";
import { isValidPackageId } from "../src/api.js";
import { functionNames } from "../src/render.js";

describe("ViewState", () => {
  it("starts on the decompiled view with a sane diff pairing", () => {
    const s = initialState();
    expect(s.selectedView).toBe("decompiled");
    expect(s.diffLeft).toBe("low_level");
    expect(s.diffRight).toBe("decompiled");
  });

  it("rejects views that are not one of the five server views", () => {
    expect(() => selectView(initialState(), "sideways")).toThrow(/unknown view/);
    expect(() => selectDiff(initialState(), "interface", "nope")).toThrow(/unknown view/);
  });

  it("selects only known modules", () => {
    const s = withPackage(initialState(), "local", ["a", "b"]);
    expect(s.selectedModule).toBe("a");
    expect(selectModule(s, "b").selectedModule).toBe("b");
    expect(() => selectModule(s, "ghost")).toThrow(/unknown module/);
  });

  it("progress is monotonically nondecreasing", () => {
    let s = withProgress(initialState(), 3, 10, "decompiling");
    s = withProgress(s, 2, 10, "decompiling"); // stale poll arrives late
    expect(s.progress.done).toBe(3);
    s = withProgress(s, 10, 10, "complete");
    expect(s.progress.done).toBe(10);
    expect(s.jobState).toBe("complete");
  });
});

describe("package id validation", () => {
  it("accepts only 0x + 64 hex", () => {
    expect(isValidPackageId("0x" + "a".repeat(64))).toBe(true);
    expect(isValidPackageId("0x" + "a".repeat(63))).toBe(false);
    expect(isValidPackageId("a".repeat(66))).toBe(false);
    expect(isValidPackageId("0x" + "g".repeat(64))).toBe(false);
  });
});

describe("functionNames", () => {
  it("finds declarations across visibility forms", () => {
    const text = [
      "module 0x1::m {",
      "    fun private_one() {}",
      "    public fun shown(): u64 { 1 }",
      "    public(friend) fun quoted() {}",
      "    entry fun run() {}",
      "    native fun ffi();",
      "}",
    ].join("\n");
    expect(functionNames(text)).toEqual([
      "private_one",
      "shown",
      "quoted",
      "run",
      "ffi",
    ]);
  });

  it("ignores the word fun inside comments mid-line", () => {
    expect(functionNames("let x = 1; // fun fact")).toEqual([]);
  });
});
