import { describe, expect, it } from "vitest";

import {
  bandForScore,
  colorForScore,
  hueOf,
  UNSCORED_COLOR,
} from "../src/color.js";

describe("score color scale", () => {
  it("maps [0,1] monotonically from calm to alert hue", () => {
    let previous = Infinity;
    for (let s = 0; s <= 1.0001; s += 0.05) {
      const hue = hueOf(colorForScore(Math.min(1, s)));
      expect(hue).toBeLessThanOrEqual(previous);
      previous = hue;
    }
    expect(hueOf(colorForScore(0))).toBe(210); // calm blue
    expect(hueOf(colorForScore(1))).toBe(0); // alert red
  });

  it("never synthesizes a score color for unscored nodes", () => {
    expect(colorForScore(null)).toBe(UNSCORED_COLOR);
    expect(colorForScore(null)).not.toBe(colorForScore(0));
  });

  it("clamps out-of-range values", () => {
    expect(colorForScore(1.5)).toBe(colorForScore(1));
    expect(colorForScore(-0.2)).toBe(colorForScore(0));
  });
});

describe("alert bands", () => {
  it("splits unscored / calm / elevated / alert", () => {
    expect(bandForScore(null)).toBe("unscored");
    expect(bandForScore(0.1)).toBe("calm");
    expect(bandForScore(0.6)).toBe("elevated");
    expect(bandForScore(0.97)).toBe("alert");
  });

  it("honors a configurable alert threshold", () => {
    expect(bandForScore(0.7, 0.65)).toBe("alert");
    expect(bandForScore(0.7, 0.9)).toBe("elevated");
  });

  it("treats the threshold as inclusive", () => {
    expect(bandForScore(0.8, 0.8)).toBe("alert");
  });
});
