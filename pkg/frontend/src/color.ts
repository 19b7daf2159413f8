// Score coloring: a continuous monotone gradient from calm blue to
// alert red. Scores are probabilities, so the display is continuous;
// the alert threshold only adds a highlight band on top.

export type Band = "unscored" | "calm" | "elevated" | "alert";

export const UNSCORED_COLOR = "#9aa0a6";
export const DEFAULT_ALERT_THRESHOLD = 0.8;
export const ELEVATED_THRESHOLD = 0.5;

export function colorForScore(score: number | null): string {
  if (score === null || Number.isNaN(score)) {
    return UNSCORED_COLOR;
  }
  const s = Math.min(1, Math.max(0, score));
  // hue runs 210 (calm blue) down to 0 (alert red), monotone in score
  const hue = 210 * (1 - s);
  const saturation = 55 + 35 * s;
  const lightness = 55 - 10 * s;
  return `hsl(${hue.toFixed(1)}, ${saturation.toFixed(1)}%, ${lightness.toFixed(1)}%)`;
}

export function bandForScore(
  score: number | null,
  alertThreshold: number = DEFAULT_ALERT_THRESHOLD,
): Band {
  if (score === null || Number.isNaN(score)) return "unscored";
  if (score >= alertThreshold) return "alert";
  if (score >= ELEVATED_THRESHOLD) return "elevated";
  return "calm";
}

export function hueOf(color: string): number {
  const match = /hsl\(([\d.]+)/.exec(color);
  if (!match) return NaN;
  return parseFloat(match[1]);
}
