import type { Verdict } from "./types.js";

/**
 * The single verdict-to-color table. Every colored node in the UI goes
 * through this lookup with a verdict received from the server; nothing in
 * the client computes a verdict itself.
 */
export const VERDICT_COLORS: Record<Verdict, string> = {
  TRUE: "#c8e6c9",
  FALSE: "#ffcdd2",
  UNSUPPORTED: "#fff3c4",
};

/** Fill for nodes that carry no verdict (evidence, unknown ids). */
export const NO_VERDICT_COLOR = "#eceff1";

export function colorForVerdict(verdict: Verdict | undefined): string {
  return verdict ? VERDICT_COLORS[verdict] : NO_VERDICT_COLOR;
}
