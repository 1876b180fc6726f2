/** Color scales shared by the heatmap, area charts, and donut. */

import { PROPERTY_KEYS, type PropertyKey } from "./types.js";

type Rgb = [number, number, number];

const RAMP: [number, Rgb][] = [
  [0.0, [248, 250, 252]],
  [0.5, [96, 165, 250]],
  [1.0, [30, 58, 138]],
];

/** Sequential light-to-deep-blue ramp over [0, 1]. */
export function heatColor(value: number): string {
  const v = Math.min(1, Math.max(0, value));
  for (let k = 1; k < RAMP.length; k++) {
    const [hiPos, hiRgb] = RAMP[k];
    if (v > hiPos) continue;
    const [loPos, loRgb] = RAMP[k - 1];
    const t = hiPos === loPos ? 0 : (v - loPos) / (hiPos - loPos);
    const channel = (c: number) => Math.round(loRgb[c] + t * (hiRgb[c] - loRgb[c]));
    return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`;
  }
  const last = RAMP[RAMP.length - 1][1];
  return `rgb(${last[0]}, ${last[1]}, ${last[2]})`;
}

/** Categorical color for one of the twelve properties. */
export function propertyColor(key: PropertyKey): string {
  const index = PROPERTY_KEYS.indexOf(key);
  const hue = Math.round((index * 360) / PROPERTY_KEYS.length);
  return `hsl(${hue}, 62%, 48%)`;
}
