import type { Point } from './types.js';

/** Invertible affine map between data coordinates and canvas pixels.
 * The y axis flips so larger data y renders higher on screen. */
export interface Viewport {
  scale: number; // pixels per data unit, shared by both axes
  offsetX: number;
  offsetY: number;
  height: number;
}

/** Fit the layout's bounding box into a width x height canvas with a
 * pixel margin, preserving aspect ratio. Degenerate boxes get unit extent. */
export function fitViewport(
  layout: Point[],
  width: number,
  height: number,
  margin = 30,
): Viewport {
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const [x, y] of layout) {
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    minY = Math.min(minY, y);
    maxY = Math.max(maxY, y);
  }
  if (!Number.isFinite(minX)) {
    minX = maxX = minY = maxY = 0;
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
  const centerX = (minX + maxX) / 2;
  const centerY = (minY + maxY) / 2;
  return {
    scale,
    offsetX: width / 2 - centerX * scale,
    offsetY: height / 2 - centerY * scale,
    height,
  };
}

export function dataToScreen(view: Viewport, point: Point): Point {
  return [
    point[0] * view.scale + view.offsetX,
    view.height - (point[1] * view.scale + view.offsetY),
  ];
}

export function screenToData(view: Viewport, pixel: Point): Point {
  return [
    (pixel[0] - view.offsetX) / view.scale,
    (view.height - pixel[1] - view.offsetY) / view.scale,
  ];
}

/** Convert a screen-space drag delta into data units. */
export function screenDeltaToData(view: Viewport, dx: number, dy: number): Point {
  return [dx / view.scale, dy === 0 ? 0 : -dy / view.scale];
}

/** One pixel expressed in data units; the round-trip error bound. */
export function pixelInDataUnits(view: Viewport): number {
  return 1 / view.scale;
}
