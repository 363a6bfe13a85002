import { describe, expect, it } from 'vitest';
import {
  dataToScreen,
  fitViewport,
  pixelInDataUnits,
  screenDeltaToData,
  screenToData,
} from '../src/transform.js';
import type { Point } from '../src/types.js';

function randomLayout(n: number, seed = 1): Point[] {
  // deterministic LCG so failures are reproducible
  let state = seed;
  const next = () => {
    state = (state * 1103515245 + 12345) % 2147483648;
    return state / 2147483648;
  };
  return Array.from({ length: n }, () => [next() * 40 - 20, next() * 8 - 4]);
}

describe('fitViewport', () => {
  it('keeps every point inside the margin box', () => {
    const layout = randomLayout(100);
    const view = fitViewport(layout, 800, 600, 30);
    for (const point of layout) {
      const [x, y] = dataToScreen(view, point);
      expect(x).toBeGreaterThanOrEqual(30 - 1e-9);
      expect(x).toBeLessThanOrEqual(800 - 30 + 1e-9);
      expect(y).toBeGreaterThanOrEqual(30 - 1e-9);
      expect(y).toBeLessThanOrEqual(600 - 30 + 1e-9);
    }
  });

  it('uses one shared scale for both axes', () => {
    const view = fitViewport([[0, 0], [10, 1]], 800, 600);
    const origin = dataToScreen(view, [0, 0]);
    const unitX = dataToScreen(view, [1, 0]);
    const unitY = dataToScreen(view, [0, 1]);
    expect(unitX[0] - origin[0]).toBeCloseTo(origin[1] - unitY[1], 9);
  });

  it('handles a degenerate single-point layout', () => {
    const view = fitViewport([[3, 3]], 400, 400);
    const [x, y] = dataToScreen(view, [3, 3]);
    expect(x).toBeCloseTo(200, 6);
    expect(y).toBeCloseTo(200, 6);
  });
});

describe('round trips', () => {
  it('data -> screen -> data stays within one pixel of data units', () => {
    const layout = randomLayout(200, 7);
    const view = fitViewport(layout, 820, 640);
    const tolerance = pixelInDataUnits(view);
    for (const point of layout) {
      const back = screenToData(view, dataToScreen(view, point));
      expect(Math.hypot(back[0] - point[0], back[1] - point[1]))
        .toBeLessThanOrEqual(tolerance);
    }
  });

  it('screen -> data -> screen is exact to float precision', () => {
    const view = fitViewport(randomLayout(50), 820, 640);
    for (const pixel of [[0, 0], [410, 320], [819, 639]] as Point[]) {
      const [x, y] = dataToScreen(view, screenToData(view, pixel));
      expect(x).toBeCloseTo(pixel[0], 8);
      expect(y).toBeCloseTo(pixel[1], 8);
    }
  });

  it('flips y: moving a pixel down decreases data y', () => {
    const view = fitViewport(randomLayout(50), 820, 640);
    const delta = screenDeltaToData(view, 10, 10);
    expect(delta[0]).toBeGreaterThan(0);
    expect(delta[1]).toBeLessThan(0);
  });

  it('a zero-pixel delta maps to a zero data delta', () => {
    const view = fitViewport(randomLayout(10), 820, 640);
    expect(screenDeltaToData(view, 0, 0)).toEqual([0, 0]);
  });
});
