import type { Move, Point } from './types.js';

/** Local buffer of not-yet-submitted point moves, keyed by point index.
 * Staged positions are absolute data coordinates; dragging a point that
 * is already staged moves it from its staged position, so repeated drags
 * compose additively. Every mutation is undoable. */
export class StagingBuffer {
  private staged = new Map<number, Point>();
  private history: Map<number, Point>[] = [];

  get size(): number {
    return this.staged.size;
  }

  has(index: number): boolean {
    return this.staged.has(index);
  }

  positionOf(index: number, layout: Point[]): Point {
    return this.staged.get(index) ?? layout[index];
  }

  /** Stage a single-point drag by a data-space delta. Zero-delta drags
   * on unstaged points leave the buffer untouched. */
  dragPoint(index: number, delta: Point, layout: Point[]): void {
    if (delta[0] === 0 && delta[1] === 0 && !this.staged.has(index)) {
      return;
    }
    this.pushHistory();
    const [x, y] = this.positionOf(index, layout);
    this.staged.set(index, [x + delta[0], y + delta[1]]);
  }

  /** Stage a shared delta for every point of a class, as one undoable step. */
  dragClass(labels: number[], classId: number, delta: Point, layout: Point[]): number {
    const members: number[] = [];
    labels.forEach((label, index) => {
      if (label === classId) members.push(index);
    });
    if (members.length === 0) {
      return 0;
    }
    this.pushHistory();
    for (const index of members) {
      const [x, y] = this.positionOf(index, layout);
      this.staged.set(index, [x + delta[0], y + delta[1]]);
    }
    return members.length;
  }

  undo(): void {
    const previous = this.history.pop();
    if (previous) {
      this.staged = previous;
    }
  }

  clear(): void {
    this.staged = new Map();
    this.history = [];
  }

  /** Serialize into the submit_manipulation payload, sorted by index. */
  toMoves(): Move[] {
    return [...this.staged.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([index, [x, y]]) => [index, x, y]);
  }

  entries(): [number, Point][] {
    return [...this.staged.entries()];
  }

  private pushHistory(): void {
    this.history.push(new Map(this.staged));
  }
}
