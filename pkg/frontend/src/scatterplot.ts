import { StagingBuffer } from './staging.js';
import {
  dataToScreen,
  fitViewport,
  screenToData,
  Viewport,
} from './transform.js';
import type { Point, Trajectory } from './types.js';

const CLASS_COLORS = [
  '#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd',
  '#8c564b', '#e377c2', '#7f7f7f', '#bcbd22', '#17becf',
];

const POINT_RADIUS = 4;
const PICK_RADIUS = 8;

export function classColor(label: number | null): string {
  if (label === null) return '#555555';
  return CLASS_COLORS[((label % CLASS_COLORS.length) + CLASS_COLORS.length)
    % CLASS_COLORS.length];
}

/** Canvas scatter plot over a service-provided layout. Renders staged
 * (not yet optimized) positions hollow, trajectory arrows between steps,
 * and the label of the hovered or dragged point. */
export class Scatterplot {
  private view: Viewport;
  private layout: Point[] = [];
  private labels: number[] | null = null;
  private arrows: Trajectory[] = [];
  private hovered: number | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    readonly staging = new StagingBuffer(),
  ) {
    this.view = fitViewport([], canvas.width, canvas.height);
  }

  setData(layout: Point[], labels: number[] | null): void {
    this.layout = layout;
    this.labels = labels;
    this.view = fitViewport(layout, this.canvas.width, this.canvas.height);
    this.arrows = [];
    this.render();
  }

  setArrows(arrows: Trajectory[]): void {
    // only draw arrows for visible displacement (> 2 px)
    this.arrows = arrows.filter((t) => {
      const a = dataToScreen(this.view, t.old_xy);
      const b = dataToScreen(this.view, t.new_xy);
      return Math.hypot(b[0] - a[0], b[1] - a[1]) > 2;
    });
    this.render();
  }

  get viewport(): Viewport {
    return this.view;
  }

  get points(): Point[] {
    return this.layout;
  }

  labelOf(index: number): number | null {
    return this.labels ? this.labels[index] : null;
  }

  /** Nearest point within the pick radius of a canvas pixel, or null. */
  pick(pixel: Point): number | null {
    let best: number | null = null;
    let bestDistance = PICK_RADIUS;
    this.layout.forEach((point, index) => {
      const staged = this.staging.positionOf(index, this.layout);
      const [sx, sy] = dataToScreen(this.view, staged);
      const distance = Math.hypot(sx - pixel[0], sy - pixel[1]);
      if (distance < bestDistance) {
        best = index;
        bestDistance = distance;
      }
    });
    return best;
  }

  setHovered(index: number | null): void {
    if (index !== this.hovered) {
      this.hovered = index;
      this.render();
    }
  }

  toData(pixel: Point): Point {
    return screenToData(this.view, pixel);
  }

  render(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);

    ctx.strokeStyle = '#999';
    ctx.fillStyle = '#999';
    for (const arrow of this.arrows) {
      this.drawArrow(ctx, dataToScreen(this.view, arrow.old_xy),
        dataToScreen(this.view, arrow.new_xy));
    }

    this.layout.forEach((point, index) => {
      const staged = this.staging.has(index);
      const position = this.staging.positionOf(index, this.layout);
      const [x, y] = dataToScreen(this.view, position);
      ctx.beginPath();
      ctx.arc(x, y, POINT_RADIUS, 0, 2 * Math.PI);
      const color = classColor(this.labelOf(index));
      if (staged) {
        ctx.strokeStyle = color;
        ctx.lineWidth = 2;
        ctx.stroke();
      } else {
        ctx.fillStyle = color;
        ctx.fill();
      }
    });

    if (this.hovered !== null) {
      const position = this.staging.positionOf(this.hovered, this.layout);
      const [x, y] = dataToScreen(this.view, position);
      const label = this.labelOf(this.hovered);
      const text = label === null ? `#${this.hovered}` : `#${this.hovered} (class ${label})`;
      ctx.fillStyle = '#000';
      ctx.font = '12px sans-serif';
      ctx.fillText(text, x + 8, y - 8);
    }
  }

  private drawArrow(ctx: CanvasRenderingContext2D, from: Point, to: Point): void {
    const angle = Math.atan2(to[1] - from[1], to[0] - from[0]);
    const head = 6;
    ctx.beginPath();
    ctx.moveTo(from[0], from[1]);
    ctx.lineTo(to[0], to[1]);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(to[0], to[1]);
    ctx.lineTo(to[0] - head * Math.cos(angle - 0.4), to[1] - head * Math.sin(angle - 0.4));
    ctx.lineTo(to[0] - head * Math.cos(angle + 0.4), to[1] - head * Math.sin(angle + 0.4));
    ctx.closePath();
    ctx.fill();
  }
}
