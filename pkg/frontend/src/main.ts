import { ApiClient, ApiError } from './api.js';
import { pollJob } from './polling.js';
import { Scatterplot } from './scatterplot.js';
import { screenDeltaToData } from './transform.js';
import type { Metrics, Point, SessionSummary } from './types.js';

const client = new ApiClient();

const el = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const canvas = el<HTMLCanvasElement>('plot');
const plot = new Scatterplot(canvas);

let session: SessionSummary | null = null;
let jobRunning = false;

function toast(message: string): void {
  const box = el<HTMLDivElement>('toast');
  box.textContent = message;
  box.classList.add('visible');
  setTimeout(() => box.classList.remove('visible'), 4000);
}

function showError(error: unknown): void {
  if (error instanceof ApiError) {
    toast(`${error.code}: ${error.message}`);
  } else {
    toast(String(error));
  }
}

function fmt(value: number | undefined): string {
  return value === undefined ? '-' : value.toFixed(1);
}

function renderMetrics(metrics: Metrics | null): void {
  el('metric-precision').textContent = fmt(metrics?.nearest_centroid_precision);
  el('metric-silhouette').textContent = fmt(metrics?.silhouette_scaled);
  el('metric-neighbor-error').textContent =
    metrics ? (100 * metrics.neighbor_error_mean).toFixed(1) : '-';
}

function updateButtons(): void {
  const optimizeButton = el<HTMLButtonElement>('optimize');
  const scenario = Number(el<HTMLSelectElement>('scenario').value);
  const needMoves = scenario === 2 && plot.staging.size === 0;
  optimizeButton.disabled = !session || jobRunning || needMoves;
  el<HTMLButtonElement>('undo').disabled = jobRunning || plot.staging.size === 0;
  el<HTMLButtonElement>('create').disabled = jobRunning;
  el('staged-count').textContent = String(plot.staging.size);
}

async function createSession(): Promise<void> {
  try {
    session = await client.createSession({
      dataset: el<HTMLSelectElement>('dataset').value,
      scenario: Number(el<HTMLSelectElement>('scenario').value),
      family: el<HTMLSelectElement>('family').value,
      init: 'pca',
      seed: 0,
    });
    plot.staging.clear();
    plot.setData(session.layout, session.labels);
    renderMetrics(await client.getMetrics(session.session_id));
    el('status').textContent =
      `session ${session.session_id.slice(0, 8)} (${session.dataset}, ` +
      `scenario ${session.scenario}, ${session.family})`;
  } catch (error) {
    showError(error);
  }
  updateButtons();
}

async function optimize(): Promise<void> {
  if (!session || jobRunning) return;
  try {
    const accepted = await client.submitManipulation(
      session.session_id, plot.staging.toMoves());
    el('status').textContent = `submitted ${accepted} moves, optimizing...`;
    jobRunning = true;
    updateButtons();

    const fromStep = session.steps - 1;
    const jobId = await client.optimizeAsync(session.session_id);
    const result = await pollJob(client, jobId, {
      onProgress: (job) => {
        el('progress').textContent =
          `iteration ${job.iteration} / ${session!.iterations}`;
      },
    });

    session.steps += 1;
    plot.staging.clear();
    plot.setData(result.layout, session.labels);
    plot.setArrows(await client.getTrajectories(
      session.session_id, fromStep, session.steps - 1));
    renderMetrics(result.metrics);
    el('status').textContent = `step ${session.steps - 1} ready`;
  } catch (error) {
    showError(error);
  } finally {
    jobRunning = false;
    el('progress').textContent = '';
    updateButtons();
  }
}

// ---- canvas interactions ---------------------------------------------------

let dragIndex: number | null = null;
let dragStart: Point | null = null;

function pixelOf(event: MouseEvent): Point {
  const rect = canvas.getBoundingClientRect();
  return [event.clientX - rect.left, event.clientY - rect.top];
}

canvas.addEventListener('mousedown', (event) => {
  if (jobRunning) {
    toast('JobRunning: drags are locked while optimizing');
    return;
  }
  const pixel = pixelOf(event);
  dragIndex = plot.pick(pixel);
  dragStart = pixel;
  if (dragIndex !== null) plot.setHovered(dragIndex);
});

canvas.addEventListener('mousemove', (event) => {
  const pixel = pixelOf(event);
  if (dragIndex === null || dragStart === null) {
    plot.setHovered(plot.pick(pixel));
    return;
  }
  const delta = screenDeltaToData(plot.viewport,
    pixel[0] - dragStart[0], pixel[1] - dragStart[1]);
  if (delta[0] === 0 && delta[1] === 0) return;
  const label = plot.labelOf(dragIndex);
  if (event.shiftKey && label !== null && session?.labels) {
    plot.staging.dragClass(session.labels, label, delta, plot.points);
  } else {
    plot.staging.dragPoint(dragIndex, delta, plot.points);
  }
  dragStart = pixel;
  plot.render();
  updateButtons();
});

window.addEventListener('mouseup', () => {
  dragIndex = null;
  dragStart = null;
});

// ---- bootstrapping ---------------------------------------------------------

async function init(): Promise<void> {
  try {
    const datasets = await client.listDatasets();
    const select = el<HTMLSelectElement>('dataset');
    select.innerHTML = datasets
      .map((name) => `<option value="${name}">${name}</option>`)
      .join('');
  } catch (error) {
    showError(error);
  }
  el('create').addEventListener('click', () => void createSession());
  el('optimize').addEventListener('click', () => void optimize());
  el('undo').addEventListener('click', () => {
    plot.staging.undo();
    plot.render();
    updateButtons();
  });
  el<HTMLSelectElement>('scenario').addEventListener('change', updateButtons);
  updateButtons();
}

void init();
