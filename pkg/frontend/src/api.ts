import type {
  CreateSessionRequest,
  Job,
  LayoutResponse,
  Metrics,
  Move,
  OptimizeResult,
  SessionSummary,
  Trajectory,
} from './types.js';

/** Error body the service returns for any 4xx: { code, message, detail }. */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client for the /v1 session API. The fetch implementation is
 * injectable so tests can run against a stub. */
export class ApiClient {
  constructor(
    private readonly baseUrl = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}/v1${path}`, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(
        body.code ?? `HTTP ${response.status}`,
        body.message ?? response.statusText,
        response.status,
        body.detail ?? null,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  listDatasets(): Promise<string[]> {
    return this.request<{ datasets: string[] }>('/datasets').then((r) => r.datasets);
  }

  createSession(request: CreateSessionRequest): Promise<SessionSummary> {
    return this.post('/sessions', request);
  }

  getLayout(sessionId: string, step?: number): Promise<LayoutResponse> {
    const query = step === undefined ? '' : `?step=${step}`;
    return this.request(`/sessions/${sessionId}/layout${query}`);
  }

  submitManipulation(sessionId: string, moves: Move[]): Promise<number> {
    return this.post<{ accepted: number }>(
      `/sessions/${sessionId}/manipulation`, { moves },
    ).then((r) => r.accepted);
  }

  optimize(sessionId: string): Promise<OptimizeResult> {
    return this.post(`/sessions/${sessionId}/optimize?sync=true`, {});
  }

  optimizeAsync(sessionId: string): Promise<string> {
    return this.post<{ job_id: string }>(
      `/sessions/${sessionId}/optimize?sync=false`, {},
    ).then((r) => r.job_id);
  }

  getJob(jobId: string): Promise<Job> {
    return this.request(`/jobs/${jobId}`);
  }

  getMetrics(sessionId: string): Promise<Metrics> {
    return this.request(`/sessions/${sessionId}/metrics`);
  }

  getTrajectories(sessionId: string, fromStep: number, toStep: number): Promise<Trajectory[]> {
    return this.request<{ trajectories: Trajectory[] }>(
      `/sessions/${sessionId}/trajectories?from_step=${fromStep}&to_step=${toStep}`,
    ).then((r) => r.trajectories);
  }

  snapshot(sessionId: string, path?: string): Promise<string> {
    return this.post<{ path: string }>(
      `/sessions/${sessionId}/snapshot`, path ? { path } : {},
    ).then((r) => r.path);
  }

  restore(path: string): Promise<SessionSummary> {
    return this.post('/restore', { path });
  }
}
