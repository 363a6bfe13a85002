import type { ApiClient } from './api.js';
import type { Job, OptimizeResult } from './types.js';

export interface PollOptions {
  intervalMs?: number;
  onProgress?: (job: Job) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/** Poll a job until it leaves the running state. Resolves with the
 * optimize result, rejects with the service's error message. */
export async function pollJob(
  client: ApiClient,
  jobId: string,
  options: PollOptions = {},
): Promise<OptimizeResult> {
  const { intervalMs = 250, onProgress, sleep = defaultSleep } = options;
  for (;;) {
    const job = await client.getJob(jobId);
    onProgress?.(job);
    if (job.status === 'done') {
      if (!job.result) {
        throw new Error('job finished without a result');
      }
      return job.result;
    }
    if (job.status === 'failed') {
      throw new Error(job.error ? `${job.error.code}: ${job.error.message}` : 'job failed');
    }
    await sleep(intervalMs);
  }
}
