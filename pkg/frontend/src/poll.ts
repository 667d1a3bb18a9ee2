import { ApiClient, Job } from "./api.js";

const TERMINAL = new Set(["complete", "failed"]);

export interface PollOptions {
  intervalMs?: number; // starting interval
  maxIntervalMs?: number; // backoff ceiling
  timeoutMs?: number;
  onProgress?: (job: Job) => void;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/**
 * Poll a job until it reaches a terminal state. The interval starts at 1s
 * and backs off to 5s; polling always stops on complete/failed. Rejects on
 * `failed` (with the job's reason) and on timeout.
 */
export async function pollJob(
  api: ApiClient,
  jobId: string,
  opts: PollOptions = {},
): Promise<Job> {
  const sleep = opts.sleep ?? defaultSleep;
  const maxInterval = opts.maxIntervalMs ?? 5000;
  const timeout = opts.timeoutMs ?? 120000;
  let interval = opts.intervalMs ?? 1000;
  const started = Date.now();

  for (;;) {
    const job = await api.job(jobId);
    opts.onProgress?.(job);
    if (TERMINAL.has(job.state)) {
      if (job.state === "failed") {
        throw new Error(job.reason || "job failed");
      }
      return job;
    }
    if (Date.now() - started > timeout) {
      throw new Error(`job ${jobId} did not finish within ${timeout}ms`);
    }
    await sleep(interval);
    interval = Math.min(interval * 2, maxInterval);
  }
}

/** Submit uploads (or a package id) and poll to completion. */
export async function submitAndPoll(
  api: ApiClient,
  submit: () => Promise<Job>,
  opts: PollOptions = {},
): Promise<Job> {
  const job = await submit();
  if (TERMINAL.has(job.state)) {
    if (job.state === "failed") throw new Error(job.reason || "job failed");
    return job; // cache hit: complete in one round trip
  }
  return pollJob(api, job.job_id, opts);
}
