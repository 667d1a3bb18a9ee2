import { describe, expect, it } from "vitest";

import { ApiClient, Job } from "../src/api.js";
import { pollJob, submitAndPoll } from "../src/poll.js";

function jobIn(state: Job["state"], done = 0, total = 2): Job {
  return { job_id: "j1", package_id: "local", state, progress: { done, total }, reason: "" };
}

/** fetch stub serving a scripted sequence of job states */
function scriptedApi(states: Job[]): { api: ApiClient; polls: () => number } {
  let calls = 0;
  const fetchImpl = (async (url: RequestInfo | URL) => {
    const u = String(url);
    if (!u.includes("/api/jobs/")) throw new Error(`unexpected url ${u}`);
    const job = states[Math.min(calls, states.length - 1)];
    calls += 1;
    return new Response(JSON.stringify(job), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  return { api: new ApiClient("http://test", fetchImpl), polls: () => calls };
}

const instantSleep = async (_ms: number) => {};

describe("pollJob", () => {
  it("polls until terminal and reports progress", async () => {
    const { api, polls } = scriptedApi([
      jobIn("queued"),
      jobIn("decompiling", 1),
      jobIn("decompiling", 2),
      jobIn("complete", 2),
    ]);
    const seen: number[] = [];
    const job = await pollJob(api, "j1", {
      sleep: instantSleep,
      onProgress: (j) => seen.push(j.progress.done),
    });
    expect(job.state).toBe("complete");
    expect(polls()).toBe(4); // stopped exactly at the terminal state
    expect(seen).toEqual([0, 1, 2, 2]);
  });

  it("stops polling immediately on failed and rejects with the reason", async () => {
    const failed = { ...jobIn("failed"), reason: "ParseError: bad module" };
    const { api, polls } = scriptedApi([failed, jobIn("complete")]);
    await expect(pollJob(api, "j1", { sleep: instantSleep })).rejects.toThrow(
      /ParseError/,
    );
    expect(polls()).toBe(1);
  });

  it("backs off from 1s toward the 5s ceiling", async () => {
    const waits: number[] = [];
    const { api } = scriptedApi([
      jobIn("queued"),
      jobIn("queued"),
      jobIn("queued"),
      jobIn("queued"),
      jobIn("complete"),
    ]);
    await pollJob(api, "j1", {
      sleep: async (ms) => {
        waits.push(ms);
      },
    });
    expect(waits[0]).toBe(1000);
    expect(Math.max(...waits)).toBeLessThanOrEqual(5000);
    for (let i = 1; i < waits.length; i++) {
      expect(waits[i]).toBeGreaterThanOrEqual(waits[i - 1]);
    }
  });
});

describe("submitAndPoll", () => {
  it("returns without polling when the submit response is already terminal", async () => {
    const { api, polls } = scriptedApi([jobIn("complete")]);
    const job = await submitAndPoll(api, async () => jobIn("complete", 2, 2));
    expect(job.state).toBe("complete");
    expect(polls()).toBe(0); // cache hit: no job polls issued
  });
});
