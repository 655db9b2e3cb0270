import { describe, expect, it } from "vitest";

import { ApiError, MemoryStore, ServiceClient } from "../src/api.js";
import { FakeService, makeTasks } from "./fakeService.js";
import { isDone } from "../src/types.js";

function makeClient(service: FakeService, store = new MemoryStore()) {
  return new ServiceClient("http://svc", service.fetch, store);
}

describe("ServiceClient", () => {
  it("enrolls and walks the task sequence", async () => {
    const service = new FakeService(makeTasks());
    const client = makeClient(service);
    const pid = await client.enroll("tester");
    expect(pid).toBe("p001");
    const task = await client.nextTask(pid);
    expect(isDone(task)).toBe(false);
    if (!isDone(task)) {
      expect(task.taskId).toBe("w01");
      expect(task.assetUrls?.q).toBe("/assets/q.png");
    }
  });

  it("raises ApiError with the server message on 4xx", async () => {
    const service = new FakeService(makeTasks());
    const client = makeClient(service);
    await expect(client.nextTask("ghost")).rejects.toThrowError(ApiError);
    await expect(client.nextTask("ghost")).rejects.toThrow("unknown participant");
  });

  it("buffers a response until the POST succeeds", async () => {
    const service = new FakeService(makeTasks());
    const store = new MemoryStore();
    const client = makeClient(service, store);
    const pid = await client.enroll("x");
    service.failNextPosts = 1;
    const payload = { participantId: pid, taskId: "w01", mostSimilar: "a",
      elapsedMs: 900 };
    await expect(client.submitResponse(payload)).rejects.toThrow("network");
    expect(client.pendingResponse()).toMatchObject({ taskId: "w01" });
    const result = await client.flushPending();
    expect(result?.accepted).toBe(true);
    expect(client.pendingResponse()).toBeNull();
    expect(service.responseList()).toHaveLength(1);
  });

  it("is idempotent across retries (server deduplicates)", async () => {
    const service = new FakeService(makeTasks());
    const client = makeClient(service);
    const pid = await client.enroll("x");
    const payload = { participantId: pid, taskId: "w01", mostSimilar: "a",
      elapsedMs: 500 };
    await client.submitResponse(payload);
    await client.submitResponse(payload);
    expect(service.responseList()).toHaveLength(1);
  });

  it("reads results only after close", async () => {
    const service = new FakeService(makeTasks());
    const client = makeClient(service);
    await expect(client.results()).rejects.toThrow("session still running");
    await client.close();
    const summary = await client.results();
    expect(summary.taskCount).toBe(16);
    expect(summary.warmupCount).toBe(5);
  });
});
