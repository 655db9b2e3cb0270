import { describe, expect, it } from "vitest";

import { MemoryStore, ServiceClient } from "../src/api.js";
import { SessionController } from "../src/session.js";
import { FakeService, makeTasks } from "./fakeService.js";

function clock(start = 0) {
  let t = start;
  return { now: () => t, tick: (ms: number) => { t += ms; } };
}

function scriptedController(service: FakeService, now?: () => number) {
  const client = new ServiceClient("http://svc", service.fetch, new MemoryStore());
  const reveals: string[] = [];
  const lates: string[] = [];
  const phases: string[] = [];
  const session = new SessionController(
    client,
    {
      onReveal: (c) => reveals.push(c),
      onLate: (t) => lates.push(t),
      onPhase: (p) => phases.push(p),
    },
    { now },
  );
  return { session, reveals, lates, phases, client };
}

describe("SessionController", () => {
  it("runs a complete 5-warmup + 16-task session with reveal on the first three",
     async () => {
    const service = new FakeService(makeTasks());
    const c = clock();
    const { session, reveals, phases } = scriptedController(service, c.now);
    await session.start("participant");
    expect(session.phase).toBe("intro");
    await session.beginTasks();

    let guard = 0;
    while (session.phase !== "done" && guard < 60) {
      guard += 1;
      if (session.phase === "reveal") {
        await session.continueAfterReveal();
        continue;
      }
      const vm = session.current!;
      c.tick(2000);
      vm.selectMost(vm.task.optionOrnamentIds[0]);
      await session.submit();
    }
    expect(session.phase).toBe("done");
    expect(session.completedTasks).toBe(21);
    expect(reveals).toEqual(["a", "a", "a"]);
    expect(service.responseList()).toHaveLength(21);
    // every displayed phase originated from controller transitions
    expect(phases.filter((p) => p === "reveal")).toHaveLength(3);
  });

  it("flags a late response when the timer ran out before submit", async () => {
    const service = new FakeService(makeTasks());
    const c = clock();
    const { session, lates } = scriptedController(service, c.now);
    await session.start("slow");
    await session.beginTasks();
    const vm = session.current!;
    vm.selectMost(vm.task.optionOrnamentIds[0]);
    c.tick(31_000);
    expect(vm.expired()).toBe(true);
    const state = await session.onExpiry();
    expect(state).toBe("submitted");
    expect(lates).toEqual(["w01"]);
    expect(service.responseList()[0].late).toBe(true);
  });

  it("expiry with an incomplete selection keeps waiting", async () => {
    const service = new FakeService(makeTasks());
    const c = clock();
    const { session } = scriptedController(service, c.now);
    await session.start("idle");
    await session.beginTasks();
    c.tick(31_000);
    expect(await session.onExpiry()).toBe("waiting");
    expect(session.phase).toBe("task");
    expect(service.responseList()).toHaveLength(0);
  });

  it("retries a failed submit through the pending buffer", async () => {
    const service = new FakeService(makeTasks());
    const { session } = scriptedController(service);
    await session.start("flaky");
    await session.beginTasks();
    const vm = session.current!;
    vm.selectMost(vm.task.optionOrnamentIds[0]);
    service.failNextPosts = 1;  // first attempt fails, built-in retry lands
    const result = await session.submit();
    expect(result.accepted).toBe(true);
    expect(service.responseList()).toHaveLength(1);
  });

  it("surfaces a persistent network failure and keeps the response buffered",
     async () => {
    const service = new FakeService(makeTasks());
    const { session, client } = scriptedController(service);
    await session.start("offline");
    await session.beginTasks();
    const vm = session.current!;
    vm.selectMost(vm.task.optionOrnamentIds[0]);
    service.failNextPosts = 5;
    await expect(session.submit()).rejects.toThrow("network");
    expect(client.pendingResponse()).toMatchObject({ taskId: "w01" });
    service.failNextPosts = 0;
    const flushed = await client.flushPending();
    expect(flushed?.accepted).toBe(true);
    expect(service.responseList()).toHaveLength(1);
  });
});
