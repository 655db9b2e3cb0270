/** End-to-end: the TypeScript session flow drives the real survey service
 * over HTTP (headless scripted client), the event log is fed to the
 * analysis CLI, and the dashboard renders the service's numbers.  Mirrors
 * a browser run of intro -> 5 warm-ups (reveal on the first three) -> 16
 * tasks with one deliberately late answer. */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { MemoryStore, ServiceClient } from "../src/api.js";
import { buildResultsView } from "../src/results.js";
import { SessionController } from "../src/session.js";
import { TaskSpec } from "../src/types.js";
import { makeTasks } from "./fakeService.js";

const PORT = 8765 + (Number(process.env.VITEST_WORKER_ID ?? "0") % 32);
const BASE = `http://127.0.0.1:${PORT}`;

// 1x1 white PNG
const PNG = Buffer.from(
  "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8" +
    "z8BQDwAEhQGAhKmMIQAAAABJRU5ErkJggg==",
  "base64",
);

let server: ChildProcess | null = null;
let workDir = "";
let tasks: TaskSpec[] = [];

function toServerTask(t: TaskSpec): Record<string, unknown> {
  const doc: Record<string, unknown> = {
    taskId: t.taskId,
    queryOrnamentId: t.queryOrnamentId,
    optionOrnamentIds: t.optionOrnamentIds,
    mode: t.mode,
    timeLimitSeconds: t.timeLimitSeconds,
    warmup: t.warmup,
  };
  if (t.revealAnswer !== undefined) {
    doc.revealAnswer = t.revealAnswer;
  }
  return doc;
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const r = await fetch(`${BASE}/api/results`);
      if (r.status === 409 || r.status === 200) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((res) => setTimeout(res, 200));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "planesym-ui-e2e-"));
  tasks = makeTasks();
  const ids = new Set<string>(["q"]);
  for (const t of tasks) {
    t.optionOrnamentIds.forEach((o) => ids.add(o));
  }
  const assets: Record<string, string> = {};
  for (const oid of ids) {
    const p = join(workDir, `${oid}.png`);
    writeFileSync(p, PNG);
    assets[oid] = p;
  }
  const config = {
    sessionId: "ui-e2e",
    experiment: 2,
    timeLimitSeconds: 30,
    warmupRevealCount: 3,
    tasks: tasks.map(toServerTask),
    assets,
  };
  writeFileSync(join(workDir, "session.json"), JSON.stringify(config));
  writeFileSync(
    join(workDir, "tasks.json"),
    JSON.stringify({ tasks: tasks.map(toServerTask) }),
  );
  server = spawn(
    "python3",
    ["-m", "planesym.cli", "serve", join(workDir, "session.json"),
      "--port", String(PORT), "--state-dir", join(workDir, "state")],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("scripted UI session against the real service", () => {
  it("completes warm-ups and 16 tasks, then analyze accepts the log",
     { timeout: 60_000 }, async () => {
    let t = 0;
    const now = () => t;
    const reveals: string[] = [];
    const client = new ServiceClient(
      BASE,
      (url, init) => fetch(url, init),
      new MemoryStore(),
    );
    const session = new SessionController(
      client,
      { onReveal: (c) => reveals.push(c) },
      { now },
    );
    await session.start("headless");
    await session.beginTasks();

    let lateTask: string | null = null;
    let guard = 0;
    while (session.phase !== "done" && guard < 60) {
      guard += 1;
      if (session.phase === "reveal") {
        await session.continueAfterReveal();
        continue;
      }
      const vm = session.current!;
      // one deliberately expired answer on the 8th real task
      if (vm.task.taskId === "t08") {
        t += 31_000;
        vm.selectMost(vm.task.optionOrnamentIds[1]);
        expect(vm.expired()).toBe(true);
        lateTask = vm.task.taskId;
        await session.onExpiry();
        continue;
      }
      t += 2_000;
      vm.selectMost(vm.task.optionOrnamentIds[0]);
      await session.submit();
    }
    expect(session.phase).toBe("done");
    expect(session.completedTasks).toBe(21);
    expect(reveals).toEqual(["a", "a", "a"]);
    expect(session.lateTasks).toEqual([lateTask]);

    await client.close();
    const summary = await client.results();
    expect(summary.taskCount).toBe(16);
    expect(summary.lateResponses).toContainEqual(["p001", "t08"]);

    // the dashboard renders those numbers
    const view = buildResultsView(summary);
    expect(view.tallyRows.length).toBe(
      Object.values(summary.perTaskTallies)
        .map((t2) => Object.keys(t2).length)
        .reduce((a, b) => a + b, 0),
    );

    // the persisted event log passes the analysis CLI without schema errors
    const events = join(workDir, "state", "ui-e2e.events.jsonl");
    const analyze = spawnSync(
      "python3",
      ["-m", "planesym.cli", "analyze", events, join(workDir, "tasks.json"),
        "--experiment", "2", "-o", join(workDir, "analysis")],
      { encoding: "utf-8" },
    );
    expect(analyze.status, analyze.stderr).toBe(0);

    // and its canonical summary is byte-identical to /api/results
    const cliSummary = readFileSync(
      join(workDir, "analysis", "summary.json"), "utf-8");
    const resp = await fetch(`${BASE}/api/results`);
    const serviceBody = await resp.text();
    expect(cliSummary).toBe(serviceBody);
  });
});
