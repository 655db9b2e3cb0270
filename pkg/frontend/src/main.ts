/** Task-runner page wiring: enroll, intro slides, timed task screens with
 * query + option images at fixed identical sizes, warm-up reveal, and a
 * completion screen.  The service base URL comes from ?base=...  */

import { ServiceClient } from "./api.js";
import { SessionController } from "./session.js";
import { TaskViewModel } from "./taskState.js";

const INTRO_SLIDES = [
  "Ornaments are built by repeating a base unit with translations, " +
    "rotations, mirror reflections and glide reflections.",
  "You will compare ornaments by their repetition structure. Colors and " +
    "motif shapes do not matter, only how the unit repeats.",
  "Each task shows a query ornament and two or three options; pick the " +
    "most similar one (and, when asked, also the least similar). You have " +
    "a fixed time per task, shown by the countdown.",
];

function param(name: string, fallback: string): string {
  const v = new URLSearchParams(window.location.search).get(name);
  return v === null || v === "" ? fallback : v;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing #${id}`);
  }
  return node;
}

function show(id: string, visible: boolean): void {
  byId(id).style.display = visible ? "" : "none";
}

export function boot(): void {
  const base = param("base", "http://localhost:8000");
  const allowInconsistent = param("allowInconsistent", "true") !== "false";
  const client = new ServiceClient(base, (url, init) => fetch(url, init),
    window.localStorage);
  let slide = 0;
  let timerHandle: number | undefined;

  const session = new SessionController(
    client,
    {
      onPhase: (phase) => {
        show("screen-intro", phase === "intro");
        show("screen-task", phase === "task");
        show("screen-reveal", phase === "reveal");
        show("screen-done", phase === "done");
        if (phase === "done" && timerHandle !== undefined) {
          window.clearInterval(timerHandle);
        }
      },
      onTask: (vm) => renderTask(vm),
      onReveal: (correct) => {
        byId("reveal-text").textContent =
          `The intended answer was ${correct}.`;
      },
      onLate: () => {
        byId("late-note").textContent =
          "time ran out; the answer was recorded as late";
      },
    },
    { allowInconsistent },
  );

  function renderSlide(): void {
    byId("intro-text").textContent = INTRO_SLIDES[slide];
    (byId("intro-next") as HTMLButtonElement).textContent =
      slide === INTRO_SLIDES.length - 1 ? "Start" : "Next";
  }

  function renderTask(vm: TaskViewModel): void {
    byId("late-note").textContent = "";
    byId("task-title").textContent =
      (vm.task.warmup ? "Warm-up " : "Task ") + vm.task.taskId;
    const query = byId("query-img") as HTMLImageElement;
    query.src = client.assetUrl(
      vm.task.assetUrls?.[vm.task.queryOrnamentId] ??
        `/assets/${vm.task.queryOrnamentId}.png`,
    );
    const box = byId("options");
    box.innerHTML = "";
    for (const oid of vm.task.optionOrnamentIds) {
      const fig = document.createElement("figure");
      fig.className = "option";
      const img = document.createElement("img");
      img.src = client.assetUrl(
        vm.task.assetUrls?.[oid] ?? `/assets/${oid}.png`,
      );
      img.width = 200;
      img.height = 200;
      fig.appendChild(img);
      const mostBtn = document.createElement("button");
      mostBtn.textContent = "most similar";
      mostBtn.onclick = () => {
        vm.selectMost(oid);
        refreshSelection(vm);
      };
      fig.appendChild(mostBtn);
      if (vm.needsLeast) {
        const leastBtn = document.createElement("button");
        leastBtn.textContent = "least similar";
        leastBtn.onclick = () => {
          vm.selectLeast(oid);
          refreshSelection(vm);
        };
        fig.appendChild(leastBtn);
      }
      const caption = document.createElement("figcaption");
      caption.id = `caption-${oid}`;
      fig.appendChild(caption);
      box.appendChild(fig);
    }
    refreshSelection(vm);
    if (timerHandle !== undefined) {
      window.clearInterval(timerHandle);
    }
    timerHandle = window.setInterval(() => {
      byId("timer").textContent = `${vm.remainingSeconds()}s`;
      if (vm.expired()) {
        byId("timer").textContent = "time over";
        void session.onExpiry();
      }
    }, 250);
  }

  function refreshSelection(vm: TaskViewModel): void {
    for (const oid of vm.task.optionOrnamentIds) {
      const caption = byId(`caption-${oid}`);
      const marks = [];
      if (vm.most === oid) {
        marks.push("MOST");
      }
      if (vm.least === oid) {
        marks.push("LEAST");
      }
      caption.textContent = marks.join(" + ");
    }
    (byId("submit") as HTMLButtonElement).disabled = !vm.canSubmit();
  }

  byId("enroll-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const name = (byId("name-input") as HTMLInputElement).value;
    void session.start(name).then(() => {
      show("screen-enroll", false);
      show("screen-intro", true);
      renderSlide();
    });
  });

  byId("intro-next").addEventListener("click", () => {
    if (slide < INTRO_SLIDES.length - 1) {
      slide += 1;
      renderSlide();
    } else {
      void session.beginTasks();
    }
  });

  byId("submit").addEventListener("click", () => {
    void session.submit().catch(() => {
      byId("late-note").textContent =
        "network trouble; your answer is saved and will be retried";
      void client.flushPending().then(() => session.advance());
    });
  });

  byId("reveal-next").addEventListener("click", () => {
    void session.continueAfterReveal();
  });

  show("screen-enroll", true);
  show("screen-intro", false);
  show("screen-task", false);
  show("screen-reveal", false);
  show("screen-done", false);
}

boot();
