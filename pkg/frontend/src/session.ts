/** Participant session flow: enroll, intro, warm-ups (with answer reveal
 * per the server's task data), timed tasks, completion.
 *
 * The controller is UI-agnostic: it exposes the current phase and task
 * view-model, and the page layer renders them.  Submits retry through the
 * client's pending-response buffer, so a dropped connection never loses or
 * double-counts an answer.
 */

import { ServiceClient } from "./api.js";
import { TaskViewModel } from "./taskState.js";
import { SubmitResult, isDone } from "./types.js";

export type Phase = "intro" | "task" | "reveal" | "done";

export interface SessionEvents {
  onPhase?: (phase: Phase) => void;
  onTask?: (vm: TaskViewModel) => void;
  onReveal?: (correct: string) => void;
  onLate?: (taskId: string) => void;
}

export interface SessionOptions {
  allowInconsistent?: boolean;
  now?: () => number;
  retries?: number;
}

export class SessionController {
  phase: Phase = "intro";
  participantId: string | null = null;
  current: TaskViewModel | null = null;
  lastResult: SubmitResult | null = null;
  completedTasks = 0;
  lateTasks: string[] = [];

  constructor(
    private client: ServiceClient,
    private events: SessionEvents = {},
    private opts: SessionOptions = {},
  ) {}

  private setPhase(phase: Phase): void {
    this.phase = phase;
    this.events.onPhase?.(phase);
  }

  /** Enroll and land on the intro screen. */
  async start(name: string): Promise<void> {
    this.participantId = await this.client.enroll(name);
    this.setPhase("intro");
  }

  /** Leave the intro slides and fetch the first task. */
  async beginTasks(): Promise<void> {
    await this.advance();
  }

  async advance(): Promise<void> {
    if (this.participantId === null) {
      throw new Error("not enrolled");
    }
    const next = await this.client.nextTask(this.participantId);
    if (isDone(next)) {
      this.current = null;
      this.setPhase("done");
      return;
    }
    this.current = new TaskViewModel(next, {
      allowInconsistent: this.opts.allowInconsistent,
      now: this.opts.now,
    });
    this.setPhase("task");
    this.events.onTask?.(this.current);
  }

  /** Submit the current selection; retries once through the buffer on a
   * network error, then surfaces the failure (the response stays buffered
   * for a later flushPending). */
  async submit(): Promise<SubmitResult> {
    if (this.current === null || this.participantId === null) {
      throw new Error("no active task");
    }
    const payload = this.current.buildPayload(this.participantId);
    const retries = this.opts.retries ?? 1;
    let result: SubmitResult | null = null;
    let lastError: unknown = null;
    for (let attempt = 0; attempt <= retries; attempt++) {
      try {
        result = await this.client.submitResponse(payload);
        break;
      } catch (err) {
        lastError = err;
      }
    }
    if (result === null) {
      throw lastError;
    }
    this.lastResult = result;
    this.completedTasks += 1;
    if (result.late) {
      this.lateTasks.push(payload.taskId);
      this.events.onLate?.(payload.taskId);
    }
    if (result.reveal !== undefined) {
      this.setPhase("reveal");
      this.events.onReveal?.(result.reveal);
    } else {
      await this.advance();
    }
    return result;
  }

  /** Acknowledge a warm-up reveal and continue. */
  async continueAfterReveal(): Promise<void> {
    if (this.phase !== "reveal") {
      throw new Error("no reveal to acknowledge");
    }
    await this.advance();
  }

  /** Timer expiry: submit a complete selection (the server flags it late);
   * an incomplete one keeps the screen up in an overdue state. */
  async onExpiry(): Promise<"submitted" | "waiting"> {
    if (this.current !== null && this.current.canSubmit()) {
      await this.submit();
      return "submitted";
    }
    return "waiting";
  }
}
