/** Per-task view model: countdown from the task's time limit plus the
 * selection state the submit rules operate on.
 *
 * allowInconsistent (default true) permits submitting the same ornament as
 * both most and least similar, replicating the original paper-form
 * condition; with the toggle off the UI blocks that combination.
 */

import { ResponsePayload, TaskSpec } from "./types.js";

export interface TaskStateOptions {
  allowInconsistent?: boolean;
  now?: () => number;
}

export class TaskViewModel {
  readonly task: TaskSpec;
  readonly allowInconsistent: boolean;
  private readonly now: () => number;
  private readonly startedAt: number;
  most: string | null = null;
  least: string | null = null;

  constructor(task: TaskSpec, opts: TaskStateOptions = {}) {
    this.task = task;
    this.allowInconsistent = opts.allowInconsistent ?? true;
    this.now = opts.now ?? (() => Date.now());
    this.startedAt = this.now();
  }

  get needsLeast(): boolean {
    return this.task.mode === "most-and-least";
  }

  selectMost(id: string): void {
    if (!this.task.optionOrnamentIds.includes(id)) {
      throw new Error(`${id} is not an option of ${this.task.taskId}`);
    }
    this.most = id;
  }

  selectLeast(id: string): void {
    if (!this.needsLeast) {
      throw new Error("single-pick task has no least-similar selection");
    }
    if (!this.task.optionOrnamentIds.includes(id)) {
      throw new Error(`${id} is not an option of ${this.task.taskId}`);
    }
    this.least = id;
  }

  elapsedMs(): number {
    return Math.max(0, Math.round(this.now() - this.startedAt));
  }

  remainingSeconds(): number {
    const left = this.task.timeLimitSeconds - this.elapsedMs() / 1000;
    return Math.max(0, Math.ceil(left));
  }

  expired(): boolean {
    return this.elapsedMs() > this.task.timeLimitSeconds * 1000;
  }

  canSubmit(): boolean {
    if (this.most === null) {
      return false;
    }
    if (this.needsLeast) {
      if (this.least === null) {
        return false;
      }
      if (!this.allowInconsistent && this.least === this.most) {
        return false;
      }
    }
    return true;
  }

  buildPayload(participantId: string): ResponsePayload {
    if (!this.canSubmit()) {
      throw new Error("selection incomplete");
    }
    const payload: ResponsePayload = {
      participantId,
      taskId: this.task.taskId,
      mostSimilar: this.most!,
      elapsedMs: this.elapsedMs(),
    };
    if (this.needsLeast) {
      payload.leastSimilar = this.least!;
    }
    return payload;
  }
}
