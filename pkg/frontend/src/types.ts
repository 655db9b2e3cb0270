/** Wire types for the survey service API (exact JSON field names). */

export type TaskMode = "most-and-least" | "pick-similar";

export interface TaskSpec {
  taskId: string;
  queryOrnamentId: string;
  optionOrnamentIds: string[];
  mode: TaskMode;
  timeLimitSeconds: number;
  warmup: boolean;
  revealAnswer?: string;
  assetUrls?: Record<string, string>;
}

export interface DoneMarker {
  done: true;
}

export type NextTask = TaskSpec | DoneMarker;

export function isDone(t: NextTask): t is DoneMarker {
  return (t as DoneMarker).done === true;
}

export interface ResponsePayload {
  participantId: string;
  taskId: string;
  mostSimilar: string;
  leastSimilar?: string;
  elapsedMs: number;
}

export interface SubmitResult {
  accepted: boolean;
  late: boolean;
  reveal?: string;
}

export interface TallyEntry {
  most: number;
  least: number;
}

export interface SimilarityBlock {
  labels: string[];
  values: number[][];
  observed: boolean[][];
  meta: Record<string, unknown>;
}

export interface MatrixBlock {
  labels: string[];
  values: number[][];
}

export interface ResultsSummary {
  experiment: number;
  participantCount: number;
  participants: string[];
  taskCount: number;
  warmupCount: number;
  perTaskTallies: Record<string, Record<string, TallyEntry>>;
  lateResponses: [string, string][];
  similarity?: SimilarityBlock;
  retained?: string[];
  excluded?: string[];
  retainedCount?: number;
  participantMatrices?: Record<string, MatrixBlock>;
  perTaskMatrices?: Record<string, MatrixBlock>;
}
