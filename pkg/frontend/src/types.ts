/** Payload types for the practice-scope HTTP API. */

export type ViewName = "progress" | "fretboard" | "compare" | "similarity" | "roles";

export type FitMode = "none" | "offset" | "affine";

export interface RecordingSummary {
  id: string;
  player: string;
  exercise: string;
  recordedAt: string;
  exerciseKind: string;
  noteCount: number;
}

export interface ProgressData {
  rows: number;
  cols: number;
  scoreRef: string;
  deviations: (number | null)[];
}

export interface GridData {
  rows: number;
  cols: number;
  counts?: number[];
  cells?: number[];
  totalNotes?: number;
  unmappedNotes?: number;
}

export interface LayoutData {
  points: [number, number][];
  stress: number;
  grid: [number, number][];
  outliers: boolean[];
}

export interface SimilarityData {
  layout: LayoutData;
  recordings: string[];
  exercise: string;
}

export interface RoleSpanData {
  startSeconds: number;
  durationSeconds: number;
  role: string;
  pitch: number;
}

export interface RolesData {
  scale: {
    name: string;
    rootPitchClass: number;
    scalePitchClasses: number[];
    bluePitchClasses: number[];
  };
  sequences: { recordingId: string; spans: RoleSpanData[] }[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}
