export interface Region {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface ObjectSummary {
  id: string;
  class: string;
  region: Region;
  attributes: Record<string, string | number>;
}

export type Polarity = "positive" | "negative";

export interface ActionSpec {
  op: "Remove" | "Cover" | "Recolor" | "Inpaint";
  effect?: string;
  color?: string;
  prompt?: string;
}

export interface SynthesisResult {
  program: string;
  selected: string[];
  stats?: unknown;
}

/** Box paint styles; selected-but-unlabeled is the generalization preview. */
export type BoxStyle = "unlabeled" | "positive" | "negative" | "highlight";

export interface ViewState {
  sessionId: string | null;
  objects: ObjectSummary[];
  imageUrl: string | null;
  labels: Record<string, Polarity>;
  program: string | null;
  selected: string[];
  pending: boolean;
  requestVersion: number;
  action: ActionSpec;
  mode: string;
  hoveredId: string | null;
  statusHint: string;
  error: string | null;
}

export const initialState: ViewState = {
  sessionId: null,
  objects: [],
  imageUrl: null,
  labels: {},
  program: null,
  selected: [],
  pending: false,
  requestVersion: 0,
  action: { op: "Remove" },
  mode: "full",
  hoveredId: null,
  statusHint: "upload a dataset to begin",
  error: null,
};
