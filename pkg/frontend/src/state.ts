import type { BoxStyle, ObjectSummary, Polarity, ViewState } from "./types.js";

type Listener = (state: ViewState) => void;

export class Store {
  private listeners = new Set<Listener>();

  constructor(private state: ViewState) {}

  get(): ViewState {
    return this.state;
  }

  update(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    listener(this.state);
    return () => this.listeners.delete(listener);
  }
}

/** Mirror of the server's click rule (smallest containing region wins) used
 * only to decide toggle polarity; the click point itself is what gets sent. */
export function resolveClick(
  objects: ObjectSummary[],
  x: number,
  y: number,
): ObjectSummary | null {
  let best: ObjectSummary | null = null;
  for (const obj of objects) {
    const r = obj.region;
    if (x >= r.x && x <= r.x + r.w && y >= r.y && y <= r.y + r.h) {
      if (best === null || r.w * r.h < best.region.w * best.region.h) {
        best = obj;
      }
    }
  }
  return best;
}

/** Left click labels positive, right click negative; clicking an object that
 * already carries that exact label clears it. */
export function clickPolarity(
  current: Polarity | undefined,
  button: "left" | "right",
): Polarity | null {
  const desired: Polarity = button === "left" ? "positive" : "negative";
  return current === desired ? null : desired;
}

export function boxStyle(state: ViewState, objectId: string): BoxStyle {
  const label = state.labels[objectId];
  if (label) return label;
  if (state.selected.includes(objectId)) return "highlight";
  return "unlabeled";
}

export function positiveCount(state: ViewState): number {
  return Object.values(state.labels).filter((p) => p === "positive").length;
}
