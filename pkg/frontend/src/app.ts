import { ApiClient, ApiError, SynthesizeResponse } from "./api.js";
import { render } from "./render.js";
import { Store, clickPolarity, positiveCount, resolveClick } from "./state.js";
import { initialState, type ActionSpec, type ViewState } from "./types.js";

export interface AppConfig {
  apiBase?: string;
  /** Auto-synthesis debounce after a label change. */
  debounceMs?: number;
  /** Poll interval for long-running synthesis. */
  pollMs?: number;
  fetchFn?: typeof fetch;
}

export class App {
  readonly store: Store;
  private api: ApiClient;
  private debounceMs: number;
  private pollMs: number;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(private root: HTMLElement, config: AppConfig = {}) {
    this.api = new ApiClient(config.apiBase ?? "", config.fetchFn);
    this.debounceMs = config.debounceMs ?? 500;
    this.pollMs = config.pollMs ?? 250;
    this.store = new Store({ ...initialState });
    this.store.subscribe((state) => render(state, this.root));
    this.wireEvents();
  }

  get state(): ViewState {
    return this.store.get();
  }

  private wireEvents(): void {
    const canvas = this.root.querySelector<HTMLElement>("#canvas")!;
    // the context menu is suppressed inside the canvas only: right click labels
    canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());
    canvas.addEventListener("mousedown", (ev) => {
      const rect = canvas.getBoundingClientRect();
      const x = ev.clientX - rect.left;
      const y = ev.clientY - rect.top;
      if (ev.button === 0) void this.handleClick(x, y, "left");
      if (ev.button === 2) void this.handleClick(x, y, "right");
    });
    canvas.addEventListener("mouseover", (ev) => {
      const target = ev.target as HTMLElement;
      const id = target.closest<HTMLElement>(".box")?.dataset.objectId ?? null;
      if (id !== this.state.hoveredId) this.store.update({ hoveredId: id });
    });
    this.root
      .querySelector<HTMLButtonElement>("#synthesize")!
      .addEventListener("click", () => void this.requestSynthesis());
  }

  async loadDataset(datasetJson: string): Promise<void> {
    try {
      const created = await this.api.createSession(datasetJson);
      const snapshot = await this.api.getObjects(created.id);
      this.store.update({
        sessionId: created.id,
        objects: created.objects,
        imageUrl: snapshot.image_url,
        labels: {},
        program: null,
        selected: [],
        error: null,
        statusHint: `${created.objects.length} objects; left click = positive, right click = negative`,
      });
    } catch (err) {
      this.store.update({ error: describe(err) });
    }
  }

  /** Left/right click labeling with toggle-to-clear on repeated labels. The
   * click point is sent as-is; the server resolves containment. */
  async handleClick(x: number, y: number, button: "left" | "right"): Promise<void> {
    const state = this.state;
    if (!state.sessionId) return;
    const target = resolveClick(state.objects, x, y);
    if (!target) {
      this.store.update({ statusHint: "no object under the click" });
      return;
    }
    const polarity = clickPolarity(state.labels[target.id], button);
    try {
      const response = await this.api.putClickLabel(state.sessionId, [x, y], polarity);
      this.store.update({
        labels: response.labels,
        error: null,
        statusHint:
          polarity === null
            ? `cleared ${response.matched}`
            : `${response.matched} labeled ${polarity}`,
      });
      this.scheduleSynthesis();
    } catch (err) {
      this.store.update({ error: describe(err) });
    }
  }

  /** Debounced auto-trigger: re-synthesize shortly after the labels settle. */
  scheduleSynthesis(): void {
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.requestSynthesis();
    }, this.debounceMs);
  }

  setAction(action: ActionSpec): void {
    this.store.update({ action });
  }

  setMode(mode: string): void {
    this.store.update({ mode });
  }

  async requestSynthesis(): Promise<void> {
    const state = this.state;
    if (!state.sessionId || positiveCount(state) === 0) return;
    const version = state.requestVersion + 1;
    this.store.update({ requestVersion: version, pending: true, error: null });
    try {
      let response = await this.api.synthesize(state.sessionId, state.action, state.mode);
      while (response.state === "running") {
        await sleep(this.pollMs);
        if (this.state.requestVersion !== version) return; // superseded
        response = await this.api.synthesisStatus(state.sessionId);
      }
      this.applyResult(version, response);
    } catch (err) {
      if (this.state.requestVersion === version) {
        this.store.update({ pending: false, error: describe(err) });
      }
    }
  }

  /** Only the latest in-flight request may publish its result. */
  private applyResult(version: number, response: SynthesizeResponse): void {
    if (this.state.requestVersion !== version) return;
    if (response.state === "done") {
      this.store.update({
        pending: false,
        program: response.program,
        selected: response.selected,
        statusHint: `selected ${response.selected.length} objects`,
      });
    } else if (response.state === "error") {
      this.store.update({ pending: false, error: response.error });
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `server rejected the request: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
