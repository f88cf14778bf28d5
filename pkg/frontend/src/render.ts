import { boxStyle, positiveCount } from "./state.js";
import type { ViewState } from "./types.js";

const GLYPHS = { positive: "✓", negative: "✗" } as const;

/** Rebuild the DOM for a state snapshot. Pure in the sense that the output
 * depends only on the state; event wiring lives in app.ts via delegation. */
export function render(state: ViewState, root: HTMLElement): void {
  const canvas = root.querySelector<HTMLElement>("#canvas")!;
  canvas.textContent = "";
  if (state.imageUrl) {
    canvas.style.backgroundImage = `url(${state.imageUrl})`;
  } else {
    canvas.style.backgroundImage = "";
  }

  let maxX = 0;
  let maxY = 0;
  for (const obj of state.objects) {
    const style = boxStyle(state, obj.id);
    const box = document.createElement("div");
    box.className = `box ${style}`;
    box.dataset.objectId = obj.id;
    const { x, y, w, h } = obj.region;
    box.style.left = `${x}px`;
    box.style.top = `${y}px`;
    // degenerate regions still get a visible 1px outline
    box.style.width = `${Math.max(1, w)}px`;
    box.style.height = `${Math.max(1, h)}px`;
    const glyph = style === "positive" || style === "negative" ? GLYPHS[style] : "";
    if (glyph) {
      const mark = document.createElement("span");
      mark.className = "glyph";
      mark.textContent = glyph;
      box.appendChild(mark);
    }
    canvas.appendChild(box);
    maxX = Math.max(maxX, x + w);
    maxY = Math.max(maxY, y + h);
  }
  canvas.style.minWidth = `${maxX + 40}px`;
  canvas.style.minHeight = `${maxY + 40}px`;

  const program = root.querySelector<HTMLElement>("#program-panel")!;
  program.textContent = state.program ?? "(no program yet)";

  const button = root.querySelector<HTMLButtonElement>("#synthesize")!;
  button.disabled = state.sessionId === null || positiveCount(state) === 0;
  button.title = button.disabled ? "label at least one positive object first" : "";

  const status = root.querySelector<HTMLElement>("#status")!;
  status.textContent = state.pending ? "synthesizing…" : state.statusHint;

  const error = root.querySelector<HTMLElement>("#error")!;
  error.textContent = state.error ?? "";
  error.hidden = state.error === null;

  renderInspector(state, root.querySelector<HTMLElement>("#inspector")!);
}

function renderInspector(state: ViewState, panel: HTMLElement): void {
  panel.textContent = "";
  const obj = state.objects.find((o) => o.id === state.hoveredId);
  if (!obj) {
    panel.textContent = "hover an object to inspect its attributes";
    return;
  }
  const title = document.createElement("div");
  title.className = "inspector-title";
  title.textContent = `${obj.id} (${obj.class})`;
  panel.appendChild(title);
  const table = document.createElement("table");
  for (const [name, value] of Object.entries(obj.attributes)) {
    const row = table.insertRow();
    row.insertCell().textContent = name;
    row.insertCell().textContent = String(value);
  }
  panel.appendChild(table);
}
