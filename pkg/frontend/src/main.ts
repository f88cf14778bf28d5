import { App } from "./app.js";
import type { ActionSpec } from "./types.js";

/** Browser bootstrap: file upload for the dataset, action/mode pickers. */
export function mount(root: HTMLElement): App {
  const app = new App(root, { apiBase: "" });

  const upload = root.querySelector<HTMLInputElement>("#dataset-upload")!;
  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (file) await app.loadDataset(await file.text());
  });

  const actionSelect = root.querySelector<HTMLSelectElement>("#action")!;
  const actionArg = root.querySelector<HTMLInputElement>("#action-arg")!;
  const updateAction = () => {
    const op = actionSelect.value;
    let action: ActionSpec;
    if (op === "Remove") {
      action = { op: "Remove" };
      actionArg.hidden = true;
    } else if (op === "Recolor") {
      actionArg.hidden = false;
      actionArg.placeholder = "#ff0000";
      action = { op: "Recolor", color: actionArg.value || "#ff0000" };
    } else if (op === "Inpaint") {
      actionArg.hidden = false;
      actionArg.placeholder = "prompt";
      action = { op: "Inpaint", prompt: actionArg.value || "background" };
    } else {
      action = { op: "Cover", effect: op };
      actionArg.hidden = true;
    }
    app.setAction(action);
  };
  actionSelect.addEventListener("change", updateAction);
  actionArg.addEventListener("input", updateAction);
  updateAction();

  const modeSelect = root.querySelector<HTMLSelectElement>("#mode")!;
  modeSelect.addEventListener("change", () => app.setMode(modeSelect.value));

  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!);
}
