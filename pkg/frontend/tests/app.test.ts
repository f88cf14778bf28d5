import { beforeEach, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import { installShell } from "./shell.js";

type Responder = (path: string, init?: RequestInit) => unknown;

function fakeFetch(responder: Responder): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const path = String(input);
    const body = responder(path, init);
    return {
      ok: true,
      status: 200,
      json: async () => body,
    } as Response;
  }) as typeof fetch;
}

const DATASET = JSON.stringify({
  schemas: { C: { attributes: [{ name: "A", kind: "categorical", domain: ["x", "y"] }] } },
  objects: [
    { id: "o1", class: "C", region: { x: 0, y: 0, w: 10, h: 10 }, attributes: { A: "x" } },
  ],
});

describe("in-flight supersede", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders only the latest synthesis result", async () => {
    let releaseFirst: () => void = () => {};
    const firstReleased = new Promise<void>((resolve) => (releaseFirst = resolve));
    let synthCalls = 0;

    const app = new App(installShell(), {
      pollMs: 10,
      fetchFn: fakeFetch((path) => {
        if (path.endsWith("/api/sessions")) {
          return { id: "s1", objects: JSON.parse(DATASET).objects };
        }
        if (path.endsWith("/objects")) {
          return { objects: [], labels: {}, selection: null, program: null, version: 0, image_url: null };
        }
        if (path.endsWith("/labels")) {
          return { labels: { o1: "positive" }, matched: "o1", version: 1 };
        }
        if (path.endsWith("/synthesize")) {
          synthCalls += 1;
          if (synthCalls === 1) {
            return { state: "running", status_url: "/status" };
          }
          return { state: "done", program: "SECOND", selected: ["o1"] };
        }
        if (path.endsWith("/status")) {
          // stall the first request until after the second one lands
          return firstReleased.then(() => ({
            state: "done",
            program: "FIRST",
            selected: [],
          }));
        }
        throw new Error(`unexpected path ${path}`);
      }),
    });

    await app.loadDataset(DATASET);
    app.store.update({ labels: { o1: "positive" } });

    const first = app.requestSynthesis(); // parks on the status poll
    await new Promise((resolve) => setTimeout(resolve, 30));
    await app.requestSynthesis(); // supersedes
    expect(app.state.program).toBe("SECOND");

    releaseFirst();
    await first;
    expect(app.state.program).toBe("SECOND"); // stale result discarded
  });
});
