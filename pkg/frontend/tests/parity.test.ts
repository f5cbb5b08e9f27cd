// Scripted browser session against the real service: the server-side
// transcript must match a CLI simulation fed the same answers byte for byte.

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { bindFlowElements, SessionFlow } from "../src/flow.js";
import { loadPageDom, TINY_GALLERY, TINY_TRUTHFUL_ANSWERS } from "./fixtures.js";

const execFileAsync = promisify(execFile);
const PYTHON = process.env.QSEARCH_PYTHON ?? "python3";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port assigned"));
      }
    });
  });
}

async function waitForServer(baseUrl: string, timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      await fetch(`${baseUrl}/api/v1/galleries/probe`);
      return; // any HTTP response means the server is up
    } catch {
      await new Promise((r) => setTimeout(r, 250));
    }
  }
  throw new Error(`service at ${baseUrl} did not come up in ${timeoutMs}ms`);
}

describe("console / CLI parity", () => {
  let server: ChildProcess;
  let baseUrl: string;
  let workDir: string;
  let transcriptsDir: string;

  beforeAll(async () => {
    workDir = mkdtempSync(join(tmpdir(), "qsearch-parity-"));
    transcriptsDir = join(workDir, "transcripts");
    const port = await freePort();
    baseUrl = `http://127.0.0.1:${port}`;
    server = spawn(
      PYTHON,
      ["-m", "qsearch", "serve", "--port", String(port), "--transcripts-dir", transcriptsDir],
      { stdio: "ignore" },
    );
    await waitForServer(baseUrl);
  });

  afterAll(() => {
    server?.kill("SIGTERM");
  });

  it("a scripted budget-0 session equals `session --simulate` byte for byte", async () => {
    loadPageDom();
    const api = new ApiClient(baseUrl);
    const created = await api.createGallery(TINY_GALLERY);
    const flow = new SessionFlow(api, bindFlowElements(document));
    await flow.start(await api.getGallery(created.gallery_id), {
      gallery_id: created.gallery_id,
      budget: 0.0,
      order: [1, 2, 3],
      scorer: { kind: "ideal" },
      k: 5,
      seed: 0,
    });

    // answer each pending question with identity 1's true values, via the DOM
    let view = await flow.refresh();
    let steps = 0;
    while (!view.done && steps < 10) {
      const pending = view.pendingQuestion;
      expect(pending).not.toBeNull();
      const truthful = TINY_TRUTHFUL_ANSWERS[pending!.id];
      for (const [facetId, tokens] of Object.entries(truthful)) {
        const select = document.querySelector<HTMLSelectElement>(
          `#answer-facets select[data-facet-id="${facetId}"]`,
        );
        expect(select).not.toBeNull();
        select!.value = tokens[0];
      }
      const next = await flow.submitCurrent();
      expect(next).not.toBeNull();
      view = next!;
      steps += 1;
    }

    // budget 0 on this gallery: all three questions, ending at a singleton
    expect(view.done).toBe(true);
    expect(view.stopReason).toBe("budget_met");
    expect(view.asked).toEqual([1, 2, 3]);
    expect(view.topk[0].imageId).toBe(1);
    expect(view.topk[0].score).toBe(1.0);
    expect(view.topk.filter((c) => c.score === 1.0)).toHaveLength(1);
    expect(document.querySelector<HTMLElement>("#done-banner")?.hidden).toBe(false);

    const serverTranscript = readFileSync(
      join(transcriptsDir, `${flow.sessionId}.jsonl`),
      "utf-8",
    );

    const galleryFile = join(workDir, "tiny.json");
    writeFileSync(galleryFile, JSON.stringify(TINY_GALLERY));
    const cliTranscript = join(workDir, "cli.jsonl");
    await execFileAsync(PYTHON, [
      "-m", "qsearch", "session", "--simulate",
      "--gallery", galleryFile,
      "--order", "1,2,3",
      "--budget", "0",
      "--target", "1",
      "--k", "5",
      "--seed", "0",
      "--out", cliTranscript,
    ]);

    expect(serverTranscript).toBe(readFileSync(cliTranscript, "utf-8"));
  });

  it("a generous budget finishes after the single mandatory question", async () => {
    loadPageDom();
    const api = new ApiClient(baseUrl);
    const created = await api.createGallery(TINY_GALLERY);
    const flow = new SessionFlow(api, bindFlowElements(document));
    await flow.start(await api.getGallery(created.gallery_id), {
      gallery_id: created.gallery_id,
      budget: Math.log(TINY_GALLERY.records.length),
      order: [1, 2, 3],
      scorer: { kind: "ideal" },
      k: 5,
    });
    const select = document.querySelector<HTMLSelectElement>(
      '#answer-facets select[data-facet-id="1"]',
    );
    select!.value = "a";
    const view = await flow.submitCurrent();
    expect(view?.done).toBe(true);
    expect(view?.asked).toEqual([1]);
    expect(view?.stopReason).toBe("budget_met");
    expect(document.querySelector<HTMLElement>("#done-banner")?.textContent).toContain(
      "1 question",
    );
  });
});
