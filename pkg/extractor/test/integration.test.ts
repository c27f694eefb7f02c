/**
 * Cross-component check: a file emitted here must be readable by the Python
 * clustering CLI, end to end. Skipped when that CLI is not on PATH.
 */

import { execFile } from "node:child_process";
import { promises as fs } from "node:fs";
import os from "node:os";
import path from "node:path";
import { promisify } from "node:util";

import { describe, expect, it } from "vitest";

import { extract } from "../src/extract.js";
import { writeImageFolderFixture } from "./fixtures.js";

const run = promisify(execFile);

async function owclusterAvailable(): Promise<boolean> {
  try {
    await run("owcluster", ["--help"]);
    return true;
  } catch {
    return false;
  }
}

describe("integration with the clustering CLI", () => {
  it("pipeline consumes an extracted file and scores it", async () => {
    if (!(await owclusterAvailable())) {
      console.warn("owcluster CLI not found; skipping the cross-component check");
      return;
    }
    const tmp = await fs.mkdtemp(path.join(os.tmpdir(), "owcl-int-"));
    try {
      await writeImageFolderFixture(tmp, 8);
      const emb = path.join(tmp, "emb.owcl");
      await extract({
        dataset: tmp,
        model: "stub16",
        split: "train",
        batchSize: 4,
        device: "cpu",
        outPath: emb,
      });
      const { stdout } = await run("owcluster", [
        "pipeline",
        "--input", emb,
        "--reducer", "none",
        "--no-normalize",
        "--k", "2",
        "--n-init", "5",
        "--seed", "0",
      ]);
      const report = JSON.parse(stdout);
      expect(report.chosen_k).toBe(2);
      expect(report.assignment).toHaveLength(16);
      // dark vs light images are trivially separable for the stub features
      expect(report.external.acc).toBe(100.0);
    } finally {
      await fs.rm(tmp, { recursive: true, force: true });
    }
  }, 120000);
});
