/**
 * Batch extraction: dataset -> backbone -> .owcl file on disk.
 */

import { loadBackbone } from "./backbones.js";
import { openDataset, RawImage } from "./dataset.js";
import { writeEmbeddingFile } from "./owcl.js";

export interface ExtractJob {
  dataset: string;
  model: string;
  split: "train" | "test";
  batchSize: number;
  device: string;
  outPath: string;
}

export interface ExtractResult {
  n: number;
  d: number;
  classNames: string[];
}

export async function extract(job: ExtractJob): Promise<ExtractResult> {
  const backbone = await loadBackbone(job.model, job.device);
  const dataset = await openDataset(job.dataset, job.split);

  const values = new Float32Array(dataset.size * backbone.dim);
  const labels = new Uint32Array(dataset.size);
  let row = 0;
  let batch: RawImage[] = [];
  let batchLabels: number[] = [];

  const flush = async () => {
    if (batch.length === 0) return;
    const vectors = await backbone.embedBatch(batch);
    for (let i = 0; i < vectors.length; i++) {
      values.set(vectors[i], row * backbone.dim);
      labels[row] = batchLabels[i];
      row += 1;
    }
    batch = [];
    batchLabels = [];
  };

  for await (const item of dataset.items()) {
    batch.push(item.image);
    batchLabels.push(item.label);
    if (batch.length >= job.batchSize) {
      await flush();
    }
  }
  await flush();

  await writeEmbeddingFile(job.outPath, {
    n: dataset.size,
    d: backbone.dim,
    values,
    labels,
  });
  return { n: dataset.size, d: backbone.dim, classNames: dataset.classNames };
}
