/**
 * The binary embedding-file format shared with the clustering toolkit.
 *
 * Little-endian throughout: 4-byte magic "OWCL", uint16 version (1),
 * uint16 flags (bit 0: labels section), uint64 n, uint64 d, then n*d
 * float32 values row-major, then n uint32 labels when flagged. File size
 * is exactly 24 + 4nd (+ 4n).
 */

import { promises as fs } from "node:fs";
import path from "node:path";

export const MAGIC = "OWCL";
export const VERSION = 1;
export const HEADER_BYTES = 24;
export const FLAG_LABELS = 0x1;

export interface EmbeddingFile {
  n: number;
  d: number;
  values: Float32Array; // row-major, length n*d
  labels?: Uint32Array;
}

export function encodeEmbeddingFile(file: EmbeddingFile): Buffer {
  const { n, d, values, labels } = file;
  if (values.length !== n * d) {
    throw new Error(`values length ${values.length} != n*d = ${n * d}`);
  }
  if (labels && labels.length !== n) {
    throw new Error(`labels length ${labels.length} != n = ${n}`);
  }
  const size = HEADER_BYTES + 4 * n * d + (labels ? 4 * n : 0);
  const buf = Buffer.alloc(size);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt16LE(VERSION, 4);
  buf.writeUInt16LE(labels ? FLAG_LABELS : 0, 6);
  buf.writeBigUInt64LE(BigInt(n), 8);
  buf.writeBigUInt64LE(BigInt(d), 16);
  for (let i = 0; i < values.length; i++) {
    buf.writeFloatLE(values[i], HEADER_BYTES + 4 * i);
  }
  if (labels) {
    const off = HEADER_BYTES + 4 * n * d;
    for (let i = 0; i < n; i++) {
      buf.writeUInt32LE(labels[i], off + 4 * i);
    }
  }
  return buf;
}

export function decodeEmbeddingFile(buf: Buffer): EmbeddingFile {
  if (buf.length < HEADER_BYTES) {
    throw new Error(`truncated file: ${buf.length} bytes < ${HEADER_BYTES}-byte header`);
  }
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`bad magic ${JSON.stringify(buf.toString("ascii", 0, 4))}`);
  }
  const version = buf.readUInt16LE(4);
  if (version !== VERSION) {
    throw new Error(`unsupported version ${version}`);
  }
  const flags = buf.readUInt16LE(6);
  const n = Number(buf.readBigUInt64LE(8));
  const d = Number(buf.readBigUInt64LE(16));
  const hasLabels = (flags & FLAG_LABELS) !== 0;
  const expected = HEADER_BYTES + 4 * n * d + (hasLabels ? 4 * n : 0);
  if (buf.length !== expected) {
    throw new Error(`expected exactly ${expected} bytes, found ${buf.length}`);
  }
  const values = new Float32Array(n * d);
  for (let i = 0; i < n * d; i++) {
    values[i] = buf.readFloatLE(HEADER_BYTES + 4 * i);
  }
  let labels: Uint32Array | undefined;
  if (hasLabels) {
    labels = new Uint32Array(n);
    const off = HEADER_BYTES + 4 * n * d;
    for (let i = 0; i < n; i++) {
      labels[i] = buf.readUInt32LE(off + 4 * i);
    }
  }
  return { n, d, values, labels };
}

/** Write atomically: temp file in the same directory, then rename. */
export async function writeEmbeddingFile(outPath: string, file: EmbeddingFile): Promise<void> {
  const tmp = path.join(
    path.dirname(outPath),
    `.${path.basename(outPath)}.tmp-${process.pid}`
  );
  await fs.writeFile(tmp, encodeEmbeddingFile(file));
  await fs.rename(tmp, outPath);
}

export async function readEmbeddingFile(inPath: string): Promise<EmbeddingFile> {
  return decodeEmbeddingFile(await fs.readFile(inPath));
}
