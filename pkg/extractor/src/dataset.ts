/**
 * Dataset loaders with deterministic ordering.
 *
 * - Image folders: one subdirectory per class; classes and files are
 *   visited in lexicographic order, so repeated runs see the same rows.
 * - CIFAR-10 binary ("cifar10:DIR" pointing at the cifar-10-batches-bin
 *   layout): records kept in file order, labels from each record's label
 *   byte.
 */

import { promises as fs } from "node:fs";
import path from "node:path";

import { ExtractError } from "./errors.js";

export interface RawImage {
  width: number;
  height: number;
  /** RGB, 3 bytes per pixel, row-major. */
  data: Uint8Array;
}

export interface DatasetItem {
  image: RawImage;
  label: number;
  name: string;
}

export interface Dataset {
  size: number;
  classNames: string[];
  /** Items arrive in the dataset's canonical order. */
  items(): AsyncGenerator<DatasetItem>;
}

const CIFAR_RECORD = 1 + 3072;
const CIFAR_CLASSES = [
  "airplane", "automobile", "bird", "cat", "deer",
  "dog", "frog", "horse", "ship", "truck",
];

export function decodePpm(buf: Buffer): RawImage {
  // P6 binary: "P6\n<w> <h>\n255\n" then RGB bytes
  const header = buf.toString("ascii", 0, Math.min(64, buf.length));
  const match = /^P6\s+(\d+)\s+(\d+)\s+(\d+)\s/.exec(header);
  if (!match) {
    throw new Error("not a binary PPM (P6) file");
  }
  const [, w, h, maxval] = match;
  if (Number(maxval) !== 255) {
    throw new Error(`unsupported PPM maxval ${maxval}`);
  }
  const offset = match[0].length;
  const width = Number(w);
  const height = Number(h);
  const need = width * height * 3;
  if (buf.length - offset < need) {
    throw new Error("PPM pixel data truncated");
  }
  return { width, height, data: new Uint8Array(buf.subarray(offset, offset + need)) };
}

async function decodePng(buf: Buffer): Promise<RawImage> {
  const { PNG } = await import("pngjs");
  const png = PNG.sync.read(buf);
  const rgb = new Uint8Array(png.width * png.height * 3);
  for (let p = 0; p < png.width * png.height; p++) {
    rgb[3 * p] = png.data[4 * p];
    rgb[3 * p + 1] = png.data[4 * p + 1];
    rgb[3 * p + 2] = png.data[4 * p + 2];
  }
  return { width: png.width, height: png.height, data: rgb };
}

const IMAGE_EXTENSIONS = new Set([".png", ".ppm"]);

export async function loadImage(filePath: string): Promise<RawImage> {
  const buf = await fs.readFile(filePath);
  const ext = path.extname(filePath).toLowerCase();
  if (ext === ".ppm") return decodePpm(buf);
  if (ext === ".png") return decodePng(buf);
  throw new Error(`unsupported image type ${ext}`);
}

export async function openImageFolder(root: string): Promise<Dataset> {
  let entries;
  try {
    entries = await fs.readdir(root, { withFileTypes: true });
  } catch (err) {
    throw new ExtractError("DatasetUnreadable", `cannot list ${root}: ${err}`);
  }
  const classNames = entries
    .filter((e) => e.isDirectory())
    .map((e) => e.name)
    .sort();
  if (classNames.length === 0) {
    throw new ExtractError("DatasetUnreadable", `${root} has no class subdirectories`);
  }
  const files: { file: string; label: number }[] = [];
  for (let label = 0; label < classNames.length; label++) {
    const dir = path.join(root, classNames[label]);
    const names = (await fs.readdir(dir))
      .filter((f) => IMAGE_EXTENSIONS.has(path.extname(f).toLowerCase()))
      .sort();
    for (const name of names) {
      files.push({ file: path.join(dir, name), label });
    }
  }
  if (files.length === 0) {
    throw new ExtractError("DatasetUnreadable", `${root} contains no .png/.ppm images`);
  }
  return {
    size: files.length,
    classNames,
    items: async function* () {
      for (const { file, label } of files) {
        let image;
        try {
          image = await loadImage(file);
        } catch (err) {
          throw new ExtractError("DatasetUnreadable", `${file}: ${err}`);
        }
        yield { image, label, name: file };
      }
    },
  };
}

export async function openCifar10(dir: string, split: "train" | "test"): Promise<Dataset> {
  const names =
    split === "train"
      ? [1, 2, 3, 4, 5].map((i) => `data_batch_${i}.bin`)
      : ["test_batch.bin"];
  const paths = names.map((n) => path.join(dir, n));
  let total = 0;
  for (const p of paths) {
    let stat;
    try {
      stat = await fs.stat(p);
    } catch {
      throw new ExtractError(
        "DatasetUnreadable",
        `missing ${p} (expected the cifar-10-batches-bin layout)`
      );
    }
    if (stat.size % CIFAR_RECORD !== 0) {
      throw new ExtractError("DatasetUnreadable", `${p} is not a CIFAR-10 binary batch`);
    }
    total += stat.size / CIFAR_RECORD;
  }
  return {
    size: total,
    classNames: CIFAR_CLASSES,
    items: async function* () {
      for (const p of paths) {
        const buf = await fs.readFile(p);
        for (let off = 0; off < buf.length; off += CIFAR_RECORD) {
          const label = buf[off];
          // stored planar R,G,B 32x32; repack to interleaved RGB
          const rgb = new Uint8Array(32 * 32 * 3);
          for (let px = 0; px < 1024; px++) {
            rgb[3 * px] = buf[off + 1 + px];
            rgb[3 * px + 1] = buf[off + 1 + 1024 + px];
            rgb[3 * px + 2] = buf[off + 1 + 2048 + px];
          }
          yield {
            image: { width: 32, height: 32, data: rgb },
            label,
            name: `${p}@${off / CIFAR_RECORD}`,
          };
        }
      }
    },
  };
}

/** "cifar10:DIR" selects the binary CIFAR-10 reader; anything else is an
 * image-folder path. */
export async function openDataset(spec: string, split: "train" | "test"): Promise<Dataset> {
  if (spec.startsWith("cifar10:")) {
    return openCifar10(spec.slice("cifar10:".length), split);
  }
  return openImageFolder(spec);
}
