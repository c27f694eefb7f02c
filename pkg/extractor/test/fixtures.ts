import { promises as fs } from "node:fs";
import path from "node:path";

/** Binary PPM (P6) encoder for test fixtures. */
export function encodePpm(width: number, height: number, rgb: Uint8Array): Buffer {
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(rgb)]);
}

/** Flat-color image with per-pixel deterministic jitter. */
export function solidImage(
  width: number,
  height: number,
  base: [number, number, number],
  jitterSeed: number
): Uint8Array {
  const rgb = new Uint8Array(width * height * 3);
  let state = jitterSeed >>> 0 || 1;
  const next = () => {
    // xorshift32, plenty for pixel jitter
    state ^= state << 13;
    state >>>= 0;
    state ^= state >> 17;
    state ^= state << 5;
    state >>>= 0;
    return state;
  };
  for (let p = 0; p < width * height; p++) {
    for (let c = 0; c < 3; c++) {
      const jitter = (next() % 21) - 10;
      rgb[3 * p + c] = Math.min(255, Math.max(0, base[c] + jitter));
    }
  }
  return rgb;
}

/** Two-class image-folder fixture: dark images vs bright images. */
export async function writeImageFolderFixture(
  root: string,
  perClass = 4
): Promise<void> {
  const classes: { name: string; base: [number, number, number] }[] = [
    { name: "dark", base: [30, 40, 50] },
    { name: "light", base: [200, 190, 180] },
  ];
  for (const { name, base } of classes) {
    const dir = path.join(root, name);
    await fs.mkdir(dir, { recursive: true });
    for (let i = 0; i < perClass; i++) {
      const rgb = solidImage(16, 12, base, i * 7919 + base[0]);
      await fs.writeFile(path.join(dir, `img_${i}.ppm`), encodePpm(16, 12, rgb));
    }
  }
}

/** A miniature CIFAR-10-format binary batch with the given labels. */
export function cifarBatch(labels: number[]): Buffer {
  const record = 1 + 3072;
  const buf = Buffer.alloc(labels.length * record);
  for (let r = 0; r < labels.length; r++) {
    buf[r * record] = labels[r];
    for (let i = 0; i < 3072; i++) {
      buf[r * record + 1 + i] = (labels[r] * 37 + i) % 256;
    }
  }
  return buf;
}
