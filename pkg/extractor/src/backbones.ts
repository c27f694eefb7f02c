/**
 * Feature backbones.
 *
 * The DINOv2 family runs through @huggingface/transformers (install it and
 * have the weights cached/downloadable, otherwise loading reports
 * ModelUnavailable). The embedding is the pooled class-token output; the
 * processor applies the backbone's native resize and normalization.
 *
 * "stub16" is a dependency-free deterministic backbone (patch statistics)
 * used for smoke tests and the cross-component integration test.
 */

import { RawImage } from "./dataset.js";
import { ExtractError } from "./errors.js";

export interface Backbone {
  id: string;
  dim: number;
  embedBatch(images: RawImage[]): Promise<Float32Array[]>;
}

const DINOV2_DIMS: Record<string, number> = {
  "dinov2-small": 384,
  "dinov2-base": 768,
  "dinov2-large": 1024,
  "dinov2-giant": 1536,
};

export const BACKBONE_IDS = [...Object.keys(DINOV2_DIMS), "stub16"];

function stats(values: number[]): [number, number] {
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  const varc =
    values.reduce((a, b) => a + (b - mean) * (b - mean), 0) / values.length;
  return [mean, Math.sqrt(varc)];
}

/** 16-d patch-statistics descriptor: quadrant gray mean/std (8), channel
 * mean/std (6), normalized width and height (2). */
export function stub16(): Backbone {
  return {
    id: "stub16",
    dim: 16,
    async embedBatch(images: RawImage[]): Promise<Float32Array[]> {
      return images.map((img) => {
        const { width, height, data } = img;
        const out = new Float32Array(16);
        const quadGray: number[][] = [[], [], [], []];
        const channels: number[][] = [[], [], []];
        for (let y = 0; y < height; y++) {
          for (let x = 0; x < width; x++) {
            const p = 3 * (y * width + x);
            const r = data[p] / 255;
            const g = data[p + 1] / 255;
            const b = data[p + 2] / 255;
            channels[0].push(r);
            channels[1].push(g);
            channels[2].push(b);
            const quad = (y * 2 >= height ? 2 : 0) + (x * 2 >= width ? 1 : 0);
            quadGray[quad].push((r + g + b) / 3);
          }
        }
        for (let q = 0; q < 4; q++) {
          const [m, s] = quadGray[q].length ? stats(quadGray[q]) : [0, 0];
          out[2 * q] = m;
          out[2 * q + 1] = s;
        }
        for (let c = 0; c < 3; c++) {
          const [m, s] = stats(channels[c]);
          out[8 + 2 * c] = m;
          out[8 + 2 * c + 1] = s;
        }
        out[14] = width / 256;
        out[15] = height / 256;
        return out;
      });
    },
  };
}

async function loadDinov2(id: string, device: string): Promise<Backbone> {
  const dim = DINOV2_DIMS[id];
  let transformers: any;
  try {
    transformers = await import("@huggingface/transformers" as string);
  } catch {
    throw new ExtractError(
      "ModelUnavailable",
      `${id} needs the @huggingface/transformers package (npm install @huggingface/transformers)`
    );
  }
  let processor: any;
  let model: any;
  try {
    processor = await transformers.AutoProcessor.from_pretrained(`facebook/${id}`);
    model = await transformers.AutoModel.from_pretrained(`facebook/${id}`, {
      device: device === "auto" ? undefined : device,
    });
  } catch (err) {
    throw new ExtractError(
      "ModelUnavailable",
      `cannot load facebook/${id} (weights unreachable or device unsupported): ${err}`
    );
  }
  return {
    id,
    dim,
    async embedBatch(images: RawImage[]): Promise<Float32Array[]> {
      const raws = images.map(
        (img) =>
          new transformers.RawImage(Uint8ClampedArray.from(img.data), img.width, img.height, 3)
      );
      const inputs = await processor(raws);
      const output = await model(inputs);
      // pooled class token; transformers exposes it as pooler_output when
      // present, otherwise take the CLS position of the last hidden state
      const pooled = output.pooler_output ?? output.last_hidden_state.slice(null, 0);
      const flat: Float32Array = pooled.data;
      const result: Float32Array[] = [];
      for (let i = 0; i < images.length; i++) {
        result.push(flat.slice(i * dim, (i + 1) * dim));
      }
      return result;
    },
  };
}

export async function loadBackbone(id: string, device = "auto"): Promise<Backbone> {
  if (id === "stub16") {
    return stub16();
  }
  if (id in DINOV2_DIMS) {
    return loadDinov2(id, device);
  }
  throw new ExtractError(
    "ModelUnavailable",
    `unknown backbone ${JSON.stringify(id)}; supported: ${BACKBONE_IDS.join(", ")}`
  );
}
