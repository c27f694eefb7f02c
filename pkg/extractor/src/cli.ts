#!/usr/bin/env node
/**
 * owcl-extract: run a pretrained vision backbone over an image dataset and
 * write the embeddings (plus labels) as a .owcl file.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { BACKBONE_IDS } from "./backbones.js";
import { ExtractError } from "./errors.js";
import { extract } from "./extract.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command("extract", "extract embeddings from an image dataset", (y) =>
      y
        .option("dataset", {
          type: "string",
          demandOption: true,
          describe: "directory of class subfolders, or cifar10:DIR (binary batches)",
        })
        .option("model", {
          type: "string",
          default: "dinov2-giant",
          choices: BACKBONE_IDS,
        })
        .option("split", {
          type: "string",
          default: "train",
          choices: ["train", "test"],
        })
        .option("batch-size", { type: "number", default: 32 })
        .option("device", { type: "string", default: "auto" })
        .option("out", { type: "string", demandOption: true })
    )
    .demandCommand(1)
    .strict()
    .help()
    .parse();

  try {
    const result = await extract({
      dataset: args.dataset as string,
      model: args.model as string,
      split: args.split as "train" | "test",
      batchSize: Math.max(1, args.batchSize as number),
      device: args.device as string,
      outPath: args.out as string,
    });
    console.log(
      `wrote ${result.n}x${result.d} embeddings (${result.classNames.length} classes) to ${args.out}`
    );
    return 0;
  } catch (err) {
    if (err instanceof ExtractError) {
      console.error(`error ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
