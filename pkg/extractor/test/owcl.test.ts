import { describe, expect, it } from "vitest";

import { decodeEmbeddingFile, encodeEmbeddingFile, HEADER_BYTES } from "../src/owcl.js";

describe("embedding file codec", () => {
  it("round-trips values and labels bit-exactly", () => {
    const values = Float32Array.from([1.5, -2.25, 3.125, 0.0078125, 42, -0.5]);
    const labels = Uint32Array.from([0, 3]);
    const buf = encodeEmbeddingFile({ n: 2, d: 3, values, labels });
    const back = decodeEmbeddingFile(buf);
    expect(back.n).toBe(2);
    expect(back.d).toBe(3);
    expect(Array.from(back.values)).toEqual(Array.from(values));
    expect(Array.from(back.labels!)).toEqual([0, 3]);
  });

  it("has the exact documented size", () => {
    const plain = encodeEmbeddingFile({ n: 5, d: 7, values: new Float32Array(35) });
    expect(plain.length).toBe(HEADER_BYTES + 4 * 5 * 7);
    const labeled = encodeEmbeddingFile({
      n: 5,
      d: 7,
      values: new Float32Array(35),
      labels: new Uint32Array(5),
    });
    expect(labeled.length).toBe(HEADER_BYTES + 4 * 5 * 7 + 4 * 5);
  });

  it("writes little-endian header fields", () => {
    const buf = encodeEmbeddingFile({ n: 1, d: 2, values: new Float32Array(2) });
    expect(buf.toString("ascii", 0, 4)).toBe("OWCL");
    expect(buf.readUInt16LE(4)).toBe(1);
    expect(buf.readUInt16LE(6)).toBe(0);
    expect(buf.readBigUInt64LE(8)).toBe(1n);
    expect(buf.readBigUInt64LE(16)).toBe(2n);
  });

  it("rejects bad magic, version, truncation", () => {
    const good = encodeEmbeddingFile({ n: 2, d: 2, values: new Float32Array(4) });
    const badMagic = Buffer.from(good);
    badMagic.write("XXXX", 0, "ascii");
    expect(() => decodeEmbeddingFile(badMagic)).toThrow(/bad magic/);
    const badVersion = Buffer.from(good);
    badVersion.writeUInt16LE(9, 4);
    expect(() => decodeEmbeddingFile(badVersion)).toThrow(/version/);
    expect(() => decodeEmbeddingFile(good.subarray(0, good.length - 4))).toThrow(
      /expected exactly/
    );
  });
});
