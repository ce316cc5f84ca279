/**
 * Golden transcript conformance: the Node scorer must reproduce the
 * recorded responses of the reference implementation — exact JSON
 * equality, floats to 1e-9, `error` values compared by presence only.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { describe, expect, it } from "vitest";

import { JointLinearModel } from "../src/model.js";
import { handleRequest, Request } from "../src/protocol.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "tests", "data", "protocol");

export function responsesMatch(expected: unknown, got: unknown, tol = 1e-9): boolean {
  if (expected !== null && typeof expected === "object" && !Array.isArray(expected)) {
    if (got === null || typeof got !== "object" || Array.isArray(got)) return false;
    const e = expected as Record<string, unknown>;
    const g = got as Record<string, unknown>;
    const keys = Object.keys(e).sort();
    if (keys.join(",") !== Object.keys(g).sort().join(",")) return false;
    return keys.every((k) => (k === "error" ? true : responsesMatch(e[k], g[k], tol)));
  }
  if (Array.isArray(expected)) {
    return (
      Array.isArray(got) &&
      expected.length === got.length &&
      expected.every((e, i) => responsesMatch(e, got[i], tol))
    );
  }
  if (typeof expected === "number" && typeof got === "number") {
    if (Number.isInteger(expected) && Number.isInteger(got)) return expected === got;
    return Math.abs(expected - got) <= tol;
  }
  return expected === got;
}

function loadModel(): JointLinearModel {
  return JointLinearModel.load(join(FIXTURES, "model.json"));
}

function transcripts(): { request: Request; response: unknown }[] {
  return readFileSync(join(FIXTURES, "transcripts.jsonl"), "utf-8")
    .split("\n")
    .filter((l) => l.length > 0)
    .map((l) => JSON.parse(l));
}

describe("golden transcripts", () => {
  it("reproduces every recorded response", () => {
    const model = loadModel();
    for (const entry of transcripts()) {
      const got = handleRequest(model, entry.request);
      expect(responsesMatch(entry.response, got), JSON.stringify(entry.request)).toBe(true);
    }
  });

  it("covers both ops and at least one error case", () => {
    const entries = transcripts();
    const ops = new Set(entries.map((e) => e.request.op));
    expect(ops.has("loss_batch")).toBe(true);
    expect(ops.has("predict_batch")).toBe(true);
    expect(entries.some((e) => "error" in (e.response as object))).toBe(true);
  });
});

describe("model scoring", () => {
  it("losses are finite and non-negative, OOV tokens included", () => {
    const model = loadModel();
    const loss = model.loss({
      tokens: ["totally", "unseen", "tokens"],
      slots: ["O", "O", "O"],
      intent: "book_hotel",
    });
    expect(Number.isFinite(loss)).toBe(true);
    expect(loss).toBeGreaterThanOrEqual(0);
  });

  it("unknown gold labels raise", () => {
    const model = loadModel();
    expect(() =>
      model.loss({ tokens: ["hi"], slots: ["O"], intent: "no_such_intent" }),
    ).toThrow(/unknown to this model/);
  });

  it("predictions align with tokens and stay in vocabulary", () => {
    const model = loadModel();
    const { intent, slots } = model.predict(["book", "a", "hotel", "in", "arlon"]);
    expect(slots).toHaveLength(5);
    expect(typeof intent).toBe("string");
  });

  it("loss_batch equals per-item loss", () => {
    const model = loadModel();
    const item = { tokens: ["set", "an", "alarm", "for", "dawn"], slots: ["O", "O", "O", "O", "B-alarm_time"], intent: "set_alarm" };
    expect(model.lossBatch([item, item])).toEqual([model.loss(item), model.loss(item)]);
  });
});
