/**
 * Newline-delimited JSON scorer protocol, request dispatch and framing.
 *
 * One JSON object per line; failures produce `{"error": "..."}` and keep
 * the stream usable. The request/response shapes are shared with the
 * Python toolkit; golden transcripts live in ../tests/data/protocol/.
 */

import { JointLinearModel, LabeledItem, ScoringError } from "./model.js";

export type Request =
  | { op: "loss_batch"; items: LabeledItem[] }
  | { op: "predict_batch"; items: { tokens: string[] }[] }
  | { op: string; [key: string]: unknown };

export type Response =
  | { losses: number[] }
  | { predictions: { intent: string; slots: string[] }[] }
  | { error: string };

export function handleRequest(model: JointLinearModel, request: Request): Response {
  try {
    if (request.op === "loss_batch") {
      const items = request.items as LabeledItem[];
      if (!Array.isArray(items)) return { error: "items must be a list" };
      return { losses: model.lossBatch(items) };
    }
    if (request.op === "predict_batch") {
      const items = request.items as { tokens: string[] }[];
      if (!Array.isArray(items)) return { error: "items must be a list" };
      return {
        predictions: items.map((item) => {
          const { intent, slots } = model.predict(item.tokens);
          return { intent, slots };
        }),
      };
    }
    return { error: `unknown op '${String(request.op)}'` };
  } catch (e) {
    if (e instanceof ScoringError || e instanceof TypeError) {
      return { error: e.message };
    }
    throw e;
  }
}

export function handleLine(model: JointLinearModel, line: string): string {
  let request: Request;
  try {
    request = JSON.parse(line) as Request;
  } catch (e) {
    return JSON.stringify({ error: `bad JSON: ${(e as Error).message}` });
  }
  return JSON.stringify(handleRequest(model, request));
}
