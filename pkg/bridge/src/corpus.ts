/**
 * Dataset TSV parsing (4- or 5-column, detected from the header), matching
 * the toolkit's file contract: space-separated tokens and BIO labels of
 * equal length, one utterance per row.
 */

import { readFileSync } from "node:fs";

export interface Utterance {
  id: string;
  lang: string;
  tokens: string[];
  slots: string[];
  intent: string;
}

const HEADER = "id\tutterance\tslot_labels\tintent";
const HEADER_LANG = "id\tlang\tutterance\tslot_labels\tintent";

export function parseDataset(text: string, lang = "und"): Utterance[] {
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") lines.pop();
  const header = lines.shift();
  let withLang: boolean;
  if (header === HEADER) {
    withLang = false;
  } else if (header === HEADER_LANG) {
    withLang = true;
  } else {
    throw new Error(`unrecognized dataset header: ${String(header)}`);
  }
  return lines.map((line, i) => {
    const cols = line.split("\t");
    const expected = withLang ? 5 : 4;
    if (cols.length !== expected) {
      throw new Error(`line ${i + 2}: expected ${expected} columns, got ${cols.length}`);
    }
    const [id, rowLang, text2, labels, intent] = withLang
      ? cols
      : [cols[0], lang, cols[1], cols[2], cols[3]];
    const tokens = text2.split(" ");
    const slots = labels.split(" ");
    if (tokens.length !== slots.length) {
      throw new Error(
        `line ${i + 2}: length mismatch (${tokens.length} tokens vs ${slots.length} slot labels)`,
      );
    }
    return { id, lang: rowLang, tokens, slots, intent };
  });
}

export function loadDataset(path: string, lang = "und"): Utterance[] {
  return parseDataset(readFileSync(path, "utf-8"), lang);
}

/** Pair two datasets by shared utterance id, first-dataset order. */
export function pairById(src: Utterance[], tgt: Utterance[]): [Utterance, Utterance][] {
  const byId = new Map(tgt.map((u) => [u.id, u]));
  const pairs: [Utterance, Utterance][] = [];
  for (const u of src) {
    const v = byId.get(u.id);
    if (v) pairs.push([u, v]);
  }
  return pairs;
}
