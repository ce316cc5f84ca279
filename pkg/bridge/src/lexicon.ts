/**
 * Bilingual lexicon extraction: translate a token vocabulary either through
 * a dictionary TSV (e.g. an exported MT phrase table) or by inducing
 * translations from a parallel corpus via statistical alignment. Output is
 * the toolkit's lexicon TSV (`src_token<TAB>tgt_phrase`, duplicates
 * collapsed in first-seen order).
 */

import { DiceAligner } from "./align.js";
import { Utterance } from "./corpus.js";

export interface LexiconEntry {
  src: string;
  phrases: string[][];
}

export interface ExtractOptions {
  /** translations kept per source token */
  topK?: number;
}

function dedupPush(bucket: string[][], phrase: string[]): void {
  const key = phrase.join(" ");
  if (!bucket.some((p) => p.join(" ") === key)) bucket.push(phrase);
}

/** Filter a dictionary's rows down to the requested vocabulary. */
export function lexiconFromDictionary(
  vocab: string[],
  dictText: string,
  opts: ExtractOptions = {},
): LexiconEntry[] {
  const topK = opts.topK ?? 8;
  const wanted = new Set(vocab.map((v) => v.toLowerCase()));
  const buckets = new Map<string, string[][]>();
  for (const [lineno, raw] of dictText.split("\n").entries()) {
    if (!raw) continue;
    const cols = raw.split("\t");
    if (cols.length !== 2) {
      throw new Error(`dictionary line ${lineno + 1}: expected 2 columns, got ${cols.length}`);
    }
    const src = cols[0].toLowerCase();
    if (!wanted.has(src)) continue;
    const phrase = cols[1].split(" ").filter((t) => t.length > 0);
    if (phrase.length === 0) continue;
    let bucket = buckets.get(src);
    if (!bucket) buckets.set(src, (bucket = []));
    if (bucket.length < topK) dedupPush(bucket, phrase);
  }
  const out: LexiconEntry[] = [];
  for (const src of [...wanted].sort()) {
    const phrases = buckets.get(src);
    if (phrases && phrases.length > 0) out.push({ src, phrases });
  }
  return out;
}

/**
 * Induce a lexicon from sentence pairs: align them, then for every source
 * token take the most frequent aligned target phrases.
 */
export function lexiconFromParallel(
  vocab: string[],
  pairs: [Utterance, Utterance][],
  opts: ExtractOptions = {},
): LexiconEntry[] {
  const topK = opts.topK ?? 8;
  const wanted = new Set(vocab.map((v) => v.toLowerCase()));
  const aligner = new DiceAligner(pairs);
  // src token -> phrase string -> [count, first-seen order]
  const tallies = new Map<string, Map<string, [number, number]>>();
  let seen = 0;
  for (const [src, tgt] of pairs) {
    const line = aligner.alignPair(src, tgt);
    for (let i = 0; i < src.tokens.length; i++) {
      const s = src.tokens[i].toLowerCase();
      if (!wanted.has(s)) continue;
      const js = line.links.filter(([a]) => a === i).map(([, j]) => j).sort((a, b) => a - b);
      if (js.length === 0) continue;
      const phrase = js.map((j) => tgt.tokens[j]).join(" ");
      let tally = tallies.get(s);
      if (!tally) tallies.set(s, (tally = new Map()));
      const entry = tally.get(phrase);
      if (entry) {
        entry[0] += 1;
      } else {
        tally.set(phrase, [1, seen++]);
      }
    }
  }
  const out: LexiconEntry[] = [];
  for (const src of [...wanted].sort()) {
    const tally = tallies.get(src);
    if (!tally) continue;
    const ranked = [...tally.entries()]
      .sort((a, b) => b[1][0] - a[1][0] || a[1][1] - b[1][1])
      .slice(0, topK)
      .map(([phrase]) => phrase.split(" "));
    out.push({ src, phrases: ranked });
  }
  return out;
}

export function formatLexicon(entries: LexiconEntry[]): string {
  const rows: string[] = [];
  for (const { src, phrases } of entries) {
    for (const phrase of phrases) rows.push(`${src}\t${phrase.join(" ")}`);
  }
  return rows.length === 0 ? "" : rows.join("\n") + "\n";
}

/** All distinct (lowercased) tokens of a dataset, sorted. */
export function vocabularyOf(utterances: Utterance[]): string[] {
  const vocab = new Set<string>();
  for (const u of utterances) for (const t of u.tokens) vocab.add(t.toLowerCase());
  return [...vocab].sort();
}
