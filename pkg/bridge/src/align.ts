/**
 * Statistical word alignment over a parallel corpus.
 *
 * Deterministic and dependency-free: type co-occurrence counts over the
 * sentence pairs give a Dice score per (source token, target token); each
 * source position links to its best-scoring target position, preferring
 * exact token matches, then the diagonal, then the leftmost candidate.
 * Output is the toolkit's Pharaoh alignment file format.
 */

import { Utterance } from "./corpus.js";

export interface AlignmentLine {
  id: string;
  tgtTokens: string[];
  links: [number, number][];
}

export interface AlignOptions {
  /** minimum Dice score for a non-exact link (exact matches always link) */
  threshold?: number;
}

const EXACT = 2.0;

function low(tokens: string[]): string[] {
  return tokens.map((t) => t.toLowerCase());
}

export class DiceAligner {
  private readonly srcCount = new Map<string, number>();
  private readonly tgtCount = new Map<string, number>();
  private readonly coCount = new Map<string, number>();
  private readonly threshold: number;

  constructor(pairs: [Utterance, Utterance][], opts: AlignOptions = {}) {
    this.threshold = opts.threshold ?? 0.1;
    for (const [src, tgt] of pairs) {
      const srcTypes = new Set(low(src.tokens));
      const tgtTypes = new Set(low(tgt.tokens));
      for (const s of srcTypes) this.srcCount.set(s, (this.srcCount.get(s) ?? 0) + 1);
      for (const t of tgtTypes) this.tgtCount.set(t, (this.tgtCount.get(t) ?? 0) + 1);
      for (const s of srcTypes) {
        for (const t of tgtTypes) {
          const key = s + "" + t;
          this.coCount.set(key, (this.coCount.get(key) ?? 0) + 1);
        }
      }
    }
  }

  score(s: string, t: string): number {
    if (s === t) return EXACT;
    const co = this.coCount.get(s + "" + t) ?? 0;
    if (co === 0) return 0;
    return (2 * co) / ((this.srcCount.get(s) ?? 0) + (this.tgtCount.get(t) ?? 0));
  }

  alignPair(src: Utterance, tgt: Utterance): AlignmentLine {
    const s = low(src.tokens);
    const t = low(tgt.tokens);
    const links: [number, number][] = [];
    for (let i = 0; i < s.length; i++) {
      let bestJ = -1;
      let bestScore = 0;
      let bestDist = Infinity;
      for (let j = 0; j < t.length; j++) {
        const sc = this.score(s[i], t[j]);
        if (sc <= 0) continue;
        const dist = Math.abs(i - j);
        if (sc > bestScore || (sc === bestScore && dist < bestDist)) {
          bestJ = j;
          bestScore = sc;
          bestDist = dist;
        }
      }
      if (bestJ >= 0 && (bestScore >= this.threshold || bestScore === EXACT)) {
        links.push([i, bestJ]);
      }
    }
    return { id: src.id, tgtTokens: [...tgt.tokens], links };
  }
}

export function extractAlignments(
  pairs: [Utterance, Utterance][],
  opts: AlignOptions = {},
): AlignmentLine[] {
  const aligner = new DiceAligner(pairs, opts);
  return pairs.map(([src, tgt]) => aligner.alignPair(src, tgt));
}

export function formatAlignments(lines: AlignmentLine[]): string {
  if (lines.length === 0) return "";
  return (
    lines
      .map((line) => {
        const links = [...line.links]
          .sort((a, b) => a[0] - b[0] || a[1] - b[1])
          .map(([i, j]) => `${i}-${j}`)
          .join(" ");
        return `${line.id}\t${line.tgtTokens.join(" ")}\t${links}`;
      })
      .join("\n") + "\n"
  );
}
