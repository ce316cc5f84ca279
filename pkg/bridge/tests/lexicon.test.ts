import { describe, expect, it } from "vitest";

import { Utterance } from "../src/corpus.js";
import {
  formatLexicon,
  lexiconFromDictionary,
  lexiconFromParallel,
  vocabularyOf,
} from "../src/lexicon.js";

function utt(id: string, text: string, lang = "aa"): Utterance {
  const tokens = text.split(" ");
  return { id, lang, tokens, slots: tokens.map(() => "O"), intent: "x" };
}

describe("lexiconFromDictionary", () => {
  it("filters to the vocabulary and keeps file order", () => {
    const dict = "the\tdie\nthe\tder\nare\tsind\nhouse\thaus\n";
    const entries = lexiconFromDictionary(["are", "the"], dict);
    expect(entries).toEqual([
      { src: "are", phrases: [["sind"]] },
      { src: "the", phrases: [["die"], ["der"]] },
    ]);
  });

  it("collapses duplicate rows", () => {
    const dict = "the\tdie\nthe\tdie\n";
    const entries = lexiconFromDictionary(["the"], dict);
    expect(entries).toEqual([{ src: "the", phrases: [["die"]] }]);
  });

  it("caps translations at top-k", () => {
    const dict = "a\tx\na\ty\na\tz\n";
    const entries = lexiconFromDictionary(["a"], dict, { topK: 2 });
    expect(entries[0].phrases).toEqual([["x"], ["y"]]);
  });

  it("empty vocabulary gives an empty file", () => {
    expect(formatLexicon(lexiconFromDictionary([], "a\tb\n"))).toBe("");
  });

  it("supports multi-token phrases", () => {
    const entries = lexiconFromDictionary(["home"], "home\tnach hause\n");
    expect(entries[0].phrases).toEqual([["nach", "hause"]]);
  });
});

describe("lexiconFromParallel", () => {
  const src = [
    utt("1", "show me flights to arlon"),
    utt("2", "show me flights to belmar"),
    utt("3", "show flights to arlon please"),
    utt("4", "book a hotel in belmar"),
  ];
  const tgt = src.map((u) => ({
    ...u,
    lang: "bb",
    tokens: u.tokens.map((t) => "z" + t),
    slots: [...u.slots],
  }));
  const pairs: [Utterance, Utterance][] = src.map((u, i) => [u, tgt[i]]);

  it("induces the word-for-word mapping for frequent tokens", () => {
    const entries = lexiconFromParallel(["flights", "arlon"], pairs);
    const bySrc = new Map(entries.map((e) => [e.src, e.phrases]));
    expect(bySrc.get("flights")?.[0]).toEqual(["zflights"]);
    expect(bySrc.get("arlon")?.[0]).toEqual(["zarlon"]);
  });

  it("empty vocabulary gives no entries", () => {
    expect(lexiconFromParallel([], pairs)).toEqual([]);
  });
});

describe("vocabularyOf", () => {
  it("lowercases, dedupes, sorts", () => {
    const vocab = vocabularyOf([utt("1", "Show me Show"), utt("2", "me too")]);
    expect(vocab).toEqual(["me", "show", "too"]);
  });
});

describe("formatLexicon", () => {
  it("one row per translation with a trailing newline", () => {
    const text = formatLexicon([{ src: "a", phrases: [["x"], ["y", "z"]] }]);
    expect(text).toBe("a\tx\na\ty z\n");
  });
});
