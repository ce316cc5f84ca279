#!/usr/bin/env node
/**
 * Bridge CLI: serve a model file over the scorer protocol, or extract
 * lexicon/alignment resource files from dictionaries and parallel corpora.
 *
 *   serve              --model m.json [--port 8753 | --stdio] [--host H]
 *   extract-lexicon    --vocab-from data.tsv (--dict d.tsv | --src s.tsv --tgt t.tsv)
 *                      --out lexicon.tsv [--top-k 8]
 *   extract-alignments --src s.tsv --tgt t.tsv --out align.tsv [--threshold 0.1]
 */

import { writeFileSync, readFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { extractAlignments, formatAlignments } from "./align.js";
import { loadDataset, pairById } from "./corpus.js";
import {
  formatLexicon,
  lexiconFromDictionary,
  lexiconFromParallel,
  vocabularyOf,
} from "./lexicon.js";
import { JointLinearModel } from "./model.js";
import { serveConnection, startServer } from "./server.js";

function fail(message: string): never {
  process.stderr.write(`error: ${message}\n`);
  process.exit(2);
}

function need(value: string | undefined, flag: string): string {
  if (!value) fail(`missing required option --${flag}`);
  return value;
}

async function cmdServe(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      port: { type: "string" },
      host: { type: "string" },
      stdio: { type: "boolean" },
    },
  });
  const model = JointLinearModel.load(need(values.model, "model"));
  if (values.stdio) {
    await serveConnection(model, process.stdin, process.stdout);
    return;
  }
  const port = values.port ? Number(values.port) : 8753;
  const server = await startServer(model, port, values.host ?? "127.0.0.1");
  const addr = server.address();
  if (addr && typeof addr === "object") {
    process.stderr.write(`serving scorer on ${addr.address}:${addr.port}\n`);
  }
  await new Promise(() => {});
}

function loadPairs(srcPath: string, tgtPath: string) {
  const pairs = pairById(loadDataset(srcPath, "src"), loadDataset(tgtPath, "tgt"));
  if (pairs.length === 0) fail("no shared utterance ids between the two datasets");
  return pairs;
}

function cmdExtractLexicon(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      "vocab-from": { type: "string" },
      vocab: { type: "string" },
      dict: { type: "string" },
      src: { type: "string" },
      tgt: { type: "string" },
      out: { type: "string" },
      "top-k": { type: "string" },
    },
  });
  let vocab: string[];
  if (values["vocab-from"]) {
    vocab = vocabularyOf(loadDataset(values["vocab-from"], "src"));
  } else if (values.vocab) {
    vocab = readFileSync(values.vocab, "utf-8")
      .split("\n")
      .map((t) => t.trim())
      .filter((t) => t.length > 0);
  } else {
    fail("need --vocab-from DATA.tsv or --vocab TOKENS.txt");
  }
  const topK = values["top-k"] ? Number(values["top-k"]) : 8;
  let entries;
  if (values.dict) {
    entries = lexiconFromDictionary(vocab, readFileSync(values.dict, "utf-8"), { topK });
  } else if (values.src && values.tgt) {
    entries = lexiconFromParallel(vocab, loadPairs(values.src, values.tgt), { topK });
  } else {
    fail("need --dict DICT.tsv or --src SRC.tsv --tgt TGT.tsv");
  }
  writeFileSync(need(values.out, "out"), formatLexicon(entries), "utf-8");
  process.stderr.write(`wrote ${entries.length} lexicon entries\n`);
}

function cmdExtractAlignments(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      src: { type: "string" },
      tgt: { type: "string" },
      out: { type: "string" },
      threshold: { type: "string" },
    },
  });
  const pairs = loadPairs(need(values.src, "src"), need(values.tgt, "tgt"));
  const lines = extractAlignments(pairs, {
    threshold: values.threshold ? Number(values.threshold) : undefined,
  });
  writeFileSync(need(values.out, "out"), formatAlignments(lines), "utf-8");
  process.stderr.write(`aligned ${lines.length} utterance pairs\n`);
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    switch (command) {
      case "serve":
        await cmdServe(rest);
        break;
      case "extract-lexicon":
        cmdExtractLexicon(rest);
        break;
      case "extract-alignments":
        cmdExtractAlignments(rest);
        break;
      default:
        fail(`unknown command '${command ?? ""}' (serve | extract-lexicon | extract-alignments)`);
    }
  } catch (e) {
    fail((e as Error).message);
  }
}

void main();
