"""Evaluation metrics and report tables.

Three metrics per language: intent accuracy, micro-averaged slot F1, and
semantic accuracy (both the intent and every slot label correct). Slot F1
is token-level by default -- every non-O token position is a positive --
with an exact-boundary span-level variant behind a flag. The report's
``avg`` column is the unweighted mean over languages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

from .corpus import Dataset
from .errors import DataError, ScorerContractError
from .model import Scorer

METRIC_NAMES = ("intent_accuracy", "slot_f1_micro", "semantic_accuracy")


@dataclass(frozen=True)
class LangMetrics:
    intent_accuracy: float
    slot_f1_micro: float
    semantic_accuracy: float
    n_utterances: int
    n_tokens: int

    def value(self, metric: str) -> float:
        if metric not in METRIC_NAMES:
            raise ValueError(f"unknown metric {metric!r}")
        return getattr(self, metric)


@dataclass(frozen=True)
class EvalReport:
    per_lang: Mapping[str, LangMetrics]
    average: LangMetrics

    @property
    def langs(self) -> tuple[str, ...]:
        return tuple(self.per_lang)

    def to_dict(self) -> dict:
        def row(m: LangMetrics) -> dict:
            return {
                "intent_accuracy": m.intent_accuracy,
                "slot_f1_micro": m.slot_f1_micro,
                "semantic_accuracy": m.semantic_accuracy,
                "n_utterances": m.n_utterances,
                "n_tokens": m.n_tokens,
            }

        return {
            "per_lang": {lang: row(m) for lang, m in self.per_lang.items()},
            "average": row(self.average),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        per_lang = {lang: LangMetrics(**row) for lang, row in d["per_lang"].items()}
        return cls(per_lang, LangMetrics(**d["average"]))


def bio_spans(labels: Sequence[str]) -> set[tuple[str, int, int]]:
    """(type, start, end-exclusive) spans; an orphan I-x starts a new span."""
    spans: set[tuple[str, int, int]] = set()
    start = -1
    kind = ""
    for i, lab in enumerate(labels):
        if lab.startswith("B-"):
            if start >= 0:
                spans.add((kind, start, i))
            kind, start = lab[2:], i
        elif lab.startswith("I-"):
            if start < 0 or lab[2:] != kind:
                if start >= 0:
                    spans.add((kind, start, i))
                kind, start = lab[2:], i
        else:
            if start >= 0:
                spans.add((kind, start, i))
            start = -1
    if start >= 0:
        spans.add((kind, start, len(labels)))
    return spans


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 1.0  # nothing to find, nothing found: vacuously perfect
    return 2 * tp / denom


@dataclass
class _Tally:
    n_utt: int = 0
    n_tok: int = 0
    intent_ok: int = 0
    semantic_ok: int = 0
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def metrics(self) -> LangMetrics:
        return LangMetrics(
            intent_accuracy=self.intent_ok / self.n_utt,
            slot_f1_micro=_f1(self.tp, self.fp, self.fn),
            semantic_accuracy=self.semantic_ok / self.n_utt,
            n_utterances=self.n_utt,
            n_tokens=self.n_tok,
        )


def evaluate(scorer: Scorer, ds: Dataset, span_f1: bool = False) -> EvalReport:
    """Score predictions against gold labels, grouped by utterance language."""
    if not ds.utterances:
        raise DataError("cannot evaluate an empty dataset")
    preds = scorer.predict_batch([u.tokens for u in ds])
    if len(preds) != len(ds.utterances):
        raise ScorerContractError(
            f"scorer returned {len(preds)} predictions for {len(ds.utterances)} utterances"
        )
    tallies: dict[str, _Tally] = {}
    for u, (pred_intent, pred_slots) in zip(ds.utterances, preds):
        if len(pred_slots) != len(u.tokens):
            raise ScorerContractError(
                f"utterance {u.id!r}: {len(pred_slots)} predicted slots for "
                f"{len(u.tokens)} tokens"
            )
        t = tallies.setdefault(u.lang, _Tally())
        t.n_utt += 1
        t.n_tok += len(u.tokens)
        intent_ok = pred_intent == u.intent
        slots_ok = tuple(pred_slots) == u.slots
        t.intent_ok += intent_ok
        t.semantic_ok += intent_ok and slots_ok
        if span_f1:
            gold = bio_spans(u.slots)
            hyp = bio_spans(pred_slots)
            t.tp += len(gold & hyp)
            t.fp += len(hyp - gold)
            t.fn += len(gold - hyp)
        else:
            for g, p in zip(u.slots, pred_slots):
                if p != "O":
                    if g == p:
                        t.tp += 1
                    else:
                        t.fp += 1
                if g != "O" and g != p:
                    t.fn += 1
    per_lang = {lang: t.metrics() for lang, t in tallies.items()}
    return EvalReport(per_lang, _average(per_lang))


def combine(per_lang: Mapping[str, LangMetrics]) -> EvalReport:
    """Assemble a report from per-language rows gathered across datasets."""
    if not per_lang:
        raise ValueError("no per-language rows to combine")
    return EvalReport(dict(per_lang), _average(per_lang))


def _average(per_lang: Mapping[str, LangMetrics]) -> LangMetrics:
    rows = list(per_lang.values())
    n = len(rows)
    return LangMetrics(
        intent_accuracy=sum(r.intent_accuracy for r in rows) / n,
        slot_f1_micro=sum(r.slot_f1_micro for r in rows) / n,
        semantic_accuracy=sum(r.semantic_accuracy for r in rows) / n,
        n_utterances=sum(r.n_utterances for r in rows),
        n_tokens=sum(r.n_tokens for r in rows),
    )


def _fmt3(x: float) -> str:
    """Three decimals, rounding half-up (table precision)."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def render_report(
    reports: Mapping[str, EvalReport],
    fmt: str = "tsv",
    metrics: Sequence[str] = METRIC_NAMES,
) -> str:
    """One table per metric: a row per condition, a column per language + avg.

    All reports must cover the same languages in the same order.
    """
    if fmt not in ("tsv", "markdown"):
        raise ValueError(f"unknown report format {fmt!r}")
    if not reports:
        raise ValueError("no reports to render")
    langs = next(iter(reports.values())).langs
    for name, rep in reports.items():
        if rep.langs != langs:
            raise ValueError(
                f"report {name!r} covers languages {rep.langs}, expected {langs}"
            )
    blocks = []
    for metric in metrics:
        header = ["model", *langs, "avg"]
        rows = []
        for name, rep in reports.items():
            cells = [_fmt3(rep.per_lang[lang].value(metric)) for lang in langs]
            cells.append(_fmt3(rep.average.value(metric)))
            rows.append([name, *cells])
        if fmt == "tsv":
            lines = [f"# {metric}"]
            lines.append("\t".join(header))
            lines += ["\t".join(r) for r in rows]
        else:
            lines = [f"### {metric}", ""]
            lines.append("| " + " | ".join(header) + " |")
            lines.append("| " + " | ".join("---" for _ in header) + " |")
            lines += ["| " + " | ".join(r) + " |" for r in rows]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def save_report_json(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def load_report_json(path) -> EvalReport:
    with open(path, encoding="utf-8") as f:
        return EvalReport.from_dict(json.load(f))
