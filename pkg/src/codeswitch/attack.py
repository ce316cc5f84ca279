"""Greedy loss-guided code-switching attack.

The engine visits the original token positions of an utterance once, in a
seeded uniform-random permutation (one stream per utterance, derived from
the run seed and the utterance id). At each position it asks the candidate
source for replacements, scores every candidate utterance in its full,
partially substituted context, and accepts the highest-loss candidate when
that loss is at least the current loss (strictly greater when
``accept_on_tie`` is off). Ties among equal-loss candidates break toward
the first in candidate order.

Multi-token replacements are handled with a segment model: the utterance
starts as one segment per token, the permutation ranges over original
segment indices, and a replaced segment holds the whole replacement and is
frozen, so later length changes never shift positions.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

from .candidates import Candidate
from .corpus import Dataset, Utterance
from .errors import CodeswitchError, ConfigError
from .model import Scorer
from .seeding import derive_rng


class CandidateSource(Protocol):
    src_lang: str
    tgt_lang: str

    def candidates(self, u: Utterance, position: int) -> list[Candidate]: ...


@dataclass(frozen=True)
class AttackConfig:
    mode: str  # "word" | "phrase"
    embedded_lang: str
    k_max: int = 8
    seed: int = 0
    accept_on_tie: bool = True

    def __post_init__(self):
        if self.mode not in ("word", "phrase"):
            raise ConfigError(f"unknown attack mode {self.mode!r}")


@dataclass(frozen=True)
class Substitution:
    position: int
    original_token: str
    tokens: tuple[str, ...]
    provenance: str


@dataclass(frozen=True)
class AttackResult:
    original: Utterance
    adversarial: Utterance
    loss_trace: tuple[float, ...]
    substitutions: tuple[Substitution, ...]
    visit_order: tuple[int, ...]

    @property
    def initial_loss(self) -> float:
        return self.loss_trace[0]

    @property
    def final_loss(self) -> float:
        return self.loss_trace[-1]

    @property
    def switch_ratio(self) -> float:
        """Fraction of original token positions that were replaced."""
        return len(self.substitutions) / len(self.original.tokens)


def _check_pairing(u: Utterance, source: CandidateSource, cfg: AttackConfig) -> None:
    if cfg.embedded_lang == u.lang:
        raise ConfigError(f"embedded language equals utterance language {u.lang!r}")
    if source.src_lang != u.lang or source.tgt_lang != cfg.embedded_lang:
        raise ConfigError(
            f"candidate source covers {source.src_lang}->{source.tgt_lang}, "
            f"attack needs {u.lang}->{cfg.embedded_lang}"
        )


def _compose(
    u: Utterance,
    seg_tokens: list[tuple[str, ...]],
    seg_labels: list[tuple[str, ...]],
    position: int | None = None,
    cand: Candidate | None = None,
) -> Utterance:
    tokens: list[str] = []
    labels: list[str] = []
    for i in range(len(seg_tokens)):
        if position is not None and i == position:
            tokens.extend(cand.tokens)
            labels.extend(cand.labels)
        else:
            tokens.extend(seg_tokens[i])
            labels.extend(seg_labels[i])
    return Utterance(u.id, u.lang, tuple(tokens), tuple(labels), u.intent)


def attack(
    u: Utterance,
    scorer: Scorer,
    source: CandidateSource,
    cfg: AttackConfig,
    visit_order: Sequence[int] | None = None,
) -> AttackResult:
    """Attack one labeled utterance; deterministic for a fixed seed.

    ``visit_order`` overrides the seeded permutation (useful for replay
    tests); it must be a permutation of the original token indices.
    """
    _check_pairing(u, source, cfg)
    n = len(u.tokens)
    if visit_order is None:
        order = tuple(int(i) for i in derive_rng(cfg.seed, "attack", u.id).permutation(n))
    else:
        order = tuple(int(i) for i in visit_order)
        if sorted(order) != list(range(n)):
            raise ValueError(f"visit_order must be a permutation of 0..{n - 1}")

    seg_tokens: list[tuple[str, ...]] = [(t,) for t in u.tokens]
    seg_labels: list[tuple[str, ...]] = [(s,) for s in u.slots]
    substituted = [False] * n

    current_loss = scorer.loss(u)
    trace = [current_loss]
    subs: list[Substitution] = []

    for i in order:
        if substituted[i]:  # frozen; single-visit permutation makes this moot
            continue
        cands = source.candidates(u, i)
        if not cands:
            continue
        variants = [_compose(u, seg_tokens, seg_labels, i, c) for c in cands]
        losses = scorer.loss_batch(variants)
        best = max(range(len(losses)), key=losses.__getitem__)  # first max wins ties
        best_loss = losses[best]
        accept = best_loss >= current_loss if cfg.accept_on_tie else best_loss > current_loss
        if accept:
            c = cands[best]
            seg_tokens[i] = c.tokens
            seg_labels[i] = c.labels
            substituted[i] = True
            current_loss = best_loss
            trace.append(best_loss)
            subs.append(Substitution(i, u.tokens[i], c.tokens, c.provenance))

    adversarial = _compose(u, seg_tokens, seg_labels)
    return AttackResult(u, adversarial, tuple(trace), tuple(subs), order)


@dataclass(frozen=True)
class AttackFailure:
    index: int
    utterance_id: str
    error: str


@dataclass(frozen=True)
class AttackSummary:
    n_utterances: int
    n_attacked: int
    n_failed: int
    mean_substitutions: float
    mean_loss_increase: float
    code_switch_ratio: float

    def to_dict(self) -> dict:
        return {
            "n_utterances": self.n_utterances,
            "n_attacked": self.n_attacked,
            "n_failed": self.n_failed,
            "mean_substitutions": self.mean_substitutions,
            "mean_loss_increase": self.mean_loss_increase,
            "code_switch_ratio": self.code_switch_ratio,
        }


@dataclass(frozen=True)
class AttackRun:
    results: tuple[AttackResult, ...]
    failures: tuple[AttackFailure, ...]
    summary: AttackSummary


def summarize(results: Sequence[AttackResult], n_failed: int = 0) -> AttackSummary:
    n = len(results)
    if n == 0:
        return AttackSummary(n_failed, 0, n_failed, 0.0, 0.0, 0.0)
    total_tokens = sum(len(r.original.tokens) for r in results)
    total_subs = sum(len(r.substitutions) for r in results)
    return AttackSummary(
        n_utterances=n + n_failed,
        n_attacked=n,
        n_failed=n_failed,
        mean_substitutions=total_subs / n,
        mean_loss_increase=sum(r.final_loss - r.initial_loss for r in results) / n,
        code_switch_ratio=total_subs / total_tokens,
    )


def attack_dataset(
    ds: Dataset,
    scorer: Scorer,
    source: CandidateSource,
    cfg: AttackConfig,
    parallelism: int = 1,
) -> AttackRun:
    """Attack every utterance; results keep input order regardless of scheduling.

    Per-utterance scorer failures are recorded and skipped; inspect
    ``run.failures`` (the CLI turns them into a nonzero exit in strict mode).
    """

    def work(idx_u: tuple[int, Utterance]):
        idx, u = idx_u
        try:
            return idx, attack(u, scorer, source, cfg), None
        except ConfigError:
            raise
        except (CodeswitchError, OSError) as e:
            return idx, None, AttackFailure(idx, u.id, f"{type(e).__name__}: {e}")

    items = list(enumerate(ds.utterances))
    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(work, items))
    else:
        outcomes = [work(item) for item in items]

    outcomes.sort(key=lambda t: t[0])
    results = tuple(r for _, r, _ in outcomes if r is not None)
    failures = tuple(f for _, _, f in outcomes if f is not None)
    return AttackRun(results, failures, summarize(results, n_failed=len(failures)))


def result_to_dict(r: AttackResult) -> dict:
    return {
        "id": r.original.id,
        "lang": r.original.lang,
        "intent": r.original.intent,
        "original_tokens": list(r.original.tokens),
        "original_slots": list(r.original.slots),
        "adversarial_tokens": list(r.adversarial.tokens),
        "adversarial_slots": list(r.adversarial.slots),
        "loss_trace": list(r.loss_trace),
        "visit_order": list(r.visit_order),
        "substitutions": [
            {
                "position": s.position,
                "original_token": s.original_token,
                "tokens": list(s.tokens),
                "provenance": s.provenance,
            }
            for s in r.substitutions
        ],
    }


def write_results_jsonl(results: Sequence[AttackResult], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in results:
            f.write(json.dumps(result_to_dict(r), ensure_ascii=False) + "\n")


def adversarial_dataset(results: Sequence[AttackResult], lang: str | None = None) -> Dataset:
    """Re-package adversarial utterances as a Dataset for TSV serialization."""
    utts = tuple(r.adversarial for r in results)
    if lang is None:
        lang = utts[0].lang if utts else "und"
    return Dataset(lang, utts)
