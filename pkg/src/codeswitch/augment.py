"""Model-free adversarial training-set generation and splitting.

For every embedded language and every pivot utterance, the original token
positions are visited in a seeded permutation; where candidates exist, the
segment is replaced with a uniformly chosen candidate when a uniform draw
exceeds ``1 - replace_prob`` (so the default 0.5 keeps the coin-flip
semantics). No scorer is consulted. The output is the concatenation of the
per-language generations, in (language order, pivot order).

Drop rule: a pivot utterance that has no candidates at any position yields
nothing for that language (it cannot be code-switched at all); utterances
where the coin simply declined every replacement are kept. Set
``keep_uncovered`` to retain the former verbatim instead.

Generated utterances get id ``<pivot_id>:<lang>`` and carry the embedded
language as their ``lang`` tag, marking which language was mixed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .attack import CandidateSource
from .corpus import Dataset, Utterance
from .errors import ConfigError
from .seeding import derive_rng

MIXED_LANG = "mix"


@dataclass(frozen=True)
class AugmentConfig:
    embedded_langs: tuple[str, ...]
    replace_prob: float = 0.5
    mode: str = "phrase"  # "word" | "phrase"
    seed: int = 0
    split_ratio: tuple[int, int] = (9, 1)
    keep_uncovered: bool = False

    def __post_init__(self):
        object.__setattr__(self, "embedded_langs", tuple(self.embedded_langs))
        if not self.embedded_langs:
            raise ConfigError("embedded_langs must be non-empty")
        if self.mode not in ("word", "phrase"):
            raise ConfigError(f"unknown augmentation mode {self.mode!r}")
        if not 0.0 <= self.replace_prob <= 1.0:
            raise ConfigError("replace_prob must lie in [0, 1]")


def _generate_one(
    u: Utterance, source: CandidateSource, lang: str, cfg: AugmentConfig
) -> Utterance | None:
    rng = derive_rng(cfg.seed, "augment", lang, u.id)
    seg_tokens: list[tuple[str, ...]] = [(t,) for t in u.tokens]
    seg_labels: list[tuple[str, ...]] = [(s,) for s in u.slots]
    had_candidates = False
    for i in rng.permutation(len(u.tokens)):
        i = int(i)
        cands = source.candidates(u, i)
        if not cands:
            continue
        had_candidates = True
        if rng.random() > 1.0 - cfg.replace_prob:
            c = cands[int(rng.integers(len(cands)))]
            seg_tokens[i] = c.tokens
            seg_labels[i] = c.labels
    if not had_candidates and not cfg.keep_uncovered:
        return None
    tokens = tuple(t for seg in seg_tokens for t in seg)
    labels = tuple(l for seg in seg_labels for l in seg)
    return Utterance(f"{u.id}:{lang}", lang, tokens, labels, u.intent)


def generate_adversarial_set(
    pivot: Dataset,
    sources: Mapping[str, CandidateSource],
    cfg: AugmentConfig,
) -> Dataset:
    """Concatenated code-mixed copies of the pivot, one pass per language."""
    for lang in cfg.embedded_langs:
        if lang == pivot.lang:
            raise ConfigError(f"pivot language {lang!r} cannot be an embedded language")
        source = sources.get(lang)
        if source is None:
            raise ConfigError(f"no candidate source configured for language {lang!r}")
        if source.src_lang != pivot.lang or source.tgt_lang != lang:
            raise ConfigError(
                f"source for {lang!r} covers {source.src_lang}->{source.tgt_lang}, "
                f"need {pivot.lang}->{lang}"
            )
    out: list[Utterance] = []
    for lang in cfg.embedded_langs:
        source = sources[lang]
        for u in pivot:
            v = _generate_one(u, source, lang, cfg)
            if v is not None:
                out.append(v)
    return Dataset(MIXED_LANG, tuple(out))


def split(ds: Dataset, ratio: tuple[int, int] = (9, 1), seed: int = 0) -> tuple[Dataset, Dataset]:
    """Disjoint, exhaustive, seeded split; train size rounds half-up.

    Membership comes from a seeded shuffle; each side keeps the original
    dataset order for stable diffs.
    """
    a, b = ratio
    if a <= 0 or b <= 0:
        raise ConfigError(f"both split ratio parts must be positive, got {a}:{b}")
    n = len(ds.utterances)
    perm = derive_rng(seed, "split").permutation(n)
    n_train = int(math.floor(n * (a / (a + b)) + 0.5))
    train_ids = {int(i) for i in perm[:n_train]}
    train = tuple(u for i, u in enumerate(ds.utterances) if i in train_ids)
    test = tuple(u for i, u in enumerate(ds.utterances) if i not in train_ids)
    return Dataset(ds.lang, train), Dataset(ds.lang, test)
