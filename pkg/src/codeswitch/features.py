"""Feature extraction for the joint linear victim model.

Intent head: bias, token unigrams, adjacent bigrams. Slot head, per token
position: bias, the tokens in a +/-``window`` radius, prefixes and suffixes
of the focus token up to ``max_affix`` characters, and an ``oov`` indicator.

Tokens are lowercased for lookups; a token unseen at training time maps to
the reserved ``<unk>`` symbol for all identity templates, so scoring new
material never fails. Affixes are taken from the actual (lowercased) token
so they can generalize to unseen words once their affixes have been seen.

The exact template strings below are part of the model-file contract:
external scorers that load a weight dump must reproduce them verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Container, Sequence

UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"


@dataclass(frozen=True)
class FeatureConfig:
    window: int = 2
    max_affix: int = 3

    def to_dict(self) -> dict:
        return {"window": self.window, "max_affix": self.max_affix}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(window=int(d["window"]), max_affix=int(d["max_affix"]))


def _mapped(tokens: Sequence[str], known: Container[str]) -> tuple[list[str], list[str]]:
    low = [t.lower() for t in tokens]
    return low, [t if t in known else UNK for t in low]


def intent_features(tokens: Sequence[str], known: Container[str]) -> list[str]:
    _, mapped = _mapped(tokens, known)
    feats = ["bias"]
    feats += [f"u={t}" for t in mapped]
    feats += [f"b={a}|{b}" for a, b in zip(mapped, mapped[1:])]
    return feats


def slot_features_all(
    tokens: Sequence[str], known: Container[str], cfg: FeatureConfig
) -> list[list[str]]:
    """Per-position slot feature lists for the whole sentence."""
    low, mapped = _mapped(tokens, known)
    n = len(tokens)
    out = []
    for i in range(n):
        feats = ["bias"]
        for off in range(-cfg.window, cfg.window + 1):
            j = i + off
            if j < 0:
                tok = BOS
            elif j >= n:
                tok = EOS
            else:
                tok = mapped[j]
            feats.append(f"w[{off}]={tok}")
        focus = low[i]
        for k in range(1, cfg.max_affix + 1):
            if k <= len(focus):
                feats.append(f"pre{k}={focus[:k]}")
                feats.append(f"suf{k}={focus[-k:]}")
        if mapped[i] == UNK:
            feats.append("oov")
        out.append(feats)
    return out


def reserved_intent_features() -> list[str]:
    """Features allocated in every intent vocabulary, seen or not."""
    return ["bias", f"u={UNK}"]


def reserved_slot_features(cfg: FeatureConfig) -> list[str]:
    """Features allocated in every slot vocabulary, seen or not."""
    feats = ["bias", "oov"]
    feats += [f"w[{off}]={UNK}" for off in range(-cfg.window, cfg.window + 1)]
    return feats
