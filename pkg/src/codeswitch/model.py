"""The attackable victim: a joint linear intent/slot model plus the Scorer
contract that attack and evaluation code is written against.

The model is a log-linear intent classifier over sentence features and an
independent per-position log-linear slot tagger (no transition structure;
BIO validity is a data-level concern). The joint loss of a labeled
utterance is intent cross-entropy plus the mean per-token slot
cross-entropy. Training is mini-batch gradient descent with L2 weight
decay; the hot loops live in :mod:`codeswitch.kernels`.

Trained models are immutable; ``loss``/``predict`` are thread-safe. Model
files are JSON weight dumps with embedded vocabularies and feature config,
readable by external scorer implementations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from . import kernels
from .corpus import Dataset, Utterance
from .errors import DataError
from .features import (
    FeatureConfig,
    intent_features,
    reserved_intent_features,
    reserved_slot_features,
    slot_features_all,
)
from .seeding import derive_rng

MODEL_FORMAT = "codeswitch-joint-linear"
MODEL_VERSION = 1


class Scorer(Protocol):
    """What the attack engine and evaluator need from a victim model."""

    def loss(self, u: Utterance) -> float: ...

    def loss_batch(self, us: Sequence[Utterance]) -> list[float]: ...

    def predict(self, tokens: Sequence[str]) -> tuple[str, list[str]]: ...

    def predict_batch(self, batch: Sequence[Sequence[str]]) -> list[tuple[str, list[str]]]: ...


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    lr: float = 0.5
    l2: float = 1e-4
    batch_size: int = 32
    seed: int = 0
    features: FeatureConfig = field(default_factory=FeatureConfig)


class JointLinearModel:
    """Joint intent/slot log-linear model over sparse string features."""

    def __init__(
        self,
        feature_config: FeatureConfig,
        known_tokens: frozenset[str],
        intent_labels: tuple[str, ...],
        slot_labels: tuple[str, ...],
        intent_feature_list: tuple[str, ...],
        slot_feature_list: tuple[str, ...],
        intent_weights: np.ndarray,
        slot_weights: np.ndarray,
    ):
        self.feature_config = feature_config
        self.known_tokens = frozenset(known_tokens)
        self.intent_labels = tuple(intent_labels)
        self.slot_labels = tuple(slot_labels)
        self.intent_feature_list = tuple(intent_feature_list)
        self.slot_feature_list = tuple(slot_feature_list)
        self._intent_feat_idx = {f: i for i, f in enumerate(self.intent_feature_list)}
        self._slot_feat_idx = {f: i for i, f in enumerate(self.slot_feature_list)}
        self._intent_lab_idx = {l: i for i, l in enumerate(self.intent_labels)}
        self._slot_lab_idx = {l: i for i, l in enumerate(self.slot_labels)}
        self.intent_weights = np.ascontiguousarray(intent_weights, dtype=np.float64)
        self.slot_weights = np.ascontiguousarray(slot_weights, dtype=np.float64)
        self.intent_weights.flags.writeable = False
        self.slot_weights.flags.writeable = False
        if self.intent_weights.shape != (len(self.intent_feature_list), len(self.intent_labels)):
            raise DataError("intent weight matrix shape does not match vocabularies")
        if self.slot_weights.shape != (len(self.slot_feature_list), len(self.slot_labels)):
            raise DataError("slot weight matrix shape does not match vocabularies")

    # ------------------------------------------------------------- encoding

    def _encode_intent(self, tokens: Sequence[str]) -> list[int]:
        idx = self._intent_feat_idx
        return [idx[f] for f in intent_features(tokens, self.known_tokens) if f in idx]

    def _encode_slots(self, tokens: Sequence[str]) -> list[list[int]]:
        idx = self._slot_feat_idx
        per_pos = slot_features_all(tokens, self.known_tokens, self.feature_config)
        return [[idx[f] for f in feats if f in idx] for feats in per_pos]

    def _intent_label_id(self, intent: str) -> int:
        try:
            return self._intent_lab_idx[intent]
        except KeyError:
            raise DataError(f"intent label {intent!r} unknown to this model") from None

    def _slot_label_id(self, label: str) -> int:
        try:
            return self._slot_lab_idx[label]
        except KeyError:
            raise DataError(f"slot label {label!r} unknown to this model") from None

    # -------------------------------------------------------------- scoring

    def loss_batch(self, us: Sequence[Utterance]) -> list[float]:
        """Joint loss per utterance: intent NLL + mean per-token slot NLL."""
        if not us:
            return []
        i_flat: list[int] = []
        i_off = [0]
        i_lab = []
        s_flat: list[int] = []
        s_off = [0]
        s_lab = []
        n_tokens = []
        for u in us:
            i_flat.extend(self._encode_intent(u.tokens))
            i_off.append(len(i_flat))
            i_lab.append(self._intent_label_id(u.intent))
            for feats, lab in zip(self._encode_slots(u.tokens), u.slots):
                s_flat.extend(feats)
                s_off.append(len(s_flat))
                s_lab.append(self._slot_label_id(lab))
            n_tokens.append(len(u.tokens))
        nll_i = kernels.nll(
            kernels.group_scores(
                self.intent_weights,
                np.asarray(i_flat, dtype=np.int64),
                np.asarray(i_off, dtype=np.int64),
            ),
            np.asarray(i_lab, dtype=np.int64),
        )
        nll_s = kernels.nll(
            kernels.group_scores(
                self.slot_weights,
                np.asarray(s_flat, dtype=np.int64),
                np.asarray(s_off, dtype=np.int64),
            ),
            np.asarray(s_lab, dtype=np.int64),
        )
        out = []
        pos = 0
        for i, n in enumerate(n_tokens):
            out.append(float(nll_i[i] + nll_s[pos : pos + n].sum() / n))
            pos += n
        return out

    def loss(self, u: Utterance) -> float:
        return self.loss_batch([u])[0]

    def predict_batch(self, batch: Sequence[Sequence[str]]) -> list[tuple[str, list[str]]]:
        out = []
        for tokens in batch:
            if len(tokens) < 1:
                raise DataError("cannot predict on an empty token list")
            i_idx = np.asarray(self._encode_intent(tokens), dtype=np.int64)
            i_scores = kernels.group_scores(
                self.intent_weights, i_idx, np.asarray([0, len(i_idx)], dtype=np.int64)
            )
            intent = self.intent_labels[int(np.argmax(i_scores[0]))]
            s_groups = self._encode_slots(tokens)
            s_flat: list[int] = []
            s_off = [0]
            for feats in s_groups:
                s_flat.extend(feats)
                s_off.append(len(s_flat))
            s_scores = kernels.group_scores(
                self.slot_weights,
                np.asarray(s_flat, dtype=np.int64),
                np.asarray(s_off, dtype=np.int64),
            )
            slots = [self.slot_labels[int(k)] for k in np.argmax(s_scores, axis=1)]
            out.append((intent, slots))
        return out

    def predict(self, tokens: Sequence[str]) -> tuple[str, list[str]]:
        return self.predict_batch([tokens])[0]

    # -------------------------------------------------------- serialization

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "feature_config": self.feature_config.to_dict(),
            "known_tokens": sorted(self.known_tokens),
            "intent_labels": list(self.intent_labels),
            "slot_labels": list(self.slot_labels),
            "intent_features": list(self.intent_feature_list),
            "slot_features": list(self.slot_feature_list),
            "intent_weights": self.intent_weights.tolist(),
            "slot_weights": self.slot_weights.tolist(),
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, separators=(",", ":"))
            f.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "JointLinearModel":
        if d.get("format") != MODEL_FORMAT:
            raise DataError(f"not a {MODEL_FORMAT} model file")
        if d.get("version") != MODEL_VERSION:
            raise DataError(f"unsupported model version {d.get('version')!r}")
        return cls(
            FeatureConfig.from_dict(d["feature_config"]),
            frozenset(d["known_tokens"]),
            tuple(d["intent_labels"]),
            tuple(d["slot_labels"]),
            tuple(d["intent_features"]),
            tuple(d["slot_features"]),
            np.asarray(d["intent_weights"], dtype=np.float64),
            np.asarray(d["slot_weights"], dtype=np.float64),
        )

    @classmethod
    def load(cls, path: str | Path) -> "JointLinearModel":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def _collect_utterances(data: Dataset | Sequence[Dataset]) -> list[Utterance]:
    if isinstance(data, Dataset):
        return list(data.utterances)
    merged: list[Utterance] = []
    for ds in data:
        merged.extend(ds.utterances)
    return merged


def train(cfg: TrainConfig, data: Dataset | Sequence[Dataset], log=None) -> JointLinearModel:
    """Train a joint linear model; deterministic for a fixed seed and data order.

    ``data`` is one Dataset or several to concatenate. ``log``, when given,
    receives one line per epoch with the mean training loss.
    """
    utts = _collect_utterances(data)
    if not utts:
        raise DataError("empty training data")

    known = frozenset(t.lower() for u in utts for t in u.tokens)
    intent_labels = tuple(sorted({u.intent for u in utts}))
    slot_set = {lab for u in utts for lab in u.slots}
    # close the label set over span continuations so that extended labels
    # produced by multi-token substitutions always stay scorable
    slot_set |= {"I" + lab[1:] for lab in slot_set if lab.startswith("B")}
    slot_labels = tuple(sorted(slot_set))

    feat_cfg = cfg.features
    intent_vocab: dict[str, int] = {}
    for f in reserved_intent_features():
        intent_vocab.setdefault(f, len(intent_vocab))
    slot_vocab: dict[str, int] = {}
    for f in reserved_slot_features(feat_cfg):
        slot_vocab.setdefault(f, len(slot_vocab))

    intent_lab_idx = {l: i for i, l in enumerate(intent_labels)}
    slot_lab_idx = {l: i for i, l in enumerate(slot_labels)}

    i_flat: list[int] = []
    i_off = [0]
    i_lab = []
    s_flat: list[int] = []
    s_off = [0]
    pos_off = [0]
    s_lab = []
    for u in utts:
        for f in intent_features(u.tokens, known):
            if f not in intent_vocab:
                intent_vocab[f] = len(intent_vocab)
            i_flat.append(intent_vocab[f])
        i_off.append(len(i_flat))
        i_lab.append(intent_lab_idx[u.intent])
        for feats, lab in zip(slot_features_all(u.tokens, known, feat_cfg), u.slots):
            for f in feats:
                if f not in slot_vocab:
                    slot_vocab[f] = len(slot_vocab)
                s_flat.append(slot_vocab[f])
            s_off.append(len(s_flat))
            s_lab.append(slot_lab_idx[lab])
        pos_off.append(len(s_off) - 1)

    Wi = np.zeros((len(intent_vocab), len(intent_labels)), dtype=np.float64)
    Ws = np.zeros((len(slot_vocab), len(slot_labels)), dtype=np.float64)
    arrays = (
        np.asarray(i_flat, dtype=np.int64),
        np.asarray(i_off, dtype=np.int64),
        np.asarray(i_lab, dtype=np.int64),
        np.asarray(s_flat, dtype=np.int64),
        np.asarray(s_off, dtype=np.int64),
        np.asarray(pos_off, dtype=np.int64),
        np.asarray(s_lab, dtype=np.int64),
    )

    rng = derive_rng(cfg.seed, "train")
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(utts)).astype(np.int64)
        kernels.train_sweep(Wi, Ws, *arrays, order, cfg.batch_size, cfg.lr, cfg.l2)
        if log is not None:
            loss = _mean_loss(Wi, Ws, *arrays)
            log(f"epoch {epoch + 1}/{cfg.epochs}: mean train loss {loss:.6f}")

    return JointLinearModel(
        feat_cfg,
        known,
        intent_labels,
        slot_labels,
        tuple(intent_vocab),
        tuple(slot_vocab),
        Wi,
        Ws,
    )


def _mean_loss(Wi, Ws, i_flat, i_off, i_lab, s_flat, s_off, pos_off, s_lab) -> float:
    nll_i = kernels.nll(kernels.group_scores(Wi, i_flat, i_off), i_lab)
    nll_s = kernels.nll(kernels.group_scores(Ws, s_flat, s_off), s_lab)
    total = 0.0
    for e in range(len(i_lab)):
        lo, hi = pos_off[e], pos_off[e + 1]
        total += nll_i[e] + nll_s[lo:hi].sum() / (hi - lo)
    return total / len(i_lab)
