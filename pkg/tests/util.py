"""Shared test helpers: fake scorers, candidate fixtures, and independent
oracle implementations that the engine code must agree with."""

from __future__ import annotations

import hashlib
import re

from codeswitch.candidates import Candidate, extend_slot_labels
from codeswitch.corpus import Utterance


def utt(tokens, slots=None, intent="greet", uid="u1", lang="aa") -> Utterance:
    if isinstance(tokens, str):
        tokens = tokens.split()
    if slots is None:
        slots = ["O"] * len(tokens)
    elif isinstance(slots, str):
        slots = slots.split()
    return Utterance(uid, lang, tuple(tokens), tuple(slots), intent)


def extend_slot_labels_oracle(slot_label: str, num_tokens: int) -> list[str]:
    # transcribed branch-for-branch from the label-extension rule
    slot_labels = [slot_label]
    if num_tokens > 1:
        if slot_label.startswith("B"):
            slot_labels += ["I" + slot_label[1:]] * (num_tokens - 1)
        else:
            slot_labels *= num_tokens
    return slot_labels


def bio_accepts(labels) -> bool:
    """Regular-expression acceptance oracle for BIO sequences."""
    types = sorted({lab[2:] for lab in labels if lab != "O"})
    alts = ["O"] + [f"B-{re.escape(t)}(?: I-{re.escape(t)})*" for t in types]
    pattern = re.compile(r"^(?: (?:" + "|".join(alts) + r"))*$")
    return bool(pattern.match("".join(" " + lab for lab in labels)))


class HashScorer:
    """Deterministic arbitrary loss surface over labeled utterances.

    The loss is a stable hash of (tokens, slots, intent) mapped into [0, 1),
    so attack tests get a rich, reproducible landscape with no training.
    """

    def loss(self, u: Utterance) -> float:
        payload = "\x1f".join(u.tokens) + "\x01" + "\x1f".join(u.slots) + "\x02" + u.intent
        digest = hashlib.sha256(payload.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") / 2.0**64

    def loss_batch(self, us):
        return [self.loss(u) for u in us]

    def predict(self, tokens):
        return "greet", ["O"] * len(tokens)

    def predict_batch(self, batch):
        return [self.predict(t) for t in batch]


class TableScorer(HashScorer):
    """Loss looked up by token sequence, with a hash fallback."""

    def __init__(self, table: dict, default: float | None = None):
        self.table = {tuple(k.split() if isinstance(k, str) else k): v for k, v in table.items()}
        self.default = default

    def loss(self, u: Utterance) -> float:
        if u.tokens in self.table:
            return float(self.table[u.tokens])
        if self.default is not None:
            return float(self.default)
        return super().loss(u)


class StubPredictScorer:
    """Returns a preset prediction list, in order, for evaluate() tests."""

    def __init__(self, preds):
        self.preds = list(preds)

    def predict_batch(self, batch):
        assert len(batch) == len(self.preds)
        return list(self.preds)

    def predict(self, tokens):
        raise NotImplementedError

    def loss(self, u):
        raise NotImplementedError

    def loss_batch(self, us):
        raise NotImplementedError


class ListSource:
    """Candidate source with hand-placed candidates per position."""

    def __init__(self, mapping, src_lang="aa", tgt_lang="bb", provenance="lexicon"):
        # mapping: position -> list of token tuples
        self.mapping = {int(k): [tuple(t) for t in v] for k, v in mapping.items()}
        self.src_lang = src_lang
        self.tgt_lang = tgt_lang
        self.provenance = provenance

    def candidates(self, u: Utterance, position: int) -> list[Candidate]:
        out = []
        for toks in self.mapping.get(position, []):
            labels = tuple(extend_slot_labels(u.slots[position], len(toks)))
            out.append(Candidate(position, toks, labels, self.provenance))
        return out


def replay_attack_oracle(u, scorer, source, visit_order, accept_on_tie=True):
    """Literal step-by-step replay of the greedy attack loop.

    Independent of the engine: keeps its own segment state, rescores every
    candidate in full context, applies the max-loss >= current rule. Returns
    (tokens, labels, trace, decisions) where decisions[k] is the accepted
    candidate index at the k-th visited position, or None for a rejection
    or a candidate-less position.
    """
    seg_tokens = [[t] for t in u.tokens]
    seg_labels = [[s] for s in u.slots]

    def compose(i=None, toks=None, labs=None):
        tokens, labels = [], []
        for k in range(len(seg_tokens)):
            if i is not None and k == i:
                tokens.extend(toks)
                labels.extend(labs)
            else:
                tokens.extend(seg_tokens[k])
                labels.extend(seg_labels[k])
        return Utterance(u.id, u.lang, tuple(tokens), tuple(labels), u.intent)

    current = scorer.loss(compose())
    trace = [current]
    decisions = []
    for i in visit_order:
        cands = source.candidates(u, i)
        if not cands:
            decisions.append(None)
            continue
        losses = [scorer.loss(compose(i, c.tokens, c.labels)) for c in cands]
        best = max(losses)
        ok = best >= current if accept_on_tie else best > current
        if ok:
            k = losses.index(best)
            seg_tokens[i] = list(cands[k].tokens)
            seg_labels[i] = list(cands[k].labels)
            current = best
            trace.append(best)
            decisions.append(k)
        else:
            decisions.append(None)
    final = compose()
    return final.tokens, final.slots, tuple(trace), decisions


def micro_f1_oracle(golds, preds) -> float:
    """Per-class TP/FP/FN counting over (position, label) pairs, then micro."""
    classes = set()
    for seq in list(golds) + list(preds):
        classes.update(lab for lab in seq if lab != "O")
    tp = fp = fn = 0
    for c in classes:
        for g_seq, p_seq in zip(golds, preds):
            for g, p in zip(g_seq, p_seq):
                if g == c and p == c:
                    tp += 1
                elif p == c and g != c:
                    fp += 1
                elif g == c and p != c:
                    fn += 1
    if 2 * tp + fp + fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)
