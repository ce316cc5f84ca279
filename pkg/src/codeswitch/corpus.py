"""Data model and I/O for labeled utterances, datasets, and parallel corpora.

A dataset file is UTF-8 TSV with header ``id<TAB>utterance<TAB>slot_labels<TAB>intent``
and exactly one trailing newline; tokens and slot labels are space-separated
and must align one-to-one. A five-column variant with a ``lang`` column after
``id`` is used for mixed-language sets. Slot labels follow the BIO scheme:
``O``, ``B-<type>``, ``I-<type>``.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DataError

HEADER = "id\tutterance\tslot_labels\tintent"
HEADER_LANG = "id\tlang\tutterance\tslot_labels\tintent"

_LABEL_RE = re.compile(r"^(O|[BI]-.+)$")


def is_well_formed_label(label: str) -> bool:
    """True for ``O``, ``B-<type>`` or ``I-<type>`` with a non-empty type."""
    return bool(_LABEL_RE.match(label))


def validate_bio(slots: Sequence[str]) -> list[int]:
    """Indices whose I-label is not preceded by a matching B- or I-label."""
    bad = []
    prev = "O"
    for i, lab in enumerate(slots):
        if lab.startswith("I-"):
            tail = lab[2:]
            if prev != "B-" + tail and prev != "I-" + tail:
                bad.append(i)
        prev = lab
    return bad


def repair_bio(slots: Sequence[str]) -> tuple[str, ...]:
    """Rewrite orphan I-x labels to B-x, left to right."""
    out: list[str] = []
    prev = "O"
    for lab in slots:
        if lab.startswith("I-"):
            tail = lab[2:]
            if prev != "B-" + tail and prev != "I-" + tail:
                lab = "B-" + tail
        out.append(lab)
        prev = lab
    return tuple(out)


@dataclass(frozen=True)
class Utterance:
    """One labeled sample: whitespace tokens, aligned BIO slots, an intent.

    Tokens are treated as opaque; there is no re-tokenization anywhere in
    the toolkit. BIO continuation validity is checked by the loader (or by
    :func:`validate_bio`), not here, so repair policies can be applied.
    """

    id: str
    lang: str
    tokens: tuple[str, ...]
    slots: tuple[str, ...]
    intent: str

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "slots", tuple(self.slots))
        if len(self.tokens) < 1:
            raise DataError(f"utterance {self.id!r}: empty token list")
        if len(self.slots) != len(self.tokens):
            raise DataError(
                f"utterance {self.id!r}: length mismatch "
                f"({len(self.tokens)} tokens vs {len(self.slots)} slot labels)"
            )
        for tok in self.tokens:
            if not tok or " " in tok or "\t" in tok or "\n" in tok:
                raise DataError(f"utterance {self.id!r}: bad token {tok!r}")
        for lab in self.slots:
            if not is_well_formed_label(lab):
                raise DataError(f"utterance {self.id!r}: bad slot label {lab!r}")
        if not self.intent:
            raise DataError(f"utterance {self.id!r}: empty intent label")

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of utterances with unique ids."""

    lang: str
    utterances: tuple[Utterance, ...]

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        seen: set[str] = set()
        for u in self.utterances:
            if u.id in seen:
                raise DataError(f"duplicate utterance id {u.id!r} in dataset {self.lang!r}")
            seen.add(u.id)

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self.utterances)

    @property
    def intent_vocab(self) -> frozenset[str]:
        return frozenset(u.intent for u in self.utterances)

    @property
    def slot_vocab(self) -> frozenset[str]:
        return frozenset(lab for u in self.utterances for lab in u.slots)

    def by_id(self, uid: str) -> Utterance:
        for u in self.utterances:
            if u.id == uid:
                return u
        raise KeyError(uid)


@dataclass(frozen=True)
class PairingReport:
    """Outcome of matching two datasets by id (pivot order)."""

    pairs: tuple[tuple[Utterance, Utterance], ...]
    only_pivot: tuple[str, ...]
    only_other: tuple[str, ...]
    intent_mismatches: tuple[tuple[str, str, str], ...]  # (id, pivot intent, other intent)

    @property
    def n_omitted(self) -> int:
        return len(self.only_pivot) + len(self.only_other)


def pair_parallel(pivot: Dataset, other: Dataset) -> PairingReport:
    """Match utterances by id; ids on only one side are omitted and counted.

    Intent disagreements between paired utterances are retained as warnings,
    not errors. Duplicate ids are impossible by Dataset construction.
    """
    other_by_id = {u.id: u for u in other}
    pivot_ids = {u.id for u in pivot}
    pairs: list[tuple[Utterance, Utterance]] = []
    mismatches: list[tuple[str, str, str]] = []
    for u in pivot:
        v = other_by_id.get(u.id)
        if v is None:
            continue
        pairs.append((u, v))
        if u.intent != v.intent:
            mismatches.append((u.id, u.intent, v.intent))
    only_pivot = tuple(u.id for u in pivot if u.id not in other_by_id)
    only_other = tuple(u.id for u in other if u.id not in pivot_ids)
    return PairingReport(tuple(pairs), only_pivot, only_other, tuple(mismatches))


@dataclass(frozen=True)
class ParallelCorpus:
    """A pivot dataset plus its translations, matched by id.

    Construction verifies that every paired utterance keeps the pivot's
    intent label; translation is not supposed to change the user goal.
    """

    pivot: Dataset
    others: Mapping[str, Dataset]

    def __post_init__(self):
        object.__setattr__(self, "others", dict(self.others))
        for lang, ds in self.others.items():
            report = pair_parallel(self.pivot, ds)
            if report.intent_mismatches:
                uid, a, b = report.intent_mismatches[0]
                raise DataError(
                    f"intent mismatch for id {uid!r}: "
                    f"{self.pivot.lang}={a!r} vs {lang}={b!r}"
                )

    @property
    def langs(self) -> tuple[str, ...]:
        return (self.pivot.lang, *self.others.keys())


def _parse_row(cols: list[str], lang: str, with_lang: bool) -> Utterance:
    if with_lang:
        uid, row_lang, text, labels, intent = cols
    else:
        uid, text, labels, intent = cols
        row_lang = lang
    tokens = text.split(" ")
    slots = labels.split(" ")
    if len(tokens) != len(slots):
        raise DataError(
            f"length mismatch ({len(tokens)} tokens vs {len(slots)} slot labels)"
        )
    return Utterance(uid, row_lang, tuple(tokens), tuple(slots), intent)


def load_dataset(path: str | Path, lang: str, bio_policy: str = "repair") -> Dataset:
    """Load a dataset TSV (4- or 5-column, detected from the header).

    ``bio_policy`` is ``"repair"`` (orphan I-x rewritten to B-x) or
    ``"strict"`` (BIO violations raise). Errors name the offending line.
    """
    if bio_policy not in ("repair", "strict"):
        raise ValueError(f"unknown bio_policy {bio_policy!r}")
    path = Path(path)
    utterances: list[Utterance] = []
    with open(path, encoding="utf-8", newline="") as f:
        header = f.readline().rstrip("\n")
        if header == HEADER:
            with_lang = False
        elif header == HEADER_LANG:
            with_lang = True
        else:
            raise DataError(f"{path}: line 1: unrecognized header {header!r}")
        n_cols = 5 if with_lang else 4
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                raise DataError(f"{path}: line {lineno}: blank line")
            cols = line.split("\t")
            if len(cols) != n_cols:
                raise DataError(
                    f"{path}: line {lineno}: expected {n_cols} tab-separated "
                    f"columns, got {len(cols)}"
                )
            try:
                u = _parse_row(cols, lang, with_lang)
            except DataError as e:
                raise DataError(f"{path}: line {lineno}: {e}") from None
            violations = validate_bio(u.slots)
            if violations:
                if bio_policy == "strict":
                    raise DataError(
                        f"{path}: line {lineno}: BIO violation at positions {violations}"
                    )
                u = Utterance(u.id, u.lang, u.tokens, repair_bio(u.slots), u.intent)
            utterances.append(u)
    return Dataset(lang, tuple(utterances))


def serialize_dataset(ds: Dataset | Iterable[Utterance], with_lang: bool = False) -> str:
    """Render a dataset as TSV text, fields verbatim, one trailing newline."""
    lines = [HEADER_LANG if with_lang else HEADER]
    for u in ds:
        fields = [u.id, " ".join(u.tokens), " ".join(u.slots), u.intent]
        if with_lang:
            fields.insert(1, u.lang)
        lines.append("\t".join(fields))
    return "\n".join(lines) + "\n"


def save_dataset(ds: Dataset, path: str | Path, with_lang: bool = False) -> None:
    Path(path).write_text(serialize_dataset(ds, with_lang=with_lang), encoding="utf-8")
