"""Substitution-candidate generation for code-switching.

Word-level candidates come from a bilingual lexicon (source token to target
phrases); phrase-level candidates come from a word-alignment table over a
parallel corpus. Multi-token replacements stretch the original BIO label
with :func:`extend_slot_labels`, which keeps the spliced sequence BIO-valid.

File formats:
  * lexicon TSV: one ``src_token<TAB>tgt_phrase`` row per translation,
    phrase tokens space-separated, no header; duplicate rows collapse,
    keeping first-seen order.
  * alignment file: one ``id<TAB>tgt_tokens<TAB>links`` line per utterance,
    target tokens space-separated, links as Pharaoh ``i-j`` pairs.

Lexicon keys are lowercased at load and lookup; emitted tokens keep the
lexicon's casing. Everything here is immutable after load and pure, hence
thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Utterance
from .errors import ConfigError, DataError

DEFAULT_K_MAX = 8


def extend_slot_labels(label: str, num_tokens: int) -> list[str]:
    """Stretch one slot label over a replacement of ``num_tokens`` tokens.

    ``B-x`` continues as ``I-x``; ``O`` and ``I-x`` replicate unchanged.
    """
    if num_tokens < 1:
        raise ValueError("num_tokens must be >= 1")
    labels = [label]
    if num_tokens > 1:
        if label.startswith("B"):
            labels += ["I" + label[1:]] * (num_tokens - 1)
        else:
            labels *= num_tokens
    return labels


@dataclass(frozen=True)
class Candidate:
    """A replacement for one original token position."""

    position: int
    tokens: tuple[str, ...]
    labels: tuple[str, ...]
    provenance: str  # "lexicon" | "alignment"


@dataclass(frozen=True)
class BilingualLexicon:
    src_lang: str
    tgt_lang: str
    entries: Mapping[str, tuple[tuple[str, ...], ...]]

    def phrases(self, token: str) -> tuple[tuple[str, ...], ...]:
        return self.entries.get(token.lower(), ())

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class AlignmentEntry:
    tgt_tokens: tuple[str, ...]
    links: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class AlignmentTable:
    src_lang: str
    tgt_lang: str
    entries: Mapping[str, AlignmentEntry]

    def __len__(self) -> int:
        return len(self.entries)


def word_candidates(
    u: Utterance,
    position: int,
    lex: BilingualLexicon,
    k_max: int = DEFAULT_K_MAX,
) -> list[Candidate]:
    """Up to ``k_max`` lexicon translations of the token at ``position``.

    Candidates appear in lexicon order; a token absent from the lexicon
    yields an empty list (absence is not an error).
    """
    if lex.src_lang != u.lang:
        raise ConfigError(
            f"lexicon covers {lex.src_lang}->{lex.tgt_lang} but utterance "
            f"{u.id!r} is {u.lang!r}"
        )
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    label = u.slots[position]
    out = []
    for toks in lex.phrases(u.tokens[position])[:k_max]:
        out.append(
            Candidate(position, toks, tuple(extend_slot_labels(label, len(toks))), "lexicon")
        )
    return out


def phrase_candidates(u: Utterance, position: int, table: AlignmentTable) -> list[Candidate]:
    """The target tokens aligned to ``position``, in ascending target order.

    At most one candidate. No links for the position yields an empty list;
    a missing utterance id raises, since that signals misconfigured data
    rather than a legitimately unaligned token.
    """
    if table.src_lang != u.lang:
        raise ConfigError(
            f"alignment table covers {table.src_lang}->{table.tgt_lang} but "
            f"utterance {u.id!r} is {u.lang!r}"
        )
    entry = table.entries.get(u.id)
    if entry is None:
        raise DataError(f"no alignment entry for utterance id {u.id!r}")
    for i, _ in entry.links:
        if i >= len(u.tokens):
            raise DataError(
                f"alignment for {u.id!r} links source position {i} but the "
                f"utterance has {len(u.tokens)} tokens"
            )
    js = sorted(j for i, j in entry.links if i == position)
    if not js:
        return []
    toks = tuple(entry.tgt_tokens[j] for j in js)
    label = u.slots[position]
    return [Candidate(position, toks, tuple(extend_slot_labels(label, len(toks))), "alignment")]


class WordSource:
    """Candidate source backed by a bilingual lexicon (word-level attack)."""

    def __init__(self, lexicon: BilingualLexicon, k_max: int = DEFAULT_K_MAX):
        self.lexicon = lexicon
        self.k_max = k_max

    @property
    def src_lang(self) -> str:
        return self.lexicon.src_lang

    @property
    def tgt_lang(self) -> str:
        return self.lexicon.tgt_lang

    def candidates(self, u: Utterance, position: int) -> list[Candidate]:
        return word_candidates(u, position, self.lexicon, self.k_max)


class PhraseSource:
    """Candidate source backed by an alignment table (phrase-level attack)."""

    def __init__(self, table: AlignmentTable):
        self.table = table

    @property
    def src_lang(self) -> str:
        return self.table.src_lang

    @property
    def tgt_lang(self) -> str:
        return self.table.tgt_lang

    def candidates(self, u: Utterance, position: int) -> list[Candidate]:
        return phrase_candidates(u, position, self.table)


def load_lexicon(path: str | Path, src_lang: str, tgt_lang: str) -> BilingualLexicon:
    path = Path(path)
    entries: dict[str, list[tuple[str, ...]]] = {}
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise DataError(
                    f"{path}: line {lineno}: expected 2 tab-separated columns, got {len(cols)}"
                )
            src, phrase = cols
            toks = tuple(phrase.split(" "))
            if not src or any(not t for t in toks):
                raise DataError(f"{path}: line {lineno}: empty token")
            bucket = entries.setdefault(src.lower(), [])
            if toks not in bucket:
                bucket.append(toks)
    return BilingualLexicon(src_lang, tgt_lang, {k: tuple(v) for k, v in entries.items()})


def save_lexicon(lex: BilingualLexicon, path: str | Path) -> None:
    lines = []
    for src in lex.entries:
        for phrase in lex.entries[src]:
            lines.append(f"{src}\t{' '.join(phrase)}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_alignments(path: str | Path, src_lang: str, tgt_lang: str) -> AlignmentTable:
    path = Path(path)
    entries: dict[str, AlignmentEntry] = {}
    with open(path, encoding="utf-8", newline="") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise DataError(
                    f"{path}: line {lineno}: expected 3 tab-separated columns, got {len(cols)}"
                )
            uid, tgt_text, links_text = cols
            if uid in entries:
                raise DataError(f"{path}: line {lineno}: duplicate utterance id {uid!r}")
            tgt = tuple(tgt_text.split(" "))
            if any(not t for t in tgt):
                raise DataError(f"{path}: line {lineno}: empty target token")
            links: set[tuple[int, int]] = set()
            for pair in links_text.split():
                src_s, _, tgt_s = pair.partition("-")
                try:
                    i, j = int(src_s), int(tgt_s)
                except ValueError:
                    raise DataError(
                        f"{path}: line {lineno}: bad Pharaoh pair {pair!r}"
                    ) from None
                if i < 0 or j < 0 or j >= len(tgt):
                    raise DataError(
                        f"{path}: line {lineno}: link {pair!r} out of range"
                    )
                links.add((i, j))
            entries[uid] = AlignmentEntry(tgt, frozenset(links))
    return AlignmentTable(src_lang, tgt_lang, entries)


def save_alignments(table: AlignmentTable, path: str | Path) -> None:
    lines = []
    for uid, entry in table.entries.items():
        links = " ".join(f"{i}-{j}" for i, j in sorted(entry.links))
        lines.append(f"{uid}\t{' '.join(entry.tgt_tokens)}\t{links}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
