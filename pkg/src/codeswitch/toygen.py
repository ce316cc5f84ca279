"""Deterministic synthetic parallel corpus over two pseudo-languages.

The pivot language is English-like templated text over a closed vocabulary;
the embedded language maps every pivot token to a distinct syllable word
(a bijection), giving a perfect word-for-word translation with identity
alignments. That removes translation and alignment noise, so attack and
augmentation effects measured on this corpus are attributable to the
algorithms themselves. Linguistic realism is a non-goal.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .candidates import (
    AlignmentEntry,
    AlignmentTable,
    BilingualLexicon,
    save_alignments,
    save_lexicon,
)
from .corpus import Dataset, ParallelCorpus, Utterance, save_dataset
from .errors import ConfigError
from .seeding import derive_rng

# slot values; multi-token artists put I- labels into the training data
CITIES = ("arlon", "belmar", "corvo", "duran", "eldit", "fornell", "gavira", "hestia", "ilmar", "joba")
DAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")
ARTISTS = (("mira", "volan"), ("kezo", "brant"), ("lira", "moss"), ("davo", "rin"), ("queno",), ("sarto",))
TIMES = ("dawn", "noon", "dusk", "midnight", "sunrise", "sunset")

SLOT_VALUES: Mapping[str, tuple[tuple[str, ...], ...]] = {
    "from_city": tuple((c,) for c in CITIES),
    "to_city": tuple((c,) for c in CITIES),
    "day": tuple((d,) for d in DAYS),
    "hotel_city": tuple((c,) for c in CITIES),
    "artist": ARTISTS,
    "alarm_time": tuple((t,) for t in TIMES),
}

TEMPLATES: Mapping[str, tuple[str, ...]] = {
    "find_flight": (
        "show me flights from {from_city} to {to_city}",
        "i need a flight from {from_city} to {to_city} on {day}",
        "what flights leave {from_city} for {to_city}",
        "find flights from {from_city} to {to_city} please",
    ),
    "book_hotel": (
        "book a hotel in {hotel_city}",
        "i want a hotel in {hotel_city} on {day}",
        "reserve a room in {hotel_city} please",
    ),
    "play_music": (
        "play songs by {artist}",
        "play some {artist} music",
        "put on music by {artist}",
    ),
    "set_alarm": (
        "set an alarm for {alarm_time}",
        "wake me at {alarm_time} on {day}",
        "set a {alarm_time} alarm please",
    ),
}

_SYLLABLES = ("ka", "zo", "mu", "re", "vi", "ta", "lu", "ne", "go", "pi", "sha", "dro")


@dataclass(frozen=True)
class ToySpec:
    n_train: int = 500
    n_test: int = 100
    pivot_lang: str = "aa"
    embedded_lang: str = "bb"
    seed: int = 0

    def __post_init__(self):
        if self.n_train < 1 or self.n_test < 0:
            raise ConfigError("n_train must be >= 1 and n_test >= 0")
        if self.pivot_lang == self.embedded_lang:
            raise ConfigError("pivot and embedded language must differ")


@dataclass(frozen=True)
class ToyData:
    train: ParallelCorpus
    test: ParallelCorpus
    lexicon: BilingualLexicon
    alignments: AlignmentTable  # covers both splits, keyed by utterance id

    @property
    def pivot_lang(self) -> str:
        return self.train.pivot.lang

    @property
    def embedded_lang(self) -> str:
        return self.lexicon.tgt_lang


def _pseudo_word(i: int) -> str:
    n = len(_SYLLABLES)
    word = _SYLLABLES[i % n]
    i //= n
    while True:
        word = _SYLLABLES[i % n] + word
        i //= n
        if i == 0:
            return word


def pivot_vocabulary() -> tuple[str, ...]:
    vocab: set[str] = set()
    for intent, templates in TEMPLATES.items():
        for tpl in templates:
            for w in tpl.split(" "):
                if w.startswith("{") and w.endswith("}"):
                    name = w[1:-1]
                    if name not in SLOT_VALUES:
                        raise ConfigError(f"template for {intent!r} uses unknown slot {name!r}")
                else:
                    vocab.add(w)
    for values in SLOT_VALUES.values():
        for toks in values:
            vocab.update(toks)
    return tuple(sorted(vocab))


def token_map() -> dict[str, str]:
    """The bijection from pivot tokens to embedded pseudo-words."""
    vocab = pivot_vocabulary()
    mapping = {w: _pseudo_word(i) for i, w in enumerate(vocab)}
    if len(set(mapping.values())) != len(mapping):
        raise ConfigError("pseudo-word mapping is not injective")
    return mapping


def _sample_utterance(uid: str, lang: str, rng) -> Utterance:
    intents = tuple(TEMPLATES)
    intent = intents[int(rng.integers(len(intents)))]
    templates = TEMPLATES[intent]
    tpl = templates[int(rng.integers(len(templates)))]
    used_cities: set[tuple[str, ...]] = set()
    tokens: list[str] = []
    slots: list[str] = []
    for w in tpl.split(" "):
        if w.startswith("{") and w.endswith("}"):
            name = w[1:-1]
            options = SLOT_VALUES[name]
            value = options[int(rng.integers(len(options)))]
            if name in ("from_city", "to_city"):
                while value in used_cities:  # departure and arrival differ
                    value = options[int(rng.integers(len(options)))]
                used_cities.add(value)
            tokens.extend(value)
            slots.append(f"B-{name}")
            slots.extend(f"I-{name}" for _ in value[1:])
        else:
            tokens.append(w)
            slots.append("O")
    return Utterance(uid, lang, tuple(tokens), tuple(slots), intent)


def generate_toy(spec: ToySpec = ToySpec()) -> ToyData:
    """Build the parallel corpus, the bijective lexicon, and identity alignments."""
    mapping = token_map()

    def translate(u: Utterance) -> Utterance:
        return Utterance(
            u.id,
            spec.embedded_lang,
            tuple(mapping[t] for t in u.tokens),
            u.slots,
            u.intent,
        )

    def build(split: str, n: int) -> ParallelCorpus:
        pivot_utts = []
        for i in range(n):
            rng = derive_rng(spec.seed, "toy", split, str(i))
            pivot_utts.append(_sample_utterance(f"{split}-{i:04d}", spec.pivot_lang, rng))
        pivot = Dataset(spec.pivot_lang, tuple(pivot_utts))
        other = Dataset(spec.embedded_lang, tuple(translate(u) for u in pivot_utts))
        return ParallelCorpus(pivot, {spec.embedded_lang: other})

    train = build("train", spec.n_train)
    test = build("test", spec.n_test)

    lexicon = BilingualLexicon(
        spec.pivot_lang,
        spec.embedded_lang,
        {src: ((tgt,),) for src, tgt in mapping.items()},
    )
    entries = {}
    for corpus in (train, test):
        other = corpus.others[spec.embedded_lang]
        for u, v in zip(corpus.pivot, other):
            entries[u.id] = AlignmentEntry(
                v.tokens, frozenset((i, i) for i in range(len(u.tokens)))
            )
    alignments = AlignmentTable(spec.pivot_lang, spec.embedded_lang, entries)
    return ToyData(train, test, lexicon, alignments)


def write_toy_files(toy: ToyData, out_dir: str | Path) -> dict[str, Path]:
    """Emit the standard dataset/lexicon/alignment files; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pl, el = toy.pivot_lang, toy.embedded_lang
    paths = {
        "pivot_train": out / f"{pl}_train.tsv",
        "pivot_test": out / f"{pl}_test.tsv",
        "embedded_train": out / f"{el}_train.tsv",
        "embedded_test": out / f"{el}_test.tsv",
        "lexicon": out / f"lexicon.{pl}-{el}.tsv",
        "alignments": out / f"alignments.{pl}-{el}.tsv",
    }
    save_dataset(toy.train.pivot, paths["pivot_train"])
    save_dataset(toy.test.pivot, paths["pivot_test"])
    save_dataset(toy.train.others[el], paths["embedded_train"])
    save_dataset(toy.test.others[el], paths["embedded_test"])
    save_lexicon(toy.lexicon, paths["lexicon"])
    save_alignments(toy.alignments, paths["alignments"])
    return paths
