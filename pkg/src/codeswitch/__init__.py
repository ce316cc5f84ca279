"""Code-switching adversarial attacks, augmentation, and evaluation for
joint intent recognition and slot filling."""

from .attack import (
    AttackConfig,
    AttackResult,
    AttackRun,
    attack,
    attack_dataset,
)
from .augment import AugmentConfig, generate_adversarial_set, split
from .candidates import (
    AlignmentTable,
    BilingualLexicon,
    Candidate,
    PhraseSource,
    WordSource,
    extend_slot_labels,
    load_alignments,
    load_lexicon,
    phrase_candidates,
    word_candidates,
)
from .corpus import (
    Dataset,
    ParallelCorpus,
    Utterance,
    load_dataset,
    pair_parallel,
    save_dataset,
    validate_bio,
)
from .errors import (
    CodeswitchError,
    ConfigError,
    DataError,
    ScorerContractError,
    TransportError,
)
from .metrics import EvalReport, evaluate, render_report
from .model import JointLinearModel, Scorer, TrainConfig, train
from .protocol import ExternalScorerClient, ScorerServer
from .toygen import ToySpec, generate_toy

__version__ = "0.1.0"

__all__ = [
    "AlignmentTable",
    "AttackConfig",
    "AttackResult",
    "AttackRun",
    "AugmentConfig",
    "BilingualLexicon",
    "Candidate",
    "CodeswitchError",
    "ConfigError",
    "DataError",
    "Dataset",
    "EvalReport",
    "ExternalScorerClient",
    "JointLinearModel",
    "ParallelCorpus",
    "PhraseSource",
    "Scorer",
    "ScorerContractError",
    "ScorerServer",
    "ToySpec",
    "TrainConfig",
    "TransportError",
    "Utterance",
    "WordSource",
    "attack",
    "attack_dataset",
    "evaluate",
    "extend_slot_labels",
    "generate_adversarial_set",
    "generate_toy",
    "load_alignments",
    "load_dataset",
    "load_lexicon",
    "pair_parallel",
    "phrase_candidates",
    "render_report",
    "save_dataset",
    "split",
    "train",
    "validate_bio",
    "word_candidates",
]
