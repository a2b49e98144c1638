"""Morphology-aware BPE training, evaluation, and serving."""

from .core import (
    MORPH_BPE,
    UNK_ID,
    UNK_TOKEN,
    VANILLA_BPE,
    MergeEvent,
    ModelError,
    ModelFormatError,
    SegmentedWord,
    TokenizerModel,
    WordFrequencyTable,
    load_model,
    save_model,
)
from .encoder import (
    EncodedWord,
    decode,
    encode_segmented,
    encode_text,
    encode_word,
    normalized_text,
)
from .ingest import (
    IngestError,
    SegmentationDataset,
    SplitSpec,
    count_words,
    load_segmentation,
    split_dataset,
    word_table_from_text,
)
from .metrics import (
    ConsistencyConfig,
    ConsistencyReport,
    EditDistanceReport,
    FertilityReport,
    MetricError,
    corpus_mu_e,
    fertility,
    morph_consistency,
    morph_edit_distance,
)
from .stats import PairedTResult, paired_t_test, regularized_incomplete_beta
from .sweep import SweepResult, sweep
from .trainer import (
    BpeTrainer,
    SegmentedCorpusView,
    TrainConfig,
    TrainError,
    TrainWarning,
    apply_merge,
    pair_frequencies,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "MORPH_BPE",
    "UNK_ID",
    "UNK_TOKEN",
    "VANILLA_BPE",
    "BpeTrainer",
    "ConsistencyConfig",
    "ConsistencyReport",
    "EditDistanceReport",
    "EncodedWord",
    "FertilityReport",
    "IngestError",
    "MergeEvent",
    "MetricError",
    "ModelError",
    "ModelFormatError",
    "PairedTResult",
    "SegmentationDataset",
    "SegmentedCorpusView",
    "SegmentedWord",
    "SplitSpec",
    "SweepResult",
    "TokenizerModel",
    "TrainConfig",
    "TrainError",
    "TrainWarning",
    "WordFrequencyTable",
    "apply_merge",
    "corpus_mu_e",
    "count_words",
    "decode",
    "encode_segmented",
    "encode_text",
    "encode_word",
    "fertility",
    "load_model",
    "load_segmentation",
    "morph_consistency",
    "morph_edit_distance",
    "normalized_text",
    "pair_frequencies",
    "paired_t_test",
    "regularized_incomplete_beta",
    "save_model",
    "split_dataset",
    "sweep",
    "train",
    "word_table_from_text",
]
