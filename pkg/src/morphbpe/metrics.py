"""Intrinsic tokenizer evaluation: fertility, morphological edit distance,
and morphological consistency F1.

All three work on token strings, not ids, so two models are comparable even
when their id spaces differ.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .clustering import hash_feature_sets, kmeans_labels
from .core import SegmentedWord, TokenizerModel, WordFrequencyTable
from .encoder import (
    encode_segmented_symbols,
    encode_word,
    encode_word_symbols,
    token_strings,
)
from .ingest import SegmentationDataset, count_words


class MetricError(ValueError):
    """Raised when a metric is undefined for the given inputs."""


# ---------------------------------------------------------------------------
# Fertility


@dataclass(frozen=True)
class FertilityReport:
    """Average tokens per word against a whitespace word baseline."""

    phi: float
    token_count: int
    word_count: int
    baseline: str = "whitespace"

    def to_json_dict(self) -> dict:
        return {
            "phi": self.phi,
            "token_count": self.token_count,
            "word_count": self.word_count,
            "baseline": self.baseline,
        }


def fertility(
    model: TokenizerModel,
    source: WordFrequencyTable | str | Path | IO[bytes],
) -> FertilityReport:
    """Corpus-level tokens-per-word ratio.

    Counting distinct word types once and weighting by frequency gives the
    same ratio as streaming every token, so the result is independent of how
    the corpus was chunked into lines.
    """
    table = source if isinstance(source, WordFrequencyTable) else count_words(source)
    if table.total_words == 0:
        raise MetricError("cannot compute fertility of an empty corpus")
    tokens = 0
    for word, count in table.entries.items():
        tokens += count * len(encode_word(model, word))
    return FertilityReport(
        phi=tokens / table.total_words,
        token_count=tokens,
        word_count=table.total_words,
    )


# ---------------------------------------------------------------------------
# Morphological edit distance


def morph_edit_distance(tokens: Sequence[str], morphemes: Sequence[str]) -> int:
    """Levenshtein distance between two string sequences, unit costs.

    Elements compare by exact string equality; the value is the raw
    (unnormalized) count of insertions, deletions, and substitutions.
    """
    if not tokens or not morphemes:
        raise MetricError("edit distance requires non-empty sequences")
    if len(tokens) < len(morphemes):
        tokens, morphemes = morphemes, tokens
    previous = list(range(len(morphemes) + 1))
    for i, tok in enumerate(tokens, start=1):
        current = [i]
        for j, morph in enumerate(morphemes, start=1):
            cost = 0 if tok == morph else 1
            current.append(
                min(
                    previous[j] + 1,  # delete
                    current[j - 1] + 1,  # insert
                    previous[j - 1] + cost,  # substitute
                )
            )
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class EditDistanceReport:
    mean_mu_e: float
    word_count: int
    per_word: tuple[int, ...] | None = None

    def to_json_dict(self) -> dict:
        payload = {"mean_mu_e": self.mean_mu_e, "word_count": self.word_count}
        if self.per_word is not None:
            payload["per_word"] = list(self.per_word)
        return payload


def word_mu_e(
    model: TokenizerModel,
    record: SegmentedWord,
    use_gold_boundaries: bool = False,
) -> int:
    """Edit distance between one word's token strings and its morphemes."""
    if use_gold_boundaries:
        tokens = encode_segmented_symbols(model, record)
    else:
        tokens = token_strings(model, encode_word(model, record.surface))
    return morph_edit_distance(tokens, record.morphemes)


def corpus_mu_e(
    model: TokenizerModel,
    testset: SegmentationDataset,
    keep_per_word: bool = False,
    use_gold_boundaries: bool = False,
) -> EditDistanceReport:
    """Mean per-word morphological edit distance over a segmented dataset."""
    if len(testset) == 0:
        raise MetricError("cannot evaluate edit distance on an empty dataset")
    distances = [
        word_mu_e(model, rec, use_gold_boundaries) for rec in testset.records
    ]
    return EditDistanceReport(
        mean_mu_e=sum(distances) / len(distances),
        word_count=len(distances),
        per_word=tuple(distances) if keep_per_word else None,
    )


# ---------------------------------------------------------------------------
# Morphological consistency


@dataclass(frozen=True)
class ConsistencyConfig:
    """Clustering and resampling parameters for morphological consistency."""

    k: int = 100
    pairs_per_cluster: int = 50
    resamples: int = 10
    seed: int = 0
    feature_dim: int = 1024
    min_token_len: int = 1

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.pairs_per_cluster < 1:
            raise ValueError(
                f"pairs_per_cluster must be >= 1, got {self.pairs_per_cluster}"
            )
        if self.resamples < 2:
            raise ValueError(f"resamples must be >= 2, got {self.resamples}")
        if self.feature_dim < 1:
            raise ValueError(f"feature_dim must be >= 1, got {self.feature_dim}")
        if self.min_token_len < 1:
            raise ValueError(f"min_token_len must be >= 1, got {self.min_token_len}")


def harmonic_f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class ConsistencyReport:
    precision_mean: float
    precision_std: float
    recall_mean: float
    recall_std: float
    f1: float

    def to_json_dict(self) -> dict:
        return {
            "precision_mean": self.precision_mean,
            "precision_std": self.precision_std,
            "recall_mean": self.recall_mean,
            "recall_std": self.recall_std,
            "f1": self.f1,
        }


def consistency_markdown(rows: Sequence[tuple[str, ConsistencyReport]]) -> str:
    """Markdown table with one row per labelled report."""
    lines = [
        "| Model | Precision (Mean ± Std) | Recall (Mean ± Std) | F1 |",
        "| --- | --- | --- | --- |",
    ]
    for label, rep in rows:
        lines.append(
            f"| {label} | {rep.precision_mean:.2f} ± {rep.precision_std:.2f} "
            f"| {rep.recall_mean:.2f} ± {rep.recall_std:.2f} | {rep.f1:.2f} |"
        )
    return "\n".join(lines)


def _pair_offsets(size: int) -> list[int]:
    # offsets[i] = number of (row < i) pairs, rows paired with all later cols
    offsets = [0]
    for i in range(size - 1):
        offsets.append(offsets[-1] + (size - 1 - i))
    return offsets


def _unrank_pair(t: int, offsets: list[int]) -> tuple[int, int]:
    row = bisect_right(offsets, t) - 1
    return row, row + 1 + (t - offsets[row])


def sample_cluster_pairs(
    clusters: Sequence[Sequence[int]],
    pairs_per_cluster: int,
    rng: random.Random,
) -> list[tuple[int, int]]:
    """Up to pairs_per_cluster unordered index pairs per cluster, uniform
    without replacement; clusters with fewer candidate pairs contribute all
    of them."""
    pairs: list[tuple[int, int]] = []
    for members in clusters:
        m = len(members)
        total = m * (m - 1) // 2
        if total == 0:
            continue
        take = min(pairs_per_cluster, total)
        offsets = _pair_offsets(m)
        for t in sorted(rng.sample(range(total), take)):
            i, j = _unrank_pair(t, offsets)
            pairs.append((members[i], members[j]))
    return pairs


def pooled_precision_recall(
    pairs: Sequence[tuple[int, int]],
    morph_sets: Sequence[frozenset[str]],
    token_sets: Sequence[frozenset[str]],
) -> tuple[float | None, float | None]:
    """Precision and recall pooled over a set of word pairs.

    A pair is morphologically related (A) when the words share at least one
    morpheme, and token related (B) when they share at least one token.
    Precision = |A and B| / |B|, recall = |A and B| / |A|; None when the
    denominator is empty.
    """
    a_count = b_count = ab_count = 0
    for i, j in pairs:
        a = not morph_sets[i].isdisjoint(morph_sets[j])
        b = not token_sets[i].isdisjoint(token_sets[j])
        a_count += a
        b_count += b
        ab_count += a and b
    precision = ab_count / b_count if b_count else None
    recall = ab_count / a_count if a_count else None
    return precision, recall


def morph_consistency(
    model: TokenizerModel,
    dataset: SegmentationDataset,
    cfg: ConsistencyConfig = ConsistencyConfig(),
    use_gold_boundaries: bool = False,
) -> ConsistencyReport:
    """Morphological consistency F1 via clustered pair resampling.

    Words are clustered on feature-hashed binary bag-of-morphemes vectors so
    that sampled pairs are plausibly related; per resample, precision and
    recall are pooled over the sampled pairs, and a resample with an empty
    denominator is skipped for that statistic. Deterministic for a fixed
    (dataset order, cfg.seed).
    """
    n = len(dataset)
    if n < cfg.k:
        raise MetricError(
            f"consistency needs at least k={cfg.k} records, got {n}"
        )
    records = dataset.records
    morph_sets = [frozenset(rec.morphemes) for rec in records]
    token_sets = []
    for rec in records:
        if use_gold_boundaries:
            symbols = encode_segmented_symbols(model, rec)
        else:
            symbols = encode_word_symbols(model, rec.surface)
        token_sets.append(
            frozenset(s for s in symbols if len(s) >= cfg.min_token_len)
        )

    vectors = hash_feature_sets(morph_sets, cfg.feature_dim)
    labels = kmeans_labels(vectors, cfg.k, cfg.seed)
    clusters: list[list[int]] = [[] for _ in range(cfg.k)]
    for idx, label in enumerate(labels):
        clusters[int(label)].append(idx)

    rng = random.Random(cfg.seed)
    precisions: list[float] = []
    recalls: list[float] = []
    for _ in range(cfg.resamples):
        pairs = sample_cluster_pairs(clusters, cfg.pairs_per_cluster, rng)
        precision, recall = pooled_precision_recall(pairs, morph_sets, token_sets)
        if precision is not None:
            precisions.append(precision)
        if recall is not None:
            recalls.append(recall)
    if not precisions:
        raise MetricError(
            "precision undefined in every resample: no sampled pair shares a token"
        )
    if not recalls:
        raise MetricError(
            "recall undefined in every resample: no sampled pair shares a morpheme"
        )

    p_mean = float(np.mean(precisions))
    r_mean = float(np.mean(recalls))
    return ConsistencyReport(
        precision_mean=p_mean,
        precision_std=float(np.std(precisions)),
        recall_mean=r_mean,
        recall_std=float(np.std(recalls)),
        f1=harmonic_f1(p_mean, r_mean),
    )


# ---------------------------------------------------------------------------
# Boundary violations (display helper for the service and acceptance checks)


def boundary_violations(
    token_spans: Sequence[tuple[int, int]], morphemes: Sequence[str]
) -> list[bool]:
    """Flag tokens whose [start, end) span crosses a morpheme boundary.

    Spans are word-relative character offsets; boundaries sit at cumulative
    morpheme lengths. A token merely touching a boundary endpoint is fine,
    only straddling one counts.
    """
    boundaries = []
    pos = 0
    for morpheme in morphemes[:-1]:
        pos += len(morpheme)
        boundaries.append(pos)
    return [
        any(start < b < end for b in boundaries) for start, end in token_spans
    ]
