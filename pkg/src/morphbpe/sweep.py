"""Vocabulary-size selection: train once, truncate the merge list, test.

A BPE merge list is prefix-stable: training to a smaller target produces
exactly the first merges of a larger run. The sweep therefore trains a single
model at the largest size and derives every smaller size by truncation, then
walks consecutive sizes with a paired t-test on per-word dev edit distances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

from .core import (
    SPECIAL_TOKENS,
    MergeEvent,
    Mode,
    TokenizerModel,
    WordFrequencyTable,
)
from .ingest import SegmentationDataset
from .metrics import word_mu_e
from .stats import paired_t_test
from .trainer import BpeTrainer, TrainConfig, TrainWarning

SizeProgress = Callable[[int, float], None]


class SweepError(ValueError):
    """Raised when sweep inputs are unusable."""


@dataclass
class SweepResult:
    sizes: list[int]
    mean_mu_e: list[float]
    # p_values[i] is the paired test between sizes[i] and sizes[i + 1].
    p_values: list[float]
    selected_size: int
    alpha: float
    per_word: list[list[int]]

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise SweepError(f"sizes must be strictly increasing, got {self.sizes}")
        if self.selected_size not in self.sizes:
            raise SweepError(
                f"selected size {self.selected_size} is not one of {self.sizes}"
            )

    def to_json_dict(self, include_per_word: bool = False) -> dict:
        payload = {
            "sizes": self.sizes,
            "mean_mu_e": self.mean_mu_e,
            "p_values": self.p_values,
            "alpha": self.alpha,
            "selected_size": self.selected_size,
        }
        if include_per_word:
            payload["per_word"] = self.per_word
        return payload

    def to_markdown(self) -> str:
        lines = [
            "| Vocab size | Mean edit distance | p vs next | Selected |",
            "| --- | --- | --- | --- |",
        ]
        for i, size in enumerate(self.sizes):
            p = f"{self.p_values[i]:.4g}" if i < len(self.p_values) else ""
            mark = "yes" if size == self.selected_size else ""
            lines.append(f"| {size} | {self.mean_mu_e[i]:.4f} | {p} | {mark} |")
        return "\n".join(lines)


def _truncated_model(
    full: TokenizerModel, base_vocab: list[str], merges: list[MergeEvent]
) -> TokenizerModel:
    vocab: dict[str, int] = {tok: i for i, tok in enumerate(base_vocab)}
    for ev in merges:
        if ev.merged not in vocab:
            vocab[ev.merged] = len(vocab)
    return TokenizerModel(
        vocab=list(vocab),
        merges=list(merges),
        mode=full.mode,
        normalization=full.normalization,
    )


def sweep(
    words: WordFrequencyTable,
    dev: SegmentationDataset,
    sizes: list[int],
    mode: Mode = "vanilla-bpe",
    lexicon: SegmentationDataset | None = None,
    alpha: float = 0.05,
    min_pair_frequency: int = 2,
    on_size_done: SizeProgress | None = None,
) -> SweepResult:
    """Evaluate each vocab size on the dev set and pick the stopping point.

    selected_size is the smallest size whose step to the next size is not a
    statistically significant improvement (paired two-sided t-test on per-word
    distances, significance threshold alpha). When every step improves
    significantly the largest size wins.
    """
    if len(sizes) < 2:
        raise SweepError(f"need at least 2 sizes to sweep, got {sizes}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise SweepError(f"sizes must be strictly increasing, got {sizes}")
    if len(dev) < 2:
        raise SweepError("dev set needs at least 2 records for the paired test")
    if not 0.0 < alpha < 1.0:
        raise SweepError(f"alpha must be in (0, 1), got {alpha}")

    cfg = TrainConfig(
        target_vocab_size=sizes[-1],
        mode=mode,
        min_pair_frequency=min_pair_frequency,
    )
    with warnings.catch_warnings():
        # An unreachable top size just means the tail of the sweep is flat.
        warnings.simplefilter("ignore", TrainWarning)
        full = BpeTrainer(words, cfg, lexicon).train()

    base_size = len(SPECIAL_TOKENS) + len({ch for word in words.entries for ch in word})
    if sizes[0] <= base_size:
        raise SweepError(
            f"smallest size {sizes[0]} does not exceed the base vocabulary "
            f"of {base_size} (specials plus characters)"
        )
    base_vocab = full.vocab[:base_size]

    per_word: list[list[int]] = []
    means: list[float] = []
    for size in sizes:
        model = _truncated_model(full, base_vocab, full.merges[: size - base_size])
        distances = [word_mu_e(model, rec) for rec in dev.records]
        per_word.append(distances)
        means.append(sum(distances) / len(distances))
        if on_size_done is not None:
            on_size_done(size, means[-1])

    p_values: list[float] = []
    for i in range(len(sizes) - 1):
        p_values.append(paired_t_test(per_word[i], per_word[i + 1]).p_value)

    selected = sizes[-1]
    for i in range(len(sizes) - 1):
        improved = means[i + 1] < means[i]
        if not (improved and p_values[i] < alpha):
            selected = sizes[i]
            break

    return SweepResult(
        sizes=list(sizes),
        mean_mu_e=means,
        p_values=p_values,
        selected_size=selected,
        alpha=alpha,
        per_word=per_word,
    )
