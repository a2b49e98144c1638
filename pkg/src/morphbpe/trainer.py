"""BPE merge-table learning over word-frequency tables.

Two modes share one engine. In plain mode each word is a single span of
symbols. In morph mode a word's spans follow its morpheme segmentation, and
since pairs are only ever counted inside a span, no merge can cross a
morpheme boundary. Inference is unaffected; a trained model is an ordinary
merge table either way.

Pair counts are maintained incrementally: an index from pair to the word ids
containing it plus a lazily pruned max-heap keyed on (count, pair). A merge
therefore touches only the words it actually occurs in, never the whole
corpus. Selection breaks frequency ties by the code-point-lexicographically
smallest (left, right), which also makes training independent of map
iteration order.
"""

from __future__ import annotations

import heapq
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Callable

from .core import (
    MODES,
    MORPH_BPE,
    SPECIAL_TOKENS,
    UNK_TOKEN,
    MergeEvent,
    Mode,
    Pair,
    TokenizerModel,
    WordFrequencyTable,
    merge_adjacent,
)
from .ingest import SegmentationDataset

ProgressCallback = Callable[[MergeEvent, int], None]

_PROGRESS_EVERY = 1000
_SPECIAL_SET = frozenset(SPECIAL_TOKENS)


class TrainError(ValueError):
    """Raised when training preconditions are not met."""


class TrainWarning(UserWarning):
    """Non-fatal training conditions, e.g. an unreachable target vocab size."""


@dataclass(frozen=True)
class TrainConfig:
    target_vocab_size: int
    mode: Mode = "vanilla-bpe"
    min_pair_frequency: int = 2

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise TrainError(f"unknown mode {self.mode!r}")
        if self.min_pair_frequency < 1:
            raise TrainError(
                f"min_pair_frequency must be >= 1, got {self.min_pair_frequency}"
            )
        if self.target_vocab_size < 1:
            raise TrainError(
                f"target_vocab_size must be positive, got {self.target_vocab_size}"
            )


@dataclass
class WordView:
    """A word's current symbol spans plus its corpus count."""

    word: str
    count: int
    spans: list[list[str]]


class SegmentedCorpusView:
    """Mutable per-word symbol spans for the whole corpus."""

    def __init__(self, words: list[WordView]):
        self.words = words

    @classmethod
    def build(
        cls,
        table: WordFrequencyTable,
        lexicon: SegmentationDataset | None,
        mode: Mode,
    ) -> "SegmentedCorpusView":
        """Segment each corpus word into spans according to the mode.

        Words absent from the lexicon are treated as a single morpheme, so
        morph mode degrades gracefully on partial lexicons and reduces to
        plain mode when every word is monomorphemic.
        """
        segmentation: dict[str, tuple[str, ...]] = {}
        if mode == MORPH_BPE and lexicon is not None:
            segmentation = lexicon.surface_map()
        words: list[WordView] = []
        for word, count in table.entries.items():
            morphemes = segmentation.get(word, (word,))
            words.append(
                WordView(word=word, count=count, spans=[list(m) for m in morphemes])
            )
        return cls(words)


def _word_pairs(spans: list[list[str]]) -> Counter[Pair]:
    """Adjacent within-span pairs of one word, unweighted, overlaps included."""
    pairs: Counter[Pair] = Counter()
    for span in spans:
        for i in range(len(span) - 1):
            pairs[(span[i], span[i + 1])] += 1
    return pairs


def pair_frequencies(view: SegmentedCorpusView) -> dict[Pair, int]:
    """Count-weighted adjacent symbol pairs, never crossing a span boundary."""
    totals: Counter[Pair] = Counter()
    for word in view.words:
        for pair, n in _word_pairs(word.spans).items():
            totals[pair] += n * word.count
    return dict(totals)


def _rewrite_word(
    word: WordView, pair: Pair, merged: str
) -> tuple[Counter[Pair], Counter[Pair]] | None:
    """Apply one merge to a word in place; None when the pair does not occur.

    Returns the word's unweighted pair counters before and after, from which
    callers derive both count deltas and index membership changes.
    """
    left, right = pair
    hit = False
    for span in word.spans:
        for i in range(len(span) - 1):
            if span[i] == left and span[i + 1] == right:
                hit = True
                break
        if hit:
            break
    if not hit:
        return None
    before = _word_pairs(word.spans)
    word.spans = [merge_adjacent(span, left, right, merged) for span in word.spans]
    after = _word_pairs(word.spans)
    return before, after


def apply_merge(view: SegmentedCorpusView, pair: Pair) -> dict[Pair, int]:
    """Replace a pair across the whole view and return the pair-count deltas.

    Adding the returned deltas to the previous pair_frequencies(view) result
    gives exactly the new one. A pair that occurs nowhere is a no-op with a
    warning.
    """
    merged = pair[0] + pair[1]
    totals: Counter[Pair] = Counter()
    touched = 0
    for word in view.words:
        result = _rewrite_word(word, pair, merged)
        if result is None:
            continue
        touched += 1
        before, after = result
        for p in set(before) | set(after):
            totals[p] += (after[p] - before[p]) * word.count
    if touched == 0:
        warnings.warn(
            f"pair {pair!r} does not occur in the corpus view; merge skipped",
            TrainWarning,
            stacklevel=2,
        )
        return {}
    return {p: d for p, d in totals.items() if d != 0}


class BpeTrainer:
    """Incremental merge learner; one instance trains one model."""

    def __init__(
        self,
        words: WordFrequencyTable,
        cfg: TrainConfig,
        lexicon: SegmentationDataset | None = None,
    ):
        if len(words) == 0:
            raise TrainError("cannot train on an empty corpus")
        if cfg.mode == MORPH_BPE and lexicon is None:
            raise TrainError("morph-bpe training requires a segmentation lexicon")
        self.cfg = cfg
        self.view = SegmentedCorpusView.build(words, lexicon, cfg.mode)

        chars = sorted({ch for word in words.entries for ch in word})
        self.vocab: dict[str, int] = {UNK_TOKEN: 0}
        for ch in chars:
            self.vocab[ch] = len(self.vocab)
        if cfg.target_vocab_size <= len(self.vocab):
            raise TrainError(
                f"target_vocab_size {cfg.target_vocab_size} must exceed the "
                f"{len(self.vocab)} specials plus distinct characters"
            )

        self.pair_counts: dict[Pair, int] = {}
        self.pair_locs: defaultdict[Pair, set[int]] = defaultdict(set)
        for wid, word in enumerate(self.view.words):
            for pair, n in _word_pairs(word.spans).items():
                self.pair_counts[pair] = self.pair_counts.get(pair, 0) + n * word.count
                self.pair_locs[pair].add(wid)
        self._heap: list[tuple[int, str, str]] = [
            (-count, left, right) for (left, right), count in self.pair_counts.items()
        ]
        heapq.heapify(self._heap)

        self.merges: list[MergeEvent] = []
        self.reached_target = False

    def _pop_best(self) -> tuple[Pair, int] | None:
        """Highest current count, ties broken by smallest (left, right).

        Heap entries are snapshots; any entry whose count no longer matches is
        stale and discarded. Returns None when no eligible pair reaches
        min_pair_frequency.
        """
        while self._heap:
            neg_count, left, right = heapq.heappop(self._heap)
            count = -neg_count
            current = self.pair_counts.get((left, right), 0)
            if current != count or current <= 0:
                continue
            if count < self.cfg.min_pair_frequency:
                return None
            if left + right in _SPECIAL_SET:
                # A merged token may never collide with a reserved token
                # string; such pairs are skipped permanently.
                continue
            return (left, right), count
        return None

    def step(self) -> MergeEvent | None:
        """Perform one merge; None once training has halted."""
        if len(self.vocab) >= self.cfg.target_vocab_size:
            self.reached_target = True
            return None
        best = self._pop_best()
        if best is None:
            return None
        (left, right), freq = best
        merged = left + right
        event = MergeEvent(
            left=left,
            right=right,
            merged=merged,
            rank=len(self.merges),
            frequency_at_merge=freq,
        )
        self.merges.append(event)
        if merged not in self.vocab:
            self.vocab[merged] = len(self.vocab)

        total_delta: Counter[Pair] = Counter()
        for wid in self.pair_locs.pop((left, right), set()):
            word = self.view.words[wid]
            result = _rewrite_word(word, (left, right), merged)
            if result is None:  # index should never be stale
                continue
            before, after = result
            for p in set(before) | set(after):
                total_delta[p] += (after[p] - before[p]) * word.count
                if before[p] and not after[p]:
                    self.pair_locs[p].discard(wid)
                elif after[p] and not before[p]:
                    self.pair_locs[p].add(wid)

        for p, delta in total_delta.items():
            if delta == 0:
                continue
            new_count = self.pair_counts.get(p, 0) + delta
            if new_count > 0:
                self.pair_counts[p] = new_count
                heapq.heappush(self._heap, (-new_count, p[0], p[1]))
            else:
                self.pair_counts.pop(p, None)
        return event

    def train(self, on_progress: ProgressCallback | None = None) -> TokenizerModel:
        while True:
            event = self.step()
            if event is None:
                break
            if on_progress is not None and (event.rank + 1) % _PROGRESS_EVERY == 0:
                on_progress(event, len(self.vocab))
        if not self.reached_target:
            warnings.warn(
                f"target vocab size {self.cfg.target_vocab_size} unreachable; "
                f"stopped at {len(self.vocab)} after {len(self.merges)} merges",
                TrainWarning,
                stacklevel=2,
            )
        return TokenizerModel(
            vocab=list(self.vocab),
            merges=list(self.merges),
            mode=self.cfg.mode,
            normalization="nfc",
        )


def train(
    words: WordFrequencyTable,
    cfg: TrainConfig,
    lexicon: SegmentationDataset | None = None,
    on_progress: ProgressCallback | None = None,
) -> TokenizerModel:
    """Train a merge table; see BpeTrainer for the mechanics."""
    return BpeTrainer(words, cfg, lexicon).train(on_progress)
