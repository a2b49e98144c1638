"""Loading segmentation lexicons, splitting datasets, and counting words."""

from __future__ import annotations

import codecs
import hashlib
import logging
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Sequence

from .core import SegmentedWord, WordFrequencyTable

logger = logging.getLogger(__name__)

_CHUNK_SIZE = 1 << 20
_MAX_REJECTIONS_KEPT = 10_000


class IngestError(ValueError):
    """Raised when input data cannot be ingested."""


@dataclass
class SegmentationDataset:
    """An ordered collection of segmented words with no duplicate surfaces."""

    language: str
    records: list[SegmentedWord]
    source: str = ""

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for rec in self.records:
            if rec.surface in seen:
                raise IngestError(f"duplicate surface {rec.surface!r} in dataset")
            seen.add(rec.surface)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SegmentedWord]:
        return iter(self.records)

    def surface_map(self) -> dict[str, tuple[str, ...]]:
        return {rec.surface: rec.morphemes for rec in self.records}


@dataclass(frozen=True)
class SplitSpec:
    """Fractions for the train/dev/test partition plus the hashing seed."""

    train_fraction: float = 0.8
    dev_fraction: float = 0.1
    test_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        fracs = (self.train_fraction, self.dev_fraction, self.test_fraction)
        if any(f < 0 for f in fracs):
            raise ValueError(f"split fractions must be non-negative, got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {fracs}")


@dataclass
class LoadReport:
    """What happened while parsing a segmentation file."""

    total_lines: int = 0
    loaded: int = 0
    rejected: int = 0
    duplicates: int = 0
    # (line number, raw line, reason); capped so a pathological file cannot
    # exhaust memory, counts above stay exact.
    rejection_lines: list[tuple[int, str, str]] = field(default_factory=list)

    def add_rejection(self, line_no: int, line: str, reason: str) -> None:
        self.rejected += 1
        if len(self.rejection_lines) < _MAX_REJECTIONS_KEPT:
            self.rejection_lines.append((line_no, line, reason))

    def to_text(self) -> str:
        lines = [
            f"lines={self.total_lines} loaded={self.loaded} "
            f"rejected={self.rejected} duplicates={self.duplicates}"
        ]
        for line_no, raw, reason in self.rejection_lines:
            lines.append(f"line {line_no}: {reason}: {raw}")
        return "\n".join(lines)


def _parse_record(
    raw: str, separator: str
) -> SegmentedWord:
    fields = raw.split("\t")
    if len(fields) != 2:
        raise ValueError(f"expected 2 tab-separated fields, got {len(fields)}")
    surface = unicodedata.normalize("NFC", fields[0].strip())
    morph_field = fields[1].strip()
    if not surface:
        raise ValueError("empty surface")
    if not morph_field:
        raise ValueError("empty segmentation field")
    morphemes = [unicodedata.normalize("NFC", m) for m in morph_field.split(separator)]
    # SegmentedWord enforces the remaining invariants (non-empty morphemes,
    # concatenation equals surface, no whitespace).
    return SegmentedWord(surface=surface, morphemes=tuple(morphemes))


def load_segmentation_with_report(
    path: str | Path,
    separator: str = "|",
    language: str = "und",
) -> tuple[SegmentationDataset, LoadReport]:
    """Parse a `surface<TAB>morph1|morph2|...` file.

    Lines violating the concatenation invariant (or otherwise malformed) are
    excluded and tallied. Duplicate surfaces keep the last occurrence. If more
    than half of the non-blank lines are rejected the file is considered
    mis-formatted and loading aborts.
    """
    path = Path(path)
    report = LoadReport()
    by_surface: dict[str, SegmentedWord] = {}
    considered = 0
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            report.total_lines += 1
            raw = line.rstrip("\n").rstrip("\r")
            if not raw.strip():
                continue
            considered += 1
            try:
                rec = _parse_record(raw, separator)
            except ValueError as exc:
                report.add_rejection(line_no, raw, str(exc))
                continue
            if rec.surface in by_surface:
                report.duplicates += 1
            by_surface[rec.surface] = rec
    report.loaded = len(by_surface)
    if considered > 0 and report.rejected * 2 > considered:
        raise IngestError(
            f"{path}: {report.rejected} of {considered} lines rejected; "
            f"is {separator!r} the right morpheme separator?"
        )
    if report.rejected:
        logger.info(
            "%s: rejected %d of %d lines, kept %d",
            path,
            report.rejected,
            considered,
            report.loaded,
        )
    dataset = SegmentationDataset(
        language=language, records=list(by_surface.values()), source=str(path)
    )
    return dataset, report


def load_segmentation(
    path: str | Path, separator: str = "|", language: str = "und"
) -> SegmentationDataset:
    dataset, _ = load_segmentation_with_report(path, separator, language)
    return dataset


def write_segmentation(
    dataset: SegmentationDataset, path: str | Path, separator: str = "|"
) -> None:
    """Write the canonical TSV form that load_segmentation reads back."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in dataset.records:
            fh.write(f"{rec.surface}\t{separator.join(rec.morphemes)}\n")


def _assignment_key(surface: str, seed: int) -> int:
    digest = hashlib.blake2b(
        surface.encode("utf-8"), digest_size=8, key=str(seed).encode("ascii")
    ).digest()
    return int.from_bytes(digest, "big")


def _largest_remainder(n: int, fractions: Sequence[float]) -> list[int]:
    quotas = [n * f for f in fractions]
    sizes = [math.floor(q) for q in quotas]
    remaining = n - sum(sizes)
    order = sorted(range(len(fractions)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:remaining]:
        sizes[i] += 1
    return sizes


def split_dataset(
    dataset: SegmentationDataset, spec: SplitSpec = SplitSpec()
) -> tuple[SegmentationDataset, SegmentationDataset, SegmentationDataset]:
    """Partition records into train/dev/test by hashed surface order.

    Each record's position is a deterministic function of (surface, seed), so
    the split is identical across runs, machines, and input orderings. Split
    sizes follow largest-remainder rounding of the requested fractions.
    """
    if len(dataset) < 10:
        raise IngestError(
            f"need at least 10 records to split, got {len(dataset)}"
        )
    ordered = sorted(
        dataset.records,
        key=lambda rec: (_assignment_key(rec.surface, spec.seed), rec.surface),
    )
    sizes = _largest_remainder(
        len(ordered),
        (spec.train_fraction, spec.dev_fraction, spec.test_fraction),
    )
    bounds = (sizes[0], sizes[0] + sizes[1])
    parts = (ordered[: bounds[0]], ordered[bounds[0] : bounds[1]], ordered[bounds[1] :])
    names = ("train", "dev", "test")
    return tuple(
        SegmentationDataset(
            language=dataset.language,
            records=list(part),
            source=f"{dataset.source}[{name}]" if dataset.source else name,
        )
        for part, name in zip(parts, names)
    )  # type: ignore[return-value]


def _iter_chunks(source: str | Path | IO[bytes]) -> Iterator[bytes]:
    if isinstance(source, (str, Path)):
        with Path(source).open("rb") as fh:
            while chunk := fh.read(_CHUNK_SIZE):
                yield chunk
    else:
        while chunk := source.read(_CHUNK_SIZE):
            yield chunk


def count_words(source: str | Path | IO[bytes]) -> WordFrequencyTable:
    """Stream a UTF-8 text corpus into a word-frequency table.

    Words are maximal whitespace-free runs; each is NFC-normalized before
    counting. The result is independent of how the byte stream is chunked.
    Invalid UTF-8 raises IngestError with the byte offset of the bad data.
    """
    counts: Counter[str] = Counter()
    decoder = codecs.getincrementaldecoder("utf-8")()
    consumed = 0
    pending = ""

    def feed(data: bytes, final: bool) -> str:
        nonlocal consumed
        buffered = len(decoder.getstate()[0])
        try:
            text = decoder.decode(data, final)
        except UnicodeDecodeError as exc:
            offset = consumed - buffered + exc.start
            raise IngestError(f"invalid UTF-8 at byte offset {offset}") from exc
        consumed += len(data)
        return text

    def take(text: str) -> None:
        nonlocal pending
        text = pending + text
        parts = text.split()
        if text and not text[-1].isspace() and parts:
            pending = parts.pop()
        else:
            pending = ""
        for word in parts:
            counts[unicodedata.normalize("NFC", word)] += 1

    for chunk in _iter_chunks(source):
        take(feed(chunk, final=False))
    take(feed(b"", final=True))
    if pending:
        counts[unicodedata.normalize("NFC", pending)] += 1
    return WordFrequencyTable(entries=dict(counts))


def word_table_from_text(text: str) -> WordFrequencyTable:
    """Count words in an in-memory string (same semantics as count_words)."""
    counts: Counter[str] = Counter(
        unicodedata.normalize("NFC", w) for w in text.split()
    )
    return WordFrequencyTable(entries=dict(counts))


def write_word_table(table: WordFrequencyTable, path: str | Path) -> None:
    """Export a word-frequency table as `word<TAB>count` lines.

    Rows are ordered by descending count then word, so output is deterministic
    for equal tables regardless of how they were built.
    """
    path = Path(path)
    rows = sorted(table.entries.items(), key=lambda kv: (-kv[1], kv[0]))
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for word, count in rows:
            fh.write(f"{word}\t{count}\n")


def read_word_table(path: str | Path) -> WordFrequencyTable:
    entries: dict[str, int] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            raw = line.rstrip("\n")
            if not raw.strip():
                continue
            fields = raw.split("\t")
            if len(fields) != 2:
                raise IngestError(f"{path}:{line_no}: expected `word<TAB>count`")
            try:
                count = int(fields[1])
            except ValueError as exc:
                raise IngestError(f"{path}:{line_no}: bad count {fields[1]!r}") from exc
            entries[fields[0]] = entries.get(fields[0], 0) + count
    return WordFrequencyTable(entries=entries)
