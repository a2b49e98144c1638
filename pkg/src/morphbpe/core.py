"""Domain types for trained tokenizers plus the JSON model file format.

A symbol is a plain Python string over Unicode scalar values. Tokens start
life as single characters and grow only by concatenation through merges,
so every token is non-empty and contains no whitespace.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterator, Literal

FORMAT_VERSION = 1

UNK_TOKEN = "<unk>"
UNK_ID = 0
SPECIAL_TOKENS: tuple[str, ...] = (UNK_TOKEN,)

VANILLA_BPE = "vanilla-bpe"
MORPH_BPE = "morph-bpe"
MODES: tuple[str, ...] = (VANILLA_BPE, MORPH_BPE)
NORMALIZATIONS: tuple[str, ...] = ("none", "nfc")

Mode = Literal["vanilla-bpe", "morph-bpe"]
Normalization = Literal["none", "nfc"]

Pair = tuple[str, str]


class ModelError(ValueError):
    """A tokenizer model violates one of its structural invariants."""


class ModelFormatError(ModelError):
    """A serialized model cannot be parsed or carries an unsupported version."""


def merge_adjacent(symbols: list[str], left: str, right: str, merged: str) -> list[str]:
    """Replace every adjacent (left, right) occurrence, scanning left to right.

    The scan resumes after each replacement, so [a, a, a] with pair (a, a)
    becomes [aa, a]. Trainer and encoder share this rule; that is what makes
    encoding a training word reproduce the trainer's final state.
    """
    out: list[str] = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


@dataclass(frozen=True)
class MergeEvent:
    """One learned merge: (left, right) -> merged at a given rank.

    frequency_at_merge is the weighted pair count observed when the pair
    was selected, kept for auditability.
    """

    left: str
    right: str
    merged: str
    rank: int
    frequency_at_merge: int

    def __post_init__(self) -> None:
        if not self.left or not self.right:
            raise ModelError(f"merge at rank {self.rank}: empty constituent")
        if self.merged != self.left + self.right:
            raise ModelError(
                f"merge at rank {self.rank}: merged token {self.merged!r} is not "
                f"{self.left!r} + {self.right!r}"
            )
        if self.rank < 0:
            raise ModelError(f"negative merge rank {self.rank}")
        if self.frequency_at_merge < 1:
            raise ModelError(
                f"merge at rank {self.rank}: frequency_at_merge must be >= 1, "
                f"got {self.frequency_at_merge}"
            )


def _check_token(token: object, where: str) -> str:
    if not isinstance(token, str) or not token:
        raise ModelError(f"{where}: token must be a non-empty string, got {token!r}")
    if any(ch.isspace() for ch in token):
        raise ModelError(f"{where}: token {token!r} contains whitespace")
    return token


@dataclass
class TokenizerModel:
    """An ordered vocabulary plus the merge list that produced it.

    Token ids are list positions; id 0 is always the UNK token. Treated as
    immutable after construction. `token_to_id` and `merge_ranks` are
    derived lookup tables, not part of equality.
    """

    vocab: list[str]
    merges: list[MergeEvent]
    mode: Mode = VANILLA_BPE
    normalization: Normalization = "nfc"
    token_to_id: dict[str, int] = field(init=False, repr=False, compare=False)
    merge_ranks: dict[Pair, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.token_to_id = {}
        self.merge_ranks = {}
        self.validate()

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def validate(self) -> None:
        """Check every structural invariant, raising ModelError on the first failure."""
        if self.mode not in MODES:
            raise ModelError(f"unknown mode {self.mode!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ModelError(f"unknown normalization {self.normalization!r}")
        if not self.vocab:
            raise ModelError("vocab is empty")
        if self.vocab[0] != UNK_TOKEN:
            raise ModelError(
                f"vocab[0] must be the UNK token {UNK_TOKEN!r}, got {self.vocab[0]!r}"
            )

        token_to_id: dict[str, int] = {}
        for i, tok in enumerate(self.vocab):
            _check_token(tok, f"vocab[{i}]")
            if tok in token_to_id:
                raise ModelError(f"vocab[{i}]: duplicate token {tok!r}")
            token_to_id[tok] = i

        # Introduction rank: characters are born at rank -1, merged tokens at
        # the rank of the first merge producing them. Specials are neither and
        # may not appear as merge constituents.
        intro: dict[str, int] = {
            tok: -1 for tok in self.vocab if len(tok) == 1
        }
        merge_ranks: dict[Pair, int] = {}
        for r, ev in enumerate(self.merges):
            if ev.rank != r:
                raise ModelError(
                    f"merge at position {r} carries rank {ev.rank}; ranks must be "
                    "contiguous from 0"
                )
            for side, name in ((ev.left, "left"), (ev.right, "right")):
                if side not in token_to_id:
                    raise ModelError(
                        f"merge {r}: {name} constituent {side!r} is not in the vocab"
                    )
                side_intro = intro.get(side)
                if side_intro is None or side_intro >= r:
                    raise ModelError(
                        f"merge {r}: constituent {side!r} is not a character or an "
                        "earlier merge result"
                    )
            if ev.merged not in token_to_id:
                raise ModelError(f"merge {r}: merged token {ev.merged!r} is not in the vocab")
            intro.setdefault(ev.merged, r)
            merge_ranks.setdefault((ev.left, ev.right), r)

        for tok in self.vocab:
            if tok in SPECIAL_TOKENS or len(tok) == 1:
                continue
            if tok not in intro:
                raise ModelError(
                    f"vocab token {tok!r} is not producible by any merge"
                )

        self.token_to_id = token_to_id
        self.merge_ranks = merge_ranks


@dataclass(frozen=True)
class SegmentedWord:
    """A surface form with its ordered morpheme segmentation."""

    surface: str
    morphemes: tuple[str, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.morphemes, tuple):
            object.__setattr__(self, "morphemes", tuple(self.morphemes))
        if not self.surface:
            raise ValueError("surface must be non-empty")
        if any(ch.isspace() for ch in self.surface):
            raise ValueError(f"surface {self.surface!r} contains whitespace")
        if not unicodedata.is_normalized("NFC", self.surface):
            raise ValueError(f"surface {self.surface!r} is not NFC-normalized")
        if not self.morphemes:
            raise ValueError(f"word {self.surface!r} has no morphemes")
        for m in self.morphemes:
            if not m or not isinstance(m, str):
                raise ValueError(f"word {self.surface!r} has an empty morpheme")
        if "".join(self.morphemes) != self.surface:
            raise ValueError(
                f"morphemes {list(self.morphemes)!r} do not concatenate to "
                f"surface {self.surface!r}"
            )


@dataclass
class WordFrequencyTable:
    """Distinct word types with positive counts; keys are NFC and whitespace-free."""

    entries: dict[str, int]
    total_words: int = field(init=False)

    def __post_init__(self) -> None:
        total = 0
        for word, count in self.entries.items():
            if not word or any(ch.isspace() for ch in word):
                raise ValueError(f"bad word key {word!r}")
            if not unicodedata.is_normalized("NFC", word):
                raise ValueError(f"word key {word!r} is not NFC-normalized")
            if not isinstance(count, int) or count < 1:
                raise ValueError(f"word {word!r} has non-positive count {count!r}")
            total += count
        self.total_words = total

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)


def _model_payload(model: TokenizerModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "mode": model.mode,
        "normalization": model.normalization,
        "vocab": list(model.vocab),
        "merges": [[ev.left, ev.right, ev.frequency_at_merge] for ev in model.merges],
    }


def save_model(
    model: TokenizerModel, destination: str | Path | BinaryIO | None = None
) -> bytes:
    """Serialize a model to canonical UTF-8 JSON bytes (no BOM).

    Re-validates before writing so a model mutated into an invalid state is
    rejected rather than persisted. Returns the serialized bytes; if
    `destination` is given the bytes are also written there.
    """
    model.validate()
    data = json.dumps(
        _model_payload(model), ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")
    if destination is not None:
        if isinstance(destination, (str, Path)):
            Path(destination).write_bytes(data)
        else:
            destination.write(data)
    return data


def load_model(source: str | Path | bytes | bytearray | BinaryIO) -> TokenizerModel:
    """Parse and validate a serialized model.

    Raises ModelFormatError for unparseable input or an unsupported
    format_version, and ModelError (with the offending entry) when the
    decoded model violates an invariant. Unknown top-level keys are ignored
    so files may carry extra metadata such as a language tag.
    """
    if isinstance(source, (str, Path)):
        raw: bytes = Path(source).read_bytes()
    elif isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    else:
        raw = source.read()

    try:
        payload = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"model file is not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelFormatError("model file must contain a JSON object")

    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version!r}")

    mode = payload.get("mode")
    if mode not in MODES:
        raise ModelFormatError(f"unknown mode {mode!r}")
    normalization = payload.get("normalization")
    if normalization not in NORMALIZATIONS:
        raise ModelFormatError(f"unknown normalization {normalization!r}")

    vocab = payload.get("vocab")
    if not isinstance(vocab, list) or not all(isinstance(t, str) for t in vocab):
        raise ModelFormatError("vocab must be a list of strings")

    raw_merges = payload.get("merges")
    if not isinstance(raw_merges, list):
        raise ModelFormatError("merges must be a list")
    merges: list[MergeEvent] = []
    for i, entry in enumerate(raw_merges):
        if (
            not isinstance(entry, list)
            or len(entry) != 3
            or not isinstance(entry[0], str)
            or not isinstance(entry[1], str)
            or not isinstance(entry[2], int)
            or isinstance(entry[2], bool)
        ):
            raise ModelFormatError(
                f"merges[{i}] must be [left, right, frequency], got {entry!r}"
            )
        left, right, freq = entry
        merges.append(
            MergeEvent(
                left=left,
                right=right,
                merged=left + right,
                rank=i,
                frequency_at_merge=freq,
            )
        )

    return TokenizerModel(
        vocab=list(vocab), merges=merges, mode=mode, normalization=normalization
    )
