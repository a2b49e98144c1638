"""Slow reference implementations tests compare the real code against.

Everything here recomputes from first principles: full recounts instead of
incremental deltas, exponential recursion instead of DP, exhaustive
enumeration instead of greedy shortcuts. Nothing imports the modules under
test.
"""

from __future__ import annotations

from collections import Counter

UNK = "<unk>"

Event = tuple[str, str, str, int, int]  # (left, right, merged, rank, frequency)


def oracle_train(
    entries: dict[str, int],
    segmentation: dict[str, tuple[str, ...]] | None,
    target_vocab_size: int,
    min_pair_frequency: int = 2,
) -> tuple[list[Event], list[tuple[int, list[list[str]]]]]:
    """Reference BPE trainer that recounts every pair from scratch each step.

    Selection: maximal weighted within-span pair count, ties broken by the
    lexicographically smallest (left, right). Pairs whose concatenation would
    collide with the reserved UNK string are ineligible. Halts when the vocab
    reaches the target or no eligible pair reaches min_pair_frequency.
    Returns the merge events and the final per-word (count, spans) state.
    """
    words: list[tuple[int, list[list[str]]]] = []
    for surface, count in entries.items():
        if segmentation is not None:
            morphemes = segmentation.get(surface, (surface,))
        else:
            morphemes = (surface,)
        words.append((count, [list(m) for m in morphemes]))

    vocab: set[str] = {UNK}
    for surface in entries:
        vocab.update(surface)

    events: list[Event] = []
    while len(vocab) < target_vocab_size:
        counts: Counter[tuple[str, str]] = Counter()
        for count, spans in words:
            for span in spans:
                for i in range(len(span) - 1):
                    counts[(span[i], span[i + 1])] += count
        eligible = {p: c for p, c in counts.items() if p[0] + p[1] != UNK}
        if not eligible:
            break
        best = min(eligible, key=lambda p: (-eligible[p], p))
        if eligible[best] < min_pair_frequency:
            break
        left, right = best
        merged = left + right
        events.append((left, right, merged, len(events), eligible[best]))
        vocab.add(merged)
        for _, spans in words:
            for si, span in enumerate(spans):
                out: list[str] = []
                i = 0
                while i < len(span):
                    if i + 1 < len(span) and span[i] == left and span[i + 1] == right:
                        out.append(merged)
                        i += 2
                    else:
                        out.append(span[i])
                        i += 1
                spans[si] = out
    return events, words


def oracle_pair_counts(
    words: list[tuple[int, list[list[str]]]]
) -> dict[tuple[str, str], int]:
    """Weighted within-span pair counts of a (count, spans) word list."""
    counts: Counter[tuple[str, str]] = Counter()
    for count, spans in words:
        for span in spans:
            for i in range(len(span) - 1):
                counts[(span[i], span[i + 1])] += count
    return dict(counts)


def recursive_edit_distance(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Levenshtein by plain exponential recursion; only for short sequences."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    substitution_cost = 0 if a[0] == b[0] else 1
    return min(
        recursive_edit_distance(a[1:], b) + 1,
        recursive_edit_distance(a, b[1:]) + 1,
        recursive_edit_distance(a[1:], b[1:]) + substitution_cost,
    )


def encode_terminals(
    symbols: tuple[str, ...],
    ranks: dict[tuple[str, str], int],
    leftmost_only: bool = False,
) -> frozenset[tuple[str, ...]]:
    """Terminal states reachable by single-occurrence merge application.

    At each step only the lowest-rank applicable pair may be applied, at any
    of its occurrences (or only the leftmost when leftmost_only is set).
    """
    memo: dict[tuple[str, ...], frozenset[tuple[str, ...]]] = {}

    def explore(state: tuple[str, ...]) -> frozenset[tuple[str, ...]]:
        if state in memo:
            return memo[state]
        best_rank: int | None = None
        for i in range(len(state) - 1):
            rank = ranks.get((state[i], state[i + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
        if best_rank is None:
            result = frozenset([state])
        else:
            positions = [
                i
                for i in range(len(state) - 1)
                if ranks.get((state[i], state[i + 1])) == best_rank
            ]
            if leftmost_only:
                positions = positions[:1]
            collected: set[tuple[str, ...]] = set()
            for i in positions:
                merged = state[i] + state[i + 1]
                collected |= explore(state[:i] + (merged,) + state[i + 2 :])
            result = frozenset(collected)
        memo[state] = result
        return result

    return explore(tuple(symbols))


def naive_word_counts(text: str) -> dict[str, int]:
    """Two-pass whitespace word counter over an in-memory string."""
    import unicodedata

    counts: Counter[str] = Counter()
    for word in text.split():
        counts[unicodedata.normalize("NFC", word)] += 1
    return dict(counts)


def exhaustive_precision_recall(
    pairs: list[tuple[int, int]],
    morph_sets: list[frozenset[str]],
    token_sets: list[frozenset[str]],
) -> tuple[float | None, float | None]:
    """Pooled precision/recall over an explicit pair list, written plainly."""
    a_total = 0
    b_total = 0
    ab_total = 0
    for i, j in pairs:
        shares_morph = len(morph_sets[i] & morph_sets[j]) > 0
        shares_token = len(token_sets[i] & token_sets[j]) > 0
        if shares_morph:
            a_total += 1
        if shares_token:
            b_total += 1
        if shares_morph and shares_token:
            ab_total += 1
    precision = ab_total / b_total if b_total else None
    recall = ab_total / a_total if a_total else None
    return precision, recall
