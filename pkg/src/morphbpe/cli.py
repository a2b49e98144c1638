"""Command line interface: train, encode, decode, eval, sweep, split, serve.

Exit codes: 0 on success, 1 for usage errors, 2 for data errors (unreadable
files, malformed inputs, unsatisfiable requests). Every subcommand accepts
--json for machine-readable output on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .core import MORPH_BPE, VANILLA_BPE, ModelError, load_model, save_model
from .encoder import decode, encode_text, token_strings
from .ingest import (
    IngestError,
    SplitSpec,
    count_words,
    load_segmentation_with_report,
    split_dataset,
    write_segmentation,
)
from .metrics import (
    ConsistencyConfig,
    MetricError,
    consistency_markdown,
    corpus_mu_e,
    fertility,
    morph_consistency,
)
from .sweep import SweepError, sweep
from .trainer import BpeTrainer, TrainConfig, TrainError, TrainWarning

DEFAULT_SEED = 0

_MODE_FLAGS = {"bpe": VANILLA_BPE, "morphbpe": MORPH_BPE}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this tool reserves 2 for data errors.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parse_sizes(spec: str) -> list[int]:
    """Sizes as `8000..96000:8000` (inclusive range) or `8000,16000,24000`."""
    spec = spec.strip()
    if ".." in spec:
        range_part, _, step_part = spec.partition(":")
        start_s, _, stop_s = range_part.partition("..")
        try:
            start, stop = int(start_s), int(stop_s)
            step = int(step_part) if step_part else 1
        except ValueError:
            raise ValueError(f"bad size range {spec!r}") from None
        if step < 1 or stop < start:
            raise ValueError(f"bad size range {spec!r}")
        return list(range(start, stop + 1, step))
    try:
        return [int(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise ValueError(f"bad size list {spec!r}") from None


def _emit(args: argparse.Namespace, human: str, payload: dict | list) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, ensure_ascii=False))
    elif human:
        print(human)


def _load_lexicon(args: argparse.Namespace, attr: str = "lexicon"):
    path = getattr(args, attr)
    if path is None:
        return None
    dataset, report = load_segmentation_with_report(
        path, separator=args.separator, language=getattr(args, "language", "und")
    )
    if report.rejected:
        print(
            f"note: {report.rejected} rejected lines in {path}",
            file=sys.stderr,
        )
    return dataset


def cmd_train(args: argparse.Namespace) -> int:
    words = count_words(args.corpus)
    mode = _MODE_FLAGS[args.mode]
    lexicon = _load_lexicon(args)
    if mode == MORPH_BPE and lexicon is None:
        print("error: --mode morphbpe requires --lexicon", file=sys.stderr)
        return 1
    cfg = TrainConfig(
        target_vocab_size=args.vocab_size,
        mode=mode,
        min_pair_frequency=args.min_pair_freq,
    )

    def progress(event, vocab_size):
        print(
            f"merge {event.rank + 1}: {event.left}+{event.right} "
            f"freq={event.frequency_at_merge} vocab={vocab_size}",
            file=sys.stderr,
        )

    trainer = BpeTrainer(words, cfg, lexicon)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TrainWarning)
        model = trainer.train(on_progress=progress)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    save_model(model, args.out)
    _emit(
        args,
        f"trained {mode} model: vocab {model.vocab_size}, "
        f"{len(model.merges)} merges -> {args.out}",
        {
            "out": str(args.out),
            "mode": mode,
            "vocab_size": model.vocab_size,
            "merges": len(model.merges),
            "reached_target": trainer.reached_target,
        },
    )
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    text = args.text if args.text is not None else Path(args.file).read_text("utf-8")
    encoded = encode_text(model, text)
    words = []
    for ew in encoded:
        words.append(
            {
                "word": ew.word,
                "tokens": token_strings(model, ew.ids),
                "ids": list(ew.ids),
                "offsets": [[s, e] for s, e in ew.offsets],
            }
        )
    lines = []
    for item in words:
        cols = [item["word"]]
        if args.ids:
            cols.append(",".join(str(i) for i in item["ids"]))
        else:
            cols.append(" ".join(item["tokens"]))
        if args.offsets:
            cols.append(" ".join(f"{s}:{e}" for s, e in item["offsets"]))
        lines.append("\t".join(cols))
    _emit(args, "\n".join(lines), {"words": words})
    return 0


def cmd_decode(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    try:
        ids = [int(x) for x in args.ids.replace(",", " ").split()]
    except ValueError:
        print(f"error: bad id list {args.ids!r}", file=sys.stderr)
        return 1
    text = decode(model, ids)
    _emit(args, text, {"text": text})
    return 0


def cmd_eval_fertility(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    report = fertility(model, args.data)
    _emit(
        args,
        f"fertility: {report.phi:.4f} "
        f"({report.token_count} tokens / {report.word_count} words)",
        report.to_json_dict(),
    )
    return 0


def cmd_eval_edit(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = _load_lexicon(args, attr="data")
    report = corpus_mu_e(
        model,
        dataset,
        keep_per_word=args.per_word,
        use_gold_boundaries=args.use_gold_boundaries,
    )
    _emit(
        args,
        f"mean edit distance: {report.mean_mu_e:.4f} over {report.word_count} words",
        report.to_json_dict(),
    )
    return 0


def cmd_eval_consistency(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = _load_lexicon(args, attr="data")
    cfg = ConsistencyConfig(
        k=args.k,
        pairs_per_cluster=args.pairs,
        resamples=args.resamples,
        seed=args.seed,
        feature_dim=args.feature_dim,
        min_token_len=args.min_token_len,
    )
    report = morph_consistency(
        model, dataset, cfg, use_gold_boundaries=args.use_gold_boundaries
    )
    if args.markdown:
        print(consistency_markdown([(Path(args.model).stem, report)]))
        return 0
    _emit(
        args,
        f"precision {report.precision_mean:.2f} ± {report.precision_std:.2f}, "
        f"recall {report.recall_mean:.2f} ± {report.recall_std:.2f}, "
        f"F1 {report.f1:.2f}",
        report.to_json_dict(),
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    words = count_words(args.corpus)
    mode = _MODE_FLAGS[args.mode]
    lexicon = _load_lexicon(args)
    if mode == MORPH_BPE and lexicon is None:
        print("error: --mode morphbpe requires --lexicon", file=sys.stderr)
        return 1
    dev, _ = load_segmentation_with_report(args.dev, separator=args.separator)
    sizes = _parse_sizes(args.sizes)

    def on_size(size, mean):
        print(f"size {size}: mean edit distance {mean:.4f}", file=sys.stderr)

    result = sweep(
        words,
        dev,
        sizes,
        mode=mode,
        lexicon=lexicon,
        alpha=args.alpha,
        min_pair_frequency=args.min_pair_freq,
        on_size_done=on_size,
    )
    if args.markdown:
        print(result.to_markdown())
        return 0
    _emit(
        args,
        f"selected vocab size: {result.selected_size}",
        result.to_json_dict(include_per_word=args.per_word),
    )
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    dataset = _load_lexicon(args)
    spec = SplitSpec(seed=args.seed)
    train_ds, dev_ds, test_ds = split_dataset(dataset, spec)
    if args.auto is not None:
        auto, _ = load_segmentation_with_report(args.auto, separator=args.separator)
        known = {r.surface for r in dataset.records}
        extra = [r for r in auto.records if r.surface not in known]
        # Automatically derived segmentations carry more noise; they join the
        # training portion only, never dev or test.
        train_ds.records.extend(extra)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train_ds), ("dev", dev_ds), ("test", test_ds)):
        write_segmentation(part, out / f"{name}.tsv", separator=args.separator)
    _emit(
        args,
        f"wrote {len(train_ds)}/{len(dev_ds)}/{len(test_ds)} records to {out}",
        {
            "out_dir": str(out),
            "train": len(train_ds),
            "dev": len(dev_ds),
            "test": len(test_ds),
        },
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app, load_model_dir

    app = create_app(load_model_dir(args.models), static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _add_separator(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--separator",
        default="|",
        help="morpheme separator inside the segmentation column (default '|')",
    )


def _add_json(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--json", action="store_true", help="machine-readable JSON on stdout"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="morphbpe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="learn a merge table from a corpus")
    p_train.add_argument("--corpus", required=True, help="UTF-8 text corpus")
    p_train.add_argument("--mode", choices=sorted(_MODE_FLAGS), required=True)
    p_train.add_argument("--lexicon", help="segmentation TSV (required for morphbpe)")
    p_train.add_argument("--vocab-size", type=int, required=True)
    p_train.add_argument("--out", required=True, help="output model path")
    p_train.add_argument("--min-pair-freq", type=int, default=2)
    p_train.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_train.add_argument("--language", default="und")
    _add_separator(p_train)
    _add_json(p_train)
    p_train.set_defaults(func=cmd_train)

    p_encode = sub.add_parser("encode", help="tokenize text with a trained model")
    p_encode.add_argument("--model", required=True)
    source = p_encode.add_mutually_exclusive_group(required=True)
    source.add_argument("--text")
    source.add_argument("--file")
    p_encode.add_argument("--ids", action="store_true", help="print ids, not tokens")
    p_encode.add_argument("--offsets", action="store_true")
    _add_json(p_encode)
    p_encode.set_defaults(func=cmd_encode)

    p_decode = sub.add_parser("decode", help="turn token ids back into text")
    p_decode.add_argument("--model", required=True)
    p_decode.add_argument("--ids", required=True, help="comma-separated ids")
    _add_json(p_decode)
    p_decode.set_defaults(func=cmd_decode)

    p_eval = sub.add_parser("eval", help="intrinsic evaluation metrics")
    eval_sub = p_eval.add_subparsers(dest="metric", required=True)

    p_fert = eval_sub.add_parser("fertility", help="tokens per whitespace word")
    p_fert.add_argument("--model", required=True)
    p_fert.add_argument("--data", required=True, help="UTF-8 text corpus")
    _add_json(p_fert)
    p_fert.set_defaults(func=cmd_eval_fertility)

    p_edit = eval_sub.add_parser("edit", help="morphological edit distance")
    p_edit.add_argument("--model", required=True)
    p_edit.add_argument("--data", required=True, help="segmentation TSV")
    p_edit.add_argument("--per-word", action="store_true")
    p_edit.add_argument("--use-gold-boundaries", action="store_true")
    _add_separator(p_edit)
    _add_json(p_edit)
    p_edit.set_defaults(func=cmd_eval_edit)

    p_cons = eval_sub.add_parser("consistency", help="morphological consistency F1")
    p_cons.add_argument("--model", required=True)
    p_cons.add_argument("--data", required=True, help="segmentation TSV")
    p_cons.add_argument("--k", type=int, default=100)
    p_cons.add_argument("--pairs", type=int, default=50)
    p_cons.add_argument("--resamples", type=int, default=10)
    p_cons.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_cons.add_argument("--feature-dim", type=int, default=1024)
    p_cons.add_argument("--min-token-len", type=int, default=1)
    p_cons.add_argument("--use-gold-boundaries", action="store_true")
    p_cons.add_argument("--markdown", action="store_true")
    _add_separator(p_cons)
    _add_json(p_cons)
    p_cons.set_defaults(func=cmd_eval_consistency)

    p_sweep = sub.add_parser("sweep", help="vocab-size selection on a dev set")
    p_sweep.add_argument("--corpus", required=True)
    p_sweep.add_argument("--mode", choices=sorted(_MODE_FLAGS), required=True)
    p_sweep.add_argument("--lexicon")
    p_sweep.add_argument("--dev", required=True, help="dev segmentation TSV")
    p_sweep.add_argument(
        "--sizes", required=True, help="e.g. 8000..96000:8000 or 4000,8000"
    )
    p_sweep.add_argument("--alpha", type=float, default=0.05)
    p_sweep.add_argument("--min-pair-freq", type=int, default=2)
    p_sweep.add_argument("--per-word", action="store_true")
    p_sweep.add_argument("--markdown", action="store_true")
    _add_separator(p_sweep)
    _add_json(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_split = sub.add_parser("split", help="deterministic train/dev/test split")
    p_split.add_argument("--lexicon", required=True)
    p_split.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_split.add_argument("--out-dir", required=True)
    p_split.add_argument(
        "--auto",
        help="extra automatically derived records, added to the train split only",
    )
    _add_separator(p_split)
    _add_json(p_split)
    p_split.set_defaults(func=cmd_split)

    p_serve = sub.add_parser("serve", help="HTTP tokenization service")
    p_serve.add_argument("--models", required=True, help="directory of *.json models")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--static", help="also serve this directory at /")
    p_serve.set_defaults(func=cmd_serve)

    return parser


# Everything here signals bad data rather than bad usage; all exit with 2.
_DATA_ERRORS = (
    IngestError,
    ModelError,
    TrainError,
    MetricError,
    SweepError,
    ValueError,
    OSError,
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 0
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
