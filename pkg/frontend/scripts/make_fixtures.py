#!/usr/bin/env python3
"""Regenerate the playground test fixtures.

Trains two small models with the CLI, runs the scripted playground inputs
through both the CLI and the HTTP service, and stores every response in
tests/fixtures/. The vitest suite replays those captures, so it needs no
Python at test time. Run from anywhere:

    python3 frontend/scripts/make_fixtures.py
"""

from __future__ import annotations

import io
import json
import unicodedata
from contextlib import redirect_stdout
from pathlib import Path
from tempfile import TemporaryDirectory

from fastapi.testclient import TestClient

from morphbpe.cli import main as cli_main
from morphbpe.service import create_app, load_model_dir

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
MODEL_DIR = FIXTURE_DIR / "models"
VOCAB_SIZE = 60

# (surface, morphemes, corpus count); every split concatenates back to the
# surface, which ingestion enforces.
LEXICON = [
    ("happy", ["happy"], 90),
    ("unhappy", ["un", "happy"], 40),
    ("happiness", ["happi", "ness"], 35),
    ("unhappiness", ["un", "happi", "ness"], 25),
    ("build", ["build"], 80),
    ("rebuild", ["re", "build"], 30),
    ("building", ["build", "ing"], 45),
    ("rebuilding", ["re", "build", "ing"], 18),
    ("builder", ["build", "er"], 22),
    ("do", ["do"], 100),
    ("doing", ["do", "ing"], 50),
    ("undo", ["un", "do"], 28),
    ("undoing", ["un", "do", "ing"], 15),
    ("redo", ["re", "do"], 26),
    ("play", ["play"], 70),
    ("playing", ["play", "ing"], 40),
    ("replay", ["re", "play"], 20),
    ("replaying", ["re", "play", "ing"], 12),
    ("player", ["play", "er"], 33),
    ("kind", ["kind"], 60),
    ("kindness", ["kind", "ness"], 24),
    ("unkind", ["un", "kind"], 16),
    ("unkindness", ["un", "kind", "ness"], 9),
    ("read", ["read"], 75),
    ("reader", ["read", "er"], 21),
    ("reading", ["read", "ing"], 44),
    ("reread", ["re", "read"], 11),
    ("hope", ["hope"], 55),
    ("hopeful", ["hope", "ful"], 19),
    ("hopeless", ["hope", "less"], 13),
    ("use", ["use"], 85),
    ("useful", ["use", "ful"], 27),
    ("useless", ["use", "less"], 14),
    ("pack", ["pack"], 48),
    ("packing", ["pack", "ing"], 17),
    ("unpack", ["un", "pack"], 23),
    ("unpacking", ["un", "pack", "ing"], 10),
    ("lock", ["lock"], 52),
    ("locker", ["lock", "er"], 12),
    ("locking", ["lock", "ing"], 9),
    ("unlock", ["un", "lock"], 31),
    ("load", ["load"], 46),
    ("loading", ["load", "ing"], 29),
    ("reload", ["re", "load"], 25),
    ("reloading", ["re", "load", "ing"], 8),
    ("fold", ["fold"], 36),
    ("unfold", ["un", "fold"], 15),
    ("folder", ["fold", "er"], 28),
]

# "rereading" is deliberately absent from the lexicon and "naïve" is
# typed decomposed (i + combining diaeresis) to exercise normalization and
# the UNK path.
CASES = [
    ("single_word", "unhappiness", [["un", "happi", "ness"]]),
    ("prefix_only", "rebuild", [["re", "build"]]),
    ("two_words", "unhappiness rebuild", [["un", "happi", "ness"], ["re", "build"]]),
    ("gerunds", "doing undoing", [["do", "ing"], ["un", "do", "ing"]]),
    ("nested_affixes", "kindness unkindness", [["kind", "ness"], ["un", "kind", "ness"]]),
    ("shared_root", "replaying replay", [["re", "play", "ing"], ["re", "play"]]),
    ("mixed_pair", "unpacking locker", [["un", "pack", "ing"], ["lock", "er"]]),
    (
        "four_words",
        "hopeful hopeless useful useless",
        [["hope", "ful"], ["hope", "less"], ["use", "ful"], ["use", "less"]],
    ),
    ("novel_word", "reader rereading", [["read", "er"], ["re", "read", "ing"]]),
    ("unseen_char", "naïve rebuild", [["naïve"], ["re", "build"]]),
]

GOLD_MISMATCH = ("concat_mismatch", "rebuild", [["re", "built"]])


def run_cli(*argv: str) -> dict:
    out = io.StringIO()
    with redirect_stdout(out):
        code = cli_main(list(argv))
    if code != 0:
        raise RuntimeError(f"cli {argv} exited {code}: {out.getvalue()}")
    return json.loads(out.getvalue())


def train_models(workdir: Path) -> None:
    corpus = workdir / "corpus.txt"
    lexicon = workdir / "lexicon.tsv"
    with corpus.open("w", encoding="utf-8") as fh:
        for surface, _, count in LEXICON:
            fh.write((surface + "\n") * count)
    with lexicon.open("w", encoding="utf-8") as fh:
        for surface, morphemes, _ in LEXICON:
            fh.write(f"{surface}\t{'|'.join(morphemes)}\n")

    MODEL_DIR.mkdir(parents=True, exist_ok=True)
    for mode, name in (("bpe", "base"), ("morphbpe", "morph")):
        argv = [
            "train",
            "--corpus", str(corpus),
            "--mode", mode,
            "--vocab-size", str(VOCAB_SIZE),
            "--out", str(MODEL_DIR / f"{name}.json"),
            "--json",
        ]
        if mode == "morphbpe":
            argv += ["--lexicon", str(lexicon)]
        report = run_cli(*argv)
        if not report.get("reached_target"):
            raise RuntimeError(f"{name} stopped at {report.get('vocab_size')}")

    # stamp the optional language metadata the service surfaces
    for name in ("base", "morph"):
        path = MODEL_DIR / f"{name}.json"
        raw = json.loads(path.read_text(encoding="utf-8"))
        raw["language"] = "en"
        path.write_text(json.dumps(raw, ensure_ascii=False), encoding="utf-8")


def cli_capture(workdir: Path, model: Path, text: str, gold: list[list[str]]) -> dict:
    encoded = run_cli("encode", "--model", str(model), "--text", text, "--json")
    words = [unicodedata.normalize("NFC", w) for w in text.split()]
    tsv = workdir / "case.tsv"
    seen = {}
    for word, morphemes in zip(words, gold):
        seen[word] = "|".join(morphemes)
    tsv.write_text(
        "".join(f"{w}\t{m}\n" for w, m in seen.items()), encoding="utf-8"
    )
    edit = run_cli(
        "eval", "edit",
        "--model", str(model),
        "--data", str(tsv),
        "--per-word", "--json",
    )
    mu_e = dict(zip(seen.keys(), edit["per_word"]))
    return {"words": encoded["words"], "mu_e": mu_e}


def capture_case(client: TestClient, workdir: Path, name, text, gold, with_cli=True) -> dict:
    case: dict = {"name": name, "text": text, "gold": gold, "service": {}}
    for model_id in ("base", "morph"):
        resp = client.post(
            "/tokenize",
            json={"model_id": model_id, "text": text, "gold_segmentation": gold},
        )
        if resp.status_code != 200:
            raise RuntimeError(f"{name}/{model_id}: {resp.status_code} {resp.text}")
        case["service"][model_id] = resp.json()
    if with_cli:
        case["cli"] = {
            model_id: cli_capture(workdir, MODEL_DIR / f"{model_id}.json", text, gold)
            for model_id in ("base", "morph")
        }
    return case


def main() -> None:
    with TemporaryDirectory() as tmp:
        workdir = Path(tmp)
        train_models(workdir)
        app = create_app(load_model_dir(MODEL_DIR))
        client = TestClient(app)

        models = client.get("/models").json()
        cases = [capture_case(client, workdir, *c) for c in CASES]
        # the mismatch case cannot go through `eval edit` (ingestion rejects
        # splits that do not concatenate), which is the point of it
        mismatch = capture_case(client, workdir, *GOLD_MISMATCH, with_cli=False)

        payload = {"models": models, "cases": cases, "gold_mismatch": mismatch}
        out = FIXTURE_DIR / "cases.json"
        out.write_text(
            json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
        )
        print(f"wrote {out} with {len(cases)} cases")


if __name__ == "__main__":
    main()
