"""End-to-end command line runs with exit codes and output contracts."""

import json
import random

import pytest

from morphbpe.cli import _parse_sizes, main
from morphbpe.core import load_model

from tests.datagen import random_segmented_words


@pytest.fixture()
def workspace(tmp_path):
    """A tiny corpus plus matching segmentation lexicon on disk."""
    rng = random.Random(21)
    records = random_segmented_words(rng, 120)
    corpus_words = []
    for i, rec in enumerate(records):
        corpus_words.extend([rec.surface] * (1 + i % 4))
    rng.shuffle(corpus_words)
    corpus = tmp_path / "corpus.txt"
    corpus.write_text(" ".join(corpus_words), encoding="utf-8")
    lexicon = tmp_path / "lexicon.tsv"
    lexicon.write_text(
        "".join(f"{r.surface}\t{'|'.join(r.morphemes)}\n" for r in records),
        encoding="utf-8",
    )
    return tmp_path


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseSizes:
    def test_comma_list(self):
        assert _parse_sizes("4000,8000, 12000") == [4000, 8000, 12000]

    def test_inclusive_range_with_step(self):
        assert _parse_sizes("8000..32000:8000") == [8000, 16000, 24000, 32000]

    def test_bad_specs(self):
        for bad in ("a,b", "10..5:2", "1..9:0", "5..x"):
            with pytest.raises(ValueError):
                _parse_sizes(bad)


class TestTrain:
    def test_vanilla_end_to_end(self, workspace, capsys):
        out = workspace / "model.json"
        code, stdout, _ = run(
            capsys,
            "train",
            "--corpus", str(workspace / "corpus.txt"),
            "--mode", "bpe",
            "--vocab-size", "60",
            "--out", str(out),
        )
        assert code == 0
        assert "vocab 60" in stdout
        model = load_model(out)
        assert model.mode == "vanilla-bpe"
        assert model.vocab_size == 60

    def test_morph_end_to_end_json(self, workspace, capsys):
        out = workspace / "morph.json"
        code, stdout, _ = run(
            capsys,
            "train",
            "--corpus", str(workspace / "corpus.txt"),
            "--mode", "morphbpe",
            "--lexicon", str(workspace / "lexicon.tsv"),
            "--vocab-size", "60",
            "--out", str(out),
            "--json",
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["mode"] == "morph-bpe"
        assert payload["reached_target"] is True
        assert load_model(out).mode == "morph-bpe"

    def test_unreachable_target_warns_on_stderr(self, workspace, capsys):
        out = workspace / "model.json"
        code, _, stderr = run(
            capsys,
            "train",
            "--corpus", str(workspace / "corpus.txt"),
            "--mode", "bpe",
            "--vocab-size", "99999",
            "--out", str(out),
        )
        assert code == 0
        assert "unreachable" in stderr
        assert out.exists()

    def test_morphbpe_without_lexicon_is_usage_error(self, workspace, capsys):
        code, _, stderr = run(
            capsys,
            "train",
            "--corpus", str(workspace / "corpus.txt"),
            "--mode", "morphbpe",
            "--vocab-size", "60",
            "--out", str(workspace / "x.json"),
        )
        assert code == 1
        assert "requires --lexicon" in stderr

    def test_missing_corpus_is_data_error(self, workspace, capsys):
        code, _, stderr = run(
            capsys,
            "train",
            "--corpus", str(workspace / "nope.txt"),
            "--mode", "bpe",
            "--vocab-size", "60",
            "--out", str(workspace / "x.json"),
        )
        assert code == 2
        assert "error:" in stderr

    def test_deterministic_model_bytes(self, workspace, capsys):
        blobs = []
        for name in ("a.json", "b.json"):
            out = workspace / name
            code, _, _ = run(
                capsys,
                "train",
                "--corpus", str(workspace / "corpus.txt"),
                "--mode", "bpe",
                "--vocab-size", "60",
                "--out", str(out),
            )
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


@pytest.fixture()
def trained(workspace, capsys):
    out = workspace / "model.json"
    code = main(
        [
            "train",
            "--corpus", str(workspace / "corpus.txt"),
            "--mode", "bpe",
            "--vocab-size", "60",
            "--out", str(out),
        ]
    )
    assert code == 0
    capsys.readouterr()
    return workspace, out


class TestEncodeDecode:
    def test_encode_text_tokens(self, trained, capsys):
        _, model_path = trained
        code, stdout, _ = run(
            capsys, "encode", "--model", str(model_path), "--text", "abc ab"
        )
        assert code == 0
        lines = stdout.strip().splitlines()
        assert len(lines) == 2
        word, tokens = lines[0].split("\t")
        assert word == "abc"
        assert "".join(tokens.split(" ")) == "abc"

    def test_encode_ids_and_offsets(self, trained, capsys):
        _, model_path = trained
        code, stdout, _ = run(
            capsys,
            "encode", "--model", str(model_path),
            "--text", "ab", "--ids", "--offsets",
        )
        assert code == 0
        cols = stdout.strip().split("\t")
        assert len(cols) == 3
        assert all(c.isdigit() for c in cols[1].split(","))
        assert ":" in cols[2]

    def test_encode_json_shape(self, trained, capsys):
        _, model_path = trained
        code, stdout, _ = run(
            capsys,
            "encode", "--model", str(model_path), "--text", "ab", "--json",
        )
        payload = json.loads(stdout)
        (word,) = payload["words"]
        assert set(word) == {"word", "tokens", "ids", "offsets"}

    def test_encode_file_input(self, trained, capsys):
        ws, model_path = trained
        f = ws / "input.txt"
        f.write_text("ab ba", encoding="utf-8")
        code, stdout, _ = run(
            capsys, "encode", "--model", str(model_path), "--file", str(f)
        )
        assert code == 0
        assert len(stdout.strip().splitlines()) == 2

    def test_decode_round_trip(self, trained, capsys):
        _, model_path = trained
        code, stdout, _ = run(
            capsys,
            "encode", "--model", str(model_path), "--text", "abab", "--ids",
        )
        ids = stdout.strip().split("\t")[1]
        code, stdout, _ = run(
            capsys, "decode", "--model", str(model_path), "--ids", ids
        )
        assert code == 0
        assert stdout.strip() == "abab"

    def test_decode_bad_ids_is_usage_error(self, trained, capsys):
        _, model_path = trained
        code, _, stderr = run(
            capsys, "decode", "--model", str(model_path), "--ids", "1,x"
        )
        assert code == 1
        assert "bad id list" in stderr

    def test_decode_out_of_range_is_data_error(self, trained, capsys):
        _, model_path = trained
        code, _, stderr = run(
            capsys, "decode", "--model", str(model_path), "--ids", "99999"
        )
        assert code == 2


class TestEval:
    def test_fertility_json(self, trained, capsys):
        ws, model_path = trained
        code, stdout, _ = run(
            capsys,
            "eval", "fertility",
            "--model", str(model_path),
            "--data", str(ws / "corpus.txt"),
            "--json",
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["phi"] == pytest.approx(
            payload["token_count"] / payload["word_count"]
        )

    def test_edit_distance_json(self, trained, capsys):
        ws, model_path = trained
        code, stdout, _ = run(
            capsys,
            "eval", "edit",
            "--model", str(model_path),
            "--data", str(ws / "lexicon.tsv"),
            "--per-word", "--json",
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["word_count"] == len(payload["per_word"])

    def test_consistency_markdown(self, trained, capsys):
        ws, model_path = trained
        code, stdout, _ = run(
            capsys,
            "eval", "consistency",
            "--model", str(model_path),
            "--data", str(ws / "lexicon.tsv"),
            "--k", "4", "--pairs", "10", "--resamples", "3",
            "--markdown",
        )
        assert code == 0
        assert stdout.startswith("| Model |")

    def test_consistency_deterministic_stdout(self, trained, capsys):
        ws, model_path = trained
        outs = []
        for _ in range(2):
            code, stdout, _ = run(
                capsys,
                "eval", "consistency",
                "--model", str(model_path),
                "--data", str(ws / "lexicon.tsv"),
                "--k", "4", "--pairs", "10", "--resamples", "3",
                "--json",
            )
            assert code == 0
            outs.append(stdout)
        assert outs[0] == outs[1]

    def test_consistency_too_small_dataset_is_data_error(self, trained, capsys):
        ws, model_path = trained
        code, _, stderr = run(
            capsys,
            "eval", "consistency",
            "--model", str(model_path),
            "--data", str(ws / "lexicon.tsv"),
            "--k", "500",
        )
        assert code == 2
        assert "error:" in stderr


class TestSweepCommand:
    def test_improving_curve_selects_largest(self, tmp_path, capsys):
        import string

        letters = string.ascii_lowercase[:20]
        words = []
        dev_lines = []
        for i in range(10):
            word = (letters[2 * i] + letters[2 * i + 1]) * 8
            words.extend([word] * 5)
            dev_lines.append(f"{word}\t{word}\n")
        (tmp_path / "corpus.txt").write_text(" ".join(words), encoding="utf-8")
        (tmp_path / "dev.tsv").write_text("".join(dev_lines), encoding="utf-8")
        code, stdout, stderr = run(
            capsys,
            "sweep",
            "--corpus", str(tmp_path / "corpus.txt"),
            "--mode", "bpe",
            "--dev", str(tmp_path / "dev.tsv"),
            "--sizes", "31..61:10",
            "--json",
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["sizes"] == [31, 41, 51, 61]
        assert payload["selected_size"] == 61
        assert "size 31" in stderr

    def test_bad_sizes_is_data_error(self, tmp_path, capsys):
        (tmp_path / "c.txt").write_text("ab ab cd", encoding="utf-8")
        (tmp_path / "d.tsv").write_text("ab\tab\ncd\tcd\n", encoding="utf-8")
        code, _, stderr = run(
            capsys,
            "sweep",
            "--corpus", str(tmp_path / "c.txt"),
            "--mode", "bpe",
            "--dev", str(tmp_path / "d.tsv"),
            "--sizes", "10..5:1",
        )
        assert code == 2
        assert "bad size range" in stderr


class TestSplitCommand:
    def test_writes_three_files(self, workspace, capsys):
        out_dir = workspace / "splits"
        code, stdout, _ = run(
            capsys,
            "split",
            "--lexicon", str(workspace / "lexicon.tsv"),
            "--out-dir", str(out_dir),
            "--json",
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["train"] + payload["dev"] + payload["test"] == 120
        for name in ("train", "dev", "test"):
            assert (out_dir / f"{name}.tsv").exists()

    def test_auto_records_go_to_train_only(self, workspace, capsys):
        auto = workspace / "auto.tsv"
        auto.write_text("zzzqqq\tzzz|qqq\n", encoding="utf-8")
        out_dir = workspace / "splits_auto"
        code, stdout, _ = run(
            capsys,
            "split",
            "--lexicon", str(workspace / "lexicon.tsv"),
            "--out-dir", str(out_dir),
            "--auto", str(auto),
            "--json",
        )
        assert code == 0
        train_text = (out_dir / "train.tsv").read_text(encoding="utf-8")
        dev_text = (out_dir / "dev.tsv").read_text(encoding="utf-8")
        test_text = (out_dir / "test.tsv").read_text(encoding="utf-8")
        assert "zzzqqq" in train_text
        assert "zzzqqq" not in dev_text
        assert "zzzqqq" not in test_text


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        code, _, _ = run(capsys, "frobnicate")
        assert code == 1

    def test_missing_required_flag(self, capsys):
        code, _, _ = run(capsys, "train", "--mode", "bpe")
        assert code == 1

    def test_no_arguments(self, capsys):
        code, _, _ = run(capsys)
        assert code == 1
