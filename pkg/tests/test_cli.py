import json
from pathlib import Path

import pytest

from xling.cli import main
from xling.corpus import load_aligned_corpus, save_aligned_corpus
from xling.lsi import load_model
from xling.synthetic import SyntheticSpec, cipher_word, make_parallel_corpus, source_vocabulary

SPEC = SyntheticSpec(n_topics=4, words_per_topic=20, common_words=5,
                     doc_length=(30, 50), topic_alpha=0.1)


@pytest.fixture
def corpus_file(tmp_path) -> Path:
    corpus = make_parallel_corpus(30, SPEC, seed=12)
    path = tmp_path / "corpus.jsonl"
    save_aligned_corpus(corpus, path)
    return path


@pytest.fixture
def dictionary_file(tmp_path) -> Path:
    path = tmp_path / "dict.tsv"
    lines = [f"{w}\t{cipher_word(w)}" for w in source_vocabulary(SPEC)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _train(tmp_path, corpus_file, *extra) -> Path:
    model_path = tmp_path / "model.xlsm"
    rc = main(
        [
            "train",
            "--corpus", str(corpus_file),
            "--kind", "cross",
            "--k", "8",
            "--seed", "42",
            "--output", str(model_path),
            *extra,
        ]
    )
    assert rc == 0
    return model_path


class TestIngest:
    def test_pairdirs_fixture(self, tmp_path, capsys):
        root = tmp_path / "raw"
        for lang, text in (("en", "hello world"), ("ar", "marhaba dunya")):
            (root / lang).mkdir(parents=True)
            for i in range(3):
                (root / lang / f"{i:03d}.txt").write_text(f"{text} {i}", encoding="utf-8")
        out = tmp_path / "corpus.jsonl"
        rc = main(
            [
                "ingest", "--input", str(root), "--format", "pairdirs",
                "--src-lang", "en", "--tgt-lang", "ar", "--output", str(out),
            ]
        )
        assert rc == 0
        stats = json.loads(out.with_suffix(".stats.json").read_text(encoding="utf-8"))
        assert stats["pairs"] == 3
        assert stats["source"]["documents"] == 3
        assert load_aligned_corpus(out).pair_count == 3

    def test_wikidump_fixture(self, tmp_path):
        pages = []
        for name in ("A", "C"):
            pages.append(
                f"<page><title>{name}</title><revision><text>"
                f"Body of {name}. [[ar:{name}-ar]]</text></revision></page>"
            )
            pages.append(
                f"<page><title>{name}-ar</title><revision><text>"
                f"نص {name}</text></revision></page>"
            )
        pages.append(
            "<page><title>B</title><revision><text>"
            "[[ar:B-ar]] link target missing</text></revision></page>"
        )
        dump = tmp_path / "dump.xml"
        dump.write_text("<mediawiki>" + "".join(pages) + "</mediawiki>", encoding="utf-8")
        out = tmp_path / "wiki.jsonl"
        rc = main(
            [
                "ingest", "--input", str(dump), "--format", "wikidump",
                "--pivot-lang", "en", "--tgt-lang", "ar", "--output", str(out),
            ]
        )
        assert rc == 0
        corpus = load_aligned_corpus(out)
        assert corpus.pair_count == 2
        assert [d.id for d in corpus.source_docs] == ["A", "C"]
        stats = json.loads(out.with_suffix(".stats.json").read_text(encoding="utf-8"))
        assert stats["skipped_unresolved"] == 1

    def test_bad_path_exits_two_with_stderr_message(self, tmp_path, capsys):
        rc = main(
            [
                "ingest", "--input", str(tmp_path / "missing"), "--format", "jsonl",
                "--output", str(tmp_path / "o.jsonl"),
            ]
        )
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "FileNotFoundError"


class TestTrain:
    def test_cross_model_and_test_split_written(self, tmp_path, corpus_file):
        model_path = _train(tmp_path, corpus_file)
        model = load_model(model_path)
        assert model.kind == "crosslingual"
        assert model.k == 8
        test_corpus = load_aligned_corpus(Path(str(model_path) + ".test.jsonl"))
        assert test_corpus.pair_count == 3  # 10% of 30
        manifest = json.loads(
            model_path.with_suffix(".xlsm.manifest.json").read_text(encoding="utf-8")
        )
        assert manifest["command"] == "train"
        assert manifest["inputs"]
        assert len(manifest["config_hash"]) == 64

    def test_k_fifty_on_hundred_couples(self, tmp_path):
        corpus = make_parallel_corpus(100, SPEC, seed=8)
        corpus_path = tmp_path / "hundred.jsonl"
        save_aligned_corpus(corpus, corpus_path)
        model_path = tmp_path / "m50.xlsm"
        rc = main(
            [
                "train", "--corpus", str(corpus_path), "--kind", "cross",
                "--k", "50", "--output", str(model_path),
            ]
        )
        assert rc == 0
        assert load_model(model_path).k == 50

    def test_mono_model(self, tmp_path, corpus_file):
        model_path = tmp_path / "mono.xlsm"
        rc = main(
            [
                "train", "--corpus", str(corpus_file), "--kind", "mono",
                "--k", "6", "--output", str(model_path),
            ]
        )
        assert rc == 0
        assert load_model(model_path).kind == "monolingual"

    def test_oversized_k_clamped_with_warning(self, tmp_path, corpus_file):
        model_path = tmp_path / "model.xlsm"
        with pytest.warns(UserWarning, match="clamped"):
            rc = main(
                [
                    "train", "--corpus", str(corpus_file), "--kind", "cross",
                    "--k", "500", "--output", str(model_path),
                ]
            )
        assert rc == 0
        assert load_model(model_path).k <= 26  # d-1 after the 27-pair split

    def test_rerun_same_seed_byte_identical_model(self, tmp_path, corpus_file):
        a = _train(tmp_path / "a", corpus_file) if (tmp_path / "a").mkdir() is None else None
        b = _train(tmp_path / "b", corpus_file) if (tmp_path / "b").mkdir() is None else None
        assert a.read_bytes() == b.read_bytes()


class TestRetrieveEvalAlign:
    def test_retrieve_writes_ranked_lists(self, tmp_path, corpus_file, capsys):
        model_path = _train(tmp_path, corpus_file)
        out = tmp_path / "ranked.json"
        tsv = tmp_path / "ranked.tsv"
        rc = main(
            [
                "retrieve", "--model", str(model_path),
                "--corpus", str(model_path) + ".test.jsonl",
                "--n", "3", "--output", str(out), "--tsv", str(tsv),
            ]
        )
        assert rc == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert len(payload["queries"]) == 3
        assert all(len(q["entries"]) == 3 for q in payload["queries"])
        assert len(tsv.read_text(encoding="utf-8").splitlines()) == 9

    def test_eval_oracle_prints_one(self, tmp_path, corpus_file, capsys):
        model_path = _train(tmp_path, corpus_file)
        rc = main(
            ["eval", "--model", str(model_path), "--corpus", str(corpus_file), "--oracle"]
        )
        assert rc == 0
        assert "R@1 1.0" in capsys.readouterr().out

    def test_eval_recall_lines(self, tmp_path, corpus_file, capsys):
        model_path = _train(tmp_path, corpus_file)
        report = tmp_path / "report.json"
        rc = main(
            [
                "eval", "--model", str(model_path),
                "--corpus", str(model_path) + ".test.jsonl",
                "--ks", "1,5", "--output", str(report),
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "R@1" in out and "R@5" in out
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert set(payload["recall"]) == {"1", "5"}

    def test_eval_oracle_self_test_failure_exits_three(self, tmp_path, capsys):
        corpus = make_parallel_corpus(12, SPEC, seed=12)
        dup = corpus.target_docs[0]
        records = []
        for i, (s, t) in enumerate(corpus.pairs()):
            text = dup.text if i < 2 else t.text  # two identical targets
            records.append(
                {"src_id": s.id, "tgt_id": t.id, "src_text": s.text, "tgt_text": text}
            )
        path = tmp_path / "dup.jsonl"
        path.write_text("\n".join(json.dumps(r) for r in records), encoding="utf-8")
        model_path = _train(tmp_path, path)
        rc = main(["eval", "--model", str(model_path), "--corpus", str(path), "--oracle"])
        assert rc == 3
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "SelfTestError"

    def test_corrupt_model_exits_three(self, tmp_path, corpus_file, capsys):
        model_path = _train(tmp_path, corpus_file)
        blob = model_path.read_bytes()
        model_path.write_bytes(blob[: len(blob) // 2])
        rc = main(
            [
                "retrieve", "--model", str(model_path), "--corpus", str(corpus_file),
                "--output", str(tmp_path / "r.json"),
            ]
        )
        assert rc == 3
        assert json.loads(capsys.readouterr().err)["error"] == "CorruptModelError"

    def test_align_grouped_top_n(self, tmp_path):
        corpus = make_parallel_corpus(30, SPEC, seed=12)
        records = []
        for i, (s, t) in enumerate(corpus.pairs()):
            records.append(
                {
                    "src_id": s.id, "tgt_id": t.id,
                    "src_text": s.text, "tgt_text": t.text,
                    "group_key": f"2012-{(i % 2) + 1:02d}",
                }
            )
        grouped = tmp_path / "grouped.jsonl"
        grouped.write_text("\n".join(json.dumps(r) for r in records), encoding="utf-8")
        model_path = _train(tmp_path, grouped)
        out = tmp_path / "pairs.tsv"
        rc = main(
            [
                "align", "--model", str(model_path), "--corpus", str(grouped),
                "--top-n", "5", "--group-by", "month", "--output", str(out),
                "--report", str(tmp_path / "rep.json"),
                "--histogram-csv", str(tmp_path / "hist.csv"),
                "--ranges-csv", str(tmp_path / "ranges.csv"),
            ]
        )
        assert rc == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 10  # 2 months x top-5
        for line in lines:
            parts = line.split("\t")
            assert len(parts) == 4
            assert parts[3].startswith("2012-")
        report = json.loads((tmp_path / "rep.json").read_text(encoding="utf-8"))
        assert set(report["sim_ranges"]) == {"2012-01", "2012-02"}
        assert (tmp_path / "hist.csv").read_text(encoding="utf-8").startswith("bin,count")


class TestScore:
    @pytest.mark.parametrize("measure", ["bin", "bincos", "oov", "match"])
    def test_measures_produce_scores(self, tmp_path, corpus_file, dictionary_file, measure):
        out = tmp_path / f"{measure}.tsv"
        rc = main(
            [
                "score", "--corpus", str(corpus_file), "--dictionary", str(dictionary_file),
                "--measure", measure, "--output", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 30
        values = [float(line.split("\t")[2]) for line in lines]
        assert all(0.0 <= v <= 1.0 for v in values)

    def test_full_coverage_dictionary_bin_is_one(self, tmp_path, corpus_file, dictionary_file):
        out = tmp_path / "bin.tsv"
        main(
            [
                "score", "--corpus", str(corpus_file), "--dictionary", str(dictionary_file),
                "--measure", "bin", "--output", str(out),
            ]
        )
        values = [float(l.split("\t")[2]) for l in out.read_text().splitlines()]
        assert all(v == 1.0 for v in values)

    def test_pooled_variant(self, tmp_path, corpus_file, dictionary_file):
        out = tmp_path / "pooled.tsv"
        rc = main(
            [
                "score", "--corpus", str(corpus_file), "--dictionary", str(dictionary_file),
                "--measure", "bin", "--bin-variant", "pooled", "--output", str(out),
            ]
        )
        assert rc == 0

    def test_morphar_reducer_through_cli(self, tmp_path, corpus_file, dictionary_file):
        out = tmp_path / "morphar.tsv"
        rc = main(
            [
                "score", "--corpus", str(corpus_file), "--dictionary", str(dictionary_file),
                "--measure", "match", "--reducer-source", "morphar", "--output", str(out),
            ]
        )
        assert rc == 0
        assert len(out.read_text(encoding="utf-8").splitlines()) == 30

    def test_morphar_without_dictionary_exits_two(self, tmp_path, corpus_file, capsys):
        rc = main(
            [
                "train", "--corpus", str(corpus_file), "--kind", "cross",
                "--reducer-source", "morphar", "--output", str(tmp_path / "m.xlsm"),
            ]
        )
        assert rc == 2


class TestDataDir:
    def test_relative_paths_resolve_against_data_dir(self, tmp_path, corpus_file):
        rc = main(
            [
                "--data-dir", str(tmp_path),
                "train", "--corpus", str(corpus_file), "--kind", "cross",
                "--k", "6", "--output", "model-rel.xlsm",
            ]
        )
        assert rc == 0
        assert (tmp_path / "model-rel.xlsm").exists()

    def test_env_var_default(self, tmp_path, corpus_file, monkeypatch):
        monkeypatch.setenv("XLING_DATA_DIR", str(tmp_path))
        rc = main(
            [
                "train", "--corpus", str(corpus_file), "--kind", "cross",
                "--k", "6", "--output", "model-env.xlsm",
            ]
        )
        assert rc == 0
        assert (tmp_path / "model-env.xlsm").exists()


class TestConfigAndDeterminism:
    def test_config_file_overrides_defaults(self, tmp_path, corpus_file):
        model_path = _train(tmp_path, corpus_file)
        config = tmp_path / "run.cfg"
        config.write_text("n = 2\n", encoding="utf-8")
        out = tmp_path / "ranked.json"
        rc = main(
            [
                "--config", str(config),
                "retrieve", "--model", str(model_path),
                "--corpus", str(model_path) + ".test.jsonl", "--output", str(out),
            ]
        )
        assert rc == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert all(len(q["entries"]) == 2 for q in payload["queries"])

    def test_unknown_config_key_exits_two(self, tmp_path, corpus_file, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("bogus_knob = 3\n", encoding="utf-8")
        rc = main(
            [
                "--config", str(config),
                "eval", "--model", "x", "--corpus", str(corpus_file), "--oracle",
            ]
        )
        assert rc == 2

    def test_pipeline_outputs_byte_identical_across_reruns(self, tmp_path, corpus_file):
        outputs = []
        for name in ("run1", "run2"):
            base = tmp_path / name
            base.mkdir()
            model_path = _train(base, corpus_file)
            ranked = base / "ranked.json"
            main(
                [
                    "retrieve", "--model", str(model_path),
                    "--corpus", str(model_path) + ".test.jsonl",
                    "--n", "5", "--output", str(ranked),
                ]
            )
            pairs = base / "pairs.tsv"
            main(
                [
                    "align", "--model", str(model_path), "--corpus", str(corpus_file),
                    "--top-n", "10", "--output", str(pairs),
                ]
            )
            outputs.append(
                (
                    model_path.read_bytes(),
                    ranked.read_bytes(),
                    pairs.read_bytes(),
                    Path(str(model_path) + ".test.jsonl").read_bytes(),
                )
            )
        assert outputs[0] == outputs[1]
