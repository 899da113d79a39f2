"""Command-line front end: ingest, train, retrieve, align, eval, score.

Every command is reproducible: identical inputs and seeds give
byte-identical outputs. Timestamps live only in run manifests. Exit codes:
0 success, 2 usage/input error, 3 data/model error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import corpus as corpus_io
from . import lsi, retrieval, wikitext
from .bidict import (
    bin_pooled,
    bin_symmetric,
    dict_cosine,
    load_dictionary,
    matching_rate,
    oov_rate,
)
from .errors import (
    ConvergenceError,
    CorpusError,
    DictionaryError,
    DimensionMismatchError,
    EmptyCandidatesError,
    MissingGoldError,
    ModelError,
    SelfTestError,
    UndefinedRateError,
    WeightDomainError,
    XlingError,
)
from .textprep import PipelineConfig, ReducerKind, load_stopwords, run_pipeline
from .vsm import build_vocabulary

_USAGE_ERRORS = (FileNotFoundError, NotADirectoryError, CorpusError, DictionaryError, ValueError)
_DATA_ERRORS = (
    ModelError,
    DimensionMismatchError,
    EmptyCandidatesError,
    MissingGoldError,
    SelfTestError,
    UndefinedRateError,
    WeightDomainError,
)
_NUMERIC_ERRORS = (ConvergenceError, FloatingPointError, ZeroDivisionError)

_REDUCER_CHOICES = [k.value for k in ReducerKind]


def _print_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(path: Path, command: str, options: dict, inputs: list[Path]) -> None:
    canonical = json.dumps({k: v for k, v in sorted(options.items())}, sort_keys=True)
    manifest = {
        "command": command,
        "options": {k: v for k, v in sorted(options.items())},
        "config_hash": hashlib.sha256(canonical.encode("utf-8")).hexdigest(),
        "inputs": {str(p): _sha256(p) for p in inputs if p is not None and p.is_file()},
        "created": datetime.now(timezone.utc).isoformat(),
    }
    path.write_text(
        json.dumps(manifest, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def _read_config_file(path: Path) -> dict:
    """key=value overrides; values are coerced to int/float/bool when possible."""
    overrides = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value")
        key, _, value = line.partition("=")
        overrides[key.strip().replace("-", "_")] = _coerce(value.strip())
    return overrides


def _coerce(value: str):
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for caster in (int, float):
        try:
            return caster(value)
        except ValueError:
            pass
    return value


_PATH_OPTIONS = (
    "input", "output", "stats", "corpus", "model", "test_output", "dictionary",
    "cache", "tsv", "source_docs", "target_docs", "report", "histogram_csv",
    "ranges_csv", "stopwords",
)


def _resolve_paths(args) -> None:
    """Anchor relative path options at --data-dir (env: XLING_DATA_DIR)."""
    base = Path(args.data_dir)
    for option in _PATH_OPTIONS:
        value = getattr(args, option, None)
        if isinstance(value, str) and value and not Path(value).is_absolute():
            setattr(args, option, str(base / value))


def _pipeline_config(args) -> PipelineConfig:
    stopwords = load_stopwords(args.stopwords) if args.stopwords else frozenset()
    return PipelineConfig(
        stopwords=stopwords,
        min_corpus_frequency=args.min_count,
        reducer_source=ReducerKind(args.reducer_source),
        reducer_target=ReducerKind(args.reducer_target),
    )


def _load_optional_dictionary(args):
    if getattr(args, "dictionary", None):
        return load_dictionary(args.dictionary)
    needs_dict = ReducerKind.MORPHAR.value in (args.reducer_source, args.reducer_target)
    if needs_dict:
        raise ValueError("morphar reducers require --dictionary")
    return None


def _preprocess_corpus(corpus, config: PipelineConfig, dictionary=None):
    src_tokens = run_pipeline(
        [d.text for d in corpus.source_docs], config, side="source", dictionary=dictionary
    )
    tgt_tokens = run_pipeline(
        [d.text for d in corpus.target_docs], config, side="target", dictionary=dictionary
    )
    return src_tokens, tgt_tokens


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    out_path = Path(args.output)
    if args.format == "wikidump":
        if not args.pivot_lang or not args.tgt_lang:
            raise ValueError("wikidump ingestion needs --pivot-lang and --tgt-lang")
        stats: dict = {}
        source, target = [], []
        for pivot, linked in wikitext.extract_comparable_articles(
            args.input, args.pivot_lang, {args.tgt_lang}, stats=stats
        ):
            source.append(
                corpus_io.Document(
                    pivot.title, args.pivot_lang, pivot.plain_text(), degenerate=True
                )
            )
            target.append(
                corpus_io.Document(
                    linked.title, args.tgt_lang, linked.plain_text(), degenerate=True
                )
            )
        corpus = corpus_io.AlignedCorpus(tuple(source), tuple(target))
        extra = {"skipped_unresolved": stats["skipped_unresolved"]}
    else:
        corpus = corpus_io.load_aligned_corpus(
            args.input, args.format, src_lang=args.src_lang, tgt_lang=args.tgt_lang
        )
        extra = {}

    corpus_io.save_aligned_corpus(corpus, out_path)
    stats_payload = {
        "pairs": corpus.pair_count,
        "source": corpus_io.document_stats(corpus.source_docs) if len(corpus) else {},
        "target": corpus_io.document_stats(corpus.target_docs) if len(corpus) else {},
        **extra,
    }
    stats_path = Path(args.stats) if args.stats else out_path.with_suffix(".stats.json")
    stats_path.write_text(
        json.dumps(stats_payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    _write_manifest(
        out_path.with_suffix(".manifest.json"),
        "ingest",
        {k: v for k, v in vars(args).items() if k != "func"},
        [Path(args.input)],
    )
    print(f"ingested {corpus.pair_count} pairs -> {out_path}")
    return 0


def _cmd_train(args) -> int:
    corpus = corpus_io.load_aligned_corpus(args.corpus)
    if args.no_split:
        train_part, test_part = corpus, None
    else:
        train_part, test_part = corpus_io.split_corpus(corpus, args.train_fraction, args.seed)

    config = _pipeline_config(args)
    dictionary = _load_optional_dictionary(args)
    src_tokens, tgt_tokens = _preprocess_corpus(train_part, config, dictionary)

    if args.kind == "cross":
        matrix = lsi.build_cross_matrix(
            src_tokens,
            tgt_tokens,
            train_part.source_docs[0].language,
            train_part.target_docs[0].language,
        )
    else:
        # Monolingual space lives in the target language: queries are
        # translated into it before projection.
        matrix = lsi.build_mono_matrix(tgt_tokens)

    model = lsi.train(matrix, args.k, seed=args.seed)

    out_path = Path(args.output)
    tmp_path = out_path.with_name(out_path.name + ".tmp")
    try:
        lsi.save_model(model, tmp_path)
        os.replace(tmp_path, out_path)
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise

    if test_part is not None:
        test_path = Path(args.test_output) if args.test_output else Path(
            str(out_path) + ".test.jsonl"
        )
        corpus_io.save_aligned_corpus(test_part, test_path)

    _write_manifest(
        out_path.with_suffix(out_path.suffix + ".manifest.json"),
        "train",
        {k: v for k, v in vars(args).items() if k != "func"},
        [Path(args.corpus)],
    )
    print(f"trained {model.kind} model: k={model.k}, |V|={len(model.vocabulary)}, d={model.n_docs}")
    return 0


def _make_provider(args) -> retrieval.TranslationProvider:
    name = args.provider
    if name == "identity":
        return retrieval.IdentityProvider()
    if name == "dictionary":
        if not args.dictionary:
            raise ValueError("--provider dictionary needs --dictionary")
        return retrieval.DictionaryProvider(load_dictionary(args.dictionary))
    if name == "cache":
        if not args.cache:
            raise ValueError("--provider cache needs --cache")
        return retrieval.FileCacheProvider(args.cache)
    raise ValueError(f"unknown provider {name!r}")


def _run_retrieval(args, model, corpus) -> list[retrieval.RankedList]:
    if model.kind == "crosslingual":
        return retrieval.retrieve_cl_lsi(
            corpus.source_docs, corpus.target_docs, model, args.n
        )
    provider = _make_provider(args)
    return retrieval.retrieve_ar_lsi(
        corpus.source_docs, corpus.target_docs, model, provider, args.n
    )


def _cmd_retrieve(args) -> int:
    model = lsi.load_model(args.model)
    corpus = corpus_io.load_aligned_corpus(args.corpus)
    ranked = _run_retrieval(args, model, corpus)
    retrieval.write_ranked_lists_json(ranked, args.output)
    if args.tsv:
        with Path(args.tsv).open("w", encoding="utf-8", newline="\n") as fh:
            for rl in ranked:
                for rank, (cid, sim) in enumerate(rl.entries, start=1):
                    fh.write(f"{rl.query_id}\t{rank}\t{cid}\t{sim:.6f}\n")
    print(f"retrieved top-{args.n} for {len(ranked)} queries -> {args.output}")
    return 0


def _cmd_align(args) -> int:
    model = lsi.load_model(args.model)
    gold = None
    if args.corpus:
        corpus = corpus_io.load_aligned_corpus(args.corpus)
        source_docs, target_docs = corpus.source_docs, corpus.target_docs
        gold = retrieval.gold_mapping(corpus)
        inputs = [Path(args.corpus)]
    else:
        if not args.source_docs or not args.target_docs:
            raise ValueError("align needs --corpus or both --source-docs/--target-docs")
        source_docs = corpus_io.load_documents(args.source_docs)
        target_docs = corpus_io.load_documents(args.target_docs)
        inputs = [Path(args.source_docs), Path(args.target_docs)]

    pairs = retrieval.align_corpora(
        source_docs,
        target_docs,
        model,
        top_n=args.top_n,
        group_by=args.group_by,
        mutual_best=args.mutual_best,
    )
    retrieval.write_alignment_tsv(pairs, args.output)
    if args.report or args.histogram_csv or args.ranges_csv:
        report = retrieval.alignment_report(pairs, gold=gold)
        if args.report:
            retrieval.write_report_json(report, args.report)
        if args.histogram_csv:
            retrieval.write_histogram_csv(report, args.histogram_csv)
        if args.ranges_csv:
            retrieval.write_ranges_csv(report, args.ranges_csv)
    _write_manifest(
        Path(args.output).with_suffix(".manifest.json"),
        "align",
        {k: v for k, v in vars(args).items() if k != "func"},
        inputs + [Path(args.model)],
    )
    print(f"aligned {len(pairs)} pairs -> {args.output}")
    return 0


def _cmd_eval(args) -> int:
    model = lsi.load_model(args.model)
    corpus = corpus_io.load_aligned_corpus(args.corpus)
    if args.oracle:
        score = retrieval.oracle_experiment(corpus.target_docs, model)
        print(f"R@1 {score}")
        if args.output:
            Path(args.output).write_text(
                json.dumps({"oracle_r_at_1": score}, sort_keys=True) + "\n", encoding="utf-8"
            )
        return 0

    ks = sorted({int(k) for k in args.ks.split(",")})
    args.n = max(args.n, max(ks))
    ranked = _run_retrieval(args, model, corpus)
    report = retrieval.evaluate_retrieval(ranked, retrieval.gold_mapping(corpus), ks)
    for k in ks:
        print(f"R@{k} {report.recall[k]}")
    if args.output:
        retrieval.write_report_json(report, args.output)
    return 0


def _cmd_score(args) -> int:
    corpus = corpus_io.load_aligned_corpus(args.corpus)
    dictionary = load_dictionary(args.dictionary)
    config = _pipeline_config(args)
    src_tokens, tgt_tokens = _preprocess_corpus(corpus, config, dictionary)

    if args.measure == "bincos":
        source_stats = build_vocabulary(src_tokens)
        target_stats = build_vocabulary(tgt_tokens)

    def score_pair(d_s, d_t) -> float:
        if args.measure == "bin":
            if args.bin_variant == "pooled":
                return bin_pooled(d_s, d_t, dictionary)
            return bin_symmetric(d_s, d_t, dictionary)
        if args.measure == "bincos":
            return dict_cosine(d_s, d_t, dictionary, source_stats, target_stats)
        if args.measure == "oov":
            return oov_rate(d_s, d_t, dictionary)
        if args.measure == "match":
            return matching_rate(d_s, d_t, dictionary)
        raise ValueError(f"unknown measure {args.measure!r}")

    with Path(args.output).open("w", encoding="utf-8", newline="\n") as fh:
        for (src, tgt), d_s, d_t in zip(corpus.pairs(), src_tokens, tgt_tokens):
            fh.write(f"{src.id}\t{tgt.id}\t{score_pair(d_s, d_t):.6f}\n")
    print(f"scored {corpus.pair_count} pairs with {args.measure} -> {args.output}")
    return 0


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-count", type=int, default=1, help="minimum corpus frequency")
    parser.add_argument("--stopwords", default=None, help="stopword file (one per line)")
    parser.add_argument(
        "--reducer-source", choices=_REDUCER_CHOICES, default="identity",
        help="word reducer for the source side",
    )
    parser.add_argument(
        "--reducer-target", choices=_REDUCER_CHOICES, default="identity",
        help="word reducer for the target side",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xling",
        description="Cross-lingual document similarity, retrieval and alignment.",
    )
    parser.add_argument(
        "--config",
        default=None,
        help="key=value file overriding flag defaults (flags still win)",
    )
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("XLING_DATA_DIR", "."),
        help="base directory for relative data paths (env: XLING_DATA_DIR)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert raw corpora to jsonl + stats")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["pairdirs", "jsonl", "wikidump"], required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--stats", default=None)
    p.add_argument("--src-lang", default=None)
    p.add_argument("--tgt-lang", default=None)
    p.add_argument("--pivot-lang", default=None, help="pivot language for wikidump")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("train", help="split, preprocess and train an LSI model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", choices=["mono", "cross"], default="cross")
    p.add_argument("--k", type=int, default=lsi.DEFAULT_RANK)
    p.add_argument("--train-fraction", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--no-split", action="store_true", help="train on the whole corpus")
    p.add_argument("--output", required=True)
    p.add_argument("--test-output", default=None, help="held-out pairs (default <output>.test.jsonl)")
    p.add_argument("--dictionary", default=None, help="needed by morphar reducers")
    _add_pipeline_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("retrieve", help="rank target documents for each source query")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True, help="jsonl pairs: queries + candidates")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--output", required=True, help="ranked lists JSON")
    p.add_argument("--tsv", default=None, help="optional ranked lists TSV")
    p.add_argument("--provider", choices=["identity", "dictionary", "cache"], default="identity")
    p.add_argument("--dictionary", default=None)
    p.add_argument("--cache", default=None)
    p.set_defaults(func=_cmd_retrieve)

    p = sub.add_parser("align", help="align two unpaired corpora in LSI space")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", default=None, help="aligned jsonl (sides used, gold kept)")
    p.add_argument("--source-docs", default=None, help="flat jsonl documents")
    p.add_argument("--target-docs", default=None, help="flat jsonl documents")
    p.add_argument("--top-n", type=int, default=15)
    p.add_argument("--group-by", default=None, help="set to group on group_key (e.g. month)")
    p.add_argument("--mutual-best", action="store_true")
    p.add_argument("--output", required=True, help="aligned pairs TSV")
    p.add_argument("--report", default=None, help="report JSON")
    p.add_argument("--histogram-csv", default=None)
    p.add_argument("--ranges-csv", default=None)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("eval", help="recall metrics or the oracle self-test")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--ks", default="1,5")
    p.add_argument("--oracle", action="store_true", help="identity-query self-test")
    p.add_argument("--output", default=None)
    p.add_argument("--provider", choices=["identity", "dictionary", "cache"], default="identity")
    p.add_argument("--dictionary", default=None)
    p.add_argument("--cache", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("score", help="dictionary-based comparability measures")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dictionary", required=True)
    p.add_argument("--measure", choices=["bin", "bincos", "oov", "match"], required=True)
    p.add_argument(
        "--bin-variant", choices=["symmetric", "pooled"], default="symmetric",
        help="'symmetric' averages both directions; 'pooled' counts both sides over total size",
    )
    p.add_argument("--output", required=True)
    _add_pipeline_flags(p)
    p.set_defaults(func=_cmd_score)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        overrides = _read_config_file(Path(args.config))
        unknown = [k for k in overrides if not hasattr(args, k)]
        if unknown:
            _print_error(ValueError(f"unknown config keys: {', '.join(sorted(unknown))}"))
            return 2
        # Config fills in values the command line did not set explicitly;
        # flags still win.
        given = {
            token[2:].split("=", 1)[0].replace("-", "_")
            for token in (argv if argv is not None else sys.argv[1:])
            if token.startswith("--")
        }
        for key, value in overrides.items():
            if key not in given:
                setattr(args, key, value)
    _resolve_paths(args)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        _print_error(exc)
        return 4
    except _DATA_ERRORS as exc:
        _print_error(exc)
        return 3
    except _USAGE_ERRORS as exc:
        _print_error(exc)
        return 2
    except XlingError as exc:
        _print_error(exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
