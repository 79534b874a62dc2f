"""Command-line entry point tying the library together.

Subcommands: train, eval, search, data (validate | synth | split | corpus),
serve. Every option can also come from a key=value config file passed with
--config; explicit flags win over the file, the file wins over presets and
built-in defaults.

Exit codes: 0 success, 1 runtime or data error, 2 usage or configuration
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import datasetio, evaluator, retrieval, service
from .core import ladder_halving
from .encoder import (DESK_LADDER, TrainConfig, encode, init_model,
                      load_model, save_model, train)
from .errors import ConfigError, NestembedError

PRESETS = {
    "paper": {"ladder": (768, 512, 256, 128, 64), "batch": 128, "epochs": 1},
}


def _parse_ladder(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError:
        raise ConfigError(f"ladder must be comma-separated integers, got {text!r}") from None


def _parse_fractions(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in str(text).split(","))
    except ValueError:
        raise ConfigError(f"fractions must be comma-separated numbers, got {text!r}") from None


def _parse_range(text: str) -> tuple[float, float]:
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigError(f"score range must be lo,hi, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"score range must be numeric, got {text!r}") from None


def load_config_file(path) -> dict[str, str]:
    """key=value lines; blank lines and #-comments ignored."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"config line {lineno} is not key=value: {raw!r}")
        values[key.strip()] = value.strip()
    return values


class Resolver:
    """flag > config file > preset > default, recording what was chosen."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config_file(args.config) if getattr(args, "config", None) else {}
        preset_name = getattr(args, "preset", None)
        if preset_name is not None and preset_name not in PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}; "
                              f"available: {sorted(PRESETS)}")
        self.preset = PRESETS.get(preset_name, {})
        self.resolved: dict = {}

    def get(self, key: str, default, cast=None):
        value = getattr(self.args, key, None)
        if value is None and key in self.config:
            value = self.config[key]
        if value is None and key in self.preset:
            value = self.preset[key]
        if value is None:
            value = default
        if cast is not None and isinstance(value, str):
            value = cast(value)
        self.resolved[key] = value
        return value

    def finish(self, args: argparse.Namespace) -> dict:
        if getattr(args, "verbose", False):
            for key, value in sorted(self.resolved.items()):
                print(f"config {key}={value}", file=sys.stderr)
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.resolved.items()}


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_train(args: argparse.Namespace) -> int:
    resolver = Resolver(args)
    ladder = resolver.get("ladder", None, _parse_ladder)
    dim = resolver.get("dim", None, int)
    if ladder is None:
        ladder = ladder_halving(dim, max(dim // 8, 1)) if dim else DESK_LADDER
    if dim is not None and ladder[0] != dim:
        raise ConfigError(f"--dim {dim} disagrees with ladder {list(ladder)}")
    config = TrainConfig(
        batch_size=resolver.get("batch", 128, int),
        epochs=resolver.get("epochs", 2, int),
        learning_rate=resolver.get("lr", 1e-3, float),
        scale=resolver.get("scale", 20.0, float),
        ladder=tuple(ladder),
        max_chars=resolver.get("max_chars", 512, int),
        seed=resolver.get("seed", 0, int),
    )
    resolver.resolved["ladder"] = config.ladder
    resolved = resolver.finish(args)

    rows = datasetio.parse_csv(args.triplets, "triplet").rows
    model, report = train(init_model(config), rows, config)
    save_model(model, args.out)
    report_path = str(args.out) + ".report.json"
    _write_json(report_path, {"config": resolved, "model_path": str(args.out),
                              "report": report.to_dict()})
    print(f"trained on {len(rows)} triplets in {report.duration_seconds:.1f}s")
    for m in config.ladder:
        print(f"triplet accuracy @ {m}: {report.triplet_accuracy[m]:.4f}")
    print(f"model: {args.out}")
    print(f"report: {report_path}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    resolver = Resolver(args)
    score_range = resolver.get("score_range", datasetio.DEFAULT_SCORE_RANGE,
                               _parse_range)
    dims = resolver.get("dims", None, _parse_ladder)
    resolved = resolver.finish(args)

    model = load_model(args.model)
    rows = datasetio.parse_csv(args.pairs, "sts", score_range=score_range).rows
    pairs = evaluator.as_scored_pairs(rows)
    report = evaluator.evaluate(model, pairs, dims)
    _write_json(args.out, {"config": resolved, "report": report.to_json_dict()})
    csv_path = Path(args.out).with_suffix(".csv")
    csv_path.write_text(report.to_csv(), encoding="utf-8")
    print(f"evaluated {len(pairs)} pairs at dimensions {list(report.dimensions)}")
    print(f"report: {args.out}")
    print(f"table: {csv_path}")
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    resolver = Resolver(args)
    metric = resolver.get("metric", "cosine", str)
    final_dim = resolver.get("final_dim", None, int)
    resolver.finish(args)

    model = load_model(args.model)
    corpus = retrieval.load_corpus(args.corpus)
    retrieval.require_matching_model(corpus, model)
    if final_dim is None:
        final_dim = corpus.dim

    k = args.k
    shortlist = args.shortlist_size
    if k > corpus.size:
        print(f"warning: k={k} exceeds corpus size {corpus.size}; "
              f"returning {corpus.size} results", file=sys.stderr)
        k = corpus.size
    if shortlist > corpus.size:
        shortlist = corpus.size
    if shortlist < k:
        shortlist = k

    query = encode(model, args.query)
    config = retrieval.FunnelConfig(args.shortlist_dim, shortlist, final_dim, k)
    result = retrieval.funnel_search(query, corpus, config, metric)
    for rank, (identifier, score) in enumerate(result.entries, start=1):
        print(f"{rank:4d}  {identifier}  {score:.6f}")
    if args.with_exact:
        exact = retrieval.exact_knn(query, corpus, final_dim, metric, k)
        recall = retrieval.recall_at_k(result, exact, k)
        print(f"recall@{k}: {recall}")
    return 0


def cmd_data(args: argparse.Namespace) -> int:
    resolver = Resolver(args)
    if args.data_cmd == "validate":
        resolver.finish(args)
        result = datasetio.parse_csv(args.file, args.schema, lenient=args.lenient)
        print(f"schema: {args.schema} ok")
        print(f"rows: {result.row_count}")
        if result.quarantined:
            print(f"quarantined: {len(result.quarantined)}")
            for bad in result.quarantined:
                print(f"  line {bad.line}: {bad.message}")
        return 0

    if args.data_cmd == "synth":
        clusters = resolver.get("clusters", 8, int)
        seed = resolver.get("seed", 0, int)
        kind = resolver.get("kind", "triplets", str)
        per = resolver.get("per_cluster", 250, int)
        count = resolver.get("count", 200, int)
        resolver.finish(args)
        if kind == "triplets":
            rows = datasetio.make_synthetic_triplets(clusters, per, seed)
            datasetio.write_csv(args.out, rows, "triplet")
        elif kind == "pairs":
            rows = datasetio.make_synthetic_scored_pairs(clusters, count, seed)
            datasetio.write_csv(args.out, rows, "sts")
        else:
            raise ConfigError(f"unknown synth kind {kind!r} (triplets or pairs)")
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0

    if args.data_cmd == "split":
        fractions = resolver.get("fractions", (0.8, 0.1, 0.1), _parse_fractions)
        seed = resolver.get("seed", 0, int)
        resolver.finish(args)
        result = datasetio.parse_csv(args.file, args.schema)
        split = datasetio.deterministic_split(result.rows, fractions, seed,
                                              source=str(args.file))
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, rows in (("train", split.train), ("validation", split.validation),
                           ("test", split.test)):
            path = out_dir / f"{name}.csv"
            datasetio.write_csv(path, rows, args.schema)
            print(f"{name}: {len(rows)} rows -> {path}")
        return 0

    if args.data_cmd == "corpus":
        clusters = resolver.get("clusters", 8, int)
        docs = resolver.get("docs", 1000, int)
        seed = resolver.get("seed", 0, int)
        resolver.finish(args)
        model = load_model(args.model)
        texts = datasetio.make_synthetic_sentences(clusters, docs, seed)
        ids = [f"doc-{i:05d}" for i in range(len(texts))]
        corpus = retrieval.build_corpus(model, ids, texts)
        retrieval.save_corpus(corpus, args.out)
        print(f"wrote corpus of {corpus.size} documents at dimension "
              f"{corpus.dim} to {args.out}")
        return 0

    raise ConfigError(f"unknown data subcommand {args.data_cmd!r}")


def cmd_serve(args: argparse.Namespace) -> int:
    resolver = Resolver(args)
    listen = resolver.get("listen", service.DEFAULT_LISTEN, str)
    body_limit = resolver.get("body_limit", service.DEFAULT_BODY_LIMIT, int)
    resolver.finish(args)
    service.parse_listen(listen)   # fail fast on bad addresses
    try:
        service.serve(args.models, listen, body_limit)
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nestembed",
        description="Train, evaluate, search, and serve nested-dimension "
                    "text embeddings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--verbose", action="store_true",
                       help="print the resolved configuration")

    p_train = sub.add_parser("train", help="train an encoder on triplets")
    p_train.add_argument("--triplets", required=True, help="triplet CSV path")
    p_train.add_argument("--out", required=True, help="model file to write")
    p_train.add_argument("--dim", type=int, help="full embedding dimension")
    p_train.add_argument("--ladder", help="comma-separated dimensions, descending")
    p_train.add_argument("--batch", type=int, help="batch size (default 128)")
    p_train.add_argument("--epochs", type=int, help="training epochs (default 2)")
    p_train.add_argument("--lr", type=float, help="learning rate (default 1e-3)")
    p_train.add_argument("--scale", type=float, help="score scale (default 20)")
    p_train.add_argument("--max-chars", dest="max_chars", type=int,
                         help="truncate texts to this many characters (default 512)")
    p_train.add_argument("--seed", type=int, help="random seed (default 0)")
    p_train.add_argument("--preset", help="named defaults bundle: paper")
    common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="correlation report on scored pairs")
    p_eval.add_argument("--model", required=True, help="model file")
    p_eval.add_argument("--pairs", required=True, help="scored-pair CSV path")
    p_eval.add_argument("--dims", help="comma-separated dimensions (default: ladder)")
    p_eval.add_argument("--score-range", dest="score_range",
                        help="gold score source range lo,hi (default 0,5)")
    p_eval.add_argument("--out", required=True, help="JSON report path "
                        "(CSV written alongside)")
    common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_search = sub.add_parser("search", help="funnel search over a corpus")
    p_search.add_argument("--model", required=True, help="model file")
    p_search.add_argument("--corpus", required=True, help="corpus file")
    p_search.add_argument("--query", required=True, help="query text")
    p_search.add_argument("--shortlist-dim", dest="shortlist_dim", type=int,
                          required=True, help="dimension for stage 1")
    p_search.add_argument("--shortlist-size", dest="shortlist_size", type=int,
                          required=True, help="stage-1 survivors")
    p_search.add_argument("--k", type=int, required=True, help="results to return")
    p_search.add_argument("--final-dim", dest="final_dim", type=int,
                          help="dimension for stage 2 (default: corpus dim)")
    p_search.add_argument("--metric", help="cosine, dot, euclidean, manhattan")
    p_search.add_argument("--with-exact", dest="with_exact", action="store_true",
                          help="also run exact search and print recall")
    common(p_search)
    p_search.set_defaults(func=cmd_search)

    p_data = sub.add_parser("data", help="dataset utilities")
    data_sub = p_data.add_subparsers(dest="data_cmd", required=True)

    p_validate = data_sub.add_parser("validate", help="check a CSV against a schema")
    p_validate.add_argument("--file", required=True)
    p_validate.add_argument("--schema", required=True,
                            choices=sorted(datasetio.SCHEMAS))
    p_validate.add_argument("--lenient", action="store_true",
                            help="quarantine bad rows instead of failing")
    common(p_validate)
    p_validate.set_defaults(func=cmd_data)

    p_synth = data_sub.add_parser("synth", help="generate synthetic data")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--kind", choices=("triplets", "pairs"),
                         help="triplets (default) or scored pairs")
    p_synth.add_argument("--clusters", type=int, help="topic clusters (default 8)")
    p_synth.add_argument("--per-cluster", dest="per_cluster", type=int,
                         help="triplets per cluster (default 250)")
    p_synth.add_argument("--count", type=int, help="pair count (default 200)")
    p_synth.add_argument("--seed", type=int, help="random seed (default 0)")
    common(p_synth)
    p_synth.set_defaults(func=cmd_data)

    p_split = data_sub.add_parser("split", help="deterministic train/val/test split")
    p_split.add_argument("--file", required=True)
    p_split.add_argument("--schema", required=True, choices=sorted(datasetio.SCHEMAS))
    p_split.add_argument("--out-dir", dest="out_dir", required=True)
    p_split.add_argument("--fractions", help="train,val,test (default 0.8,0.1,0.1)")
    p_split.add_argument("--seed", type=int, help="random seed (default 0)")
    common(p_split)
    p_split.set_defaults(func=cmd_data)

    p_corpus = data_sub.add_parser("corpus", help="embed synthetic documents "
                                   "into a corpus file")
    p_corpus.add_argument("--model", required=True, help="model file")
    p_corpus.add_argument("--out", required=True, help="corpus file to write")
    p_corpus.add_argument("--docs", type=int, help="document count (default 1000)")
    p_corpus.add_argument("--clusters", type=int, help="topic clusters (default 8)")
    p_corpus.add_argument("--seed", type=int, help="random seed (default 0)")
    common(p_corpus)
    p_corpus.set_defaults(func=cmd_data)

    p_serve = sub.add_parser("serve", help="run the HTTP similarity service")
    p_serve.add_argument("--models", required=True, help="directory of .mxem files")
    p_serve.add_argument("--listen", help=f"host:port (default {service.DEFAULT_LISTEN})")
    p_serve.add_argument("--body-limit", dest="body_limit", type=int,
                         help="request body byte limit (default 65536)")
    common(p_serve)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NestembedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
