"""Command-line entry point wiring every module into reproducible commands.

Subcommands:

    build-glyph-probe     component-containment dataset from a decomposition table
    build-phonetic-probe  shared-pronunciation dataset from a pinyin table
    random-embeddings     seeded Gaussian control embedding table
    train-probe           train the MLP probe on a dataset + embeddings
    eval-probe            accuracy of a saved probe on a dataset's test split
    cccr                  coverage rate and guessing baseline from predictions
    isolate               remove train/test correction-pair overlap
    score                 sentence-level detection/correction metrics

Every command takes its randomness from an explicit ``--seed`` (where it
uses any), writes a run manifest beside its outputs, and exits 0 on
success, 1 on a validation error, 2 on a usage error (including missing
input files). ``CSCPROBE_THREADS`` caps BLAS worker threads; it must be set
before the process imports numpy, which the console script guarantees.
"""

from __future__ import annotations

import os

_THREADS_VAR = "CSCPROBE_THREADS"
_raw_threads = os.environ.get(_THREADS_VAR, "").strip()
if _raw_threads.isdigit() and int(_raw_threads) >= 1:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(_var, _raw_threads)

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__, chars, coverage, datasets, embeddings, isolation, metrics, probe
from .manifest import RunManifest

logger = logging.getLogger(__name__)

FORMATS = ("human", "json")


class UsageError(Exception):
    """Bad invocation (missing files, contradictory flags); exit code 2."""


def _require_files(*paths) -> None:
    missing = [str(p) for p in paths if p is not None and not Path(p).is_file()]
    if missing:
        raise UsageError("input file not found: " + ", ".join(missing))


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(report_dict: dict, human_text: str, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report_dict, ensure_ascii=False, sort_keys=True))
    else:
        print(human_text)


def _manifest_path(anchor) -> Path:
    anchor = Path(anchor)
    return anchor.with_name(anchor.stem + ".manifest.json")


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"--seeds expects comma-separated integers, got {text!r}") from exc
    if not seeds:
        raise UsageError("--seeds expects at least one integer")
    if any(s < 0 for s in seeds):
        raise UsageError("seeds must be unsigned")
    return seeds


def _load_vocab(args) -> chars.Vocabulary:
    stop = chars.load_stoplist(args.stoplist) if args.stoplist else ()
    return chars.load_vocabulary(args.vocab, stop_chars=stop)


def _cmd_build_glyph(args, argv) -> int:
    _require_files(args.decomposition, args.vocab, args.stoplist)
    t0 = time.perf_counter()
    manifest = RunManifest(command="build-glyph-probe", argv=argv, seeds=[args.seed])
    for p in (args.decomposition, args.vocab, args.stoplist):
        if p:
            manifest.add_input(p)
    decomp = chars.load_decomposition(args.decomposition)
    vocab = _load_vocab(args)
    ds = datasets.build_glyph_dataset(decomp, vocab, args.seed, test_fraction=args.test_fraction)
    report = datasets.validate_dataset(ds, decomp)
    datasets.write_dataset(ds, args.out)
    manifest.add_output(args.out)
    manifest.wall_time_s = time.perf_counter() - t0
    manifest.write(_manifest_path(args.out))
    _emit(report.to_dict(), _render_validation(report), args.format)
    return 0 if report.valid else 1


def _cmd_build_phonetic(args, argv) -> int:
    _require_files(args.pinyin, args.vocab, args.stoplist)
    t0 = time.perf_counter()
    manifest = RunManifest(command="build-phonetic-probe", argv=argv, seeds=[args.seed])
    for p in (args.pinyin, args.vocab, args.stoplist):
        if p:
            manifest.add_input(p)
    pinyin = chars.load_pinyin(args.pinyin)
    vocab = _load_vocab(args)
    ds = datasets.build_phonetic_dataset(
        pinyin,
        vocab,
        args.seed,
        test_fraction=args.test_fraction,
        tone_sensitive=args.tone_sensitive,
    )
    report = datasets.validate_dataset(ds, pinyin, tone_sensitive=args.tone_sensitive)
    datasets.write_dataset(ds, args.out)
    manifest.add_output(args.out)
    manifest.wall_time_s = time.perf_counter() - t0
    manifest.write(_manifest_path(args.out))
    _emit(report.to_dict(), _render_validation(report), args.format)
    return 0 if report.valid else 1


def _render_validation(report) -> str:
    d = report.to_dict()
    lines = [
        f"kind                 {d['kind']}",
        f"pairs                {d['n_pairs']} ({d['n_positive']} positive, {d['n_negative']} negative)",
        f"balanced             {d['balanced']}",
        f"split violations     {len(d['split_violations'])}",
        f"label violations     {len(d['label_violations'])}",
        f"duplicate triples    {d['duplicate_triples']}",
        f"left in both splits  {d['left_in_both_splits']}",
        f"valid                {d['valid']}",
    ]
    return "\n".join(lines)


def _cmd_random_embeddings(args, argv) -> int:
    _require_files(args.vocab, args.stoplist)
    if args.dim < 1:
        raise UsageError(f"--dim must be >= 1, got {args.dim}")
    t0 = time.perf_counter()
    manifest = RunManifest(command="random-embeddings", argv=argv, seeds=[args.seed])
    manifest.add_input(args.vocab)
    if args.stoplist:
        manifest.add_input(args.stoplist)
    vocab = _load_vocab(args)
    table = embeddings.random_table(vocab, args.dim, args.seed)
    embeddings.write_embeddings(table, args.out)
    manifest.add_output(args.out)
    manifest.wall_time_s = time.perf_counter() - t0
    manifest.write(_manifest_path(args.out))
    print(f"wrote {len(table.chars)} x {table.dim} embeddings to {args.out}")
    return 0


def _cmd_train_probe(args, argv) -> int:
    _require_files(args.dataset, args.embeddings)
    if args.seeds is not None and args.out_model is not None:
        raise UsageError("--seeds trains several probes; use --out-report, not --out-model")
    seeds = _parse_seeds(args.seeds) if args.seeds is not None else [args.seed]
    t0 = time.perf_counter()
    manifest = RunManifest(command="train-probe", argv=argv, seeds=seeds)
    manifest.add_input(args.dataset)
    manifest.add_input(args.embeddings)
    ds = datasets.read_dataset(args.dataset)
    table = embeddings.read_embeddings(args.embeddings)
    config = probe.ProbeConfig(
        layers=args.layers,
        seed=seeds[0],
        hidden_dim=args.hidden_dim,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
    )
    out_report = Path(args.out_report) if args.out_report else Path("probe.train.json")
    if args.seeds is not None:
        agg = probe.train_multi_seed(config, seeds, ds, table)
        _write_json(agg, out_report)
        manifest.add_output(out_report)
        manifest.wall_time_s = time.perf_counter() - t0
        manifest.write(_manifest_path(out_report))
        spread = (agg["max"] - agg["min"]) if agg["max"] is not None else None
        human = (
            f"seeds          {','.join(str(s) for s in seeds)}\n"
            f"mean accuracy  {agg['mean']:.4f}\n"
            f"std            {agg['std']:.4f}\n"
            f"spread         {spread:.4f}"
        )
        _emit(agg, human, args.format)
        return 0
    model, report = probe.train_probe(config, ds, table)
    out_model = Path(args.out_model) if args.out_model else Path("probe.cmlp")
    probe.save_model(model, out_model)
    _write_json(report.to_dict(), out_report)
    manifest.add_output(out_model)
    manifest.add_output(out_report)
    manifest.wall_time_s = time.perf_counter() - t0
    manifest.write(_manifest_path(out_model))
    d = report.to_dict()
    human = (
        f"epochs          {len(report.epoch_losses)}\n"
        f"final loss      {report.epoch_losses[-1]:.6f}\n"
        f"final accuracy  "
        + (f"{report.final_accuracy:.4f}" if report.final_accuracy is not None else "n/a (no test split)")
    )
    _emit(d, human, args.format)
    return 0


def _cmd_eval_probe(args, argv) -> int:
    _require_files(args.model, args.dataset, args.embeddings)
    t0 = time.perf_counter()
    manifest = RunManifest(command="eval-probe", argv=argv)
    for p in (args.model, args.dataset, args.embeddings):
        manifest.add_input(p)
    model = probe.load_model(args.model)
    ds = datasets.read_dataset(args.dataset)
    table = embeddings.read_embeddings(args.embeddings)
    accuracy = probe.evaluate_probe(model, ds, table)
    result = {"accuracy": accuracy, "n_test_pairs": len(ds.split_pairs("test"))}
    human = f"test accuracy  {accuracy:.4f}  ({result['n_test_pairs']} pairs)"
    if args.out:
        _write_json(result, args.out)
        manifest.add_output(args.out)
        manifest.wall_time_s = time.perf_counter() - t0
        manifest.write(_manifest_path(args.out))
    _emit(result, human, args.format)
    return 0


def _cmd_cccr(args, argv) -> int:
    _require_files(args.predictions)
    t0 = time.perf_counter()
    manifest = RunManifest(command="cccr", argv=argv)
    manifest.add_input(args.predictions)
    records = coverage.read_records(args.predictions)
    report = coverage.compute_cccr(records, baseline_mode=args.baseline_mode)
    if args.out:
        _write_json(report.to_dict(), args.out)
        manifest.add_output(args.out)
        manifest.wall_time_s = time.perf_counter() - t0
        manifest.write(_manifest_path(args.out))
    _emit(report.to_dict(), report.render(), args.format)
    return 0


def _cmd_isolate(args, argv) -> int:
    _require_files(args.train, args.test)
    t0 = time.perf_counter()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(command="isolate", argv=argv)
    manifest.add_input(args.train)
    manifest.add_input(args.test)
    train = isolation.read_corpus(args.train)
    test = isolation.read_corpus(args.test)
    isolated_train, deduped_test, stats = isolation.isolate(train, test)
    train_out = out_dir / "isolated_train.tsv"
    test_out = out_dir / "deduped_test.tsv"
    stats_out = out_dir / "isolation_stats.json"
    isolation.write_corpus(isolated_train, train_out)
    isolation.write_corpus(deduped_test, test_out)
    _write_json(stats.to_dict(), stats_out)
    for p in (train_out, test_out, stats_out):
        manifest.add_output(p)
    manifest.wall_time_s = time.perf_counter() - t0
    manifest.write(out_dir / "isolate.manifest.json")
    _emit(stats.to_dict(), stats.render(), args.format)
    return 0


def _cmd_score(args, argv) -> int:
    _require_files(args.corpus)
    t0 = time.perf_counter()
    manifest = RunManifest(command="score", argv=argv)
    manifest.add_input(args.corpus)
    corpus = metrics.read_scored_corpus(args.corpus)
    report = metrics.score(corpus)
    if args.out:
        _write_json(report.to_dict(), args.out)
        manifest.add_output(args.out)
        manifest.wall_time_s = time.perf_counter() - t0
        manifest.write(_manifest_path(args.out))
    _emit(report.to_dict(), report.render(), args.format)
    return 0


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="human", help="report style on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cscprobe",
        description="Probing and leakage-audited evaluation toolkit for Chinese spell checking.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("build-glyph-probe", help="build a component-containment probe dataset")
    p.add_argument("--decomposition", required=True, help="char\\tcomponents table")
    p.add_argument("--vocab", required=True, help="one character per line")
    p.add_argument("--stoplist", help="characters to exclude, one per line")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--out", required=True, help="dataset TSV to write")
    _add_format(p)
    p.set_defaults(func=_cmd_build_glyph)

    p = sub.add_parser("build-phonetic-probe", help="build a shared-pronunciation probe dataset")
    p.add_argument("--pinyin", required=True, help="char\\ttoned1,toned2 table")
    p.add_argument("--vocab", required=True)
    p.add_argument("--stoplist")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--tone-sensitive", action="store_true", help="require matching tones")
    p.add_argument("--out", required=True)
    _add_format(p)
    p.set_defaults(func=_cmd_build_phonetic)

    p = sub.add_parser("random-embeddings", help="write a seeded Gaussian control table")
    p.add_argument("--vocab", required=True)
    p.add_argument("--stoplist")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="embedding file to write")
    p.set_defaults(func=_cmd_random_embeddings)

    p = sub.add_parser("train-probe", help="train the MLP probe")
    p.add_argument("--dataset", required=True, help="probe dataset TSV")
    p.add_argument("--embeddings", required=True, help="embedding file")
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--hidden-dim", type=int, default=256)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", help="comma-separated seeds; train one probe per seed and report mean/spread")
    p.add_argument("--out-model", help="checkpoint path (default probe.cmlp)")
    p.add_argument("--out-report", help="report JSON path (default probe.train.json)")
    _add_format(p)
    p.set_defaults(func=_cmd_train_probe)

    p = sub.add_parser("eval-probe", help="accuracy of a saved probe on the test split")
    p.add_argument("--model", required=True, help="checkpoint file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", help="optional report JSON path")
    _add_format(p)
    p.set_defaults(func=_cmd_eval_probe)

    p = sub.add_parser("cccr", help="coverage rate over prediction records")
    p.add_argument("--predictions", required=True, help="JSONL prediction records")
    p.add_argument("--baseline-mode", choices=coverage.BASELINE_MODES, default="printed")
    p.add_argument("--out", help="optional report JSON path")
    _add_format(p)
    p.set_defaults(func=_cmd_cccr)

    p = sub.add_parser("isolate", help="remove train/test correction-pair overlap")
    p.add_argument("--train", required=True, help="train corpus TSV")
    p.add_argument("--test", required=True, help="test corpus TSV")
    p.add_argument("--out-dir", required=True)
    _add_format(p)
    p.set_defaults(func=_cmd_isolate)

    p = sub.add_parser("score", help="sentence-level detection/correction metrics")
    p.add_argument("--corpus", required=True, help="id\\tsource\\tgold\\tpredicted TSV")
    p.add_argument("--out", help="optional report JSON path")
    _add_format(p)
    p.set_defaults(func=_cmd_score)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; normalize --version/-h to 0
        return int(exc.code or 0)
    try:
        return args.func(args, list(argv))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run `cscprobe {args.command} --help` for usage", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FloatingPointError) as exc:
        # KeyError reprs its argument; unwrap for readability
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
