"""Command-line entry point: ``cscexport embeddings`` and ``cscexport predictions``.

Both commands write a run manifest beside the output with sha256 digests of
inputs and outputs plus a model section pinning the exact weights (weights
digest, library versions). Exit codes match the consumer toolkit: 0 on
success, 1 on a validation error, 2 on a usage error (including missing
input files).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import torch
import transformers

from cscprobe.manifest import RunManifest

from . import __version__
from .export import ExportSpec, export_embeddings, export_predictions

logger = logging.getLogger(__name__)

FORMATS = ("human", "json")


class UsageError(Exception):
    """Bad invocation (missing files, bad flag values); exit code 2."""


def _require_files(*paths) -> None:
    missing = [str(p) for p in paths if p is not None and not Path(p).is_file()]
    if missing:
        raise UsageError("input file not found: " + ", ".join(missing))


def _manifest_path(anchor) -> Path:
    anchor = Path(anchor)
    return anchor.with_name(anchor.stem + ".manifest.json")


def _emit(report_dict: dict, human_text: str, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report_dict, ensure_ascii=False, sort_keys=True))
    else:
        print(human_text)


def _write_manifest(manifest: RunManifest, report, path) -> None:
    doc = manifest.to_dict()
    doc["model"] = {
        "identifier": report.model,
        "weights_sha256": report.weights_sha256,
        "torch": torch.__version__,
        "transformers": transformers.__version__,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def _cmd_embeddings(args, argv) -> int:
    _require_files(args.vocab)
    t0 = time.perf_counter()
    manifest = RunManifest(command="embeddings", argv=argv, version=__version__)
    manifest.add_input(args.vocab)
    spec = ExportSpec(
        model=args.model, out_path=args.out, vocab_path=args.vocab, device=args.device
    )
    report = export_embeddings(spec)
    manifest.add_output(args.out)
    manifest.wall_time_s = time.perf_counter() - t0
    _write_manifest(manifest, report, _manifest_path(args.out))
    _emit(report.to_dict(), report.render(), args.format)
    return 0


def _cmd_predictions(args, argv) -> int:
    _require_files(args.corpus)
    if args.batch_size < 1:
        raise UsageError(f"--batch-size must be positive, got {args.batch_size}")
    t0 = time.perf_counter()
    manifest = RunManifest(command="predictions", argv=argv, version=__version__)
    manifest.add_input(args.corpus)
    spec = ExportSpec(
        model=args.model,
        out_path=args.out,
        corpus_path=args.corpus,
        device=args.device,
        batch_size=args.batch_size,
    )
    report = export_predictions(spec)
    manifest.add_output(args.out)
    manifest.wall_time_s = time.perf_counter() - t0
    _write_manifest(manifest, report, _manifest_path(args.out))
    _emit(report.to_dict(), report.render(), args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cscexport",
        description="Export embedding tables and prediction records from a masked language model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("embeddings", help="dump input-embedding rows to a CEMB file")
    p.add_argument("--model", required=True, help="checkpoint path or hub identifier")
    p.add_argument("--vocab", required=True, help="characters to export, one per line")
    p.add_argument("--out", required=True, help="embedding file to write")
    p.add_argument("--device", default="cpu", help="torch device (default cpu)")
    p.add_argument("--format", choices=FORMATS, default="human", help="report style on stdout")
    p.set_defaults(func=_cmd_embeddings)

    p = sub.add_parser("predictions", help="run masked + in-place passes, write records JSONL")
    p.add_argument("--model", required=True, help="checkpoint path or hub identifier")
    p.add_argument("--corpus", required=True, help="id\\tsource\\ttarget TSV, one substitution per record")
    p.add_argument("--out", required=True, help="records JSONL to write")
    p.add_argument("--device", default="cpu", help="torch device (default cpu)")
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--format", choices=FORMATS, default="human", help="report style on stdout")
    p.set_defaults(func=_cmd_predictions)

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
        print(f"run `cscexport {args.command} --help` for usage", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
