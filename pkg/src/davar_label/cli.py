"""``davar-label`` command line.

Exit codes: 0 success, 1 domain failure (validation errors, missing keys,
unconvertible data), 2 usage or I/O failure (bad flags, unreadable or
unparseable input, bad config).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path, PurePosixPath
from typing import Any, Callable, Iterable, Sequence, TypeVar

from . import __version__
from .converters import ner_to_conll, to_coco_detection, to_icdar_spotting
from .errors import BadStageParams, DavarLabelError, ParseError, UnknownStage
from .metrics.report import evaluate
from .schema import AnnotationSet, canonical_dumps, load_annotation_file
from .stats import compute_stats, format_stats
from .tasks import TaskKind, project
from .transforms import PipelineConfig, build_pipeline, chargrid_rasterize
from .validator import ValidationReport, validate_record

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "DAVAR_LABEL_THREADS"

T = TypeVar("T")
R = TypeVar("R")


class UsageError(Exception):
    pass


def _emit(text: str) -> None:
    buf = getattr(sys.stdout, "buffer", None)
    if buf is not None:
        sys.stdout.flush()
        buf.write(text.encode("utf-8"))
        buf.flush()
    else:
        sys.stdout.write(text)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _ordered_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Map in parallel when allowed; results keep input order."""
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _load(path: str) -> AnnotationSet:
    try:
        return load_annotation_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return w, h


def _task(text: str) -> TaskKind:
    try:
        return TaskKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_vocab(path: str) -> list[str]:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read vocabulary {path}: {exc}") from exc
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    vocab = [line.removesuffix("\r") for line in lines]
    bad = [i + 1 for i, ch in enumerate(vocab) if len(ch) != 1]
    if bad:
        raise UsageError(f"{path}: line {bad[0]} must hold exactly one character")
    if not vocab:
        raise UsageError(f"{path}: vocabulary is empty")
    if len(set(vocab)) != len(vocab):
        raise UsageError(f"{path}: vocabulary has duplicate characters")
    return vocab


def _safe_relpath(name: str) -> PurePosixPath:
    parts = [p for p in PurePosixPath(name.replace("\\", "/")).parts if p not in ("/", "")]
    if not parts or any(p in (".", "..") for p in parts):
        raise DavarLabelError(f"image path {name!r} cannot be used as an output file name")
    return PurePosixPath(*parts)


# --- commands ------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    annotations = _load(args.path)
    chunks = _ordered_map(lambda kv: validate_record(*kv), list(annotations.items()))
    report = ValidationReport.from_diagnostics(d for chunk in chunks for d in chunk)
    if args.pretty:
        lines = [f"{d.severity.value:<8} {d.code:<16} {d.image_path}  {d.location}: {d.message}"
                 for d in report.diagnostics]
        lines.append(f"{report.errors} error(s), {report.warnings} warning(s)")
        _emit("\n".join(lines) + "\n")
    else:
        _emit(report.to_json_lines())
    if report.errors or (args.strict and report.warnings):
        print(f"davar-label: validation failed: {report.errors} error(s), {report.warnings} warning(s)"
              + (" (--strict)" if not report.errors else ""), file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    summary = compute_stats(_load(args.path))
    _emit(format_stats(summary) if args.pretty else canonical_dumps(summary.to_json()))
    return EXIT_OK


def _write_outputs(out_dir: Path, files: dict[PurePosixPath, str]) -> list[str]:
    written = []
    for rel in sorted(files):
        target = out_dir.joinpath(*rel.parts)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(files[rel])
        written.append(rel.as_posix())
    return written


def _unique_names(names: Iterable[tuple[str, PurePosixPath]]) -> dict[str, PurePosixPath]:
    out: dict[str, PurePosixPath] = {}
    seen: dict[PurePosixPath, str] = {}
    for key, rel in names:
        if rel in seen:
            raise DavarLabelError(f"{key!r} and {seen[rel]!r} both map to output file {rel}")
        seen[rel] = key
        out[key] = rel
    return out


def cmd_convert(args: argparse.Namespace) -> int:
    annotations = _load(args.path)
    files: dict[PurePosixPath, str] = {}
    if args.to == "coco":
        doc = to_coco_detection(annotations, args.subtask)
        files[PurePosixPath("coco.json")] = canonical_dumps(doc.to_json())
    elif args.to == "icdar":
        texts = to_icdar_spotting(annotations)
        names = _unique_names(
            (p, _safe_relpath(p).with_name("gt_" + _safe_relpath(p).stem + ".txt")) for p in texts
        )
        files = {names[p]: t for p, t in texts.items()}
    else:
        names = _unique_names((p, _safe_relpath(p).with_suffix(".conll")) for p in annotations)
        files = {names[p]: ner_to_conll(rec) for p, rec in annotations.items()}
    out_dir = Path(args.out)
    try:
        written = _write_outputs(out_dir, files)
    except OSError as exc:
        raise UsageError(f"cannot write to {out_dir}: {exc}") from exc
    sources = {}
    if args.to != "coco":
        sources = {rel.as_posix(): key for key, rel in names.items()}
    manifest = {"format": args.to, "files": written}
    if sources:
        manifest["sources"] = sources
    _emit(canonical_dumps(manifest))
    return EXIT_OK


def cmd_project(args: argparse.Namespace) -> int:
    annotations = _load(args.path)
    samples = _ordered_map(lambda rec: project(rec, args.task).to_json(), list(annotations.values()))
    _emit(canonical_dumps(dict(zip(annotations, samples))))
    return EXIT_OK


def cmd_pipeline(args: argparse.Namespace) -> int:
    try:
        config = PipelineConfig.load(args.config)
        pipeline = build_pipeline(config)
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.config}: {exc}") from exc
    except (UnknownStage, BadStageParams) as exc:
        raise UsageError(f"{args.config}: {exc}") from exc
    annotations = _load(args.path)
    results = _ordered_map(lambda kv: pipeline(kv[1], kv[0]).to_json(), list(annotations.items()))
    _emit(canonical_dumps(dict(zip(annotations, results))))
    return EXIT_OK


def _format_grid(path: str, grid: dict[str, Any]) -> str:
    w = grid["width"]
    cells = grid["cells"]
    digits = max(1, len(str(max(cells, default=0))))
    rows = [" ".join(str(c).rjust(digits) for c in cells[r * w:(r + 1) * w]) for r in range(grid["height"])]
    return f"# {path} ({w}x{grid['height']})\n" + "\n".join(rows) + "\n"


def cmd_chargrid(args: argparse.Namespace) -> int:
    vocab = _read_vocab(args.vocab)
    w, h = args.size
    annotations = _load(args.path)
    grids = _ordered_map(lambda rec: chargrid_rasterize(rec, vocab, w, h).to_json(), list(annotations.values()))
    if args.pretty:
        _emit("".join(_format_grid(p, g) for p, g in zip(annotations, grids)))
    else:
        _emit(canonical_dumps(dict(zip(annotations, grids))))
    return EXIT_OK


def _format_report(report: dict[str, Any]) -> str:
    def f(v: Any) -> str:
        return f"{'-':>6}" if v is None else f"{100 * v:6.2f}"

    lines = [f"task: {report['task']}", "",
             f"{'class':<20} {'P':>6} {'R':>6} {'F1':>6} {'AP':>6} {'tp':>5} {'fp':>5} {'fn':>5}"]
    for cat, m in report["per_class"].items():
        c = report["counts"][cat]
        lines.append(f"{cat:<20} {f(m['precision'])} {f(m['recall'])} {f(m['f1'])} {f(m['ap'])} "
                     f"{c['tp']:>5} {c['fp']:>5} {c['fn']:>5}")
    lines.append("")
    lines += [f"{k:<20} {f(v)}" for k, v in sorted(report["aggregate"].items())]
    return "\n".join(lines) + "\n"


def cmd_eval(args: argparse.Namespace) -> int:
    if not 0.0 < args.iou <= 1.0:
        raise UsageError(f"--iou must be in (0, 1], got {args.iou}")
    gt = _load(args.gt)
    pred = _load(args.pred)
    try:
        report = evaluate(args.task, gt, pred, subtask=args.subtask, iou=args.iou).to_json()
    except ValueError as exc:
        if isinstance(exc, DavarLabelError):
            raise
        raise DavarLabelError(str(exc)) from exc
    _emit(_format_report(report) if args.pretty else canonical_dumps(report))
    return EXIT_OK


# --- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="davar-label", description="Unified OCR/document annotation toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable[[argparse.Namespace], int], help: str, pretty: bool = True):
        p = sub.add_parser(name, help=help, description=help)
        p.set_defaults(func=fn)
        if pretty:
            p.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
        return p

    p = add("validate", cmd_validate, "check every record and print diagnostics as JSON lines")
    p.add_argument("path")
    p.add_argument("--strict", action="store_true", help="fail on warnings too")

    p = add("stats", cmd_stats, "summarize an annotation file")
    p.add_argument("path")

    p = add("convert", cmd_convert, "export to COCO, ICDAR or CoNLL files", pretty=False)
    p.add_argument("path")
    p.add_argument("--to", required=True, choices=("coco", "icdar", "conll"))
    p.add_argument("--subtask", type=int, default=0, help="label position used as COCO category")
    p.add_argument("--out", required=True, help="output directory")

    p = add("project", cmd_project, "print per-task samples", pretty=False)
    p.add_argument("path")
    p.add_argument("--task", required=True, type=_task)

    p = add("pipeline", cmd_pipeline, "run a transform pipeline config over every record", pretty=False)
    p.add_argument("path")
    p.add_argument("--config", required=True)

    p = add("chargrid", cmd_chargrid, "rasterize texts into character grids")
    p.add_argument("path")
    p.add_argument("--vocab", required=True, help="UTF-8 file, one character per line")
    p.add_argument("--size", required=True, type=_size, metavar="WxH")

    p = add("eval", cmd_eval, "score predictions against ground truth")
    p.add_argument("gt")
    p.add_argument("pred")
    p.add_argument("--task", required=True, type=_task)
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--subtask", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"davar-label: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DavarLabelError as exc:
        print(f"davar-label: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
