"""Command-line entry point: ``headtrend validate|run|inspect <config>``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from headtrend.config import ConfigError, RunConfig, load_config, validate_config
from headtrend.corpus import sliding_windows
from headtrend.eval import (
    ExperimentReport, resolve_chronological, run_experiment, tokenize_corpus,
    walk_forward_backtest, fit_pipeline,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

logger = logging.getLogger("headtrend")


def _color_enabled(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _bold(text: str, stream=sys.stdout) -> str:
    return f"\033[1m{text}\033[0m" if _color_enabled(stream) else text


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def write_report(report: ExperimentReport, directory: Path) -> None:
    write_atomic(directory / "report.txt", report.to_text(timestamp=_timestamp()))
    write_atomic(directory / "report.csv", report.to_csv())


def _write_error_report(directory: Path, message: str) -> None:
    write_atomic(directory / "report.txt",
                 f"# generated {_timestamp()}\nERROR: {message}\n")
    write_atomic(directory / "report.csv",
                 "embedding,model,accuracy,tp,fp,tn,fn,n_test,baseline,config_digest\n"
                 "ERROR,ERROR,ERROR,,,,,,,\n")


def _load(config_path: str) -> RunConfig:
    raw = load_config(config_path)
    problems = validate_config(raw, Path(config_path).parent)
    if problems:
        raise ConfigError("\n".join(problems))
    return RunConfig.from_file(config_path)


def cmd_validate(config_path: str) -> int:
    try:
        raw = load_config(config_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems = validate_config(raw, Path(config_path).parent)
    for p in problems:
        print(p)
    if problems:
        return EXIT_CONFIG
    print("OK")
    return EXIT_OK


def cmd_run(config_path: str) -> int:
    try:
        cfg = _load(config_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = cfg.output_dir
    write_atomic(out / "resolved-config.json", cfg.to_json())
    try:
        corpus = cfg.corpus()
        grid = cfg.grid()
        if cfg.split["type"] == "walk_forward":
            s = cfg.split
            result = walk_forward_backtest(corpus, grid, s["train_months"], s["test_months"],
                                           s["step_months"])
            for i, rep in enumerate(result.reports, start=1):
                write_report(rep, out / f"window_{i:02d}")
            report = result.aggregate
        else:
            report = run_experiment(corpus, grid)
    except Exception as exc:
        logger.debug("pipeline failure", exc_info=True)
        _write_error_report(out, f"{type(exc).__name__}: {exc}")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    write_report(report, out)
    text = report.to_text()
    best = max((r for r in report.rows if r.ok), key=lambda r: r.result.accuracy, default=None)
    for line in text.splitlines():
        if best is not None and line.endswith(best.config_digest):
            line = _bold(line)
        print(line)
    print(f"reports written to {out}")
    failed = [r for r in report.rows if not r.ok]
    return EXIT_RUNTIME if failed else EXIT_OK


def _training_side(cfg: RunConfig, corpus):
    """Token streams of the first training period plus the full tokenized corpus."""
    tokens = tokenize_corpus(corpus, cfg.preprocess_config())
    if cfg.split["type"] == "walk_forward":
        s = cfg.split
        w = sliding_windows(corpus, s["train_months"], s["test_months"], s["step_months"])[0]
        return [tokens[i] for i in w.train_days], tokens
    train, _ = resolve_chronological(corpus, cfg.split)
    return tokens[: len(train)], tokens


def cmd_inspect(config_path: str, what: str, day: str | None = None, top: int = 20,
                embedding: str | None = None) -> int:
    try:
        cfg = _load(config_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if what not in ("vocab", "windows", "features"):
        print(f"error: unknown inspect target {what!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        corpus = cfg.corpus()
        if what == "windows":
            s = cfg.split
            if s["type"] != "walk_forward":
                s = {"train_months": 9, "test_months": 3, "step_months": 3, **s}
            windows = sliding_windows(corpus, s["train_months"], s["test_months"], s["step_months"])
            print(f"{'#':>3} {'train_start':<11} {'train_end':<11} {'test_start':<11} "
                  f"{'test_end':<11} {'n_train':>7} {'n_test':>6}")
            for i, w in enumerate(windows, start=1):
                flag = "  short" if w.short_test else ""
                print(f"{i:>3} {w.train_start!s:<11} {w.train_end!s:<11} {w.test_start!s:<11} "
                      f"{w.test_end!s:<11} {len(w.train_days):>7} {len(w.test_days):>6}{flag}")
            return EXIT_OK
        grid = cfg.grid()
        names = [n for n, _ in grid.embeddings]
        name = embedding or names[0]
        if name not in names:
            print(f"error: no embedding named {name!r}", file=sys.stderr)
            return EXIT_CONFIG
        train_tokens, tokens = _training_side(cfg, corpus)
        pipe = fit_pipeline(grid, name, train_tokens)
        if what == "vocab":
            v = pipe.vocab
            print(f"embedding {name}: {len(v)} terms")
            print(f"{'rank':>5} {'term':<24} {'count':>7} {'df':>6}")
            for i in range(min(top, len(v))):
                print(f"{i + 1:>5} {v.terms[i]:<24} {v.corpus_count[i]:>7} {v.doc_freq[i]:>6}")
            return EXIT_OK
        dates = corpus.dates
        idx = dates.index(date.fromisoformat(day)) if day else 0
        vec = pipe.transform([tokens[idx]])[0]
        print(f"date {dates[idx]} embedding {name}")
        print(f"dimension {vec.size}")
        print(f"nonzeros {int(np.count_nonzero(vec))}")
        print(f"sum {vec.sum():.6g}")
        print(f"norm {np.linalg.norm(vec):.6g}")
        return EXIT_OK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="headtrend", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", help="check a config file")
    p.add_argument("config")
    p = sub.add_parser("run", help="run the experiment grid or backtest")
    p.add_argument("config")
    p = sub.add_parser("inspect", help="show vocabulary, windows or one day's features")
    p.add_argument("config")
    p.add_argument("what", metavar="{vocab,windows,features}")
    p.add_argument("--date", dest="day")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--embedding")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate":
        return cmd_validate(args.config)
    if args.command == "run":
        return cmd_run(args.config)
    return cmd_inspect(args.config, args.what, args.day, args.top, args.embedding)


if __name__ == "__main__":
    sys.exit(main())
