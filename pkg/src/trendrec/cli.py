"""Command-line entry point.

Exit codes: 0 on success, 1 on data or IO failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Sequence

from .errors import EmptyStore, ItemSkipped, TrendRecError
from .keywords import RakeConfig, build_item_profile
from .model import MatchMode, NoVolumePolicy, ScoringConfig, format_datetime, parse_datetime
from .recommender import (
    match_report,
    matrix_to_csv,
    recommend_top_n,
    recommendations_to_csv,
    report_to_csv,
    score_matrix,
)
from .scoring import score_all
from .sentiment import default_lexicon_provider, lexicon_provider, load_lexicon, load_sidecar, resolve_sentiments
from .store import Store, atomic_write_text, ingest_batch, load_priorities, load_trend_batches, read_items

log = logging.getLogger("trendrec")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text}")
    return value


def _datetime_arg(text: str):
    try:
        return parse_datetime(text, "--at")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _scoring_config(store: Store, args: argparse.Namespace) -> ScoringConfig:
    config = store.load_config()
    overrides = {}
    if getattr(args, "mu", None) is not None:
        overrides["mu"] = args.mu
    if getattr(args, "novolume", None) is not None:
        overrides["novolume_policy"] = NoVolumePolicy(args.novolume)
    if getattr(args, "match_mode", None) is not None:
        overrides["match_mode"] = MatchMode(args.match_mode)
    if getattr(args, "positive_multiplier", None) is not None:
        overrides["positive_multiplier"] = args.positive_multiplier
    if getattr(args, "lookback_days", None) is not None:
        overrides["lookback_days"] = args.lookback_days
    if getattr(args, "include_negative", False):
        overrides["include_negative_in_topn"] = True
    return dataclasses.replace(config, **overrides)


def _require_store(path) -> Store:
    store = Store(path)
    if not store.exists():
        raise EmptyStore(f"store {path} does not exist")
    return store


def cmd_ingest_items(args: argparse.Namespace) -> int:
    store = Store(args.store)
    items, rejected = read_items(args.items)
    config = RakeConfig(top_k_phrases=args.rake_top_k)
    entries = []
    skipped = rejected
    for item in items:
        try:
            entries.append((item, build_item_profile(item, config)))
        except ItemSkipped as exc:
            log.warning("%s", exc)
            skipped += 1
    store.save_items(entries)
    if not store.config_path.exists():
        store.save_config(ScoringConfig())
    print(f"items: {len(entries)} loaded, {skipped} skipped")
    return 0


def cmd_ingest_trends(args: argparse.Namespace) -> int:
    store = Store(args.store)
    config = _scoring_config(store, args)
    if args.sentiment == "sidecar":
        if not args.sidecar:
            raise TrendRecError("--sentiment sidecar requires --sidecar <path>")
        provider = load_sidecar(args.sidecar)
    elif args.lexicon:
        provider = lexicon_provider(load_lexicon(args.lexicon))
    else:
        provider = default_lexicon_provider()
    priorities = load_priorities(args.priorities) if args.priorities else {}
    batches = load_trend_batches(args.trends)
    profiles = store.profiles()
    for batch in batches:
        sentiments = resolve_sentiments(batch.trends, provider, config.positive_multiplier)
        summary = ingest_batch(store, batch, profiles, sentiments, priorities, config)
        label = f"{batch.source} {format_datetime(batch.captured_at)}"
        if summary.duplicate:
            print(f"{label}: matches: +0 (duplicate batch)")
        else:
            print(f"{label}: matches: +{summary.matches_added} (items newly matched: {summary.items_newly_matched})")
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    store = _require_store(args.store)
    config = _scoring_config(store, args)
    scores = score_all(store.profiles(), store, args.at, config)
    ranked = recommend_top_n(scores, args.top, config.include_negative_in_topn)
    if args.format == "csv":
        sys.stdout.write(recommendations_to_csv(ranked))
    else:
        for rank, (ref, score) in enumerate(ranked, 1):
            print(f"{rank}\t{ref}\t{score:.4f}")
    return 0


def cmd_export_matrix(args: argparse.Namespace) -> int:
    store = _require_store(args.store)
    config = _scoring_config(store, args)
    if not store.batch_keys():
        raise EmptyStore(f"store {args.store} has no trend batches")
    datetimes = sorted(set(args.at)) if args.at else store.batch_datetimes()
    matrix = score_matrix(store.profiles(), store, datetimes, config, cap=args.cap, matched_only=not args.all_items)
    atomic_write_text(Path(args.out), matrix_to_csv(matrix))
    print(f"matrix: {len(matrix.item_ids)} items x {len(matrix.datetimes)} datetimes -> {args.out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    store = _require_store(args.store)
    if not store.batch_keys():
        raise EmptyStore(f"store {args.store} has no trend batches")
    rows = match_report(store)
    atomic_write_text(Path(args.out), report_to_csv(rows))
    print(f"report: {len(rows)} rows -> {args.out}")
    return 0


def _add_scoring_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", type=_positive_float, help="decay constant (default 0.1)")
    p.add_argument("--novolume", choices=[v.value for v in NoVolumePolicy], help="impact of volume-less trends")
    p.add_argument("--lookback-days", type=int, help="ignore matches older than this many days")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trendrec", description="Social-trend infused item recommendations.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log info messages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-items", help="load an item catalog and extract keywords")
    p.add_argument("--items", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--rake-top-k", type=_positive_int, default=None)
    p.set_defaults(func=cmd_ingest_items)

    p = sub.add_parser("ingest-trends", help="match trend batches against stored items")
    p.add_argument("--trends", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--sentiment", choices=["lexicon", "sidecar"], default="lexicon")
    p.add_argument("--sidecar")
    p.add_argument("--lexicon", help="word<TAB>valence file replacing the built-in lexicon")
    p.add_argument("--priorities")
    p.add_argument("--match-mode", choices=[m.value for m in MatchMode])
    p.add_argument("--positive-multiplier", type=_positive_float)
    p.add_argument("--novolume", choices=[v.value for v in NoVolumePolicy])
    p.set_defaults(func=cmd_ingest_trends)

    p = sub.add_parser("recommend", help="top-N featured items at a datetime")
    p.add_argument("--store", required=True)
    p.add_argument("--at", required=True, type=_datetime_arg)
    p.add_argument("--top", required=True, type=_positive_int)
    p.add_argument("--include-negative", action="store_true")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("export-matrix", help="write the item x datetime score matrix as CSV")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cap", type=float)
    p.add_argument("--at", action="append", type=_datetime_arg, help="explicit column datetime (repeatable)")
    p.add_argument("--at-each-batch", action="store_true", help="one column per batch datetime (the default)")
    p.add_argument("--all-items", action="store_true", help="include never-matched items as zero rows")
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_export_matrix)

    p = sub.add_parser("report", help="write per-batch matched/newly matched counts as CSV")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "at_each_batch", False) and args.at:
        parser.error("--at and --at-each-batch are mutually exclusive")
    try:
        return args.func(args)
    except (TrendRecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
