"""``changectx`` command line: mine, encode, slice, generate, eval.

Exit status: 0 on success, 1 for usage or configuration errors, 2 for data
errors (missing inputs, unreadable repositories, corrupt corpora).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Optional, Sequence

from .config import FIELD_HELP, ConfigError, RunConfig, read_config_file, resolve
from .encoder import encode_change
from .miner import (
    CorpusStats,
    NotARepository,
    atomic_write_text,
    mine_records,
    read_corpus,
    read_repo_list,
    write_corpus,
)
from .pdg import OUTPUT
from .pipeline import analyze
from .retrieval import RetrievalIndex, chronological_split, evaluate
from .slicer import slice_distances

log = logging.getLogger("changectx")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt_default(value) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration (flags > --config file > defaults)")
    g.add_argument("--config", metavar="FILE", help="flat key=value file with any of the fields below")
    defaults = RunConfig()
    for f in fields(RunConfig):
        default = _fmt_default(getattr(defaults, f.name))
        g.add_argument(
            "--" + f.name.replace("_", "-"),
            dest=f.name,
            default=None,
            metavar="VALUE",
            help=f"{FIELD_HELP[f.name]} (default: {default})",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="changectx", description="Dependence-aware change representations for commit message generation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("mine", help="mine and filter commits from a list of local repositories")
    p.add_argument("repo_list", help="file with one repository path per line, '#' comments allowed")
    p.add_argument("--out", required=True, help="corpus file to write (JSON lines)")
    _add_config_flags(p)

    p = sub.add_parser("encode", help="attach context-encoded representations to a corpus")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    _add_config_flags(p)

    p = sub.add_parser("slice", help="print PDGs and slice ids for one commit")
    src = p.add_argument_group("commit source: a before/after file pair or a corpus entry")
    src.add_argument("--before", help="before-version Java file ('' or missing means added file)")
    src.add_argument("--after", help="after-version Java file")
    src.add_argument("--corpus")
    src.add_argument("--commit", help="commit id (prefix) inside --corpus")
    _add_config_flags(p)

    p = sub.add_parser("generate", help="retrieve a message for each test commit from the training split")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="predictions file (JSON lines)")
    p.add_argument("--train-on-train", action="store_true", help="query the training split with itself")
    _add_config_flags(p)

    p = sub.add_parser("eval", help="score retrieval and write the breakdown report")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="report file (JSON lines); a table goes to stdout")
    p.add_argument("--train-on-train", action="store_true", help="query the training split with itself")
    p.add_argument(
        "--breakdowns",
        default="ablation,depth,buckets",
        help="comma separated subset of ablation, depth, buckets, or 'none' (default: all)",
    )
    _add_config_flags(p)
    return parser


def _config(args) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    flags = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    return resolve(file_values, flags)


def _load(path: str):
    if not Path(path).is_file():
        raise DataError(f"no such corpus: {path}")
    corpus = read_corpus(path)
    if corpus.skipped:
        log.warning("%s: skipped %d malformed line(s)", path, corpus.skipped)
    return corpus.records


def cmd_mine(args, cfg: RunConfig) -> int:
    list_path = Path(args.repo_list)
    if not list_path.is_file():
        raise DataError(f"no such repo list: {list_path}")
    repos = read_repo_list(list_path)
    try:
        records = [r for r in mine_records(repos, **cfg.filter_bounds()) if r.kept]
    except NotARepository as exc:
        raise DataError(f"not a git repository: {exc}") from exc
    write_corpus(args.out, records)
    sys.stdout.write(CorpusStats.from_records(records).table())
    return EXIT_OK


def cmd_encode(args, cfg: RunConfig) -> int:
    records = _load(args.corpus)
    sc = cfg.slice_config()
    for rec in records:
        rec.representation = None
        try:
            commit = analyze(rec.files, output_deps=OUTPUT in sc.edge_kinds)
            rep = encode_change(commit.before_pdg, commit.after_pdg, commit.changeset, sc, cfg.token_budget)
        except Exception as exc:  # keep going; the record carries the reason
            rec.diagnostics.append(f"EncodeFailure: {type(exc).__name__}: {exc}")
            continue
        notes = list(rep.diagnostics) + list(commit.diagnostics)
        rec.diagnostics.extend(n for n in notes if n not in rec.diagnostics)
        if rep.entries:
            rec.representation = rep.render()
    write_corpus(args.out, records)
    return EXIT_OK


def _slice_inputs(args):
    if args.corpus:
        if not args.commit:
            raise UsageError("--corpus needs --commit")
        hits = [r for r in _load(args.corpus) if r.commit_id.startswith(args.commit)]
        if len(hits) != 1:
            raise DataError(f"{len(hits)} records match commit {args.commit!r}")
        return hits[0].files
    if not (args.before or args.after):
        raise UsageError("give --before/--after or --corpus/--commit")

    def text(path):
        if not path:
            return ""
        if not Path(path).is_file():
            raise DataError(f"no such file: {path}")
        return Path(path).read_text(encoding="utf-8")

    name = Path(args.after or args.before).name
    return [(name, text(args.before), text(args.after))]


def cmd_slice(args, cfg: RunConfig) -> int:
    sc = cfg.slice_config()
    commit = analyze(_slice_inputs(args), output_deps=OUTPUT in sc.edge_kinds)
    out = sys.stdout
    for label, pdg, seeds in (
        ("before", commit.before_pdg, commit.changeset.removed),
        ("after", commit.after_pdg, commit.changeset.added),
    ):
        out.write(f"# {label} PDG\n")
        out.write(pdg.dump())
        dist = slice_distances(pdg, seeds, sc)
        out.write(f"# {label} seeds: {' '.join(map(str, sorted(seeds)))}\n")
        out.write(f"# {label} slice: {' '.join(f'{n}@{dist[n]}' for n in sorted(dist))}\n")
    for d in commit.diagnostics:
        log.info(d)
    return EXIT_OK


def _splits(records, cfg: RunConfig, train_on_train: bool):
    if train_on_train:
        return records, records
    split = chronological_split(records, cfg.split)
    return split.train, split.test


def _representation(rec, cfg: RunConfig) -> str:
    if rec.representation is not None:
        return rec.representation
    sc = cfg.slice_config()
    commit = analyze(rec.files, output_deps=OUTPUT in sc.edge_kinds)
    return encode_change(commit.before_pdg, commit.after_pdg, commit.changeset, sc, cfg.token_budget).render()


def cmd_generate(args, cfg: RunConfig) -> int:
    records = _load(args.corpus)
    train, test = _splits(records, cfg, args.train_on_train)
    if not train:
        raise DataError("training split is empty")
    index = RetrievalIndex([_representation(r, cfg) for r in train], [r.message_clean for r in train])
    lines = []
    for rec in test:
        generated = index.generate(_representation(rec, cfg))
        lines.append(json.dumps({"repo": rec.repo, "commit_id": rec.commit_id, "reference": rec.message_clean, "generated": generated}, ensure_ascii=False) + "\n")
    atomic_write_text(args.out, "".join(lines))
    return EXIT_OK


def cmd_eval(args, cfg: RunConfig) -> int:
    wanted = {b.strip() for b in args.breakdowns.split(",") if b.strip()}
    if wanted == {"none"}:
        wanted = set()
    unknown = wanted - {"ablation", "depth", "buckets"}
    if unknown:
        raise UsageError(f"unknown breakdowns: {', '.join(sorted(unknown))}")
    records = _load(args.corpus)
    train, test = _splits(records, cfg, args.train_on_train)
    if not train:
        raise DataError("training split is empty")
    report = evaluate(test, train, cfg.slice_config(), cfg.token_budget, breakdowns=wanted)
    atomic_write_text(args.out, report.jsonl())
    sys.stdout.write(report.table())
    return EXIT_OK


COMMANDS = {"mine": cmd_mine, "encode": cmd_encode, "slice": cmd_slice, "generate": cmd_generate, "eval": cmd_eval}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ConfigError) as exc:
        print(f"changectx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, ValueError) as exc:
        print(f"changectx: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
