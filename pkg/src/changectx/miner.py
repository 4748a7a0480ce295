"""Commit mining, message cleaning, quality filtering and corpus files.

Git is driven through its command-line plumbing: ``rev-list`` for history,
``diff-tree`` for touched paths and one long-lived ``cat-file --batch`` per
repository for file contents.
"""

from __future__ import annotations

import json
import logging
import os
import re
import subprocess
import tempfile
from collections import OrderedDict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional

log = logging.getLogger(__name__)

JAVA_SUFFIX = ".java"
MIN_WORDS = 5
MAX_WORDS = 150
MAX_CHANGES = 20


class NotARepository(OSError):
    pass


class UnreadableObject(LookupError):
    pass


class MalformedLine(ValueError):
    pass


# ---------------------------------------------------------------- git access


@dataclass(frozen=True)
class RawCommit:
    commit_id: str
    message: str
    parents: tuple[str, ...]
    files: tuple[tuple[str, str, str], ...]  # (path, before text, after text)


def _git(repo: Path, *args: str) -> str:
    res = subprocess.run(
        ["git", "-C", str(repo), *args],
        capture_output=True,
        check=True,
        env={**os.environ, "GIT_CONFIG_NOSYSTEM": "1", "LC_ALL": "C"},
    )
    return res.stdout.decode("utf-8", errors="replace")


class _BlobReader:
    """Wrapper around ``git cat-file --batch``."""

    def __init__(self, repo: Path):
        self.proc = subprocess.Popen(
            ["git", "-C", str(repo), "cat-file", "--batch"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
        )

    def read(self, spec: str, kind: str = "blob") -> str:
        assert self.proc.stdin and self.proc.stdout
        self.proc.stdin.write(spec.encode() + b"\n")
        self.proc.stdin.flush()
        header = self.proc.stdout.readline().decode().rstrip("\n")
        parts = header.split()
        if len(parts) != 3 or parts[1] != kind:
            raise UnreadableObject(f"{spec}: {header or 'no response'}")
        size = int(parts[2])
        data = self.proc.stdout.read(size)
        self.proc.stdout.read(1)
        return data.decode("utf-8", errors="replace")

    def close(self) -> None:
        if self.proc.stdin:
            self.proc.stdin.close()
        self.proc.wait()


def _require_repo(repo: Path) -> None:
    try:
        _git(repo, "rev-parse", "--git-dir")
    except (subprocess.CalledProcessError, FileNotFoundError, NotADirectoryError) as exc:
        raise NotARepository(str(repo)) from exc


def mine_repo(repo_path, diagnostics: Optional[list[str]] = None) -> Iterator[RawCommit]:
    """Non-merge commits touching ``.java`` files, oldest first.

    Commits whose blobs cannot be read are skipped; the reason is appended to
    ``diagnostics`` when a list is supplied.
    """
    repo = Path(repo_path)
    _require_repo(repo)
    try:
        _git(repo, "rev-parse", "--verify", "-q", "HEAD")
    except subprocess.CalledProcessError:
        return  # no commits yet
    revs = _git(repo, "rev-list", "--reverse", "--topo-order", "--no-merges", "--parents", "HEAD").split("\n")
    blobs = _BlobReader(repo)
    try:
        for line in revs:
            if not line.strip():
                continue
            sha, *parents = line.split()
            paths = _changed_java_paths(repo, sha, parents[0] if parents else None)
            if not paths:
                continue
            try:
                files = tuple(
                    (path, blobs.read(f"{parents[0]}:{path}") if status != "A" and parents else "",
                     blobs.read(f"{sha}:{path}") if status != "D" else "")
                    for status, path in paths
                )
            except UnreadableObject as exc:
                msg = f"UnreadableObject: {sha}: {exc}"
                log.warning(msg)
                if diagnostics is not None:
                    diagnostics.append(msg)
                continue
            obj = blobs.read(sha, "commit")
            message = obj.split("\n\n", 1)[1] if "\n\n" in obj else ""
            message = message.rstrip("\n")
            yield RawCommit(sha, message, tuple(parents), files)
    finally:
        blobs.close()


def _changed_java_paths(repo: Path, sha: str, parent: Optional[str]) -> list[tuple[str, str]]:
    args = ["diff-tree", "-r", "--no-renames", "--no-commit-id", "--name-status", "-z"]
    args += [parent, sha] if parent else ["--root", sha]
    fields = _git(repo, *args).split("\0")
    out = []
    for status, path in zip(fields[0::2], fields[1::2]):
        if path.endswith(JAVA_SUFFIX):
            out.append((status[:1], path))
    return sorted(out, key=lambda sp: sp[1])


# ----------------------------------------------------------- message cleaning

_SENTENCE_END = re.compile(r"[.!?\n]")
_URL = re.compile(r"\b(?:https?|ftp)://\S+|\bwww\.\S+", re.IGNORECASE)
_ISSUE = re.compile(r"#\d+\b")
# at least one digit, so ordinary words like "defaced" survive
_HASH = re.compile(r"\b(?=[a-fA-F]*\d)[0-9a-fA-F]{7,}\b")


def clean_message(raw: str) -> str:
    """First sentence with issue ids, commit hashes and URLs removed."""
    text = raw.strip()
    # URLs contain dots, so take them out before looking for the sentence end
    text = _URL.sub(" ", text)
    m = _SENTENCE_END.search(text)
    if m:
        text = text[: m.start()]
    text = _ISSUE.sub(" ", text)
    text = _HASH.sub(" ", text)
    return " ".join(text.split())


def word_count(message: str) -> int:
    return len(message.split())


# -------------------------------------------------------------- verb lexicon

_BASE_VERBS = """
accept access adapt add adjust align allow apply archive assert assign avoid
bind block bump build cache call cancel capture catch centralize change check
clarify clean cleanup clear clone close collapse combine comment compile
complete compute configure consolidate convert copy correct create deal debug
decouple decrease default defer define delegate delete deprecate detect disable
display document drop dump emit enable encode enforce enhance ensure expand
expose extend extract filter finish fix flush force format generate get guard
handle hide ignore implement import improve include increase initialize inline
insert install integrate introduce invalidate invoke isolate keep kill launch
limit load lock log make mark merge migrate mock modify move normalize notify
omit optimize override parse pass patch persist polish port prefer prepare
prevent print process propagate protect provide prune publish pull push put
raise read rebase rebuild record recover redesign reduce refactor reformat
register reject release reload remove rename reorder reorganize repair replace
report require reset resolve restore restrict restructure retain retry return
reuse revert review revise rework rewrite roll run save schedule separate
serialize set show simplify skip sort specify split start stop store
streamline strip support suppress swap switch sync synchronize throw tidy
toggle track translate trim tune tweak unify unlock update upgrade use
validate verify wait warn wrap write
"""


def _third_person(verb: str) -> str:
    if verb.endswith("y") and verb[-2:-1] not in ("a", "e", "i", "o", "u"):
        return verb[:-1] + "ies"
    if verb.endswith(("s", "x", "z", "ch", "sh")):
        return verb + "es"
    return verb + "s"


BASE_VERBS = frozenset(_BASE_VERBS.split())
VERB_LEXICON = BASE_VERBS | {_third_person(v) for v in BASE_VERBS}


def starts_with_verb(message: str) -> bool:
    words = message.split()
    if not words:
        return False
    first = words[0].lower().strip(":;,-()[]'\"")
    return first in VERB_LEXICON


# ------------------------------------------------------------------ records

KEPT = "kept"


def dropped(reason: str) -> str:
    return f"dropped({reason})"


@dataclass
class CommitRecord:
    repo: str
    commit_id: str
    message_raw: str
    message_clean: str
    files: list[tuple[str, str, str]]
    changed_statement_count: int
    verdict: str = KEPT
    representation: Optional[str] = None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def kept(self) -> bool:
        return self.verdict == KEPT

    def check(self, min_words: int = MIN_WORDS, max_words: int = MAX_WORDS, max_changes: int = MAX_CHANGES) -> None:
        if not self.kept:
            return
        words = word_count(self.message_clean)
        if not (min_words <= words <= max_words and 1 <= self.changed_statement_count <= max_changes):
            raise ValueError(f"kept record {self.commit_id} violates corpus bounds")

    def to_json(self) -> str:
        d = asdict(self)
        d["files"] = [list(f) for f in self.files]
        return json.dumps(d, ensure_ascii=False, sort_keys=False)

    @classmethod
    def from_json(cls, line: str) -> "CommitRecord":
        try:
            d = json.loads(line)
            if not isinstance(d, dict):
                raise TypeError("not an object")
            d["files"] = [tuple(f) for f in d["files"]]
            if any(len(f) != 3 for f in d["files"]):
                raise TypeError("file entries must be triples")
            return cls(**d)
        except (ValueError, TypeError, KeyError) as exc:
            raise MalformedLine(str(exc)) from exc


_MERGE_MSG = re.compile(r"^merge\s+(remote-tracking\s+)?(branch|pull\s+request|tag|commit|changes|master|main)\b", re.IGNORECASE)
_ROLLBACK_MSG = re.compile(r"^(revert|rollback|roll\s+back)\b", re.IGNORECASE)


def filter_commit(
    record: CommitRecord,
    *,
    min_words: int = MIN_WORDS,
    max_words: int = MAX_WORDS,
    max_changes: int = MAX_CHANGES,
) -> str:
    """Verdict string: ``"kept"`` or ``"dropped(<reason>)"``. First failing rule wins."""
    raw = record.message_raw.strip()
    if _MERGE_MSG.match(raw):
        return dropped("merge")
    if _ROLLBACK_MSG.match(raw):
        return dropped("rollback")
    n = record.changed_statement_count
    if n == 0:
        return dropped("no-changes")
    if n > max_changes:
        return dropped("too-many-changes")
    words = word_count(record.message_clean)
    if words < min_words:
        return dropped("too-short")
    if words > max_words:
        return dropped("too-long")
    if not starts_with_verb(record.message_clean):
        return dropped("not-verb-first")
    return KEPT


def build_record(repo: str, raw: RawCommit, **bounds) -> CommitRecord:
    """Clean, count changed statements and attach a verdict."""
    from .pipeline import analyze

    commit = analyze(raw.files, with_pdg=False)
    rec = CommitRecord(
        repo=repo,
        commit_id=raw.commit_id,
        message_raw=raw.message,
        message_clean=clean_message(raw.message),
        files=[tuple(f) for f in raw.files],
        changed_statement_count=commit.changeset.size,
        diagnostics=list(commit.diagnostics),
    )
    rec.verdict = filter_commit(rec, **bounds)
    return rec


def mine_records(repo_paths: Iterable, **bounds) -> Iterator[CommitRecord]:
    for path in repo_paths:
        path = Path(path)
        diags: list[str] = []
        for raw in mine_repo(path, diags):
            yield build_record(path.name, raw, **bounds)
        for d in diags:
            log.warning("%s: %s", path.name, d)


def read_repo_list(path) -> list[Path]:
    """Local repository paths, one per line; ``#`` starts a comment.

    Relative entries are resolved against the list file's directory.
    """
    path = Path(path)
    base = path.parent
    repos = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            p = Path(line)
            repos.append(p if p.is_absolute() else base / p)
    return repos


# -------------------------------------------------------------- corpus files


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_corpus(path, records: Iterable[CommitRecord]) -> int:
    lines = []
    for rec in records:
        rec.check()
        lines.append(rec.to_json() + "\n")
    atomic_write_text(path, "".join(lines))
    return len(lines)


class CorpusFile(NamedTuple):
    records: list[CommitRecord]
    skipped: int


def read_corpus(path) -> CorpusFile:
    records, skipped = [], 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = CommitRecord.from_json(line)
                rec.check()
            except (MalformedLine, ValueError) as exc:
                skipped += 1
                log.warning("MalformedLine: %s:%d: %s", path, lineno, exc)
                continue
            records.append(rec)
    return CorpusFile(records, skipped)


# -------------------------------------------------------------------- stats


@dataclass(frozen=True)
class RepoRow:
    repo: str
    commits: int
    changed: int

    @property
    def mean(self) -> float:
        return self.changed / self.commits if self.commits else 0.0


@dataclass(frozen=True)
class CorpusStats:
    rows: tuple[RepoRow, ...]

    @classmethod
    def from_records(cls, records: Iterable[CommitRecord]) -> "CorpusStats":
        acc: "OrderedDict[str, list[int]]" = OrderedDict()
        for r in records:
            if not r.kept:
                continue
            row = acc.setdefault(r.repo, [0, 0])
            row[0] += 1
            row[1] += r.changed_statement_count
        return cls(tuple(RepoRow(name, c, s) for name, (c, s) in acc.items()))

    @property
    def total_commits(self) -> int:
        return sum(r.commits for r in self.rows)

    @property
    def total_changed(self) -> int:
        return sum(r.changed for r in self.rows)

    @property
    def mean(self) -> float:
        return self.total_changed / self.total_commits if self.total_commits else 0.0

    def table(self) -> str:
        width = max([len("Total"), len("Project")] + [len(r.repo) for r in self.rows])
        lines = [f"{'Project':<{width}}  {'#Commits':>8}  {'#Changes':>8}  {'Mean':>6}"]
        for r in self.rows:
            lines.append(f"{r.repo:<{width}}  {r.commits:>8}  {r.changed:>8}  {r.mean:>6.2f}")
        lines.append(f"{'Total':<{width}}  {self.total_commits:>8}  {self.total_changed:>8}  {self.mean:>6.2f}")
        return "\n".join(lines) + "\n"
