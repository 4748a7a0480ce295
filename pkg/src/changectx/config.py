"""Run configuration: defaults, flat ``key=value`` files, overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .encoder import DEFAULT_BUDGET
from .miner import MAX_CHANGES, MAX_WORDS, MIN_WORDS
from .pdg import CONTROL, DATA, OUTPUT
from .slicer import BACKWARD, FORWARD, SliceConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    depth: int = 3
    edge_kinds: tuple[str, ...] = (CONTROL, DATA)
    directions: tuple[str, ...] = (BACKWARD, FORWARD)
    interprocedural: bool = True
    token_budget: int = DEFAULT_BUDGET
    min_words: int = MIN_WORDS
    max_words: int = MAX_WORDS
    max_changes: int = MAX_CHANGES
    split: tuple[float, float, float] = (0.8, 0.1, 0.1)

    def __post_init__(self) -> None:
        if self.token_budget < 1:
            raise ConfigError("token_budget must be >= 1")
        if not 0 <= self.min_words <= self.max_words:
            raise ConfigError("need 0 <= min_words <= max_words")
        if self.max_changes < 1:
            raise ConfigError("max_changes must be >= 1")
        bad = set(self.edge_kinds) - {CONTROL, DATA, OUTPUT}
        if bad:
            raise ConfigError(f"unknown edge kinds: {sorted(bad)}")
        try:
            self.slice_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if len(self.split) != 3 or abs(sum(self.split) - 1.0) > 1e-9 or min(self.split) < 0:
            raise ConfigError("split must be three non-negative ratios summing to 1")

    def slice_config(self) -> SliceConfig:
        return SliceConfig(self.depth, frozenset(self.directions), frozenset(self.edge_kinds), self.interprocedural)

    def filter_bounds(self) -> dict[str, int]:
        return {"min_words": self.min_words, "max_words": self.max_words, "max_changes": self.max_changes}

    def with_overrides(self, values: Mapping[str, Any]) -> "RunConfig":
        parsed = {k: coerce(k, v) for k, v in values.items() if v is not None}
        return replace(self, **parsed)


FIELD_HELP = {
    "depth": "hop bound for slicing from each changed statement; 3 gave the best balance of context against noise in published experiments",
    "edge_kinds": "dependence kinds followed, comma separated from control, data, output; control plus data together beat either alone",
    "directions": "slice directions, comma separated from backward, forward; both capture what the change reads and what reads it",
    "interprocedural": "follow call-site/callee links between methods, since a change often matters to its callers (true/false)",
    "token_budget": "maximum tokens of a representation, matching the usual 512-token input limit of pretrained code models",
    "min_words": "shortest kept commit message in words; shorter ones are rarely informative",
    "max_words": "longest kept commit message in words; longer ones are seldom a one-line summary",
    "max_changes": "most changed statements a kept commit may have; larger commits are mostly merges and rollbacks",
    "split": "train,valid,test ratios applied in history order per repository to avoid time leakage",
}

_NAMES = {f.name for f in fields(RunConfig)}


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def coerce(name: str, value: Any) -> Any:
    if name not in _NAMES:
        raise ConfigError(f"unknown config key {name!r}")
    if not isinstance(value, str):
        return tuple(value) if isinstance(value, list) else value
    try:
        if name in ("depth", "token_budget", "min_words", "max_words", "max_changes"):
            return int(value)
        if name == "interprocedural":
            return _parse_bool(value)
        if name in ("edge_kinds", "directions"):
            return tuple(sorted({p.strip() for p in value.split(",") if p.strip()}))
        if name == "split":
            return tuple(float(p) for p in value.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc
    raise ConfigError(f"unhandled key {name!r}")


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; blank lines and ``#`` comments ignored."""
    out: dict[str, str] = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _NAMES:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def resolve(file_values: Mapping[str, str], flag_values: Mapping[str, Any]) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    return RunConfig().with_overrides(file_values).with_overrides(flag_values)
