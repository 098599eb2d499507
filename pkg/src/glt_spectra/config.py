"""Flat ``key = value`` experiment configuration with typed validation."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from .errors import ConfigError

SCHEMES = ("fd", "iga")
GRIDS = ("uniform", "liouville")
REFERENCES = ("exact", "fine-mesh")
OUTLIER_RULES = ("threshold", "count")
PROBLEMS = ("euler-cauchy", "laplacian")
REARRANGEMENTS = ("sampling", "analytic")


def _int(text: str) -> int:
    try:
        f = float(text)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {text!r}") from exc
    if not f.is_integer():
        raise ConfigError(f"expected an integer, got {text!r}")
    return int(f)


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {text!r}") from exc


def _choice(options):
    def parse(text: str) -> str:
        if text not in options:
            raise ConfigError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return parse


def _list(item):
    def parse(text: str) -> tuple:
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ConfigError("empty list")
        return tuple(item(p) for p in parts)
    return parse


@dataclass(frozen=True)
class ExperimentConfig:
    """Every key a config file may set. ``None`` means "use the default of
    the command being run"."""

    scheme: str = "fd"
    problem: str = "euler-cauchy"
    eta: Optional[tuple] = None
    n: Optional[tuple] = None
    alpha: Optional[tuple] = None
    k: Optional[tuple] = None
    grid: Optional[tuple] = None
    r: Optional[int] = None
    reference: Optional[str] = None
    fine_n: int = 10**4
    outlier_rule: str = "threshold"
    rearrangement: str = "sampling"
    points: int = 101
    symbol_grid: int = 10**4
    output: Optional[str] = None
    summary: Optional[str] = None

    def first(self, key: str, default):
        v = getattr(self, key)
        return default if v is None else v[0]

    def validate(self, needs_rearrangement: bool = False) -> "ExperimentConfig":
        for key in ("n", "eta", "k"):
            v = getattr(self, key)
            if v is not None and any(x < 1 for x in v):
                raise ConfigError(f"{key} entries must be positive")
        if self.alpha is not None and any(a <= 0 for a in self.alpha):
            raise ConfigError("alpha entries must be positive")
        if self.r is not None and self.r < 1:
            raise ConfigError("r must be positive")
        if self.fine_n < 1 or self.points < 2 or self.symbol_grid < 1:
            raise ConfigError("fine_n, points and symbol_grid must be positive (points >= 2)")
        if needs_rearrangement and self.r is not None and self.n is not None and self.r < max(self.n):
            raise ConfigError(f"r = {self.r} must be at least max(n) = {max(self.n)}")
        return self


SCHEMA = {
    "scheme": _choice(SCHEMES),
    "problem": _choice(PROBLEMS),
    "eta": _list(_int),
    "n": _list(_int),
    "alpha": _list(_float),
    "k": _list(_int),
    "grid": _list(_choice(GRIDS)),
    "r": _int,
    "reference": _choice(REFERENCES),
    "fine_n": _int,
    "outlier_rule": _choice(OUTLIER_RULES),
    "rearrangement": _choice(REARRANGEMENTS),
    "points": _int,
    "symbol_grid": _int,
    "output": str,
    "summary": str,
}

assert set(SCHEMA) == {f.name for f in fields(ExperimentConfig)}


def parse_assignments(pairs, source: str = "<args>") -> dict:
    """Parse ``key = value`` strings into typed values."""
    out = {}
    for lineno, raw in enumerate(pairs, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        try:
            out[key] = SCHEMA[key](value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    return out


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Read ``path`` (if any) and apply ``overrides`` on top."""
    values = {}
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            values.update(parse_assignments(fh.read().splitlines(), path))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return replace(ExperimentConfig(), **values)
