"""Run configuration: precision, budgets, cache location and seed.

Config files are flat ``key = value`` text; blank lines and ``#`` comments
are ignored.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace

from . import __version__

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class Config:
    precision_digits: int = 50
    cf_max_steps: int = 512
    coeff_bit_cap: int = 2**20
    cache_dir: str = ".torsionlab-cache"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.precision_digits < 15:
            raise ValueError("precision_digits must be >= 15")
        if self.cf_max_steps < 1 or self.coeff_bit_cap < 1:
            raise ValueError("budgets must be positive")

    def with_overrides(self, **kw) -> "Config":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def provenance(self, **extra) -> dict:
        out = asdict(self)
        out.pop("cache_dir")
        out["code_version"] = __version__
        out.update(extra)
        return out


_TYPES = {f.name: (str if f.name == "cache_dir" else int) for f in fields(Config)}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into typed overrides for :class:`Config`."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _TYPES[key](value) if _TYPES[key] is str else int(value, 0)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def load_config(path: str | os.PathLike | None = None, **overrides) -> Config:
    """Defaults, then the file (if any), then explicit overrides (None means unset)."""
    base = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            base = parse_config_text(fh.read())
    base.update({k: v for k, v in overrides.items() if v is not None})
    return Config(**base)
