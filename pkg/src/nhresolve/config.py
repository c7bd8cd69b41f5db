"""Run configuration: a versioned JSON document."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field

SCHEMA = "nhresolve-config/1"
OUT_ENV = "NHRESOLVE_OUT"

__all__ = ["SCHEMA", "OUT_ENV", "RunConfig", "ConfigError", "atomic_write"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a suite run depends on.

    ``checks`` holds ``{"id": ..., "params": {...}, "tolerances": {...}}``
    entries; an empty ``params`` means the catalog defaults. ``grids`` and
    ``tolerances`` are global overrides merged under each check's own.
    """

    checks: list = field(default_factory=list)
    models: list = field(default_factory=lambda: ["edge(1,0,1)", "inner(1,0,1)"])
    grids: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 20240611
    output_dir: str = ""
    formats: list = field(default_factory=lambda: ["json"])
    workers: int = 1
    schema: str = SCHEMA

    def __post_init__(self):
        self.validate()

    def validate(self):
        from .models import parse_model
        from .verify import CATALOG_IDS

        if self.schema != SCHEMA:
            raise ConfigError(f"unsupported schema {self.schema!r}; expected {SCHEMA!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        for c in self.checks:
            if not isinstance(c, dict) or "id" not in c:
                raise ConfigError(f"check entry needs an 'id': {c!r}")
            if c["id"] not in CATALOG_IDS:
                raise ConfigError(f"unknown check id {c['id']!r}")
            extra = set(c) - {"id", "params", "tolerances", "enabled"}
            if extra:
                raise ConfigError(f"unknown keys in check {c['id']}: {sorted(extra)}")
        for m in self.models:
            try:
                parse_model(m)
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"bad model {m!r}: {exc}") from exc
        bad = set(self.formats) - {"json", "csv"}
        if bad:
            raise ConfigError(f"unknown formats {sorted(bad)}")

    @classmethod
    def default(cls) -> "RunConfig":
        from .verify import SUITE_ORDER

        return cls(checks=[{"id": cid, "params": {}, "tolerances": {}} for cid in SUITE_ORDER])

    def enabled_checks(self) -> list:
        return [c for c in self.checks if c.get("enabled", True)]

    def resolved_output_dir(self) -> str:
        return self.output_dir or os.environ.get(OUT_ENV, "") or "nhresolve-out"

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def dump(self, path: str):
        atomic_write(path, self.dumps() + "\n")


def atomic_write(path: str, text: str):
    """Write through a temporary file in the same directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
