"""Run configuration: INI file plus command-line flags (flags win)."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace

from . import catalog as cat
from .errors import ConfigurationError
from .verifier import SUITES

FORMATS = ("json", "text")
RIGGING_MODES = ("auto", "catalog")

# INI key -> (field name, parser)
_RUN_KEYS = {
    "example": ("example", str),
    "suite": ("suite", str),
    "samples": ("samples", int),
    "seed": ("seed", int),
    "sign_convention": ("sign_convention", int),
    "rigging": ("rigging", str),
    "tolerance": ("tolerance", float),
    "report": ("report_path", str),
    "format": ("format", str),
    "jobs": ("jobs", int),
    "margin": ("margin", float),
}


@dataclass(frozen=True)
class RunConfig:
    example: str = "all"
    suite: str = "all"
    samples: int = 50
    seed: int = 42
    sign_convention: int = 1
    rigging: str = "catalog"
    tolerance: float | None = None
    tolerances: dict = field(default_factory=dict)
    report_path: str | None = None
    format: str = "text"
    jobs: int = 1
    margin: float = cat.DEFAULT_MARGIN
    timestamp: bool = True

    def validate(self) -> "RunConfig":
        if self.example != "all":
            cat.entry(self.example)  # raises on unknown ids
        if self.suite not in SUITES:
            raise ConfigurationError(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}")
        if self.samples < 1:
            raise ConfigurationError("samples must be >= 1")
        if self.sign_convention not in (1, -1):
            raise ConfigurationError("sign_convention must be +1 or -1")
        if self.rigging not in RIGGING_MODES:
            raise ConfigurationError(f"rigging must be one of {', '.join(RIGGING_MODES)}")
        if self.format not in FORMATS:
            raise ConfigurationError(f"format must be one of {', '.join(FORMATS)}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigurationError("tolerance must be positive")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigurationError(f"tolerance override for {k!r} must be positive")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1")
        if not self.margin >= 0:
            raise ConfigurationError("margin must be non-negative")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("timestamp")
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        return d


def _parse(kind, raw: str, key: str):
    try:
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key!r}: {raw!r}") from exc


def read_config(path: str) -> dict:
    """Parse an INI file into a dict of RunConfig fields.

    Sections: ``[run]`` with the keys of :data:`_RUN_KEYS` and
    ``[tolerances]`` mapping check ids to positive floats; an ``[entry]``
    section is accepted and ignored.
    """
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # check ids are case sensitive
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file {path!r}: {exc}") from exc
    # [entry] is the informational block written by ``describe --format ini``
    unknown = [s for s in cp.sections() if s not in ("run", "tolerances", "entry")]
    if unknown:
        raise ConfigurationError(f"unknown config sections: {', '.join(unknown)}")
    out: dict = {}
    if cp.has_section("run"):
        for key, raw in cp.items("run"):
            if key not in _RUN_KEYS:
                raise ConfigurationError(f"unknown config key {key!r} in [run]")
            name, kind = _RUN_KEYS[key]
            out[name] = _parse(kind, raw, key)
    if cp.has_section("tolerances"):
        out["tolerances"] = {k: _parse(float, v, k) for k, v in cp.items("tolerances")}
    return out


def build_config(file_values: dict | None = None, flag_values: dict | None = None) -> RunConfig:
    """Defaults, then file values, then flags that were given (not None)."""
    cfg = RunConfig()
    merged = dict(file_values or {})
    for k, v in (flag_values or {}).items():
        if v is None:
            continue
        if k == "tolerances":
            merged["tolerances"] = {**merged.get("tolerances", {}), **v}
        else:
            merged[k] = v
    known = set(RunConfig.__dataclass_fields__)
    bad = sorted(set(merged) - known)
    if bad:
        raise ConfigurationError(f"unknown configuration keys: {', '.join(bad)}")
    return replace(cfg, **merged).validate()
