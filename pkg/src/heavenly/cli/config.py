"""Run configuration: a flat ``key = value`` text format with exact rationals.

Example::

    # the worked modified-branch instance
    branch = modified
    c5 = 1
    c17 = 1
    c19 = 1
    c29 = 1
    seeds = 1, 2
    suites = all

Recognised keys
    a, b, c          equation constants ("p/q" or integers)
    branch           modified | generic (modified forces a=c=0, b=1)
    c1 ... c29       free cubic parameters; unset ones are 0
    seeds            comma-separated integers driving all randomized checks
    points           explicit sample points, "z1,z2,z3,z4; z1,z2,z3,z4; ..."
    sample_count     random sample points for the signature suite (default 100)
    chart_sign       1 or -1, the sign of Delta on the chart
    suites           comma-separated suite names, or "all"
    draws            yes | no: add one random admissible draw per seed
    explicit_u       debug: use this polynomial instead of a cubic
    perturb.cK       debug: add this to coefficient cK after instantiation
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..arith import Q, Rational
from ..core import EquationConstants
from ..solutions import FREE, MONOMIALS, ParameterError, check_guards

SUITES = (
    "residual",
    "lax",
    "tetrad",
    "coframe",
    "metric",
    "diagonal",
    "signature",
    "curvature",
    "closed-form",
    "symmetry",
    "killing",
    "numeric-oracle",
)

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_KEY = re.compile(r"^(a|b|c|branch|c\d+|seeds|points|sample_count|chart_sign|suites|draws|explicit_u|perturb\.c\d+)$")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (exit code 2)."""


def parse_rational(text: str, what: str = "value") -> Rational:
    """Exact "p/q" literal; decimals and exponents are rejected."""
    t = text.strip()
    if not _RATIONAL.match(t):
        raise ConfigError(f"{what}: {text!r} is not an exact rational literal (use p/q, no decimals)")
    num, _, den = t.partition("/")
    if den and int(den) == 0:
        raise ConfigError(f"{what}: zero denominator")
    return Q(int(num), int(den) if den else 1)


def _fmt(q: Rational) -> str:
    return str(int(q.numerator)) if q.denominator == 1 else f"{int(q.numerator)}/{int(q.denominator)}"


@dataclass
class RunConfig:
    a: Rational = Q(0)
    b: Rational = Q(1)
    c: Rational = Q(0)
    branch: str = "modified"
    free_params: dict = field(default_factory=dict)  # index -> Rational
    seeds: list = field(default_factory=lambda: [0])
    sample_points: list = field(default_factory=list)  # rational 4-tuples
    sample_count: int = 100
    chart_sign: int = 1
    suites: tuple = SUITES
    draws: bool | None = None  # None: draw only when no instance is configured
    explicit_u: str | None = None
    perturb: dict = field(default_factory=dict)

    @property
    def consts(self) -> EquationConstants:
        return EquationConstants(self.a, self.b, self.c)

    @property
    def has_instance(self) -> bool:
        return bool(self.free_params) or self.explicit_u is not None

    @property
    def use_draws(self) -> bool:
        return (not self.has_instance) if self.draws is None else self.draws

    def validate(self) -> RunConfig:
        if self.branch not in ("modified", "generic"):
            raise ConfigError(f"branch: unknown branch {self.branch!r}")
        if self.branch == "modified" and (self.a, self.b, self.c) != (0, 1, 0):
            raise ConfigError("branch: modified requires a = 0, b = 1, c = 0")
        if self.chart_sign not in (1, -1):
            raise ConfigError("chart_sign: must be 1 or -1")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"suites: unknown suite(s) {', '.join(bad)}")
        for i in self.free_params:
            if i not in FREE:
                raise ConfigError(f"c{i}: not a free parameter (free: {', '.join(f'c{k}' for k in FREE)})")
        for i in self.perturb:
            if i not in MONOMIALS:
                raise ConfigError(f"perturb.c{i}: no such coefficient")
        for p in self.sample_points:
            if len(p) != 4:
                raise ConfigError("points: each point needs four coordinates")
        if self.sample_count < 0:
            raise ConfigError("sample_count: must be nonnegative")
        if self.free_params and self.explicit_u is None:
            c = {i: self.free_params.get(i, Q(0)) for i in FREE}
            try:
                check_guards(self.consts, c)
            except ParameterError as exc:
                raise ConfigError(str(exc)) from exc
        return self

    def to_text(self) -> str:
        lines = [f"a = {_fmt(self.a)}", f"b = {_fmt(self.b)}", f"c = {_fmt(self.c)}", f"branch = {self.branch}"]
        lines += [f"c{i} = {_fmt(v)}" for i, v in sorted(self.free_params.items())]
        lines.append("seeds = " + ", ".join(str(s) for s in self.seeds))
        if self.sample_points:
            lines.append("points = " + "; ".join(",".join(_fmt(Q(x)) for x in p) for p in self.sample_points))
        lines.append(f"sample_count = {self.sample_count}")
        lines.append(f"chart_sign = {self.chart_sign}")
        lines.append("suites = " + ", ".join(self.suites))
        if self.draws is not None:
            lines.append(f"draws = {'yes' if self.draws else 'no'}")
        if self.explicit_u is not None:
            lines.append(f"explicit_u = {self.explicit_u}")
        lines += [f"perturb.c{i} = {_fmt(v)}" for i, v in sorted(self.perturb.items())]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"{key}: {text!r} is not an integer") from None


def parse_config(text: str) -> RunConfig:
    return config_from_mapping(parse_raw(text))


def parse_raw(text: str) -> dict[str, str]:
    """Key/value pairs of a config file, unvalidated."""
    raw: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        raw[key] = value
    return raw


def config_from_mapping(raw: dict) -> RunConfig:
    for key in raw:
        if not _KEY.match(key):
            raise ConfigError(f"unknown key {key!r}")
    cfg = RunConfig()
    consts_given = False
    for key, value in raw.items():
        if key in ("a", "b", "c"):
            setattr(cfg, key, parse_rational(value, key))
            consts_given = True
        elif key == "branch":
            cfg.branch = value.strip()
        elif re.fullmatch(r"c\d+", key):
            cfg.free_params[int(key[1:])] = parse_rational(value, key)
        elif key.startswith("perturb."):
            cfg.perturb[int(key[len("perturb.c") :])] = parse_rational(value, key)
        elif key == "seeds":
            cfg.seeds = [_parse_int(s, key) for s in value.split(",") if s.strip()]
        elif key == "points":
            cfg.sample_points = [
                tuple(parse_rational(x, key) for x in p.split(",")) for p in value.split(";") if p.strip()
            ]
        elif key == "sample_count":
            cfg.sample_count = _parse_int(value, key)
        elif key == "chart_sign":
            cfg.chart_sign = _parse_int(value, key)
        elif key == "suites":
            v = value.strip()
            cfg.suites = SUITES if v == "all" else tuple(s.strip() for s in v.split(",") if s.strip())
        elif key == "draws":
            v = value.strip().lower()
            if v not in ("yes", "no", "true", "false"):
                raise ConfigError("draws: expected yes or no")
            cfg.draws = v in ("yes", "true")
        elif key == "explicit_u":
            cfg.explicit_u = value.strip()
    if "branch" not in raw and consts_given and (cfg.a, cfg.b, cfg.c) != (0, 1, 0):
        cfg.branch = "generic"
    return cfg.validate()


def read_raw(path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_raw(text)


def load_config(path) -> RunConfig:
    return config_from_mapping(read_raw(path))


def config_json(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["a"], d["b"], d["c"] = _fmt(cfg.a), _fmt(cfg.b), _fmt(cfg.c)
    d["free_params"] = {f"c{i}": _fmt(v) for i, v in sorted(cfg.free_params.items())}
    d["perturb"] = {f"c{i}": _fmt(v) for i, v in sorted(cfg.perturb.items())}
    d["sample_points"] = [[_fmt(Q(x)) for x in p] for p in cfg.sample_points]
    d["suites"] = list(cfg.suites)
    return json.loads(json.dumps(d))
