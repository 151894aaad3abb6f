"""Flat ``key = value`` experiment configs.

Lines starting with ``#`` and blank lines are ignored. Unknown keys are
errors, and every problem found is reported at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .. import problems
from ..problems.base import MKEY


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid config:\n  " + "\n  ".join(self.errors))

    def __reduce__(self):
        return type(self), (self.errors,)


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "heat"
    p: float = 2.0
    q: float = 2.0
    widths: tuple = (20, 20)
    epochs: int = 2000
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 1
    M_eq: int = 4096
    M_in: int = 1024
    M_in_t: int = 1024
    M_bn: int = 1024
    M_bn_t: int = 1024
    eval_multiplier: int = 2
    sup_multiplier: int = 4
    exact_resolution: int = 256
    stride: int = 50
    outdir: str = "runs/out"
    pi_2_tr: float = 1.0
    w_eq: float = 1.0
    w_in: float = 1.0
    w_in_U: float = 1.0
    w_in_t: float = 1.0
    w_bn: float = 1.0
    w_bn_t: float = 1.0

    @property
    def weights(self) -> dict:
        return {k: getattr(self, "w_" + k) for k in problems.KINDS}

    def sample_sizes(self, kinds) -> dict:
        return {k: getattr(self, MKEY[k]) for k in kinds}

    def make_problem(self):
        kw = {"pi_tr": self.pi_2_tr} if self.problem == "poisson" else {}
        return problems.make(self.problem, self.p, self.q, **kw)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key, raw):
    t = _TYPES[key]
    if t == "tuple":
        return tuple(int(x) for x in raw.split(",") if x.strip())
    if t == "int":
        v = float(raw)
        if not v.is_integer():
            raise ValueError("expected an integer")
        return int(v)
    if t == "float":
        return float(raw)
    return raw


def parse(text: str, source: str = "<config>") -> ExperimentConfig:
    errors = []
    values = {}
    seen = set()
    for n, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            errors.append(f"{source}:{n}: expected key = value")
            continue
        key, raw = (x.strip() for x in s.split("=", 1))
        if key not in _TYPES:
            errors.append(f"{source}:{n}: unknown key {key!r}")
            continue
        if key in seen:
            errors.append(f"{source}:{n}: duplicate key {key!r}")
            continue
        seen.add(key)
        try:
            values[key] = _convert(key, raw)
        except ValueError as e:
            errors.append(f"{source}:{n}: bad value for {key!r}: {raw!r} ({e})")
    if errors:
        raise ConfigError(errors)
    cfg = ExperimentConfig(**values)
    validate(cfg)
    return cfg


def load(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    out = replace(cfg, **kw)
    validate(out)
    return out


def _root(M: int, m: int):
    r = round(M ** (1.0 / m))
    for c in (r - 1, r, r + 1):
        if c >= 1 and c ** m == M:
            return c
    return None


def validate(cfg: ExperimentConfig):
    errors = []
    try:
        cls = problems.get(cfg.problem)
    except ValueError as e:
        raise ConfigError([str(e)]) from None
    errors += cls.check_exponents(cfg.p, cfg.q)
    if cfg.epochs < 1:
        errors.append("epochs must be >= 1")
    if cfg.stride < 1:
        errors.append("stride must be >= 1")
    if not cfg.widths or any(w < 1 for w in cfg.widths):
        errors.append("widths must be a non-empty list of positive integers")
    if not cfg.lr > 0:
        errors.append("lr must be positive")
    if not (0 <= cfg.beta1 < 1 and 0 <= cfg.beta2 < 1):
        errors.append("beta1 and beta2 must lie in [0, 1)")
    if not cfg.adam_eps > 0:
        errors.append("adam_eps must be positive")
    for k in ("eval_multiplier", "sup_multiplier", "exact_resolution"):
        if getattr(cfg, k) < 1:
            errors.append(f"{k} must be >= 1")
    if cfg.problem == "poisson" and cfg.exact_resolution % 2:
        errors.append("exact_resolution must be even for poisson")
    if not cfg.pi_2_tr > 0:
        errors.append("pi_2_tr must be positive")
    for k in problems.KINDS:
        if getattr(cfg, "w_" + k) < 0 or not math.isfinite(getattr(cfg, "w_" + k)):
            errors.append(f"w_{k} must be finite and >= 0")
    geom = cls(2.0)  # faces do not depend on the exponents
    dims = {pc.kind: geom.nvars - len(pc.faces[0]) for pc in geom.pieces()}
    for kind, m in dims.items():
        key = MKEY[kind]
        M = getattr(cfg, key)
        r = _root(M, m) if M >= 1 else None
        if r is None:
            errors.append(f"{key}={M} is not a perfect {_power_name(m)} ({cfg.problem} samples it on a {m}D set)")
        elif cfg.problem == "poisson" and r % 2:
            errors.append(f"{key}={M}: poisson needs an even per-axis count (got {r})")
    if errors:
        raise ConfigError(errors)


def _power_name(m: int) -> str:
    return {1: "1st power", 2: "square", 3: "cube"}.get(m, f"{m}th power")
