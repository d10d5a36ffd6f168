"""Experiment configuration: line-oriented `dotted.key = value` files.

Every key has a default, a type and a valid range; unknown keys are
rejected.  All numeric tolerances used by the experiments live here (the
`tol.*` keys) and are echoed into every report.
"""
from __future__ import annotations

import difflib
import math
import os
from dataclasses import dataclass
from pathlib import Path

from ..geometry import MAX_LEVEL

ANSATZ_CHOICES = ("all", "constant", "zero", "linear", "modulated", "harmonics")


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class Key:
    default: object
    kind: str                   # int, float, str, floats, choice
    lo: float | None = None
    hi: float | None = None
    open_lo: bool = False
    doc: str = ""
    choices: tuple = ()


def _tol(value, doc):
    return Key(value, "float", 0.0, None, True, doc)


KEYS: dict[str, Key] = {
    "seed": Key(0, "int", 0, 2 ** 32 - 1, doc="master seed (STAB_SEED overrides)"),
    "mesh.level": Key(5, "int", 0, MAX_LEVEL, doc="icosphere subdivision level"),
    "output.dir": Key("stab-out", "str", doc="root directory for reports and artifacts"),

    "gl.epsilon": Key(0.25, "float", 0.0, 10.0, True, doc="GL length scale"),
    "gl.ansatz": Key("all", "choice", choices=ANSATZ_CHOICES, doc="initial field(s) for gl solves"),
    "gl.solver.tol": Key(1e-10, "float", 0.0, 1e-2, True, doc="Newton residual target"),
    "gl.solver.maxIter": Key(40, "int", 0, 10000, doc="Newton iteration cap"),
    "gl.solver.flowSteps": Key(400, "int", 0, 1000000, doc="gradient-flow step cap"),
    "gl.solver.flowStep": Key(0.05, "float", 0.0, 100.0, True, doc="initial flow time step"),
    "gl.spectrum.k": Key(6, "int", 1, 500, doc="eigenpairs to compute"),

    "inner.fieldDegree": Key(3, "int", 1, 8, doc="degree of the random polynomial test field"),
    "inner.epsilon": Key(0.7, "float", 0.0, 10.0, True, doc="epsilon for the inner-variation oracles"),
    "inner.t": Key(0.04, "float", 0.0, 0.5, True, doc="largest flow time; halved twice"),
    "inner.quadratureLevel": Key(5, "int", 1, MAX_LEVEL, doc="level of the continuum quadrature"),

    "fd.gradientStep": Key(1e-5, "float", 0.0, 1.0, True, doc="GL gradient check step"),
    "fd.hessianStep": Key(1e-4, "float", 0.0, 1.0, True, doc="Hessian check step"),
    "fd.ymhGradientStep": Key(1e-6, "float", 0.0, 1.0, True, doc="YMH gradient check step"),
    "fd.orderStep": Key(1e-2, "float", 0.0, 1.0, True, doc="step for the observed-order check (halved once)"),

    "ymh.degree": Key(1, "int", -20, 20, doc="bundle degree"),
    "ymh.epsilon": Key(0.3, "float", 0.0, 10.0, True, doc="YMH length scale"),
    "ymh.scan": Key((0.2, 0.3, 0.5, 0.9), "floats", 0.0, 10.0, True, doc="epsilons for scan-epsilon"),
    "ymh.solver.tol": Key(1e-9, "float", 0.0, 1e-2, True, doc="gradient-norm target"),
    "ymh.solver.maxIter": Key(4000, "int", 1, 1000000, doc="descent iteration cap"),

    "pointlab.n": Key(5, "int", 1, 16, doc="dimension n of S^n or CP^n"),
    "pointlab.samples": Key(100, "int", 1, 1000000, doc="random samples per identity"),
    "pointlab.seed": Key(0, "int", 0, 2 ** 32 - 1, doc="sampling seed"),

    "tol.fem.ell1": _tol(0.01, "relative band around 2 for lambda_1..3"),
    "tol.fem.ell2": _tol(0.02, "relative band around 6 for lambda_4..8"),
    "tol.fem.zeroMode": _tol(1e-8, "|lambda_0|"),
    "tol.fd.gradient": _tol(1e-6, "relative gradient check"),
    "tol.fd.hessian": _tol(1e-5, "relative Hessian check"),
    "tol.fd.order": _tol(1.9, "minimum observed step order"),
    "tol.inner.rel": _tol(1e-3, "inner variation vs t-difference"),
    "tol.inner.order": _tol(1.9, "minimum observed t-order"),
    "tol.gl.residual": _tol(1e-8, "critical-point residual"),
    "tol.gl.modulus": _tol(1e-6, "max |u| - 1 after a converged solve"),
    "tol.gl.flowMonotone": _tol(1e-12, "energy increase allowed per flow step"),
    "tol.gl.constantLambda": _tol(1e-8, "lambda_1 >= -tol at unit constants"),
    "tol.gl.zeroLambda": _tol(0.01, "relative band around -1/eps^2 at u = 0"),
    "tol.gl.spanSum": _tol(1e-6, "sum of conformal second variations, relative to 1 + int|grad u|^2"),
    "tol.gl.trace": _tol(1e-6, "trace identity, relative to 1 + int|grad u|^2"),
    "tol.spectrum.residual": _tol(1e-8, "eigenpair residual norm"),
    "tol.ymh.gauge": _tol(1e-12, "relative energy change under gauge transformations"),
    "tol.ymh.energyLow": _tol(0.98, "lower bound of energy / (2 pi |d|)"),
    "tol.ymh.energyHigh": _tol(1.05, "upper bound of energy / (2 pi |d|)"),
    "tol.ymh.stability": _tol(1e-6, "lambda_1 >= -tol * ||H||"),
    "tol.ymh.gaugeLeak": _tol(1e-6, "gauge component of gauge-fixed eigenvectors"),
    "tol.ymh.defect": _tol(1e-3, "Bogomolny defect >= -tol"),
    "tol.ymh.consistency": _tol(0.10, "relative mismatch of defect and face residual sum"),
    "tol.ymh.trivialPair": _tol(0.05, "relative band around -1/eps^2 for the trivial pair"),
    "tol.pointlab.sphere": _tol(1e-10, "sphere trace identities, relative"),
    "tol.pointlab.cpnLemma": _tol(1e-6, "CP^n curvature lemma"),
    "tol.pointlab.cpnTrace": _tol(1e-5, "CP^n trace sums, relative"),
    "tol.pointlab.cpnHessian": _tol(1e-6, "CP^n eigenfunction Hessian"),
    "tol.pointlab.cpnRicci": _tol(1e-6, "CP^n Ricci"),
    "tol.pointlab.perXi": _tol(1e-3, "per-xi stability integrand >= -tol * scale"),
    "tol.pointlab.xiSum": _tol(0.05, "relative match of the xi-sum with 8 eps^2 int|F|^2"),
    "tol.converge.femOrder": _tol(1.8, "minimum FEM eigenvalue order"),
    "tol.converge.gapOrder": _tol(1.0, "minimum inner/outer gap order"),
    "tol.converge.noise": _tol(0.20, "allowed growth of |defect| between levels"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def echo(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.values.items())}

    def with_values(self, mapping: dict):
        vals = dict(self.values)
        for key, v in mapping.items():
            vals[key] = _coerce(key, v)
        return ExperimentConfig(vals)


def _unknown(key, line=None):
    close = difflib.get_close_matches(key, KEYS, n=1)
    hint = f"; did you mean {close[0]!r}?" if close else ""
    return ConfigError(f"unknown key {key!r}{hint}", key, line)


def _number(text, key, line, as_int):
    if as_int and isinstance(text, float) and not text.is_integer():
        raise ConfigError(f"{key}: expected an integer, got {text!r}", key, line)
    try:
        v = int(text) if as_int else float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected {'an integer' if as_int else 'a number'}, got {text!r}",
                          key, line) from None
    if not as_int and not math.isfinite(v):
        raise ConfigError(f"{key}: value must be finite", key, line)
    return v


def _in_range(key, v, rule, line):
    if rule.lo is not None and (v < rule.lo or (rule.open_lo and v == rule.lo)):
        op = ">" if rule.open_lo else ">="
        raise ConfigError(f"{key} must be {op} {rule.lo}, got {v}", key, line)
    if rule.hi is not None and v > rule.hi:
        raise ConfigError(f"{key} must be <= {rule.hi}, got {v}", key, line)


def _coerce(key, raw, line=None):
    if key not in KEYS:
        raise _unknown(key, line)
    rule = KEYS[key]
    if rule.kind == "str":
        v = str(raw).strip()
        if not v:
            raise ConfigError(f"{key} must not be empty", key, line)
        return v
    if rule.kind == "choice":
        v = str(raw).strip()
        if v not in rule.choices:
            raise ConfigError(f"{key} must be one of {', '.join(rule.choices)}; got {v!r}", key, line)
        return v
    if rule.kind == "floats":
        items = raw if isinstance(raw, (list, tuple)) else [p for p in str(raw).split(",") if p.strip()]
        if not items:
            raise ConfigError(f"{key} needs at least one value", key, line)
        out = tuple(_number(p, key, line, False) for p in items)
        for v in out:
            _in_range(key, v, rule, line)
        return out
    if isinstance(raw, bool):
        raise ConfigError(f"{key}: expected a number", key, line)
    v = _number(raw, key, line, rule.kind == "int")
    _in_range(key, v, rule, line)
    return v


def defaults() -> ExperimentConfig:
    return ExperimentConfig({k: s.default for k, s in KEYS.items()})


def parse_config(text: str) -> ExperimentConfig:
    vals = {k: s.default for k, s in KEYS.items()}
    seen = {}
    for no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=no)
        key, raw = (p.strip() for p in body.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", line=no)
        if key in seen:
            raise ConfigError(f"{key} already set on line {seen[key]}", key, no)
        if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
            raw = raw[1:-1]
        vals[key] = _coerce(key, raw, no)
        seen[key] = no
    return ExperimentConfig(vals)


def load_config(path, env=None) -> ExperimentConfig:
    """Parse and validate a config file; STAB_SEED in `env` overrides `seed`."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    cfg = parse_config(p.read_text())
    return apply_env(cfg, env)


def apply_env(cfg: ExperimentConfig, env=None) -> ExperimentConfig:
    env = os.environ if env is None else env
    raw = env.get("STAB_SEED")
    if raw is None or raw.strip() == "":
        return cfg
    try:
        return cfg.with_values({"seed": raw.strip()})
    except ConfigError as exc:
        raise ConfigError(f"STAB_SEED: {exc}", "seed") from None


def describe_defaults() -> str:
    """One line per key, for --help."""
    rows = []
    for k, s in KEYS.items():
        d = ",".join(str(x) for x in s.default) if isinstance(s.default, tuple) else s.default
        rows.append(f"  {k} = {d}    {s.doc}")
    return "\n".join(rows)
