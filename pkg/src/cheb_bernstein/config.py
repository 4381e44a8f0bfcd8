"""Flat ``key = value`` experiment configs and the selectors they name.

Blank lines and ``#`` comments are ignored. Unknown keys are an error so that
typos do not silently fall back to defaults.
"""

from __future__ import annotations

import ast
import math
import operator as _op
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigError
from .spaces import (ChebyshevSpace, FunctionDescriptor, HaarPair, Interval, as_descriptor,
                     constant, exp_monomial, linear_combination, make_exponential_space,
                     make_haar_pair, make_polynomial_space, make_trig_space, monomial, power)

KINDS = ("polynomial", "exponential", "trig")
EXPERIMENTS = ("majorization", "monotone-sequence", "arama", "preserve-convexity",
               "preserve-monotone", "trig-counterexample", "sign-consistency")

_BINOPS = {ast.Add: _op.add, ast.Sub: _op.sub, ast.Mult: _op.mul, ast.Div: _op.truediv}


def parse_number(text: str) -> float:
    """A float, ``pi``, or ``+ - * /`` arithmetic on those (``3*pi/2``)."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ConfigError(f"cannot parse number {text!r}")

    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ConfigError(f"cannot parse number {text!r}") from None
    try:
        return ev(tree.body)
    except ZeroDivisionError:
        raise ConfigError(f"division by zero in {text!r}") from None


def parse_list(text: str) -> list:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {text!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "polynomial"
    degree: Optional[int] = None
    lambdas: tuple = ()
    b: Optional[float] = None
    interval: tuple = (0.0, 1.0)
    f0: Optional[str] = None
    f1: Optional[str] = None
    experiment: Optional[str] = None
    function: Optional[str] = None
    g: Optional[str] = None
    levels: tuple = ()
    b_values: tuple = ()
    order: int = 2
    trials: int = 1000
    force: bool = False
    grid: int = 257
    seed: int = 0
    out: Optional[str] = None
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.grid < 3:
            raise ConfigError(f"grid must be at least 3, got {self.grid}")
        if self.experiment is not None and self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    # -- spaces -------------------------------------------------------------

    def get_interval(self) -> Interval:
        if self.kind == "trig":
            return Interval(0.0, self.require_b())
        return Interval(*self.interval)

    def require_b(self) -> float:
        if self.b is None:
            raise ConfigError("trig kind needs b")
        return self.b

    def top_degree(self) -> int:
        if self.kind == "polynomial":
            if self.degree is None:
                raise ConfigError("polynomial kind needs degree")
            return self.degree
        if self.kind == "exponential":
            if len(self.lambdas) < 2:
                raise ConfigError("exponential kind needs at least two lambdas")
            return len(self.lambdas) - 1
        return 3

    def space(self, n: Optional[int] = None) -> ChebyshevSpace:
        """The configured space, or its degree-``n`` member of the nested chain."""
        n = self.top_degree() if n is None else n
        try:
            if self.kind == "polynomial":
                return make_polynomial_space(n, self.get_interval())
            if self.kind == "exponential":
                return make_exponential_space(self.lambdas[:n + 1], self.get_interval())
            if n != 3:
                raise ConfigError("the trigonometric space only exists at n = 3")
            return make_trig_space(self.require_b())
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def chain_levels(self) -> list:
        """Degrees ``1..N`` of a nested chain; anything else is a config error."""
        if self.kind == "trig":
            raise ConfigError("the trigonometric space does not form a chain")
        top = self.top_degree()
        levels = list(self.levels) if self.levels else list(range(1, top + 1))
        if levels != list(range(1, len(levels) + 1)):
            raise ConfigError(f"chain levels must be 1, 2, ..., N in order, got {levels}")
        if levels[-1] > top:
            raise ConfigError(f"level {levels[-1]} exceeds the configured degree {top}")
        return levels

    # -- pair and test functions --------------------------------------------

    def _default_selectors(self) -> tuple:
        if self.kind == "exponential":
            l0, l1 = self.lambdas[0], self.lambdas[1]
            if l0 == l1:
                return f"exponential-{l0:g}", f"x-exponential-{l0:g}"
            lo, hi = sorted((l0, l1))
            return f"exponential-{lo:g}", f"exponential-{hi:g}"
        return "constant-one", "identity"

    def pair(self) -> HaarPair:
        d0, d1 = self._default_selectors()
        f0 = select_function(self.f0 or d0)
        f1 = select_function(self.f1 or d1)
        try:
            return make_haar_pair(f0, f1, self.get_interval())
        except Exception as exc:
            raise ConfigError(f"invalid pair ({f0.name}, {f1.name}): {exc}") from exc


def select_function(name: str, interval: Optional[Interval] = None) -> FunctionDescriptor:
    """Named test functions.

    ``constant-one``, ``identity``, ``power-j`` (``x**j``), ``exponential-L``
    (``exp(L x)``), ``x-exponential-L`` (``x exp(L x)``), ``abs-center``
    (``|x - m|`` with ``m`` the interval midpoint), ``square``, ``cube``,
    ``exp``.
    """
    name = name.strip()
    try:
        if name == "constant-one":
            return constant(1.0)
        if name == "identity":
            return monomial(1)
        if name == "square":
            return monomial(2)
        if name == "cube":
            return monomial(3)
        if name == "exp":
            return exp_monomial(0, 1.0)
        if name.startswith("power-"):
            return power(parse_number(name[len("power-"):]))
        if name.startswith("x-exponential-"):
            return exp_monomial(1, parse_number(name[len("x-exponential-"):]))
        if name.startswith("exponential-"):
            return exp_monomial(0, parse_number(name[len("exponential-"):]))
        if name == "abs-center":
            m = 0.5 if interval is None else interval.midpoint
            return as_descriptor(lambda x: np.abs(np.asarray(x, dtype=float) - m), f"|x-{m:g}|")
    except ConfigError:
        raise
    raise ConfigError(f"unknown function selector {name!r}")


def span_function(pair: HaarPair, c0: float, c1: float) -> FunctionDescriptor:
    return linear_combination([c0, c1], [pair.f0, pair.f1], name=f"{c0:g}*f0+{c1:g}*f1")


_KEYS = {
    "kind": str, "degree": int, "lambdas": "list", "b": float, "interval": "list",
    "f0": str, "f1": str, "experiment": str, "function": str, "g": str, "levels": "intlist",
    "b_values": "list", "order": int, "trials": int, "force": bool, "grid": int, "seed": int,
    "out": str,
}


def _convert(key: str, kind, text: str):
    if kind is str:
        return text
    if kind is int:
        return _parse_int(key, text)
    if kind is float:
        return parse_number(text)
    if kind is bool:
        low = text.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key} must be a boolean, got {text!r}")
        return low in ("true", "1", "yes")
    if kind == "intlist":
        return tuple(_parse_int(key, t.strip()) for t in text.split(",") if t.strip())
    return tuple(parse_list(text))


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, _KEYS[key], value)
    if "interval" in values and len(values["interval"]) != 2:
        raise ConfigError("interval needs exactly two numbers a, b")
    return ExperimentConfig(**values)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
