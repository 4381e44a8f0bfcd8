"""Command line front-end.

Verbs ``build``, ``chain``, ``shape`` and ``trig-scan`` read a flat config
file and write CSV: ``#`` comment lines carry metadata and verdicts, then a
header row and data rows. Floats are printed with 17 significant digits, so
a fixed config and seed give byte-identical files.

Exit codes: 0 success, 1 other library error, 2 config error,
3 nonexistence, 4 space not ECT, 5 interlacing violation.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .basis import build_bernstein_basis
from .closed_forms import (rho0, trig_basis_closed, trig_case, trig_counterexample,
                           trig_operator_apply)
from .config import ExperimentConfig, load_config, select_function, span_function
from .convexity import (arama_decomposition, is_g_monotone_sampled, sign_consistency_sampled,
                        verify_convexity_preservation, verify_majorization)
from .errors import (ChebBernsteinError, ConfigError, DegenerateSpace, InterlacingViolation,
                     Nonexistence, NotECT)
from .operator import apply_operator, build_chain, build_operator, interlacing_matrix
from .spaces import make_trig_space

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_NONEXISTENCE = 3
EXIT_NOT_ECT = 4
EXIT_INTERLACING = 5

SHAPE_TOL = 1e-8


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


class CsvReport:
    """Comment lines, one header row and data rows, assembled in order."""

    def __init__(self):
        self.lines = []

    def comment(self, key: str, value):
        self.lines.append(f"# {key}: {fmt(value)}")

    def header(self, columns: Sequence[str]):
        self.lines.append(",".join(columns))

    def row(self, values: Iterable):
        self.lines.append(",".join(fmt(v) for v in values))

    def rows(self, columns: Sequence[np.ndarray]):
        for values in zip(*columns):
            self.row(values)

    def write(self, path: Optional[str]):
        text = "\n".join(self.lines) + "\n"
        if path is None:
            sys.stdout.write(text)
        else:
            Path(path).write_text(text, encoding="utf-8")


def _describe(cfg: ExperimentConfig, report: CsvReport):
    report.comment("kind", cfg.kind)
    if cfg.kind == "trig":
        report.comment("b", cfg.require_b())
    else:
        report.comment("interval", f"{fmt(cfg.interval[0])},{fmt(cfg.interval[1])}")
    pair = cfg.pair()
    report.comment("pair", f"{pair.f0.name},{pair.f1.name}")
    return pair


def cmd_build(cfg: ExperimentConfig) -> CsvReport:
    report = CsvReport()
    report.comment("verb", "build")
    pair = _describe(cfg, report)
    basis = build_bernstein_basis(cfg.space())
    op = build_operator(basis, pair, cfg.grid)
    r0, r1 = op.fixing_residuals(cfg.grid)
    report.comment("n", op.n)
    report.comment("node_order", op.node_order)
    report.comment("fixing_residual_f0", r0)
    report.comment("fixing_residual_f1", r1)
    report.header(["k", "t_k", "alpha_k"])
    report.rows([np.arange(op.n + 1), op.nodes, op.weights])
    return report


def _chain(cfg: ExperimentConfig, strict: bool = True):
    levels = cfg.chain_levels()
    pair = cfg.pair()
    return build_chain([cfg.space(n) for n in levels], pair, cfg.grid, strict=strict), pair


def cmd_chain(cfg: ExperimentConfig) -> tuple:
    """Node table and interlacing matrix; raises after writing if any entry is false."""
    chain, _ = _chain(cfg, strict=False)
    nodes = CsvReport()
    nodes.comment("verb", "chain")
    _describe(cfg, nodes)
    nodes.comment("levels", len(chain.operators))
    nodes.header(["level", "k", "t_k", "alpha_k"])
    for level in chain.levels:
        op = chain[level]
        for k in range(op.n + 1):
            nodes.row([level, k, op.nodes[k], op.weights[k]])

    M = interlacing_matrix(chain)
    matrix = CsvReport()
    matrix.comment("verb", "chain-interlacing")
    matrix.comment("all_interlaced", bool(all(M[l, k] for l in range(len(M)) for k in range(l + 1))))
    matrix.header(["level"] + [f"k{k}" for k in range(1, len(M) + 1)])
    for l in range(len(M)):
        matrix.row([l + 2] + [M[l, k] if k <= l else "" for k in range(len(M))])
    failure = None
    for l in range(len(M)):
        for k in range(l + 1):
            if not M[l, k] and failure is None:
                failure = InterlacingViolation(l + 2, k + 1)
    return nodes, matrix, failure


def _test_function(cfg: ExperimentConfig, pair, default: str):
    name = cfg.function or default
    if name.startswith("span:"):
        c = [float(v) for v in name[len("span:"):].split(",")]
        if len(c) != 2:
            raise ConfigError("span: needs two coefficients")
        return span_function(pair, *c)
    if name == "f0":
        return pair.f0
    if name == "f1":
        return pair.f1
    return select_function(name, pair.interval)


def _scale(*arrays) -> float:
    return max(max(float(np.abs(a).max()) for a in arrays), np.finfo(float).tiny)


def shape_majorization(cfg, report):
    pair = _describe(cfg, report)
    f = _test_function(cfg, pair, "square")
    op = build_operator(build_bernstein_basis(cfg.space()), pair, cfg.grid)
    cmp = verify_majorization(op, f, cfg.grid)
    report.comment("n", op.n)
    report.comment("node_order", op.node_order)
    report.header(["x", "f", "B_n f", "diff"])
    report.rows([cmp.x, cmp.f, cmp.Bf, cmp.diff])
    tol = SHAPE_TOL * _scale(cmp.f)
    report.comment("min_diff", cmp.min_diff)
    report.comment("max_diff", cmp.max_diff)
    report.comment("verdict", "majorizes" if cmp.min_diff >= -tol else "does not majorize")


def shape_monotone_sequence(cfg, report):
    chain, pair = _chain(cfg)
    f = _test_function(cfg, pair, "exp")
    x = pair.interval.grid(cfg.grid)
    fx = np.asarray(f(x), dtype=float) * np.ones_like(x)
    images = [apply_operator(chain[n], f, x) for n in chain.levels]
    tol = SHAPE_TOL * _scale(fx)
    worst_step = min((float((images[i] - images[i + 1]).min()) for i in range(len(images) - 1)),
                     default=0.0)
    worst_major = min(float((B - fx).min()) for B in images)
    report.comment("levels", len(images))
    report.header(["x", "f"] + [f"B_{n} f" for n in chain.levels])
    report.rows([x, fx] + images)
    report.comment("min_step", worst_step)
    report.comment("min_majorization", worst_major)
    ok = worst_step >= -tol and worst_major >= -tol
    report.comment("verdict", "decreasing to f" if ok else "not monotone")


def shape_arama(cfg, report):
    chain, pair = _chain(cfg)
    f = _test_function(cfg, pair, "square")
    x = pair.interval.grid(cfg.grid)
    fx = np.asarray(f(x), dtype=float) * np.ones_like(x)
    report.header(["n", "x", "f", "B_n f", "B_{n+1} f", "sum G_k p_{n+1,k}"])
    summaries = []
    for n in list(chain.levels)[:-1]:
        lo, hi = chain[n], chain[n + 1]
        dec = arama_decomposition(lo, hi, f, cfg.grid)
        Bn, Bn1 = apply_operator(lo, f, x), apply_operator(hi, f, x)
        S = hi.basis.values(x)[:, 1:n + 1] @ dec.g_values
        report.rows([np.full(x.shape, n), x, fx, Bn, Bn1, S])
        summaries.append((n, dec))
    worst_g = min(float(d.g_values.min()) for _, d in summaries)
    worst_res = max(d.relative_residual for _, d in summaries)
    for n, d in summaries:
        report.comment(f"G_{n}", ";".join(fmt(v) for v in d.g_values))
        report.comment(f"relative_residual_{n}", d.relative_residual)
    report.comment("min_G", worst_g)
    report.comment("max_relative_residual", worst_res)
    report.comment("verdict", "non-negative decomposition"
                   if worst_g >= -1e-10 and worst_res < SHAPE_TOL else "decomposition fails")


def shape_preserve_convexity(cfg, report):
    pair = _describe(cfg, report)
    f = _test_function(cfg, pair, "square")
    op = build_operator(build_bernstein_basis(cfg.space()), pair, cfg.grid)
    res = verify_convexity_preservation(op, pair, f, cfg.grid, force=cfg.force, seed=cfg.seed)
    x = pair.interval.grid(cfg.grid)
    report.comment("node_order", op.node_order)
    report.header(["x", "f", "B_n f"])
    report.rows([x, np.asarray(f(x), dtype=float) * np.ones_like(x), apply_operator(op, f, x)])
    report.comment("min_det", res.min_det)
    report.comment("shape", res.verdict)
    report.comment("verdict", "convex" if res.convex else "not convex")


def shape_preserve_monotone(cfg, report):
    pair = _describe(cfg, report)
    f = _test_function(cfg, pair, "f1")
    g = pair.f0 if cfg.g is None else select_function(cfg.g, pair.interval)
    op = build_operator(build_bernstein_basis(cfg.space()), pair, cfg.grid)
    Bf = lambda t: apply_operator(op, f, t)
    before = is_g_monotone_sampled(g, f, pair.interval, cfg.grid)
    after = is_g_monotone_sampled(g, Bf, pair.interval, cfg.grid)
    x = pair.interval.grid(cfg.grid)
    report.comment("node_order", op.node_order)
    report.header(["x", "g", "f", "B_n f"])
    report.rows([x, np.asarray(g(x), dtype=float) * np.ones_like(x),
                 np.asarray(f(x), dtype=float) * np.ones_like(x), Bf(x)])
    report.comment("f", before)
    report.comment("B_n f", after)
    report.comment("verdict", "preserved" if before == after or after == "g-constant" else "not preserved")


def shape_trig_counterexample(cfg, report):
    b = cfg.require_b()
    ce = trig_counterexample(b, min(cfg.grid, 129))
    case = trig_case(b)
    p30, _, _, p33 = trig_basis_closed(b)
    x = np.linspace(0.0, b, cfg.grid)
    f = lambda t: (np.asarray(t, dtype=float) - case.t1) * (np.asarray(t, dtype=float) - case.t2)
    report.comment("b", b)
    report.comment("t1", ce.t1)
    report.comment("t2", ce.t2)
    report.header(["x", "f", "B_3 f", "F", "F''(0)"])
    report.rows([x, f(x), trig_operator_apply(b, f, x), p30(x) + p33(x),
                 np.full(x.shape, ce.second_derivative_at_0)])
    report.comment("image_shape", ce.verdict)
    report.comment("kernel_shape", ce.kernel_verdict)
    report.comment("verdict", "convex" if ce.verdict in ("convex", "affine") else "not convex")


def shape_sign_consistency(cfg, report):
    basis = build_bernstein_basis(cfg.space())
    rep = sign_consistency_sampled(basis, cfg.order, cfg.trials, cfg.seed, record=True)
    report.comment("order", rep.order)
    report.comment("trials", rep.trials)
    report.header(["trial", "points", "indices", "det", "relative"])
    for i, (xs, ks, det, rel) in enumerate(rep.samples):
        report.row([i, ";".join(fmt(v) for v in xs), ";".join(str(k) for k in ks), det, rel])
    report.comment("min_det", rep.min_det)
    report.comment("min_relative", rep.min_relative)
    report.comment("verdict", "sign consistent" if rep.min_relative >= -1e-10 else "sign change")


SHAPES = {
    "majorization": shape_majorization,
    "monotone-sequence": shape_monotone_sequence,
    "arama": shape_arama,
    "preserve-convexity": shape_preserve_convexity,
    "preserve-monotone": shape_preserve_monotone,
    "trig-counterexample": shape_trig_counterexample,
    "sign-consistency": shape_sign_consistency,
}


def cmd_shape(cfg: ExperimentConfig) -> CsvReport:
    if cfg.experiment is None:
        raise ConfigError("shape needs an experiment")
    report = CsvReport()
    report.comment("verb", "shape")
    report.comment("experiment", cfg.experiment)
    SHAPES[cfg.experiment](cfg, report)
    return report


def _scan_values(cfg: ExperimentConfig) -> np.ndarray:
    """Configured ``b_values``, else ``grid`` points spread over the open range ``(0, 2 pi)``."""
    if cfg.b_values:
        return np.array(cfg.b_values, dtype=float)
    return np.linspace(0.0, 2 * math.pi, cfg.grid + 2)[1:-1]


def cmd_trig_scan(cfg: ExperimentConfig) -> CsvReport:
    report = CsvReport()
    report.comment("verb", "trig-scan")
    report.comment("rho0", rho0())
    report.header(["b", "exists", "regime", "t0", "t1", "t2", "t3", "w0", "w1", "w2", "w3",
                   "pipeline_exists", "pipeline_max_node_diff"])
    for b in _scan_values(cfg):
        case = trig_case(float(b))
        try:
            op = build_operator(build_bernstein_basis(make_trig_space(float(b))),
                                ExperimentConfig(kind="trig", b=float(b)).pair())
            pipeline, nodes = True, op.nodes
        except Nonexistence:
            pipeline, nodes = False, None
        t = [0.0, case.t1, case.t2, float(b)]
        w = case.weights if case.exists else [""] * 4
        diff = float(np.abs(nodes - case.nodes).max()) if nodes is not None and case.exists else ""
        report.row([float(b), case.exists, case.regime, *t, *w, pipeline, diff])
    return report


def _sibling(path: Optional[str], suffix: str) -> Optional[str]:
    if path is None:
        return None
    p = Path(path)
    return str(p.with_name(p.stem + suffix + p.suffix))


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="cheb-bernstein",
                                     description="Generalized Bernstein operators on Chebyshev spaces.")
    parser.add_argument("verb", choices=("build", "chain", "shape", "trig-scan"))
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--out", help="output CSV (default: stdout)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--grid", type=int)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        cfg = cfg.with_overrides(seed=args.seed, grid=args.grid, out=args.out)
        out = cfg.out
        if args.verb == "build":
            cmd_build(cfg).write(out)
        elif args.verb == "chain":
            nodes, matrix, failure = cmd_chain(cfg)
            nodes.write(out)
            matrix.write(_sibling(out, "-interlacing") if out else None)
            if failure is not None:
                raise failure
        elif args.verb == "shape":
            cmd_shape(cfg).write(out)
        else:
            cmd_trig_scan(cfg).write(out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Nonexistence as exc:
        print(f"Nonexistence: {exc} [index {exc.k}, ratio {exc.ratio!r}]", file=sys.stderr)
        return EXIT_NONEXISTENCE
    except (NotECT, DegenerateSpace) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOT_ECT
    except InterlacingViolation as exc:
        print(f"InterlacingViolation: {exc}", file=sys.stderr)
        return EXIT_INTERLACING
    except ChebBernsteinError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
