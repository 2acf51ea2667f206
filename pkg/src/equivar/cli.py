"""Command-line front end.

Subcommands: ``decompose | releq | stabilize | flow | branch | verify``.
Common flags: ``--scenario <path|name>``, ``--out <path>``, ``--seed <u64>``,
``--tol <float>``, ``--svg``. The log level is set by the ``EQUIVAR_LOG``
environment variable (error, warn, info, debug).

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 numerical
failure. Every numerical result written by a subcommand comes from the same
library calls a direct user would make; the CLI only parses, dispatches,
and serializes. CSV floats carry 17 significant digits so files round-trip
to full precision.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import errors
from .actions import BundlePoint, slice_embed
from .branch import SubspaceSpec, proper_branch, relative_branch
from .config import ScenarioConfig, parse_scenario
from .decomp import BumpProfile, decompose_at, default_context
from .fields import build_scenario_gauge, gauge_act, induced_field, transversal_parts
from .flows import IntegratorConfig, integrate, reconstruct_flow
from .poly import InvariantPolynomial
from .releq import analyze_releq, find_releq, stabilize_frequencies
from .scenarios import slice_gauge_coeffs
from .verify import run_verification

log = logging.getLogger("equivar")

SCHEMA_VERSION = 1

_BAD_INPUT = (errors.ParseError, errors.UnknownScenario, errors.MissingCoefficient,
              errors.LambdaOutOfRange, errors.DimensionMismatch, errors.ScenarioMismatch)
_NUMERICAL = (errors.NewtonDiverged, errors.NoConvergence, errors.StepLimitExceeded,
              errors.ChartExit, errors.DegenerateCrossing, errors.SingularFrame,
              errors.ResidualTooLarge, errors.AmbiguousRank, errors.NotTangent,
              errors.TrivialBranchMissing, errors.NotRelativeEquilibrium,
              errors.OrderOutOfRange, errors.UnsupportedGroup,
              errors.PeriodReconstructionFailed)


def _setup_logging() -> None:
    level = {"error": logging.ERROR, "warn": logging.WARNING,
             "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("EQUIVAR_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def fmt(value: float) -> str:
    return f"{float(value):.17g}"


def _digest(cfg: ScenarioConfig) -> str:
    blob = json.dumps(cfg.raw, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _report(command: str, cfg: ScenarioConfig | None, outputs, checks, started) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs_digest": _digest(cfg) if cfg is not None else None,
        "outputs": [str(p) for p in outputs],
        "checks": checks,
        "wall_time_s": round(time.perf_counter() - started, 4),
    }


def _parse_point(cfg: ScenarioConfig, text: str | None):
    space = cfg.scenario.space
    if text is None:
        v = np.zeros(space.dim)
        v[0::2] = 0.5
    else:
        try:
            v = np.array([float(t) for t in text.split(",")], dtype=float)
        except ValueError as err:
            raise errors.ParseError(f"cannot parse point {text!r}: {err}") from err
        if v.size != space.dim:
            raise errors.ParseError(
                f"point has {v.size} coordinates, scenario expects {space.dim}"
            )
    if space.is_bundle:
        return slice_embed(space, v)
    return v


def _state_coords(cfg: ScenarioConfig, state) -> np.ndarray:
    if isinstance(state, BundlePoint):
        return np.concatenate([np.asarray(state.g, float).ravel(), state.v])
    return np.asarray(state, float)


def _subspace(cfg: ScenarioConfig, text: str, w_max: float) -> SubspaceSpec:
    dim = cfg.scenario.space.dim
    if text == "real-axis":
        direction = np.zeros(dim)
        direction[0] = 1.0
    elif text == "diagonal":
        direction = np.zeros(dim)
        direction[0::2] = 1.0
    else:
        try:
            direction = np.array([float(t) for t in text.split(",")], dtype=float)
        except ValueError as err:
            raise errors.ParseError(f"cannot parse subspace {text!r}: {err}") from err
        if direction.size != dim:
            raise errors.ParseError(
                f"subspace vector has {direction.size} coordinates, expected {dim}"
            )
    n = np.linalg.norm(direction)
    if n == 0.0:
        raise errors.ParseError("subspace vector must be nonzero")
    return SubspaceSpec(direction / n, w_max=w_max)


# ---------------------------------------------------------------------------
# artifact writers


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def emit_svg(points, xlabel: str, ylabel: str, width: int = 640, height: int = 480) -> str:
    """Single-polyline SVG plot; byte-deterministic for fixed input."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise errors.ParseError("SVG emission needs at least 2 samples")
    xs, ys = zip(*pts)
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    dx = (x1 - x0) or 1.0
    dy = (y1 - y0) or 1.0
    mx, my = 60, 40
    sx = lambda x: mx + (x - x0) / dx * (width - 2 * mx)
    sy = lambda y: height - my - (y - y0) / dy * (height - 2 * my)
    poly = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in pts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<polyline points="{poly}" fill="none" stroke="black" stroke-width="1.5"/>\n'
        f'<text x="{width // 2}" y="{height - 8}" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{xlabel}</text>\n'
        f'<text x="14" y="{height // 2}" text-anchor="middle" font-family="monospace" '
        f'font-size="14" transform="rotate(-90 14 {height // 2})">{ylabel}</text>\n'
        f"</svg>\n"
    )


def _maybe_svg(args, out_path: Path, points, xlabel, ylabel, outputs) -> None:
    if getattr(args, "svg", False):
        svg_path = out_path.with_suffix(".svg")
        svg_path.write_text(emit_svg(points, xlabel, ylabel))
        outputs.append(svg_path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_decompose(args) -> dict:
    started = time.perf_counter()
    cfg = parse_scenario(args.scenario)
    x = cfg.field.at(args.lam) if cfg.field.depends_on_lambda else cfg.field
    space = cfg.scenario.space
    base = slice_embed(space, np.zeros(space.dim)) if space.is_bundle else np.zeros(space.dim)
    bump = BumpProfile(args.bump_a, args.bump_b)
    result = decompose_at(x, base, bump)
    rng = np.random.default_rng(args.seed)
    samples = []
    from .actions import sample_point

    for _ in range(args.grid_n):
        p = sample_point(space, rng)
        samples.append({
            "point": _state_coords(cfg, p).tolist(),
            "transversal": result.transversal(p).tolist(),
            "gauge": result.gauge(p).tolist(),
        })
    payload = {
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.name or cfg.scenario.name,
        "lambda": args.lam,
        "bump": {"a": bump.inner, "b": bump.outer},
        "samples": samples,
    }
    out = Path(args.out)
    out.write_text(json.dumps(payload, indent=2) + "\n")
    return _report("decompose", cfg, [out], [{"name": "decompose", "passed": True}], started)


def cmd_releq(args) -> dict:
    started = time.perf_counter()
    cfg = parse_scenario(args.scenario)
    x = cfg.field.at(args.lam) if cfg.field.depends_on_lambda else cfg.field
    seed_point = _parse_point(cfg, args.point)
    record = find_releq(x, seed_point, tol=args.tol or cfg.tolerances["newton"])
    out = Path(args.out)
    out.write_text(json.dumps(record.to_json(), indent=2) + "\n")
    return _report("releq", cfg, [out],
                   [{"name": "releq_residual", "passed": True,
                     "value": record.residual}], started)


def cmd_stabilize(args) -> dict:
    started = time.perf_counter()
    cfg = parse_scenario(args.scenario)
    x = cfg.field.at(args.lam) if cfg.field.depends_on_lambda else cfg.field
    seed_point = _parse_point(cfg, args.point)
    record = find_releq(x, seed_point)
    bump = BumpProfile(args.bump_a, args.bump_b)
    plan = stabilize_frequencies(x, record.point, args.j, bump=bump)
    modified = plan.apply(x)
    after = analyze_releq(modified, record.point)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "order": plan.order,
        "lattice_vectors": plan.lattice_vectors.tolist(),
        "before": record.to_json(),
        "after": after.to_json(),
    }
    out = Path(args.out)
    out.write_text(json.dumps(payload, indent=2) + "\n")
    ok = after.freq_dim == args.j
    return _report("stabilize", cfg, [out],
                   [{"name": "stabilized_order", "passed": ok,
                     "value": after.freq_dim}], started)


def cmd_flow(args) -> dict:
    started = time.perf_counter()
    cfg = parse_scenario(args.scenario)
    x = cfg.field.at(args.lam) if cfg.field.depends_on_lambda else cfg.field
    start = _parse_point(cfg, args.start)
    icfg = IntegratorConfig(method=args.method, dt=args.dt, t_span=(0.0, args.t))
    out = Path(args.out)
    outputs = [out]
    checks = []
    if args.reconstruct:
        psi = cfg.gauge.at(args.lam) if cfg.gauge.depends_on_lambda else cfg.gauge
        base = x - induced_field(psi)
        rec = reconstruct_flow(base, psi, start, icfg)
        rows = []
        for i, t in enumerate(rec.base_flow.times):
            state = _state_coords(cfg, rec.reconstructed[i])
            group = np.asarray(rec.group_curve[i], float).ravel()
            direct = _state_coords(cfg, rec.direct.states[i])
            defect = float(np.linalg.norm(state - direct))
            rows.append([float(t), *map(float, state), *map(float, group), defect])
        ncols = len(rows[0]) - 2 - len(np.asarray(rec.group_curve[0]).ravel())
        header = (["t"] + [f"state{i}" for i in range(ncols)]
                  + [f"F{i}" for i in range(len(np.asarray(rec.group_curve[0]).ravel()))]
                  + ["defect"])
        write_csv(out, header, rows)
        checks.append({"name": "reconstruction_defect", "passed": rec.defect <= 1e-5,
                       "value": rec.defect})
        plot_pts = [(r[1], r[2]) for r in rows]
    else:
        res = integrate(x, start, icfg)
        rows = []
        for t, s in zip(res.times, res.states):
            coords = _state_coords(cfg, s)
            rows.append([float(t), *map(float, coords)])
        header = ["t"] + [f"state{i}" for i in range(len(rows[0]) - 1)]
        write_csv(out, header, rows)
        checks.append({"name": "chart_exit", "passed": not res.chart_exit})
        plot_pts = [(r[1], r[2]) for r in rows] if len(rows[0]) > 2 else [
            (r[0], r[1]) for r in rows]
    _maybe_svg(args, out, plot_pts, "state0", "state1", outputs)
    return _report("flow", cfg, outputs, checks, started)


def cmd_branch(args) -> dict:
    started = time.perf_counter()
    cfg = parse_scenario(args.scenario)
    scenario = cfg.scenario
    grid = np.linspace(-args.wmax, args.wmax, args.grid_n)
    if scenario.is_bundle:
        spec = _subspace_slice(cfg, args.subspace, args.wmax)
        slice_psi = build_scenario_gauge(
            "circle", slice_gauge_coeffs(scenario, cfg.field.coeffs))
        ctx = default_context(scenario.name)
        result = proper_branch(cfg.field, ctx, slice_psi, spec, grid=grid)
    else:
        spec = _subspace(cfg, args.subspace, args.wmax)
        result = relative_branch(cfg.field, cfg.gauge, spec, grid=grid)
    rows = []
    for s in result.samples:
        coords = _state_coords(cfg, s.point)
        vel = np.atleast_1d(s.velocity)
        rows.append([s.delta, s.w, s.lam, *map(float, coords), *map(float, vel),
                     s.freq_dim, s.motion.label, s.residual])
    npoint = len(_state_coords(cfg, result.samples[0].point))
    nvel = len(np.atleast_1d(result.samples[0].velocity))
    header = (["delta", "w", "lambda"] + [f"point{i}" for i in range(npoint)]
              + [f"velocity{i}" for i in range(nvel)]
              + ["freq_dim", "motion", "residual"])
    out = Path(args.out)
    write_csv(out, header, rows)
    outputs = [out]
    _maybe_svg(args, out, [(s.w, s.lam) for s in result.samples], "w", "lambda", outputs)
    truncated = result.diagnostics.get("truncated", [])
    return _report("branch", cfg, outputs,
                   [{"name": "branch_complete", "passed": not truncated,
                     "value": len(result.samples)}], started)


def _subspace_slice(cfg: ScenarioConfig, text: str, w_max: float) -> SubspaceSpec:
    # bundle branches continue on the slice representation
    if text == "real-axis":
        direction = np.zeros(cfg.scenario.space.dim)
        direction[0] = 1.0
        return SubspaceSpec(direction, w_max=w_max)
    try:
        direction = np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError as err:
        raise errors.ParseError(f"cannot parse subspace {text!r}: {err}") from err
    return SubspaceSpec(direction / np.linalg.norm(direction), w_max=w_max)


def cmd_verify(args) -> tuple[dict, bool]:
    started = time.perf_counter()
    cfg = parse_scenario(args.scenario) if args.scenario else None
    results = run_verification(cfg.name if cfg is not None else None)
    for r in results:
        print(r.line())
    all_passed = all(r.passed for r in results)
    report = _report("verify", cfg, [], [r.to_json() for r in results], started)
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps(report, indent=2) + "\n")
        report["outputs"] = [str(out)]
    return report, all_passed


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equivar",
        description="Equivariant vector fields: decomposition, relative equilibria, "
                    "flows, and bifurcation branches over the scenario catalog.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--scenario", required=True,
                       help="built-in name, config file path, or inline JSON")
        if needs_out:
            p.add_argument("--out", required=True, help="output artifact path")
        p.add_argument("--seed", type=int, default=0, help="sampling seed")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--svg", action="store_true", help="emit a polyline SVG plot")
        p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                       help="path parameter value")

    p = sub.add_parser("decompose", help="transversal + gauge decomposition at the origin")
    common(p)
    p.add_argument("--bump-a", type=float, default=0.5)
    p.add_argument("--bump-b", type=float, default=1.0)
    p.add_argument("--grid-n", type=int, default=20, help="sample points serialized")

    p = sub.add_parser("releq", help="find and classify a relative equilibrium")
    common(p)
    p.add_argument("--point", default=None, help="seed point, comma-separated")

    p = sub.add_parser("stabilize", help="frequency stabilization at a relative equilibrium")
    common(p)
    p.add_argument("--point", default=None)
    p.add_argument("--j", type=int, required=True, help="target frequency order")
    p.add_argument("--bump-a", type=float, default=0.5)
    p.add_argument("--bump-b", type=float, default=1.0)

    p = sub.add_parser("flow", help="integrate a trajectory (optionally reconstructed)")
    common(p)
    p.add_argument("--start", default=None, help="initial point, comma-separated")
    p.add_argument("--t", type=float, default=10.0, help="time horizon")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--method", choices=("rk4", "rk45"), default="rk4")
    p.add_argument("--reconstruct", action="store_true",
                   help="co-integrate the group curve and report the defect")

    p = sub.add_parser("branch", help="continue a branch of relative equilibria")
    common(p)
    p.add_argument("--subspace", default="real-axis",
                   help="'real-axis', 'diagonal', or a comma-separated direction")
    p.add_argument("--wmax", type=float, default=0.5)
    p.add_argument("--grid-n", type=int, default=101)

    p = sub.add_parser("verify", help="run the invariant verification suite")
    p.add_argument("--scenario", default=None,
                   help="restrict to checks touching one built-in scenario")
    p.add_argument("--out", default=None, help="write the JSON run report here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            report, ok = cmd_verify(args)
            print(json.dumps(report))
            return 0 if ok else 1
        handler = {
            "decompose": cmd_decompose,
            "releq": cmd_releq,
            "stabilize": cmd_stabilize,
            "flow": cmd_flow,
            "branch": cmd_branch,
        }[args.command]
        report = handler(args)
        print(json.dumps(report))
        return 0 if all(c.get("passed", True) for c in report["checks"]) else 1
    except _BAD_INPUT as err:
        log.error("%s", err)
        print(f"error: {err}", file=sys.stderr)
        return 2
    except _NUMERICAL as err:
        log.error("%s", err)
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
