"""The invariant verification suite behind ``equivar verify``.

Each check reproduces one of the library's headline identities or worked
examples at a pinned tolerance and deterministic seed, and reports the
worst observed defect together with its runtime budget.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import actions
from .actions import as_real, sample_point, slice_embed
from .config import parse_scenario
from .decomp import (
    ProjectionContext,
    compare_projections,
    default_context,
    extend_field,
    extend_gauge,
    horizontal_gauge,
    project_field,
    project_gauge,
)
from .fields import (
    build_scenario_field,
    build_scenario_gauge,
    check_equivariance,
    gauge_act,
    induced_field,
    transversal_parts,
)
from .flows import IntegratorConfig, integrate, reconstruct_flow
from .groups import make_splitting, rxs1_group
from .poly import InvariantPolynomial as P
from .branch import SubspaceSpec, relative_branch
from .releq import stabilization_radius, stabilize_frequencies, velocity
from .scenarios import get_scenario, invariants


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float
    seconds: float
    budget: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: worst {self.value:.3e} (tol {self.tol:.1e}, "
                f"{self.seconds:.2f}s / budget {self.budget:.0f}s)")

    def to_json(self) -> dict:
        return {
            "name": self.name, "passed": self.passed, "value": self.value,
            "tol": self.tol, "seconds": self.seconds, "budget": self.budget,
            "detail": self.detail,
        }


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def _random_slice_field(rng):
    def tab():
        return P(1, (((int(rng.integers(0, 3)), 0), float(rng.uniform(-1, 1))),))
    return build_scenario_field("circle", {"f": tab(), "g": tab()})


def _random_bundle_field(name, rng):
    sc = get_scenario(name)
    def tab():
        return P(1, (((int(rng.integers(0, 3)), 0), float(rng.uniform(-1, 1))),))
    return build_scenario_field(sc, {k: tab() for k in sc.field_keys})


def _random_bundle_gauge(name, rng):
    sc = get_scenario(name)
    def tab():
        return P(1, (((int(rng.integers(0, 3)), 0), float(rng.uniform(-1, 1))),))
    return build_scenario_gauge(sc, {k: tab() for k in sc.gauge_keys})


# ---------------------------------------------------------------------------
# the checks


def check_decomposition_identity(seed: int = 0) -> CheckResult:
    """X = E0 P0 X + d(h(X)) pointwise on both bundle demos."""

    def run():
        worst = 0.0
        for name in ("so3_bundle_demo", "r_x_circle_demo"):
            cfg = parse_scenario(name)
            x = cfg.field.at(0.25)
            ctx = default_context(cfg.scenario.name)
            recon = extend_field(ctx, project_field(ctx, x)) + induced_field(
                horizontal_gauge(ctx, x))
            rng = np.random.default_rng(seed)
            for _ in range(200):
                p = sample_point(cfg.scenario.space, rng)
                worst = max(worst, float(np.linalg.norm(x(p) - recon(p))))
        return worst

    worst, secs = _timed(run)
    return CheckResult("decomposition_identity", worst <= 1e-8, worst, 1e-8, secs, 5.0,
                       "so3_bundle_demo + r_x_circle_demo, 200 seeded points each")


def check_pe_identity(seed: int = 1) -> CheckResult:
    """P0 E0 Y = Y on 200 seeded slice points per bundle scenario."""

    def run():
        worst = 0.0
        rng = np.random.default_rng(seed)
        for name in ("so3_bundle", "r_x_circle"):
            ctx = default_context(name)
            fields = [_random_slice_field(rng) for _ in range(4)]
            for y in fields:
                py = project_field(ctx, extend_field(ctx, y))
                for _ in range(50):
                    v = sample_point(ctx.slice.space, rng)
                    worst = max(worst, float(np.linalg.norm(py(v) - y(v))))
        return worst

    worst, secs = _timed(run)
    return CheckResult("pe_identity", worst <= 1e-10, worst, 1e-10, secs, 2.0,
                       "4 slice fields x 50 points per bundle scenario")


def check_naturality(seed: int = 2) -> CheckResult:
    """h(X + d psi) + E1 P1 psi = psi + h(X) over seeded triples."""

    def run():
        worst = 0.0
        rng = np.random.default_rng(seed)
        for name in ("so3_bundle", "r_x_circle"):
            ctx = default_context(name)
            for _ in range(10):
                x = _random_bundle_field(name, rng)
                psi = _random_bundle_gauge(name, rng)
                lhs = horizontal_gauge(ctx, gauge_act(psi, x)) + extend_gauge(
                    ctx, project_gauge(ctx, psi))
                rhs = psi + horizontal_gauge(ctx, x)
                for _ in range(10):
                    p = sample_point(ctx.scenario.space, rng)
                    worst = max(worst, float(np.linalg.norm(lhs(p) - rhs(p))))
        return worst

    worst, secs = _timed(run)
    return CheckResult("naturality", worst <= 1e-8, worst, 1e-8, secs, 5.0,
                       "10 (X, psi) pairs x 10 points per bundle scenario")


def check_pitchfork_branch() -> CheckResult:
    """Pitchfork on the circle: lambda = w^2, velocity 1, period 2 pi."""

    def run():
        cfg = parse_scenario("circle_pitchfork")
        spec = SubspaceSpec(np.array([1.0, 0.0]), w_max=0.5)
        result = relative_branch(cfg.field, cfg.gauge, spec)
        assert len(result.samples) == 101
        worst = 0.0
        for s in result.samples:
            worst = max(worst, abs(s.lam - s.w**2))
            if abs(s.velocity[0] - 1.0) > 1e-9:
                return np.inf
            if abs(s.w) > 1e-12:
                if s.motion.kind != "periodic":
                    return np.inf
                if abs(s.motion.period - 2.0 * np.pi) > 1e-6:
                    return np.inf
        return worst

    worst, secs = _timed(run)
    return CheckResult("pitchfork_branch", worst <= 1e-6, worst, 1e-6, secs, 3.0,
                       "101-point branch on [-0.5, 0.5]; velocity and period pinned")


def check_torus_motion() -> CheckResult:
    """Diagonal torus branch: (1, sqrt2) quasi-periodic, (1, 2) periodic."""

    def run():
        spec = SubspaceSpec(np.array([1.0, 0.0, 1.0, 0.0]) / np.sqrt(2.0), w_max=0.5)
        cfg = parse_scenario("torus2_diagonal")
        result = relative_branch(cfg.field, cfg.gauge, spec)
        for s in result.samples:
            if abs(s.w) > 1e-12 and (s.motion.kind != "quasiperiodic" or s.freq_dim != 2):
                return 1.0
        rational = dict(parse_scenario("torus2_diagonal").raw)
        rational = {
            **rational,
            "coefficients": {**rational["coefficients"],
                             "g2": [{"deg": [0, 0, 0], "c": 2.0}]},
        }
        cfg2 = parse_scenario(rational)
        result2 = relative_branch(cfg2.field, cfg2.gauge, spec)
        for s in result2.samples:
            if abs(s.w) > 1e-12 and s.motion.kind != "periodic":
                return 1.0
        return 0.0

    worst, secs = _timed(run)
    return CheckResult("torus_motion_classes", worst == 0.0, worst, 0.0, secs, 3.0,
                       "relation oracle at height 100, tol 1e-9; trivial w=0 sample "
                       "is the group-fixed origin and stays steady")


def check_lerman_reconstruction() -> CheckResult:
    """F(tau) . flow of the radial part reproduces the full pitchfork flow."""

    def run():
        radial = build_scenario_field("circle", {
            "f": P(1, (((0, 1), 1.0), ((1, 0), -1.0))), "g": P.zero(1),
        }).at(0.25)
        psi = build_scenario_gauge("circle", {"psi": P.constant(1.0, 1)})
        cfg = IntegratorConfig(dt=1e-3, t_span=(0.0, 10.0))
        rec = reconstruct_flow(radial, psi, as_real(np.array([0.4 + 0j])), cfg)
        return rec.defect

    worst, secs = _timed(run)
    return CheckResult("lerman_reconstruction", worst <= 1e-5, worst, 1e-5, secs, 3.0,
                       "circle_pitchfork at lambda=0.25, RK4 dt=1e-3, tau in [0, 10]")


def check_frequency_stabilization(seed: int = 3) -> CheckResult:
    """Stabilize (1, sqrt2) to orders 1 and 0; field untouched outside the bump."""

    def run():
        from .decomp import BumpProfile
        from .releq import frequency_count
        from .actions import isotropy_algebra

        cfg = parse_scenario("torus2_diagonal")
        x = cfg.field.at(1.0)  # f = 1 - (u1 + u2)/2: equilibria circle through (1, 1)
        sc = cfg.scenario
        m = as_real(np.array([1.0 + 0j, 1.0 + 0j]))
        bump = BumpProfile(0.5, 1.0)
        iso = isotropy_algebra(sc.space, m)

        plan1 = stabilize_frequencies(x, m, 1, bump=bump)
        y1 = plan1.apply(x)
        d1 = frequency_count(sc, velocity(y1, m), iso)
        plan0 = stabilize_frequencies(x, m, 0, bump=bump)
        y0 = plan0.apply(x)
        d0 = frequency_count(sc, velocity(y0, m), iso)
        if (d1, d0) != (1, 0):
            return 1.0

        radius = stabilization_radius(sc, m)
        rng = np.random.default_rng(seed)
        outside = 0
        while outside < 50:
            p = rng.normal(size=4) * 1.6
            if radius(p) >= bump.outer:
                outside += 1
                if not (np.array_equal(y1(p), x(p)) and np.array_equal(y0(p), x(p))):
                    return 1.0
        return 0.0

    worst, secs = _timed(run)
    return CheckResult("frequency_stabilization", worst == 0.0, worst, 0.0, secs, 3.0,
                       "orders 1 then 0 at velocity (1, sqrt2); 50 points outside bump")


def check_o2_rigidity(seed: int = 4) -> CheckResult:
    """Only the zero table passes the O(2)-on-C gauge equivariance check."""

    def run():
        rng = np.random.default_rng(seed)
        candidates = [P.zero(1)]
        while len(candidates) < 500:
            n_terms = int(rng.integers(1, 5))
            terms = []
            for _ in range(n_terms):
                deg = (int(rng.integers(0, 5)), 0)
                mag = float(rng.uniform(0.25, 2.0)) * (1 if rng.random() < 0.5 else -1)
                terms.append((deg, mag))
            p = P(1, tuple(terms))
            if not p.is_zero:
                candidates.append(p)
        failures = 0.0
        for p in candidates:
            psi = build_scenario_gauge("o2_c", {"psi": p})
            report = check_equivariance(psi, n_samples=40, tol=1e-10, seed=7)
            if report.passed != p.is_zero:
                failures += 1.0
        return failures

    worst, secs = _timed(run)
    return CheckResult("o2_gauge_rigidity", worst == 0.0, worst, 0.0, secs, 3.0,
                       "500 candidates of degree <= 4 on o2_c_rigid; zero table included")


def check_projection_choice(seed: int = 5) -> CheckResult:
    """P1_0 X = P2_0 X + d(P1_1 h2(X)) for complements (1,0) vs (1,0.7)."""

    def run():
        cfg = parse_scenario("r_x_circle_demo")
        x = cfg.field.at(0.25)
        ctx1 = default_context("r_x_circle")
        tilted = make_splitting(rxs1_group(), [(0.0, 1.0)], complement_basis=[(1.0, 0.7)])
        ctx2 = ProjectionContext(cfg.scenario, tilted)
        report = compare_projections(x, ctx1, ctx2, n_samples=100, seed=seed)
        return report.max_defect

    worst, secs = _timed(run)
    return CheckResult("projection_choice", worst <= 1e-9, worst, 1e-9, secs, 2.0,
                       "r_x_circle_demo, complements span{(1,0)} vs span{(1,0.7)}")


def check_flow_invariance(seed: int = 6) -> CheckResult:
    """|z|^2 evolves identically under X and psi . X on circle_pitchfork."""

    def run():
        cfg = parse_scenario("circle_pitchfork")
        sc = cfg.scenario
        x = cfg.field.at(0.25)
        psi = cfg.gauge.at(0.25)
        y = gauge_act(psi, x)
        icfg = IntegratorConfig(dt=5e-3, t_span=(0.0, 5.0))
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(10):
            m0 = sample_point(sc.space, rng, radius=1.5)
            fx = integrate(x, m0, icfg)
            fy = integrate(y, m0, icfg)
            for a, b in zip(fx.states[::25], fy.states[::25]):
                gap = abs(invariants(sc, a)[0] - invariants(sc, b)[0])
                worst = max(worst, float(gap))
        return worst

    worst, secs = _timed(run)
    return CheckResult("isomorphism_flow_invariance", worst <= 1e-6, worst, 1e-6, secs,
                       5.0, "10 seeded starts, tau in [0, 5]")


ALL_CHECKS = [
    check_decomposition_identity,
    check_pe_identity,
    check_naturality,
    check_pitchfork_branch,
    check_torus_motion,
    check_lerman_reconstruction,
    check_frequency_stabilization,
    check_o2_rigidity,
    check_projection_choice,
    check_flow_invariance,
]

_SCENARIO_CHECKS = {
    "circle_pitchfork": [check_pitchfork_branch, check_lerman_reconstruction,
                         check_flow_invariance],
    "torus2_diagonal": [check_torus_motion, check_frequency_stabilization],
    "o2_c_rigid": [check_o2_rigidity],
    "o2_c2": [],
    "r_x_circle_demo": [check_decomposition_identity, check_pe_identity,
                        check_naturality, check_projection_choice],
    "so3_bundle_demo": [check_decomposition_identity, check_pe_identity,
                        check_naturality],
}


def run_verification(scenario_name: str | None = None) -> list[CheckResult]:
    """Run the full suite, or the checks touching one built-in scenario."""
    checks = ALL_CHECKS
    if scenario_name is not None:
        scoped = _SCENARIO_CHECKS.get(scenario_name)
        checks = scoped if scoped else ALL_CHECKS
    seen = []
    results = []
    for check in checks:
        if check in seen:
            continue
        seen.append(check)
        results.append(check())
    return results
