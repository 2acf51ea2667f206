"""Bifurcation to relative equilibria along one-dimensional subspaces.

The test: a path of fields with a trivial branch is reduced, by subtracting
the induced field of a supplied gauge path, to a path tangent to a line
``W``; an eigenvalue crossing of the restricted linearization then yields a
branch of zeros continued in the parameter by Newton's method. The gauge
path hands each branch point its velocity, turning the strict branch of the
reduced path into a relative solution curve of the original one. On bundle
models the construction runs on the projected path and lifts through the
slice embedding, with the connecting gauge contributing the horizontal
velocity component.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .actions import isotropy_algebra, slice_embed
from .decomp import ProjectionContext, horizontal_gauge, project_field
from .errors import (
    DegenerateCrossing,
    NewtonDiverged,
    NotTangent,
    TrivialBranchMissing,
)
from .fields import EquivariantField, GaugeTransform, induced_field
from .releq import MotionClass, check_releq, classify_motion, frequency_count
from .scenarios import Scenario


@dataclass(frozen=True)
class SubspaceSpec:
    """A unit direction spanning the one-dimensional subspace W."""

    direction: np.ndarray
    w_max: float = 0.5
    tangency_tol: float = 1e-8

    def __post_init__(self):
        d = np.asarray(self.direction, float)
        n = np.linalg.norm(d)
        if abs(n - 1.0) > 1e-12:
            d = d / n
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class CrossingReport:
    sigma0: float
    slope: float
    fd_step: float
    tol_zero: float
    tol_slope: float

    @property
    def passed(self) -> bool:
        return abs(self.sigma0) <= self.tol_zero and abs(self.slope) >= self.tol_slope


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-10
    max_iter: int = 25
    fd_step: float = 1e-6


@dataclass
class BranchSample:
    delta: float
    w: float
    lam: float
    point: object
    velocity: np.ndarray | None
    freq_dim: int | None
    motion: MotionClass | None
    residual: float


@dataclass
class BranchResult:
    samples: list[BranchSample]
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def grid(self) -> np.ndarray:
        return np.array([s.w for s in self.samples])


# ---------------------------------------------------------------------------
# crossing test


def _check_tangency(ypath: EquivariantField, spec: SubspaceSpec, lam: float,
                    n_grid: int = 9) -> None:
    worst, witness = 0.0, None
    for w in np.linspace(-spec.w_max, spec.w_max, n_grid):
        val = ypath(w * spec.direction, lam)
        orth = val - (val @ spec.direction) * spec.direction
        gap = float(np.linalg.norm(orth))
        if gap > worst:
            worst, witness = gap, (w, lam)
    if worst > spec.tangency_tol:
        raise NotTangent(
            f"restriction to W is not tangent (defect {worst:.2e} at w={witness[0]:.3f}, "
            f"lambda={witness[1]:.3f})",
            witness=witness,
        )


def eigenvalue_path(ypath: EquivariantField, spec: SubspaceSpec, lam: float) -> float:
    """sigma(lambda): derivative at 0 of w -> <Y_lambda(w w_hat), w_hat>."""
    _check_tangency(ypath, spec, lam)
    h = 1e-6 * spec.w_max
    fp = ypath(h * spec.direction, lam) @ spec.direction
    fm = ypath(-h * spec.direction, lam) @ spec.direction
    return float((fp - fm) / (2.0 * h))


def crossing_check(ypath: EquivariantField, spec: SubspaceSpec,
                   tol_zero: float = 1e-8, tol_slope: float = 1e-6,
                   lam_step: float = 1e-5) -> CrossingReport:
    """Eigenvalue crossing test: sigma(0) = 0 with nonzero parameter slope."""
    sigma0 = eigenvalue_path(ypath, spec, 0.0)
    sp = eigenvalue_path(ypath, spec, lam_step)
    sm = eigenvalue_path(ypath, spec, -lam_step)
    slope = (sp - sm) / (2.0 * lam_step)
    return CrossingReport(sigma0, float(slope), lam_step, tol_zero, tol_slope)


# ---------------------------------------------------------------------------
# continuation


def default_grid(spec: SubspaceSpec, n: int = 101) -> np.ndarray:
    return np.linspace(-spec.w_max, spec.w_max, n)


def _branch_function(ypath: EquivariantField, spec: SubspaceSpec):
    def F(w: float, lam: float) -> float:
        if w == 0.0:
            return eigenvalue_path(ypath, spec, lam)
        return float(ypath(w * spec.direction, lam) @ spec.direction) / w

    return F


def _newton_solve(F, w: float, lam0: float, cfg: NewtonConfig) -> float:
    lam = lam0
    for _ in range(cfg.max_iter):
        val = F(w, lam)
        if not np.isfinite(val):
            raise NewtonDiverged(f"non-finite branch function at w={w:.4f}")
        if abs(val) <= cfg.tol:
            return lam
        dval = (F(w, lam + cfg.fd_step) - F(w, lam - cfg.fd_step)) / (2.0 * cfg.fd_step)
        if dval == 0.0 or not np.isfinite(dval):
            raise NewtonDiverged(f"vanishing branch derivative at w={w:.4f}")
        lam = lam - val / dval
    raise NewtonDiverged(f"Newton did not reach |F| <= {cfg.tol:.1e} at w={w:.4f}")


def continue_branch(ypath: EquivariantField, spec: SubspaceSpec,
                    grid: np.ndarray | None = None,
                    newton: NewtonConfig | None = None) -> BranchResult:
    """Continue the nontrivial zero branch lambda(w) of the reduced path.

    Marches outward from w = 0, seeding each Newton solve with the previous
    grid point's parameter; a diverged solve truncates that side of the
    branch and is recorded in the diagnostics.
    """
    newton = newton or NewtonConfig()
    report = crossing_check(ypath, spec)
    if not report.passed:
        raise DegenerateCrossing(
            f"sigma(0)={report.sigma0:.2e}, sigma'(0)={report.slope:.2e}"
        )
    grid = default_grid(spec) if grid is None else np.asarray(grid, float)
    F = _branch_function(ypath, spec)
    order = np.argsort(np.abs(grid), kind="stable")
    lam_by_index: dict[int, float] = {}
    diagnostics: dict = {"truncated": []}
    seeds = {1: 0.0, -1: 0.0}
    dead = {1: False, -1: False}
    for idx in order:
        w = float(grid[idx])
        side = 1 if w >= 0 else -1
        if dead[side]:
            continue
        try:
            lam = _newton_solve(F, w, seeds[side], newton)
        except NewtonDiverged as err:
            diagnostics["truncated"].append({"w": w, "reason": str(err)})
            dead[side] = True
            continue
        seeds[side] = lam
        lam_by_index[idx] = lam
    samples = []
    for idx in sorted(lam_by_index):
        w = float(grid[idx])
        lam = lam_by_index[idx]
        point = w * spec.direction
        residual = float(np.linalg.norm(ypath(point, lam)))
        samples.append(BranchSample(w, w, lam, point, None, None, None, residual))
    diagnostics["crossing"] = report
    return BranchResult(samples, diagnostics)


def _check_trivial_branch(xpath: EquivariantField, origin, tol: float = 1e-10,
                          n_grid: int = 11, lam_range=(-0.5, 0.5)) -> None:
    for lam in np.linspace(*lam_range, n_grid):
        norm = float(np.linalg.norm(xpath(origin, lam)))
        if norm > tol:
            raise TrivialBranchMissing(
                f"|X_lambda(0)| = {norm:.2e} at lambda={lam:.3f} exceeds {tol:.1e}"
            )


def relative_branch(xpath: EquivariantField, psipath: GaugeTransform,
                    spec: SubspaceSpec, grid: np.ndarray | None = None,
                    newton: NewtonConfig | None = None,
                    releq_tol: float = 1e-8) -> BranchResult:
    """Relative solution curve of xpath via the reduced path Y = X - d(psi).

    Each accepted sample is verified to be a relative equilibrium of the
    original field at its parameter value; the gauge path supplies the
    velocity and, through it, the motion class.
    """
    scenario = xpath.scenario
    origin = np.zeros(scenario.space.dim)
    _check_trivial_branch(xpath, origin)
    ypath = xpath - induced_field(psipath)
    result = continue_branch(ypath, spec, grid, newton)
    for sample in result.samples:
        xi = psipath(sample.point, sample.lam)
        report = check_releq(xpath, sample.point, releq_tol, sample.lam)
        if not report.passed:
            raise NewtonDiverged(
                f"branch point at w={sample.w:.4f} fails the relative-equilibrium "
                f"check (residual {report.residual:.2e})"
            )
        iso = isotropy_algebra(scenario.space, sample.point)
        sample.velocity = xi
        sample.freq_dim = frequency_count(scenario, xi, iso)
        sample.motion = classify_motion(scenario, xi, iso, freq_dim=sample.freq_dim)
        sample.residual = report.residual
    return result


def proper_branch(xpath: EquivariantField, ctx: ProjectionContext,
                  psipath: GaugeTransform, spec: SubspaceSpec,
                  grid: np.ndarray | None = None,
                  newton: NewtonConfig | None = None,
                  releq_tol: float = 1e-8) -> BranchResult:
    """Branch of relative equilibria on a bundle model, through the slice.

    The path is projected parameter-wise, the slice branch is continued, and
    samples are lifted by the slice embedding. The total velocity combines
    the slice velocity (included into the algebra) with the connecting
    gauge's value at the lifted point.
    """
    scenario = xpath.scenario
    base = slice_embed(scenario.space, np.zeros(scenario.space.dim))
    for lam in np.linspace(-0.5, 0.5, 11):
        report = check_releq(xpath, base, 1e-10, lam)
        if not report.passed:
            raise TrivialBranchMissing(
                f"[1, 0] is not a relative equilibrium at lambda={lam:.3f} "
                f"(residual {report.residual:.2e})"
            )
    projected = project_field(ctx, xpath)
    slice_result = relative_branch(projected, psipath, spec, grid, newton, releq_tol)
    h_gauge = horizontal_gauge(ctx, xpath)
    lifted = []
    for s in slice_result.samples:
        point = slice_embed(scenario.space, s.point)
        xi_total = ctx.splitting.sub_from_coords(np.atleast_1d(s.velocity)) + h_gauge(
            point, s.lam
        )
        report = check_releq(xpath, point, releq_tol, s.lam)
        if not report.passed:
            raise NewtonDiverged(
                f"lifted branch point at w={s.w:.4f} fails the bundle "
                f"relative-equilibrium check (residual {report.residual:.2e})"
            )
        iso = isotropy_algebra(scenario.space, point)
        d = frequency_count(scenario, xi_total, iso)
        motion = classify_motion(scenario, xi_total, iso, freq_dim=d)
        lifted.append(BranchSample(s.delta, s.w, s.lam, point, xi_total, d, motion,
                                   report.residual))
    return BranchResult(lifted, dict(slice_result.diagnostics, slice_branch=slice_result))
