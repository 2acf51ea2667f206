"""Slice decomposition of equivariant fields on bundle local models.

The equivalence between equivariant fields on G x^K V and K-equivariant
fields on V is made computational: extension ``E0/E1``, projection
``P0/P1`` determined by a splitting g = k (+) q, the connecting gauge
transformation ``h`` with ``X = E0 P0 X + d(h(X))``, the bump-localized
transversal/gauge decomposition at a relative equilibrium, and the
comparison of different projection choices.

All three of ``P0``, ``P1`` and ``h`` come out of one small linear solve
per slice point: write the tangent value at ``[1, v]`` in the frame of the
chosen complement's fundamental fields plus the vertical identity block.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import actions, scenarios
from .actions import BundlePoint, orbit_tangency_residual, slice_embed
from .errors import (
    NotRelativeEquilibrium,
    ResidualTooLarge,
    ScenarioMismatch,
    SingularFrame,
    ValuesOutsideSubalgebra,
)
from .fields import EquivariantField, GaugeTransform, induced_field, transversal_parts
from .groups import AlgebraSplitting, adjoint, default_splitting
from .scenarios import Scenario, get_scenario, slice_scenario


@dataclass(frozen=True)
class BumpProfile:
    """Smooth K-invariant bump in the invariant radius: 1 inside, 0 outside."""

    inner: float
    outer: float

    def __post_init__(self):
        if not (0.0 < self.inner < self.outer):
            raise ValueError("bump radii must satisfy 0 < inner < outer")

    def __call__(self, r: float) -> float:
        return _mollifier(self.outer - r) / (
            _mollifier(self.outer - r) + _mollifier(r - self.inner)
        )


def _mollifier(x: float) -> float:
    return float(np.exp(-1.0 / x)) if x > 0.0 else 0.0


class ProjectionContext:
    """A bundle scenario together with a choice of invariant splitting.

    Caches the per-slice-point frame solver; the cache is the only mutable
    state and is lock-protected, so contexts are safe to share.
    """

    def __init__(self, scenario: Scenario, splitting: AlgebraSplitting | None = None):
        if isinstance(scenario, str):
            scenario = get_scenario(scenario)
        if not scenario.is_bundle:
            raise ScenarioMismatch(f"scenario {scenario.name!r} is not a bundle model")
        self.scenario = scenario
        self.splitting = splitting if splitting is not None else default_splitting(
            scenario.space.group
        )
        sub = np.asarray(scenario.space.group.subgroup_basis, float)
        if self.splitting.subalgebra_basis.shape != sub.shape or not np.allclose(
            _row_space_projector(self.splitting.subalgebra_basis), _row_space_projector(sub)
        ):
            raise ScenarioMismatch("splitting subalgebra differs from the bundle's K-algebra")
        self.slice = slice_scenario(scenario)
        self._solvers: dict[bytes, np.ndarray] = {}
        self._lock = threading.Lock()

    # -- frame solve -------------------------------------------------------

    def _solver(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        key = np.asarray(v, float).tobytes()
        with self._lock:
            hit = self._solvers.get(key)
        if hit is not None:
            return hit
        space = self.scenario.space
        p = slice_embed(space, v)
        cols = [actions.infinitesimal_action(space, q, p)
                for q in self.splitting.complement_basis]
        dq = len(cols)
        dv = space.dim
        frame = np.column_stack(cols + [np.concatenate([np.zeros(dq), e])
                                        for e in np.eye(dv)])
        if np.linalg.cond(frame) > 1e10:
            raise SingularFrame(f"degenerate q-frame at slice point {v!r}")
        entry = (frame, np.linalg.pinv(frame))
        with self._lock:
            self._solvers[key] = entry
        return entry

    def split_tangent(self, v: np.ndarray, tv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Write a tangent at [1, v] as (q-frame coefficients, vertical part)."""
        frame, pinv = self._solver(v)
        tv = np.asarray(tv, float)
        sol = pinv @ tv
        dq = self.splitting.dim_comp
        recon = float(np.linalg.norm(frame @ sol - tv))
        if recon > 1e-8 * max(1.0, float(np.linalg.norm(tv))):
            raise ResidualTooLarge(
                f"tangent at {v!r} is not in the span of the q-frame (residual {recon:.2e})"
            )
        return sol[:dq], sol[dq:]


def _row_space_projector(rows: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(np.asarray(rows, float).T)
    return q @ q.T


@lru_cache(maxsize=None)
def default_context(name: str) -> ProjectionContext:
    return ProjectionContext(get_scenario(name))


def _check_bound(ctx: ProjectionContext, obj, where: str) -> None:
    if obj.scenario.name != ctx.scenario.name:
        raise ScenarioMismatch(
            f"{where}: object is bound to {obj.scenario.name!r}, context to "
            f"{ctx.scenario.name!r}"
        )


# ---------------------------------------------------------------------------
# the functors


def extend_field(ctx: ProjectionContext, y: EquivariantField) -> EquivariantField:
    """E0: vertical equivariant extension of a slice field to the bundle."""
    if y.scenario.name != ctx.slice.name:
        raise ScenarioMismatch(
            f"slice field bound to {y.scenario.name!r}, expected {ctx.slice.name!r}"
        )
    dq = ctx.splitting.dim_comp
    ev = y.evaluate
    return EquivariantField(
        ctx.scenario,
        lambda p, lam=0.0: np.concatenate([np.zeros(dq), ev(p.v, lam)]),
        depends_on_lambda=y.depends_on_lambda,
        lambda_interval=y.lambda_interval,
    )


def extend_gauge(ctx: ProjectionContext, psi: GaugeTransform,
                 check_samples: int = 8, tol: float = 1e-10) -> GaugeTransform:
    """E1: equivariant extension Ad(g) iota(psi(v)) of a k-valued slice gauge.

    Accepts a gauge on the slice scenario (values are k-coordinates) or one
    whose values already live in the full algebra, in which case membership
    in k is checked at sampled slice points.
    """
    group = ctx.scenario.space.group
    dim_k = ctx.splitting.dim_sub
    dim_g = group.dim_algebra

    if psi.scenario.name == ctx.slice.name:
        ev = psi.evaluate
    elif psi.scenario.name == ctx.scenario.name:
        raw = psi.evaluate
        rng = np.random.default_rng(0)
        for _ in range(check_samples):
            v = actions.sample_point(ctx.slice.space, rng)
            val = raw(slice_embed(ctx.scenario.space, v), 0.0)
            if np.linalg.norm(ctx.splitting.comp_part(val)) > tol:
                raise ValuesOutsideSubalgebra(
                    f"gauge value at slice point {v!r} leaves the subalgebra"
                )

        def ev(v, lam=0.0):
            val = raw(slice_embed(ctx.scenario.space, v), lam)
            return ctx.splitting.sub_coords(val)

    else:
        raise ScenarioMismatch(
            f"gauge bound to {psi.scenario.name!r}, expected {ctx.slice.name!r}"
        )

    sub = ctx.splitting.subalgebra_basis

    def bundle_ev(p: BundlePoint, lam=0.0):
        coords = np.atleast_1d(ev(p.v, lam))[:dim_k]
        return adjoint(group, p.g, coords @ sub)

    return GaugeTransform(ctx.scenario, bundle_ev,
                          depends_on_lambda=psi.depends_on_lambda,
                          lambda_interval=psi.lambda_interval)


def project_field(ctx: ProjectionContext, x: EquivariantField) -> EquivariantField:
    """P0: restriction of the connection-vertical part of x to the slice."""
    _check_bound(ctx, x, "project_field")
    ev = x.evaluate
    space = ctx.scenario.space

    def slice_ev(v, lam=0.0):
        _, w = ctx.split_tangent(v, ev(slice_embed(space, v), lam))
        return w

    return EquivariantField(ctx.slice, slice_ev,
                            depends_on_lambda=x.depends_on_lambda,
                            lambda_interval=x.lambda_interval)


def project_gauge(ctx: ProjectionContext, psi: GaugeTransform) -> GaugeTransform:
    """P1: k-part of the slice restriction, via the context's projector."""
    _check_bound(ctx, psi, "project_gauge")
    ev = psi.evaluate
    space = ctx.scenario.space

    def slice_ev(v, lam=0.0):
        return ctx.splitting.sub_coords(ev(slice_embed(space, v), lam))

    return GaugeTransform(ctx.slice, slice_ev,
                          depends_on_lambda=psi.depends_on_lambda,
                          lambda_interval=psi.lambda_interval)


def horizontal_gauge(ctx: ProjectionContext, x: EquivariantField) -> GaugeTransform:
    """The connecting gauge h(X) with X = E0 P0 X + d(h(X)).

    Slice values solve the q-frame system at each point and are extended by
    Ad(g); they lie in the chosen complement by construction.
    """
    _check_bound(ctx, x, "horizontal_gauge")
    ev = x.evaluate
    space = ctx.scenario.space
    comp = ctx.splitting.complement_basis
    group = space.group

    def bundle_ev(p: BundlePoint, lam=0.0):
        s, _ = ctx.split_tangent(p.v, ev(slice_embed(space, p.v), lam))
        return adjoint(group, p.g, s @ comp)

    return GaugeTransform(ctx.scenario, bundle_ev,
                          depends_on_lambda=x.depends_on_lambda,
                          lambda_interval=x.lambda_interval)


# ---------------------------------------------------------------------------
# decomposition at a relative equilibrium


@dataclass
class DecompositionResult:
    """Transversal field and gauge with x = transversal + d(gauge) inside the bump."""

    transversal: EquivariantField
    gauge: GaugeTransform
    bump: BumpProfile | None


def invariant_radius(scenario: Scenario, m) -> float:
    """Invariant norm on the slice: |v| on bundles, |m| on representations."""
    if scenario.is_bundle:
        return float(np.linalg.norm(m.v))
    return float(np.linalg.norm(np.asarray(m, float)))


def decompose_at(
    x: EquivariantField,
    base,
    bump: BumpProfile | None = None,
    ctx: ProjectionContext | None = None,
    lam: float = 0.0,
    releq_tol: float = 1e-8,
) -> DecompositionResult:
    """Decompose x at a relative equilibrium into transversal + gauge parts.

    On a bundle model the connecting gauge of the slice equivalence is used;
    on a representation the standard form's angular coefficients provide the
    gauge (the catalog's example-level isomorphisms, which are global there).
    The gauge is scaled by the bump in the invariant radius, so the
    transversal equals x exactly outside the bump's outer radius.
    """
    scenario = x.scenario
    residual, _ = orbit_tangency_residual(scenario.space, x(base, lam), base)
    if residual > releq_tol:
        raise NotRelativeEquilibrium(
            f"base point is not a relative equilibrium (residual {residual:.2e})"
        )
    if scenario.is_bundle:
        if ctx is None:
            ctx = default_context(scenario.name)
        raw_gauge = horizontal_gauge(ctx, x)
    else:
        _, raw_gauge = transversal_parts(x)

    if bump is None:
        gauge = raw_gauge
    else:
        gauge = raw_gauge.scaled(lambda p: bump(invariant_radius(scenario, p)))
    transversal = x - induced_field(gauge)
    res_at_base = float(np.linalg.norm(transversal(base, lam)))
    if res_at_base > releq_tol:
        raise NotRelativeEquilibrium(
            f"transversal part does not vanish at the base point "
            f"(|Y(base)| = {res_at_base:.2e}); the scenario's gauges cannot "
            f"absorb the orbit-tangent part here"
        )
    return DecompositionResult(transversal, gauge, bump)


# ---------------------------------------------------------------------------
# projection-choice comparison


@dataclass(frozen=True)
class ProjectionComparison:
    gauge: GaugeTransform  # the correcting slice gauge P^1_1(h^2(X))
    max_defect: float
    n_samples: int


def compare_projections(
    x: EquivariantField,
    ctx1: ProjectionContext,
    ctx2: ProjectionContext,
    n_samples: int = 100,
    seed: int = 0,
    lam: float = 0.0,
) -> ProjectionComparison:
    """Check P^1_0(X) = P^2_0(X) + d(P^1_1(h^2(X))) over seeded slice points."""
    if ctx1.scenario.name != ctx2.scenario.name:
        raise ScenarioMismatch("contexts are bound to different bundles")
    _check_bound(ctx1, x, "compare_projections")
    correcting = project_gauge(ctx1, horizontal_gauge(ctx2, x))
    p1 = project_field(ctx1, x)
    p2 = project_field(ctx2, x)
    dcorr = induced_field(correcting)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        v = actions.sample_point(ctx1.slice.space, rng)
        defect = np.linalg.norm(p1(v, lam) - p2(v, lam) - dcorr(v, lam))
        worst = max(worst, float(defect))
    return ProjectionComparison(correcting, worst, n_samples)
