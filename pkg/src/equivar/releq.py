"""Relative equilibria: detection, velocities, frequencies, stabilization.

A relative equilibrium is a point where the field value is tangent to the
group orbit; its velocity is the minimum-norm algebra vector reproducing
the field value through the evaluation map (unique modulo the isotropy
algebra, and orthogonal to it by the least-squares choice).

Frequency counting expresses the velocity in lattice coordinates of the
relevant torus and takes the rational rank of the coordinates; motion is
classified as steady, periodic (with a reconstructed period), or
quasi-periodic. Frequency stabilization builds the gauge transformation
that truncates the velocity's lattice coordinates to a prescribed order,
bump-localized so the field is untouched away from the orbit of interest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import actions
from .actions import BundlePoint, orbit_tangency_residual
from .decomp import BumpProfile
from .errors import (
    NoConvergence,
    NotRelativeEquilibrium,
    OrderOutOfRange,
    PeriodReconstructionFailed,
    UnsupportedGroup,
)
from .fields import EquivariantField, GaugeTransform, gauge_act, transversal_parts
from .groups import (
    LatticeBasis,
    integer_relations,
    lattice_basis,
    rational_reconstruct,
    sublattice_basis_for_span,
)
from .scenarios import Scenario, invariants

ZERO_VELOCITY_TOL = 1e-10


@dataclass(frozen=True)
class ReleqReport:
    residual: float
    velocity: np.ndarray
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


def check_releq(x: EquivariantField, m, tol: float = 1e-8, lam: float = 0.0) -> ReleqReport:
    """Least-squares distance of X(m) to the orbit tangent space at m."""
    residual, xi = orbit_tangency_residual(x.scenario.space, x(m, lam), m)
    return ReleqReport(residual, xi, tol)


def velocity(x: EquivariantField, m, tol: float = 1e-8, lam: float = 0.0) -> np.ndarray:
    """Minimum-norm velocity of a relative equilibrium."""
    report = check_releq(x, m, tol, lam)
    if not report.passed:
        raise NotRelativeEquilibrium(
            f"point is not a relative equilibrium (residual {report.residual:.2e} > {tol:.1e})"
        )
    return report.velocity


def find_releq(x: EquivariantField, seed, max_iter: int = 50, tol: float = 1e-10,
               lam: float = 0.0):
    """Gauss-Newton search for a relative equilibrium near a seed point.

    The velocity is eliminated by least squares at each step, leaving the
    residual of X against the orbit tangent space; on bundle models the
    search moves the slice coordinate of the representative.
    """
    space = x.scenario.space
    is_bundle = space.is_bundle
    y = np.array(seed.v if is_bundle else seed, dtype=float)
    g_part = seed.g if is_bundle else None

    def residual_vec(yv):
        point = BundlePoint(g_part, yv) if is_bundle else yv
        tv = x(point, lam)
        J = actions.ev_jacobian(space, point)
        xi, *_ = np.linalg.lstsq(J, tv, rcond=None)
        return tv - J @ xi

    r = residual_vec(y)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol:
            point = BundlePoint(g_part, y) if is_bundle else y
            return analyze_releq(x, point, lam=lam, tol=max(tol, 1e-8))
        h = 1e-7 * max(1.0, float(np.linalg.norm(y)))
        cols = []
        for j in range(y.size):
            e = np.zeros_like(y)
            e[j] = h
            cols.append((residual_vec(y + e) - residual_vec(y - e)) / (2 * h))
        DR = np.column_stack(cols)
        step, *_ = np.linalg.lstsq(DR, -r, rcond=None)
        # damped update
        alpha = 1.0
        for _ in range(25):
            cand = y + alpha * step
            rc = residual_vec(cand)
            if np.linalg.norm(rc) < np.linalg.norm(r):
                y, r = cand, rc
                break
            alpha *= 0.5
        else:
            raise NoConvergence("Gauss-Newton line search stalled")
    raise NoConvergence(f"no relative equilibrium within {max_iter} iterations "
                        f"(residual {np.linalg.norm(r):.2e})")


# ---------------------------------------------------------------------------
# frequencies and motion classes


def _toral_lattice(scenario: Scenario) -> LatticeBasis | None:
    return lattice_basis(scenario.space.group)


def _lattice_coords(lat: LatticeBasis, xi: np.ndarray) -> np.ndarray:
    coords = lat.coords(xi)
    coords[np.abs(coords) <= ZERO_VELOCITY_TOL] = 0.0
    return coords


def _project_off(xi: np.ndarray, basis: np.ndarray) -> np.ndarray:
    out = np.asarray(xi, float).copy()
    for b in np.atleast_2d(basis) if basis.size else []:
        out -= (out @ b) * b
    return out


def frequency_count(scenario: Scenario, xi: np.ndarray, isotropy_basis: np.ndarray,
                    lattice: LatticeBasis | None = None, height_bound: int = 100,
                    tol: float = 1e-9) -> int:
    """Number of independent frequencies of the relative-equilibrium motion.

    For the toral models this is the rational rank of the velocity's lattice
    coordinates after projecting off the isotropy algebra. For SO(3) the
    closure of a one-parameter subgroup is a circle, so the count is 0 or 1.
    On R x S^1 only the compact factor contributes; an axis drift is visible
    in the velocity itself, not in the frequency count.
    """
    group = scenario.space.group
    xi_p = _project_off(np.asarray(xi, float), isotropy_basis)
    if group.kind == "so3":
        return 0 if np.linalg.norm(xi_p) <= ZERO_VELOCITY_TOL else 1
    if group.kind in ("circle", "torus", "o2", "r_x_circle"):
        lat = lattice if lattice is not None else _toral_lattice(scenario)
        coords = _lattice_coords(lat, xi_p)
        if not np.any(coords):
            return 0
        rels = integer_relations(coords, height_bound, tol)
        if rels.shape[0] == 0:
            return coords.size
        return coords.size - int(np.linalg.matrix_rank(rels, tol=1e-10))
    raise UnsupportedGroup(f"no frequency theory for group kind {group.kind!r}")


@dataclass(frozen=True)
class MotionClass:
    kind: str  # "steady" | "periodic" | "quasiperiodic"
    period: float | None = None
    dim: int = 0

    @property
    def label(self) -> str:
        if self.kind == "steady":
            return "steady"
        if self.kind == "periodic":
            return f"periodic:{self.period!r}"
        return f"quasi:{self.dim}"


def classify_motion(scenario: Scenario, xi: np.ndarray, isotropy_basis: np.ndarray,
                    freq_dim: int | None = None, height_bound: int = 100,
                    max_denominator: int = 10**6) -> MotionClass:
    """Motion class of a relative equilibrium from its velocity."""
    group = scenario.space.group
    xi_p = _project_off(np.asarray(xi, float), isotropy_basis)
    if freq_dim is None:
        freq_dim = frequency_count(scenario, xi_p, np.zeros((0, xi_p.size)),
                                   height_bound=height_bound)
    if freq_dim == 0:
        return MotionClass("steady")
    if freq_dim >= 2:
        return MotionClass("quasiperiodic", dim=freq_dim)
    if group.kind == "so3":
        return MotionClass("periodic", period=float(2.0 * np.pi / np.linalg.norm(xi_p)), dim=1)
    lat = _toral_lattice(scenario)
    coords = _lattice_coords(lat, xi_p)
    period = _minimal_period(coords, max_denominator)
    return MotionClass("periodic", period=period, dim=1)


def _minimal_period(coords: np.ndarray, max_denominator: int) -> float:
    """Minimal T > 0 with T * coords integral, by rational reconstruction."""
    nz = coords[coords != 0.0]
    ref = nz[np.argmax(np.abs(nz))]
    fracs = []
    for c in nz:
        frac = rational_reconstruct(c / ref, max_denominator)
        # a genuinely rational double reconstructs to ~1e-16 relative error;
        # an irrational ratio's best approximation with bounded denominator
        # stays orders of magnitude worse
        if abs(float(frac) - c / ref) > 1e-13 * max(1.0, abs(c / ref)):
            raise PeriodReconstructionFailed(
                f"coordinate ratio {c / ref!r} has no rational reconstruction "
                f"with denominator <= {max_denominator}"
            )
        fracs.append(frac)
    q_lcm = int(np.lcm.reduce([f.denominator for f in fracs]))
    scaled = [f.numerator * (q_lcm // f.denominator) for f in fracs]
    g = int(np.gcd.reduce(scaled))
    return float(q_lcm / (g * abs(ref)))


@dataclass
class RelEqRecord:
    """A relative equilibrium with its velocity, isotropy, and motion data."""

    point: object
    velocity: np.ndarray
    isotropy_basis: np.ndarray
    residual: float
    freq_dim: int
    lattice_coords: np.ndarray | None
    motion: MotionClass

    def to_json(self) -> dict:
        if isinstance(self.point, BundlePoint):
            point = {"g": np.asarray(self.point.g).ravel().tolist(),
                     "v": self.point.v.tolist()}
        else:
            point = np.asarray(self.point, float).tolist()
        return {
            "point": point,
            "velocity": self.velocity.tolist(),
            "residual": self.residual,
            "freq_dim": self.freq_dim,
            "motion": self.motion.label,
        }


def analyze_releq(x: EquivariantField, m, tol: float = 1e-8, lam: float = 0.0,
                  height_bound: int = 100) -> RelEqRecord:
    """Full relative-equilibrium record at a point (raises if it is not one)."""
    scenario = x.scenario
    report = check_releq(x, m, tol, lam)
    if not report.passed:
        raise NotRelativeEquilibrium(
            f"residual {report.residual:.2e} exceeds tolerance {tol:.1e}"
        )
    iso = actions.isotropy_algebra(scenario.space, m)
    xi = report.velocity
    d = frequency_count(scenario, xi, iso, height_bound=height_bound)
    lat = _toral_lattice(scenario)
    coords = _lattice_coords(lat, _project_off(xi, iso)) if lat is not None else None
    motion = classify_motion(scenario, xi, iso, freq_dim=d, height_bound=height_bound)
    return RelEqRecord(m, xi, iso, report.residual, d, coords, motion)


# ---------------------------------------------------------------------------
# frequency stabilization


@dataclass
class StabilizationPlan:
    """Gauge transformation stabilizing the frequencies at a point to order j."""

    order: int
    lattice_vectors: np.ndarray  # rows: lattice basis of the closure torus, algebra coords
    gauge: GaugeTransform
    bump: BumpProfile

    def apply(self, x: EquivariantField) -> EquivariantField:
        return gauge_act(self.gauge, x)


def stabilization_radius(scenario: Scenario, m):
    """Invariant radius around the orbit of m: distance in generator values."""
    u0 = invariants(scenario, m)

    def radius(p) -> float:
        return float(np.linalg.norm(invariants(scenario, p) - u0))

    return radius


def stabilize_frequencies(x: EquivariantField, m, order: int,
                          bump: BumpProfile | None = None, lam: float = 0.0,
                          height_bound: int = 100) -> StabilizationPlan:
    """Build the gauge that truncates the velocity to its first ``order`` frequencies.

    Order 0 uses the full standard-form gauge of the decomposition, which
    produces a strict equilibrium on every catalog scenario whose
    orbit-tangent part is entirely gauge-generated. Positive orders use the
    lattice machinery of the toral models: the tail of the velocity's
    coordinates over a lattice basis of the closure torus is subtracted,
    and the gauge is localized by a bump in the invariant radius around the
    orbit of m.
    """
    scenario = x.scenario
    if bump is None:
        bump = BumpProfile(0.5, 1.0)
    record = analyze_releq(x, m, lam=lam, height_bound=height_bound)
    d = record.freq_dim
    if not (0 <= order <= d):
        raise OrderOutOfRange(f"order {order} outside [0, {d}]")
    _, psi_full = transversal_parts(x)
    radius = stabilization_radius(scenario, m)
    mu = lambda p: bump(radius(p))

    if order == 0:
        stab = (-psi_full).scaled(mu)
        plan = StabilizationPlan(0, np.zeros((0, scenario.space.group.dim_algebra)),
                                 stab, bump)
        _verify_order0(x, plan, m, lam)
        return plan

    group = scenario.space.group
    if group.kind not in ("circle", "torus", "r_x_circle"):
        if order == d:
            zero = psi_full.scaled(0.0)
            return StabilizationPlan(order, np.zeros((0, group.dim_algebra)), zero, bump)
        raise UnsupportedGroup(
            f"partial stabilization beyond order 0 needs a toral model, "
            f"got {group.kind!r}"
        )

    lat = _toral_lattice(scenario)
    coords = _lattice_coords(lat, _project_off(record.velocity, record.isotropy_basis))
    rels = integer_relations(coords, height_bound, 1e-9) if np.any(coords) else np.eye(coords.size)
    closure = sublattice_basis_for_span(rels, coords.size)  # rows, lattice coordinates
    if closure.shape[0] != d:
        raise UnsupportedGroup(
            f"closure-torus dimension {closure.shape[0]} does not match count {d}"
        )
    t_alg = closure @ lat.vectors  # algebra-coordinate lattice basis of the closure
    psi_ev = psi_full.evaluate

    def stab_ev(p, lam_=0.0):
        # coordinates of psi^X(p) over the closure basis (tail of the
        # orthonormalizing inner product); subtract the part beyond `order`
        w = psi_ev(p, lam_)
        cw = lat.coords(w)
        a, *_ = np.linalg.lstsq(closure.T, cw, rcond=None)
        correction = a[order:] @ closure[order:] @ lat.vectors if order < d else np.zeros_like(w)
        return -mu(p) * correction

    stab = GaugeTransform(scenario, stab_ev, depends_on_lambda=psi_full.depends_on_lambda)
    return StabilizationPlan(order, t_alg, stab, bump)


def _verify_order0(x, plan, m, lam):
    modified = gauge_act(plan.gauge, x)
    value = np.linalg.norm(modified(m, lam))
    if value > 1e-8:
        raise UnsupportedGroup(
            f"the scenario's gauges cannot produce an equilibrium at this point "
            f"(|X'(m)| = {value:.2e}); the orbit-tangent part is not gauge-generated"
        )
