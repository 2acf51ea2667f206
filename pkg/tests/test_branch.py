import numpy as np
import pytest

from equivar.actions import as_complex, as_real
from equivar.branch import (
    BranchResult,
    NewtonConfig,
    SubspaceSpec,
    continue_branch,
    crossing_check,
    default_grid,
    eigenvalue_path,
    proper_branch,
    relative_branch,
)
from equivar.decomp import ProjectionContext, default_context
from equivar.errors import DegenerateCrossing, NotTangent, TrivialBranchMissing
from equivar.fields import build_scenario_field, build_scenario_gauge
from equivar.groups import make_splitting, rxs1_group
from equivar.poly import InvariantPolynomial as P
from equivar.scenarios import get_scenario


def table(nvars, *terms):
    return P(nvars, tuple(terms))


def circle_pitchfork_path(omega=1.0):
    return (
        build_scenario_field("circle", {
            "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)),  # f = lambda - u
            "g": P.constant(omega, 1),
        }),
        build_scenario_gauge("circle", {"psi": P.constant(omega, 1)}),
    )


def real_axis():
    return SubspaceSpec(np.array([1.0, 0.0]), w_max=0.5)


def torus_diagonal_path(g1, g2):
    # f1 = f2 = lambda - (u1 + u2)/2, tangent to the diagonal
    f = table(2, ((0, 0, 1), 1.0), ((1, 0, 0), -0.5), ((0, 1, 0), -0.5))
    xpath = build_scenario_field("torus2", {
        "f1": f, "f2": f,
        "g1": P.constant(g1, 2), "g2": P.constant(g2, 2),
    })
    psipath = build_scenario_gauge("torus2", {
        "psi1": P.constant(g1, 2), "psi2": P.constant(g2, 2),
    })
    return xpath, psipath


def diagonal_subspace():
    return SubspaceSpec(np.array([1.0, 0.0, 1.0, 0.0]) / np.sqrt(2.0), w_max=0.5)


# ---------------------------------------------------------------------------
# eigenvalue path and crossing


def test_eigenvalue_path_pitchfork_is_lambda():
    xpath, psi = circle_pitchfork_path()
    ypath = build_scenario_field("circle", {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)), "g": P.zero(1),
    })
    for lam in (-0.2, 0.0, 0.35):
        assert eigenvalue_path(ypath, real_axis(), lam) == pytest.approx(lam, abs=1e-10)


def test_eigenvalue_path_zero_path():
    zero = build_scenario_field("circle", {"f": P.zero(1), "g": P.zero(1)})
    assert eigenvalue_path(zero, real_axis(), 0.3) == 0.0


def test_eigenvalue_path_torus_diagonal():
    ypath = build_scenario_field("torus2", {
        "f1": table(2, ((0, 0, 1), 1.0), ((1, 0, 0), -0.5), ((0, 1, 0), -0.5)),
        "f2": table(2, ((0, 0, 1), 1.0), ((1, 0, 0), -0.5), ((0, 1, 0), -0.5)),
        "g1": P.zero(2), "g2": P.zero(2),
    })
    for lam in (-0.1, 0.0, 0.2):
        assert eigenvalue_path(ypath, diagonal_subspace(), lam) == pytest.approx(lam, abs=1e-9)


def test_not_tangent_raises_with_witness():
    # a rotation part makes the restriction leave the real axis
    ypath = build_scenario_field("circle", {"f": P.zero(1), "g": P.constant(1.0, 1)})
    with pytest.raises(NotTangent) as err:
        eigenvalue_path(ypath, real_axis(), 0.0)
    assert err.value.witness is not None


def test_crossing_check_pitchfork_passes():
    ypath = build_scenario_field("circle", {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)), "g": P.zero(1),
    })
    report = crossing_check(ypath, real_axis())
    assert report.passed
    assert report.sigma0 == pytest.approx(0.0, abs=1e-10)
    assert report.slope == pytest.approx(1.0, abs=1e-6)


def test_crossing_check_flat_path_fails():
    zero = build_scenario_field("circle", {"f": P.zero(1), "g": P.zero(1)})
    report = crossing_check(zero, real_axis())
    assert not report.passed


def test_crossing_check_degenerate_quadratic():
    # f = lambda^2 - u: sigma(0) = 0 but sigma'(0) = 0
    ypath = build_scenario_field("circle", {
        "f": table(1, ((0, 2), 1.0), ((1, 0), -1.0)), "g": P.zero(1),
    })
    report = crossing_check(ypath, real_axis())
    assert report.sigma0 == pytest.approx(0.0, abs=1e-10)
    assert abs(report.slope) <= 1e-7
    assert not report.passed


# ---------------------------------------------------------------------------
# continuation


def test_continue_branch_pitchfork_parabola():
    ypath = build_scenario_field("circle", {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)), "g": P.zero(1),
    })
    result = continue_branch(ypath, real_axis())
    assert len(result.samples) == 101
    for s in result.samples:
        assert s.lam == pytest.approx(s.w**2, abs=1e-10)
        assert s.residual <= 1e-10


def test_continue_branch_half_grid():
    ypath = build_scenario_field("circle", {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)), "g": P.zero(1),
    })
    grid = np.linspace(0.0, 0.5, 26)
    result = continue_branch(ypath, real_axis(), grid=grid)
    assert len(result.samples) == 26
    assert all(s.w >= 0 for s in result.samples)


def test_continue_branch_rejects_degenerate():
    ypath = build_scenario_field("circle", {
        "f": table(1, ((0, 2), 1.0), ((1, 0), -1.0)), "g": P.zero(1),
    })
    with pytest.raises(DegenerateCrossing):
        continue_branch(ypath, real_axis())


def test_branch_symmetry_lambda_even_in_w():
    ypath = build_scenario_field("circle", {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0), ((2, 0), 0.3)), "g": P.zero(1),
    })
    result = continue_branch(ypath, real_axis())
    lams = {round(s.w, 12): s.lam for s in result.samples}
    for s in result.samples:
        if s.w > 0:
            assert abs(s.lam - lams[round(-s.w, 12)]) <= 1e-9


# ---------------------------------------------------------------------------
# relative branches


def test_relative_branch_circle_pitchfork():
    xpath, psipath = circle_pitchfork_path(omega=1.0)
    result = relative_branch(xpath, psipath, real_axis())
    assert len(result.samples) == 101
    for s in result.samples:
        assert s.lam == pytest.approx(s.w**2, abs=1e-6)
        assert np.allclose(s.velocity, [1.0], atol=1e-9)
        assert s.residual <= 1e-8
        if abs(s.w) > 1e-9:
            assert s.motion.kind == "periodic"
            assert s.motion.period == pytest.approx(2.0 * np.pi, abs=1e-6)
        else:
            assert s.motion.kind == "steady"  # the origin is fixed by the group


def test_relative_branch_steady_when_gauge_vanishes():
    xpath, _ = circle_pitchfork_path(omega=0.0)
    psipath = build_scenario_gauge("circle", {"psi": P.zero(1)})
    result = relative_branch(xpath, psipath, real_axis())
    for s in result.samples:
        assert s.motion.kind == "steady"


def test_relative_branch_requires_trivial_branch():
    # constant forcing destroys the trivial branch at 0
    xpath = build_scenario_field("circle", {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)), "g": P.zero(1),
    })
    broken = xpath + build_scenario_field("circle", {"f": P.zero(1), "g": P.zero(1)})
    bad = build_scenario_field("o2_c2", {  # placeholder to silence linters
        "f": P.zero(4), "g": P.zero(4), "h": P.zero(4), "k": P.zero(4),
    })

    def forced_eval(m, lam=0.0):
        return xpath(m, lam) + np.array([0.1, 0.0])

    from equivar.fields import EquivariantField

    forced = EquivariantField(xpath.scenario, forced_eval)
    psipath = build_scenario_gauge("circle", {"psi": P.zero(1)})
    with pytest.raises(TrivialBranchMissing):
        relative_branch(forced, psipath, real_axis())


def test_relative_branch_torus_quasiperiodic():
    xpath, psipath = torus_diagonal_path(1.0, np.sqrt(2.0))
    result = relative_branch(xpath, psipath, diagonal_subspace())
    nontrivial = [s for s in result.samples if abs(s.w) > 1e-9]
    assert nontrivial
    for s in nontrivial:
        assert s.lam == pytest.approx(s.w**2 / 2.0, abs=1e-6)
        assert s.motion.kind == "quasiperiodic"
        assert s.freq_dim == 2


def test_relative_branch_torus_periodic_rational():
    xpath, psipath = torus_diagonal_path(1.0, 2.0)
    result = relative_branch(xpath, psipath, diagonal_subspace())
    for s in result.samples:
        if abs(s.w) > 1e-9:
            assert s.motion.kind == "periodic"
            assert s.motion.period == pytest.approx(2.0 * np.pi, abs=1e-6)


# ---------------------------------------------------------------------------
# proper (bundle) branches


def so3_bundle_path(c1=0.7, omega=1.0):
    sc = get_scenario("so3_bundle")
    xpath = build_scenario_field(sc, {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)),
        "q": P.constant(omega, 1),
        "h1": P.constant(c1, 1),
        "h2": P.zero(1),
    })
    psipath = build_scenario_gauge("circle", {"psi": P.constant(omega, 1)})
    return xpath, psipath


def test_proper_branch_so3():
    xpath, psipath = so3_bundle_path(c1=0.7, omega=1.0)
    ctx = default_context("so3_bundle")
    result = proper_branch(xpath, ctx, psipath, real_axis())
    assert len(result.samples) == 101
    for s in result.samples:
        assert s.lam == pytest.approx(s.w**2, abs=1e-6)
        # total velocity: horizontal (c1 * delta, 0) plus vertical omega e3
        expected = np.array([0.7 * s.w, 0.0, 1.0])
        assert np.allclose(s.velocity, expected, atol=1e-8)
        assert s.residual <= 1e-8
        if abs(s.w) > 1e-9:
            assert s.motion.kind == "periodic"
            assert s.motion.period == pytest.approx(
                2.0 * np.pi / np.linalg.norm(expected), rel=1e-8)


def test_proper_branch_reduces_to_slice_branch_when_horizontal_zero():
    xpath, psipath = so3_bundle_path(c1=0.0, omega=1.0)
    ctx = default_context("so3_bundle")
    result = proper_branch(xpath, ctx, psipath, real_axis())
    slice_result = result.diagnostics["slice_branch"]
    for s, t in zip(result.samples, slice_result.samples):
        assert s.lam == pytest.approx(t.lam, abs=1e-12)
        assert np.allclose(s.velocity, [0.0, 0.0, 1.0], atol=1e-10)
        assert np.allclose(s.point.v, t.point, atol=1e-12)


def test_proper_branch_rxs1_drift():
    sc = get_scenario("r_x_circle")
    drift = 0.3
    xpath = build_scenario_field(sc, {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)),
        "g": P.constant(1.0, 1),
        "h": P.constant(drift, 1),
    })
    psipath = build_scenario_gauge("circle", {"psi": P.constant(1.0, 1)})
    ctx = default_context("r_x_circle")
    result = proper_branch(xpath, ctx, psipath, real_axis())
    for s in result.samples:
        assert s.velocity[0] == pytest.approx(drift, abs=1e-9)  # axis speed h(delta^2)
        assert s.velocity[1] == pytest.approx(1.0, abs=1e-9)


def test_proper_branch_projection_choice_independence():
    sc = get_scenario("r_x_circle")
    xpath = build_scenario_field(sc, {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0)),
        "g": P.constant(1.0, 1),
        "h": table(1, ((0, 0), 0.3), ((1, 0), 0.2)),
    })
    ctx1 = default_context("r_x_circle")
    tilted = make_splitting(rxs1_group(), [(0.0, 1.0)], complement_basis=[(1.0, 0.6)])
    ctx2 = ProjectionContext(sc, tilted)
    psipath1 = build_scenario_gauge("circle", {"psi": P.constant(1.0, 1)})
    # adapt the gauge path per the projection-choice identity:
    # P2_0 X = P1_0 X + d(-P1_1 h2(X)); here P1_1(h2(X))(v) = 0.6 h(u)
    from equivar.decomp import horizontal_gauge, project_gauge

    correcting = project_gauge(ctx1, horizontal_gauge(ctx2, xpath))
    psipath2 = psipath1 + (-correcting)
    r1 = proper_branch(xpath, ctx1, psipath1, real_axis())
    r2 = proper_branch(xpath, ctx2, psipath2, real_axis())
    assert len(r1.samples) == len(r2.samples)
    for a, b in zip(r1.samples, r2.samples):
        assert np.allclose(a.point.v, b.point.v, atol=1e-8)
        assert a.lam == pytest.approx(b.lam, abs=1e-8)
        # total velocities agree: the correcting gauge moves between the
        # slice velocities while the h-part compensates
        assert np.allclose(a.velocity, b.velocity, atol=1e-9)


def test_proper_branch_requires_base_releq():
    sc = get_scenario("so3_bundle")
    xpath = build_scenario_field(sc, {
        "f": table(1, ((0, 1), 1.0), ((1, 0), -1.0), ((0, 0), 0.3)),  # f(0,0) != 0
        "q": P.zero(1), "h1": P.zero(1), "h2": P.zero(1),
    })
    psipath = build_scenario_gauge("circle", {"psi": P.zero(1)})
    ctx = default_context("so3_bundle")
    # [1, 0] is still an equilibrium (fields vanish on the zero section), but
    # the slice branch origin has sigma(0) = f(0, 0) != 0
    with pytest.raises(DegenerateCrossing):
        proper_branch(xpath, ctx, psipath, real_axis())
