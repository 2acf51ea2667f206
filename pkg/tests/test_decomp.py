import numpy as np
import pytest

from equivar import actions
from equivar.actions import as_complex, as_real, sample_point, slice_embed
from equivar.decomp import (
    BumpProfile,
    ProjectionContext,
    compare_projections,
    decompose_at,
    default_context,
    extend_field,
    extend_gauge,
    horizontal_gauge,
    invariant_radius,
    project_field,
    project_gauge,
    decompose_at as _decompose_at,
)
from equivar.errors import (
    NotRelativeEquilibrium,
    ScenarioMismatch,
    ValuesOutsideSubalgebra,
)
from equivar.fields import (
    build_scenario_field,
    build_scenario_gauge,
    check_equivariance,
    gauge_act,
    induced_field,
)
from equivar.groups import make_splitting, rxs1_group
from equivar.poly import InvariantPolynomial as P
from equivar.scenarios import get_scenario

BUNDLES = ["r_x_circle", "so3_bundle"]


def table(nvars, *terms):
    return P(nvars, tuple(terms))


def random_bundle_field(name, rng, lam_degree=0):
    sc = get_scenario(name)
    def tab():
        terms = []
        for _ in range(rng.integers(1, 3)):
            deg = (int(rng.integers(0, 3)), int(rng.integers(0, lam_degree + 1)))
            terms.append((deg, float(rng.uniform(-1, 1))))
        return P(1, tuple(terms))
    return build_scenario_field(sc, {k: tab() for k in sc.field_keys})


def random_bundle_gauge(name, rng):
    sc = get_scenario(name)
    def tab():
        return P(1, (((int(rng.integers(0, 3)), 0), float(rng.uniform(-1, 1))),))
    return build_scenario_gauge(sc, {k: tab() for k in sc.gauge_keys})


def random_slice_field(rng):
    sc = get_scenario("circle")
    def tab():
        return P(1, (((int(rng.integers(0, 3)), 0), float(rng.uniform(-1, 1))),))
    return build_scenario_field(sc, {"f": tab(), "g": tab()})


def random_slice_gauge(rng):
    sc = get_scenario("circle")
    return build_scenario_gauge(sc, {
        "psi": P(1, (((int(rng.integers(0, 3)), 0), float(rng.uniform(-1, 1))),))
    })


# ---------------------------------------------------------------------------
# bump profile


def test_bump_profile_shape():
    bump = BumpProfile(0.5, 1.0)
    assert bump(0.0) == 1.0
    assert bump(0.5) == 1.0
    assert bump(1.0) == 0.0
    assert bump(2.0) == 0.0
    for r in np.linspace(0.55, 0.95, 9):
        assert 0.0 < bump(r) < 1.0
    # monotone decline across the band
    vals = [bump(r) for r in np.linspace(0.5, 1.0, 21)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_bump_profile_validation():
    with pytest.raises(ValueError):
        BumpProfile(1.0, 0.5)


# ---------------------------------------------------------------------------
# extension and projection


@pytest.mark.parametrize("name", BUNDLES)
def test_extend_then_project_is_identity(name):
    ctx = default_context(name)
    rng = np.random.default_rng(1)
    for _ in range(6):
        y = random_slice_field(rng)
        py = project_field(ctx, extend_field(ctx, y))
        for _ in range(10):
            v = sample_point(ctx.slice.space, rng)
            assert np.linalg.norm(py(v) - y(v)) <= 1e-10


@pytest.mark.parametrize("name", BUNDLES)
def test_extend_then_project_gauge_identity(name):
    ctx = default_context(name)
    rng = np.random.default_rng(2)
    for _ in range(6):
        psi = random_slice_gauge(rng)
        back = project_gauge(ctx, extend_gauge(ctx, psi))
        for _ in range(10):
            v = sample_point(ctx.slice.space, rng)
            assert np.linalg.norm(back(v) - psi(v)) <= 1e-12


def test_extend_field_is_vertical_and_equivariant():
    rng = np.random.default_rng(3)
    for name in BUNDLES:
        ctx = default_context(name)
        y = random_slice_field(rng)
        ext = extend_field(ctx, y)
        assert check_equivariance(ext, n_samples=80, tol=1e-10, seed=5).passed
        dq = ctx.splitting.dim_comp
        for _ in range(10):
            p = sample_point(ctx.scenario.space, rng)
            assert np.allclose(ext(p)[:dq], 0.0)


def test_extend_zero_is_zero():
    ctx = default_context("so3_bundle")
    zero = build_scenario_field("circle", {"f": P.zero(1), "g": P.zero(1)})
    ext = extend_field(ctx, zero)
    rng = np.random.default_rng(4)
    p = sample_point(ctx.scenario.space, rng)
    assert np.allclose(ext(p), 0.0)


def test_extend_field_so3_standard_form():
    # vertical lift of f z + q i z lands in the vertical slot of the normal form
    ctx = default_context("so3_bundle")
    y = build_scenario_field("circle", {"f": P.constant(2.0, 1), "g": P.constant(-1.0, 1)})
    ext = extend_field(ctx, y)
    z = 0.3 + 1.1j
    p = slice_embed(ctx.scenario.space, as_real(np.array([z])))
    w = (2.0 - 1.0j) * z
    assert np.allclose(ext(p), [0.0, 0.0, w.real, w.imag], atol=1e-14)


def test_extend_gauge_so3_adjoint_form():
    ctx = default_context("so3_bundle")
    psi = build_scenario_gauge("circle", {"psi": table(1, ((1, 0), 1.0))})  # q(u) = u
    ext = extend_gauge(ctx, psi)
    assert check_equivariance(ext, n_samples=80, tol=1e-10, seed=6).passed
    rng = np.random.default_rng(7)
    for _ in range(5):
        p = sample_point(ctx.scenario.space, rng)
        u = float(p.v @ p.v)
        assert np.allclose(ext(p), p.g @ np.array([0.0, 0.0, u]), atol=1e-12)


def test_extend_gauge_abelian_constant_in_g():
    ctx = default_context("r_x_circle")
    psi = random_slice_gauge(np.random.default_rng(8))
    ext = extend_gauge(ctx, psi)
    rng = np.random.default_rng(9)
    v = sample_point(ctx.slice.space, rng)
    vals = []
    for _ in range(4):
        g = actions.sample_group(ctx.scenario.space, rng)
        vals.append(ext(actions.BundlePoint(g, v)))
    assert np.allclose(vals, vals[0], atol=1e-14)


def test_extend_gauge_rejects_values_outside_subalgebra():
    ctx = default_context("so3_bundle")
    rng = np.random.default_rng(10)
    bad = random_bundle_gauge("so3_bundle", rng)  # has q-plane components
    with pytest.raises(ValuesOutsideSubalgebra):
        extend_gauge(ctx, bad)


def test_project_field_rxs1_vertical_part():
    ctx = default_context("r_x_circle")
    x = build_scenario_field("r_x_circle", {
        "f": table(1, ((1, 0), -1.0)),
        "g": P.constant(2.0, 1),
        "h": table(1, ((1, 0), 0.5)),
    })
    proj = project_field(ctx, x)
    rng = np.random.default_rng(11)
    for _ in range(10):
        v = sample_point(ctx.slice.space, rng)
        z = as_complex(v)[0]
        u = abs(z) ** 2
        expected = as_real(np.array([(-u + 2.0j) * z]))
        assert np.allclose(proj(v), expected, atol=1e-12)


def test_project_zero_field():
    ctx = default_context("so3_bundle")
    sc = get_scenario("so3_bundle")
    zero = build_scenario_field(sc, {k: P.zero(1) for k in sc.field_keys})
    proj = project_field(ctx, zero)
    assert np.allclose(proj(np.array([0.4, 0.2])), 0.0)


def test_project_gauge_so3_picks_k_component():
    ctx = default_context("so3_bundle")
    psi = build_scenario_gauge("so3_bundle", {
        "psi_q1": P.constant(0.3, 1),
        "psi_q2": P.constant(-0.2, 1),
        "psi_k": table(1, ((1, 0), 1.0), ((0, 0), 0.5)),
    })
    proj = project_gauge(ctx, psi)
    rng = np.random.default_rng(12)
    for _ in range(10):
        v = sample_point(ctx.slice.space, rng)
        u = float(v @ v)
        assert np.allclose(proj(v), [u + 0.5], atol=1e-12)


def test_project_gauge_kills_q_values():
    ctx = default_context("so3_bundle")
    psi = build_scenario_gauge("so3_bundle", {
        "psi_q1": P.constant(1.0, 1), "psi_q2": P.constant(2.0, 1), "psi_k": P.zero(1),
    })
    proj = project_gauge(ctx, psi)
    assert np.allclose(proj(np.array([0.9, -0.1])), 0.0, atol=1e-14)


# ---------------------------------------------------------------------------
# the connecting gauge h


@pytest.mark.parametrize("name", BUNDLES)
def test_decomposition_identity(name):
    ctx = default_context(name)
    rng = np.random.default_rng(13)
    for _ in range(4):
        x = random_bundle_field(name, rng)
        h = horizontal_gauge(ctx, x)
        recon = extend_field(ctx, project_field(ctx, x)) + induced_field(h)
        for _ in range(15):
            p = sample_point(ctx.scenario.space, rng)
            assert np.linalg.norm(x(p) - recon(p)) <= 1e-8


def test_horizontal_gauge_vanishes_on_vertical_fields():
    rng = np.random.default_rng(14)
    for name in BUNDLES:
        ctx = default_context(name)
        y = random_slice_field(rng)
        h = horizontal_gauge(ctx, extend_field(ctx, y))
        for _ in range(8):
            p = sample_point(ctx.scenario.space, rng)
            assert np.linalg.norm(h(p)) <= 1e-12


def test_horizontal_gauge_so3_matches_symbolic_tables():
    # independent oracle: the slice value of h(X) is (h1 + i h2)(u) z in the
    # complement plane, read straight off the field's tables
    ctx = default_context("so3_bundle")
    coeffs = {"f": table(1, ((1, 0), -1.0)), "q": P.constant(1.0, 1),
              "h1": table(1, ((0, 0), 0.4), ((1, 0), 0.1)), "h2": P.constant(-0.3, 1)}
    x = build_scenario_field("so3_bundle", coeffs)
    h = horizontal_gauge(ctx, x)
    rng = np.random.default_rng(15)
    for _ in range(10):
        v = sample_point(ctx.slice.space, rng)
        z = complex(as_complex(v)[0])
        u = abs(z) ** 2
        plane = ((0.4 + 0.1 * u) - 0.3j) * z
        expected = np.array([plane.real, plane.imag, 0.0])
        assert np.allclose(h(slice_embed(ctx.scenario.space, v)), expected, atol=1e-10)


def test_horizontal_gauge_rxs1_axis_component():
    ctx = default_context("r_x_circle")
    x = build_scenario_field("r_x_circle", {
        "f": table(1, ((1, 0), -1.0)), "g": P.constant(1.0, 1),
        "h": table(1, ((1, 0), 0.5), ((0, 0), 0.1)),
    })
    h = horizontal_gauge(ctx, x)
    rng = np.random.default_rng(16)
    for _ in range(10):
        v = sample_point(ctx.slice.space, rng)
        u = float(v @ v)
        expected = np.array([0.5 * u + 0.1, 0.0])
        assert np.allclose(h(slice_embed(ctx.scenario.space, v)), expected, atol=1e-12)


def test_horizontal_gauge_slice_values_in_complement():
    rng = np.random.default_rng(17)
    for name in BUNDLES:
        ctx = default_context(name)
        x = random_bundle_field(name, rng)
        h = horizontal_gauge(ctx, x)
        proj = ctx.splitting.projector
        for _ in range(10):
            v = sample_point(ctx.slice.space, rng)
            val = h(slice_embed(ctx.scenario.space, v))
            assert np.linalg.norm(proj @ val) <= 1e-10


def test_horizontal_gauge_is_equivariant():
    rng = np.random.default_rng(18)
    for name in BUNDLES:
        ctx = default_context(name)
        x = random_bundle_field(name, rng)
        h = horizontal_gauge(ctx, x)
        assert check_equivariance(h, n_samples=80, tol=1e-9, seed=19).passed


@pytest.mark.parametrize("name", BUNDLES)
def test_naturality_of_h(name):
    # h(X + d psi) + E1 P1 psi = psi + h(X)
    ctx = default_context(name)
    rng = np.random.default_rng(20)
    for _ in range(4):
        x = random_bundle_field(name, rng)
        psi = random_bundle_gauge(name, rng)
        lhs = horizontal_gauge(ctx, gauge_act(psi, x)) + extend_gauge(
            ctx, project_gauge(ctx, psi))
        rhs = psi + horizontal_gauge(ctx, x)
        for _ in range(10):
            p = sample_point(ctx.scenario.space, rng)
            assert np.linalg.norm(lhs(p) - rhs(p)) <= 1e-8


def test_linearity_of_functors():
    rng = np.random.default_rng(21)
    for name in BUNDLES:
        ctx = default_context(name)
        x1, x2 = random_bundle_field(name, rng), random_bundle_field(name, rng)
        y1, y2 = random_slice_field(rng), random_slice_field(rng)
        for _ in range(6):
            p = sample_point(ctx.scenario.space, rng)
            v = sample_point(ctx.slice.space, rng)
            assert np.allclose(
                project_field(ctx, x1 + x2)(v),
                project_field(ctx, x1)(v) + project_field(ctx, x2)(v), atol=1e-11)
            assert np.allclose(
                extend_field(ctx, y1 + y2)(p),
                extend_field(ctx, y1)(p) + extend_field(ctx, y2)(p), atol=1e-12)
            assert np.allclose(
                horizontal_gauge(ctx, x1 + x2)(p),
                horizontal_gauge(ctx, x1)(p) + horizontal_gauge(ctx, x2)(p), atol=1e-10)


# ---------------------------------------------------------------------------
# E and P preserve relative equilibria


def test_extension_preserves_relative_equilibria():
    from equivar.actions import orbit_tangency_residual

    rng = np.random.default_rng(22)
    for name in BUNDLES:
        ctx = default_context(name)
        # slice field with a circle of relative equilibria at |z|^2 = 0.25
        y = build_scenario_field("circle", {
            "f": table(1, ((0, 0), 0.25), ((1, 0), -1.0)), "g": P.constant(1.0, 1),
        })
        v = as_real(np.array([0.5 + 0j]))
        res_slice, _ = orbit_tangency_residual(ctx.slice.space, y(v), v)
        assert res_slice <= 1e-9
        ext = extend_field(ctx, y)
        p = slice_embed(ctx.scenario.space, v)
        res_bundle, _ = orbit_tangency_residual(ctx.scenario.space, ext(p), p)
        assert res_bundle <= 1e-8


def test_projection_preserves_relative_equilibria():
    from equivar.actions import orbit_tangency_residual

    rng = np.random.default_rng(23)
    ctx = default_context("so3_bundle")
    x = build_scenario_field("so3_bundle", {
        "f": table(1, ((0, 0), 0.25), ((1, 0), -1.0)),
        "q": P.constant(2.0, 1), "h1": P.constant(0.7, 1), "h2": P.zero(1),
    })
    v = as_real(np.array([0.5 + 0j]))
    p = slice_embed(ctx.scenario.space, v)
    res_bundle, _ = orbit_tangency_residual(ctx.scenario.space, x(p), p)
    assert res_bundle <= 1e-9
    proj = project_field(ctx, x)
    res_slice, _ = orbit_tangency_residual(ctx.slice.space, proj(v), v)
    assert res_slice <= 1e-8


# ---------------------------------------------------------------------------
# decompose_at


def test_decompose_at_transversal_case():
    # x already transversal with x(base) = 0: gauge vanishes inside the bump
    x = build_scenario_field("circle", {"f": table(1, ((1, 0), -1.0)), "g": P.zero(1)})
    base = np.zeros(2)
    result = decompose_at(x, base, BumpProfile(0.5, 1.0))
    rng = np.random.default_rng(24)
    for _ in range(10):
        m = rng.normal(size=2) * 0.2
        assert np.allclose(result.gauge(m), 0.0, atol=1e-14)
        assert np.allclose(result.transversal(m), x(m), atol=1e-14)


def test_decompose_at_circle_radial_inside_bump():
    x = build_scenario_field("circle", {
        "f": table(1, ((1, 0), -1.0), ((0, 0), 0.1)), "g": P.constant(2.0, 1),
    })
    result = decompose_at(x, np.zeros(2), BumpProfile(0.5, 1.0))
    radial = build_scenario_field("circle", {
        "f": table(1, ((1, 0), -1.0), ((0, 0), 0.1)), "g": P.zero(1),
    })
    rng = np.random.default_rng(25)
    for _ in range(15):
        m = rng.normal(size=2)
        r = np.linalg.norm(m)
        if r <= 0.5:
            assert np.allclose(result.transversal(m), radial(m), atol=1e-13)
        if r >= 1.0:
            # exact equality outside the bump
            assert np.array_equal(result.transversal(m), x(m))
        # the decomposition identity holds everywhere
        assert np.allclose(result.transversal(m) + induced_field(result.gauge)(m), x(m),
                           atol=1e-12)


def test_decompose_at_so3_bundle_matches_vertical_form():
    sc = get_scenario("so3_bundle")
    x = build_scenario_field(sc, {
        "f": table(1, ((1, 0), -1.0)), "q": P.constant(1.5, 1),
        "h1": P.constant(0.4, 1), "h2": P.constant(-0.2, 1),
    })
    base = slice_embed(sc.space, np.zeros(2))
    result = decompose_at(x, base, BumpProfile(0.5, 1.0))
    vertical = build_scenario_field(sc, {
        "f": table(1, ((1, 0), -1.0)), "q": P.constant(1.5, 1),
        "h1": P.zero(1), "h2": P.zero(1),
    })
    rng = np.random.default_rng(26)
    for _ in range(12):
        p = sample_point(sc.space, rng)
        r = invariant_radius(sc, p)
        if r <= 0.5:
            assert np.allclose(result.transversal(p), vertical(p), atol=1e-12)
        if r >= 1.0:
            assert np.array_equal(result.transversal(p), x(p))


def test_decompose_at_requires_relative_equilibrium():
    # constant radial offset: X(0) = h-part is not tangent to the orbit of 0
    x = build_scenario_field("r_x_circle", {
        "f": P.constant(1.0, 1), "g": P.zero(1), "h": P.constant(1.0, 1),
    })
    sc = get_scenario("r_x_circle")
    base = slice_embed(sc.space, np.array([0.3, 0.0]))
    with pytest.raises(NotRelativeEquilibrium):
        decompose_at(x, base, BumpProfile(0.5, 1.0))


# ---------------------------------------------------------------------------
# projection choices


def test_compare_projections_identical_contexts():
    ctx = default_context("r_x_circle")
    x = random_bundle_field("r_x_circle", np.random.default_rng(27))
    report = compare_projections(x, ctx, ctx, n_samples=40, seed=1)
    assert report.max_defect <= 1e-12
    v = np.array([0.4, 0.1])
    assert np.allclose(report.gauge(v), 0.0, atol=1e-12)


def test_compare_projections_rxs1_tilted_complement():
    # analytic oracle: with Ad trivial and complement span{(1, c)},
    # P2_0 X = f z + (g - c h) i z and the correcting gauge is c h(u).
    scenario = get_scenario("r_x_circle")
    c = 0.7
    ctx1 = default_context("r_x_circle")
    tilted = make_splitting(rxs1_group(), [(0.0, 1.0)], complement_basis=[(1.0, c)])
    ctx2 = ProjectionContext(scenario, tilted)
    x = build_scenario_field(scenario, {
        "f": table(1, ((1, 0), -1.0)), "g": P.constant(1.0, 1),
        "h": table(1, ((1, 0), 0.5), ((0, 0), 0.3)),
    })
    report = compare_projections(x, ctx1, ctx2, n_samples=100, seed=2)
    assert report.max_defect <= 1e-9
    rng = np.random.default_rng(28)
    p2 = project_field(ctx2, x)
    for _ in range(10):
        v = sample_point(ctx1.slice.space, rng)
        z = complex(as_complex(v)[0])
        u = abs(z) ** 2
        h_u = 0.5 * u + 0.3
        expected = (-u + 1j * (1.0 - c * h_u)) * z
        assert np.allclose(p2(v), as_real(np.array([expected])), atol=1e-10)
        # correcting gauge value: P^1_1(h^2(X)) = c h(u)
        assert np.allclose(report.gauge(v), [c * h_u], atol=1e-10)


def test_compare_projections_vertical_field_agrees():
    ctx1 = default_context("r_x_circle")
    tilted = make_splitting(rxs1_group(), [(0.0, 1.0)], complement_basis=[(1.0, 0.3)])
    ctx2 = ProjectionContext(get_scenario("r_x_circle"), tilted)
    y = random_slice_field(np.random.default_rng(29))
    x = extend_field(ctx1, y)
    report = compare_projections(x, ctx1, ctx2, n_samples=40, seed=3)
    assert report.max_defect <= 1e-11
    v = np.array([0.5, -0.2])
    assert np.allclose(report.gauge(v), 0.0, atol=1e-11)


def test_context_rejects_wrong_subalgebra():
    bad = make_splitting(rxs1_group(), [(1.0, 0.0)])
    with pytest.raises(ScenarioMismatch):
        ProjectionContext(get_scenario("r_x_circle"), bad)
