"""Tests for canonical integrals, Stokes residuals and reference constants."""

import math

import mpmath
import numpy as np
import pytest

from graphforms.errors import DegreeMismatchError, InvalidGraphError, UsageError
from graphforms.forms import CanonicalFormSpec, top_coefficient_at
from graphforms.graphs import (
    Graph,
    banana,
    complete_graph,
    cycle,
    disjoint_union,
    fixture,
    relabel,
    t5,
    wheel,
    x5,
)
from graphforms.integrate import (
    CERTIFY_POINTS,
    TraceIntegrand,
    WheelIntegrand,
    build_integrand,
    certify_closed_form,
    check_against_target,
    conjecture_table,
    draw_points,
    feynman_residue,
    find_target,
    integrate_chart,
    integrate_spec,
    integrate_top_coefficient,
    known_targets,
    reference_constants,
    residue_target,
    stokes_outcome,
    stokes_residual,
    vanishing_reason,
    wheel_conjecture_target,
    wheel_moment,
)
from graphforms.models import IntegralEstimate, Sampler

OMEGA5 = CanonicalFormSpec((1,))
OMEGA9 = CanonicalFormSpec((2,))


def estimate(value, std_error, abs_mean=0.0):
    return IntegralEstimate(value, std_error, 100, Sampler.HEPP, 0, abs_mean=abs_mean)


def test_wheel_moment_base_case():
    """Test the zeroth moment of W3 is 6 zeta(3)."""
    assert abs(wheel_moment(1, 0) - 6 * mpmath.zeta(3)) < 1e-12


def test_wheel_moment_divergent():
    """Test that moments outside the convergent range are usage errors."""
    with pytest.raises(UsageError):
        wheel_moment(1, 1)
    with pytest.raises(UsageError):
        wheel_moment(0, 0)


@pytest.mark.parametrize(("n", "factor", "s"), [(1, 60, 3), (2, 1260, 5), (3, 24024, 7)])
def test_wheel_conjecture_target(n, factor, s):
    """Test the closed-form wheel values for small n."""
    assert abs(wheel_conjecture_target(n) - factor * mpmath.zeta(s)) < 1e-12


def test_conjecture_table_agrees():
    """Test that the wheel series matches the closed form for n = 1, 2, 3."""
    rows = conjecture_table()
    assert [row["wheel"] for row in rows] == ["W3", "W5", "W7"]
    assert all(row["relative_difference"] < 1e-12 for row in rows)


def test_reference_constants():
    """Test the double zeta value and the K6 target."""
    c = reference_constants()
    assert abs(float(c.zeta35) - 0.0377076729848) < 1e-12
    assert abs(c.zeta(5) - mpmath.zeta(5)) < 1e-12
    assert c.k6_target() > 0


def test_known_targets():
    """Test the names and signs of the reference integrals."""
    targets = {t.name: t for t in known_targets()}
    assert set(targets) == {"W3", "W5", "Z5", "T5", "W7", "K6"}
    assert targets["T5"].value == 0.0
    assert targets["W5"].value == pytest.approx(2 * targets["Z5"].value)


def test_find_target_tracks_orientation(w3):
    """Test that an odd edge relabeling flips the sign of the target."""
    target = find_target(w3, OMEGA5)
    assert target.value == pytest.approx(60 * float(mpmath.zeta(3)))
    swapped = relabel(w3, [0, 1, 2, 3], [1, 0, 2, 3, 4, 5])
    assert find_target(swapped, OMEGA5).value == pytest.approx(-target.value)
    assert find_target(w3, OMEGA9) is None


def test_residue_targets():
    """Test the Feynman residue targets of W3 and W4."""
    assert residue_target(wheel(3)).value == pytest.approx(6 * float(mpmath.zeta(3)))
    assert residue_target(wheel(4)).value == pytest.approx(20 * float(mpmath.zeta(5)))
    assert residue_target(wheel(5)) is None


def test_check_against_target():
    """Test the tolerance rule against a nonzero target."""
    outcome = check_against_target(estimate(10.0, 0.1), 10.2, rel_tol=0.01)
    assert outcome.passed
    assert outcome.sigmas == pytest.approx(2.0)
    assert not check_against_target(estimate(10.0, 0.1), 11.0, rel_tol=0.01).passed


def test_check_against_zero_target():
    """Test the tolerance rule against a zero target."""
    assert check_against_target(estimate(1e-7, 0.0, abs_mean=1.0), 0.0, rel_tol=0.0).passed
    assert not check_against_target(estimate(1e-3, 0.0, abs_mean=1.0), 0.0, rel_tol=0.0).passed
    exact = check_against_target(IntegralEstimate.zero(Sampler.HEPP, 0), 0.0, rel_tol=0.0)
    assert exact.passed
    assert exact.sigmas == 0.0


def test_vanishing_reasons(w3):
    """Test which integrals are zero without sampling."""
    assert vanishing_reason(w3, OMEGA5) is None
    assert vanishing_reason(t5(), OMEGA9) is not None
    assert vanishing_reason(disjoint_union(cycle(3), cycle(3)), OMEGA5) == "disconnected graph"


def test_vanishing_needs_connected_for_products():
    """Test that products of forms need a connected graph."""
    with pytest.raises(InvalidGraphError):
        vanishing_reason(disjoint_union(wheel(5), cycle(5)), CanonicalFormSpec((1, 2)))


def test_integrate_exact_zero():
    """Test that vanishing integrals are reported without samples."""
    result = integrate_spec(t5(), OMEGA9, samples=100)
    assert result.exact_zero
    assert result.value == 0.0
    assert result.samples == 0


def test_integrate_degree_mismatch(w3):
    """Test that the edge count must be the form degree plus one."""
    with pytest.raises(DegreeMismatchError):
        integrate_spec(w3, OMEGA9, samples=100)


def test_integrate_too_few_samples(w3):
    """Test that at least two samples are required."""
    with pytest.raises(UsageError):
        integrate_top_coefficient(build_integrand(w3, OMEGA5), samples=1)


def test_integrate_chart_out_of_range(w3):
    """Test that the chart edge must exist."""
    with pytest.raises(UsageError):
        integrate_chart(w3, OMEGA5, 6, samples=100)


def test_certify_closed_form(w3):
    """Test that the W3 closed form agrees with exact top coefficients."""
    closed, certificate = certify_closed_form(w3, OMEGA5, points=3, seed=4)
    assert isinstance(closed, WheelIntegrand)
    assert certificate.passed
    assert certificate.points == 3
    assert certify_closed_form(fixture("K4sub"), CanonicalFormSpec((1,)), points=1) is None


def test_certify_default_points(w3):
    """Test that the closed form is checked at several points by default."""
    _, certificate = certify_closed_form(w3, OMEGA5)
    assert certificate.passed
    assert certificate.points == CERTIFY_POINTS > 1
    assert isinstance(build_integrand(w3, OMEGA5), WheelIntegrand)


def test_build_integrand_falls_back_to_traces():
    """Test that graphs without a closed form use the trace integrand."""
    g = Graph(4, ((0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (0, 2)))
    assert isinstance(build_integrand(g, OMEGA5), TraceIntegrand)


def test_trace_integrand_matches_closed_form(w3):
    """Test the batched trace integrand against the W3 closed form."""
    closed = build_integrand(w3, OMEGA5)
    trace = TraceIntegrand(w3, OMEGA5)
    x = np.array([[0.1, 0.2, 0.3, 0.15, 0.05, 0.2], [0.3, 0.1, 0.1, 0.2, 0.2, 0.1]])
    psi = closed.psi(x)
    assert np.allclose(trace.density(x, psi), closed.density(x, psi))


def test_draw_points_shapes():
    """Test both samplers return points on their charts with positive weights."""
    rng = np.random.Generator(np.random.Philox(key=7))
    x, weight = draw_points(rng, Sampler.UNIFORM, 50, 4)
    assert x.shape == (50, 4)
    assert np.allclose(x.sum(axis=1), 1.0)
    assert np.allclose(weight, 1 / 6)

    x, weight = draw_points(rng, Sampler.HEPP, 50, 4)
    assert np.allclose(x.max(axis=1), 1.0)
    assert np.all(x > 0)
    assert np.all(weight > 0)


def test_integrate_is_deterministic(w3):
    """Test that a seed fixes the estimate."""
    first = integrate_spec(w3, OMEGA5, samples=5000, seed=3)
    second = integrate_spec(w3, OMEGA5, samples=5000, seed=3)
    assert first == second
    assert first.samples == 5000
    assert integrate_spec(w3, OMEGA5, samples=5000, seed=4).value != first.value


def test_integrate_sign_follows_orientation(w3):
    """Test that the estimate has the sign of the top coefficient."""
    result = integrate_spec(w3, OMEGA5, samples=5000, seed=1)
    top = top_coefficient_at(w3, OMEGA5, [1, 2, 3, 4, 5, 6])
    assert math.copysign(1, result.value) == math.copysign(1, top)


def test_integrate_independent_of_workers(w3):
    """Test that spreading blocks across processes does not change the estimate."""
    serial = integrate_spec(w3, OMEGA5, samples=9000, seed=2, workers=1)
    parallel = integrate_spec(w3, OMEGA5, samples=9000, seed=2, workers=2)
    assert serial == parallel


def test_feynman_residue_rejects_non_primitive():
    """Test that residues need log-divergent graphs without subdivergences."""
    with pytest.raises(InvalidGraphError):
        feynman_residue(banana(3), samples=100)
    with pytest.raises(InvalidGraphError):
        feynman_residue(disjoint_union(wheel(3), wheel(3)), samples=100)


def test_stokes_preconditions(w3):
    """Test the edge count and tadpole conditions of Stokes residuals."""
    with pytest.raises(DegreeMismatchError):
        stokes_residual(w3, OMEGA5, samples=100)
    tadpole = Graph(4, (*complete_graph(4).edges, (0, 0)))
    with pytest.raises(InvalidGraphError):
        stokes_residual(tadpole, OMEGA5, samples=100)


@pytest.mark.slow
@pytest.mark.parametrize("sampler", [Sampler.HEPP, Sampler.UNIFORM])
def test_w3_integral(w3, sampler):
    """Test the omega^5 integral of W3 against 60 zeta(3)."""
    target = find_target(w3, OMEGA5)
    result = integrate_spec(w3, OMEGA5, sampler=sampler, samples=200_000, seed=0)
    outcome = check_against_target(result, target.value, target.rel_tol)
    assert outcome.passed, outcome


@pytest.mark.slow
def test_w3_chart_agrees(w3):
    """Test the chart integrand against the target."""
    target = find_target(w3, OMEGA5)
    result = integrate_chart(w3, OMEGA5, 0, samples=200_000, seed=5)
    assert check_against_target(result, target.value, target.rel_tol).passed


@pytest.mark.slow
def test_w3_residue(w3):
    """Test the Feynman residue of W3 against 6 zeta(3)."""
    target = residue_target(w3)
    result = feynman_residue(w3, samples=200_000, seed=0)
    assert check_against_target(result, target.value, target.rel_tol).passed


@pytest.mark.slow
@pytest.mark.parametrize("name", ["W5", "Z5"])
def test_loop_order_five_integrals(name):
    """Test the omega^9 integrals of W5 and Z5."""
    target = next(t for t in known_targets() if t.name == name)
    result = integrate_spec(target.graph, target.spec, samples=200_000, seed=0)
    assert check_against_target(result, target.value, target.rel_tol).passed


@pytest.mark.slow
def test_stokes_on_x5():
    """Test that the boundary integrals of X5 sum to zero."""
    report = stokes_residual(x5(), OMEGA9, samples=100_000, seed=0)
    assert not report.exact_zero
    assert stokes_outcome(report).passed


@pytest.mark.slow
def test_stokes_on_subdivided_k4():
    """Test the residual of omega^5 on the subdivided K4."""
    report = stokes_residual(fixture("K4sub"), OMEGA5, samples=50_000, seed=0)
    assert stokes_outcome(report).passed


@pytest.mark.slow
@pytest.mark.parametrize(
    ("graph", "spec"),
    [
        (wheel(5), OMEGA9),
        (wheel(7), CanonicalFormSpec((3,))),
        (complete_graph(6), CanonicalFormSpec((1, 2))),
    ],
)
def test_closed_forms_at_many_points(graph, spec):
    """Test the known closed forms at 40 exact random points."""
    _, certificate = certify_closed_form(graph, spec, points=40, seed=9)
    assert certificate.passed
    assert certificate.points == 40
