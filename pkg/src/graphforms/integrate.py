"""Monte Carlo canonical integrals, Stokes residuals and reference constants.

An integral I_G(omega) is the integral of the top coefficient f (omega = f * Omega)
over the simplex sum x = 1. Samples come in fixed-size blocks; block b of a run
with seed s draws from a Philox stream keyed by (s << 64) | b, so estimates do
not depend on how blocks are spread across workers.
"""

from __future__ import annotations

import logging
import math
import random
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import repeat

import mpmath
import numpy as np

from .errors import DegreeMismatchError, InvalidGraphError, InvariantViolation, UsageError
from .forms import (
    CanonicalFormSpec,
    DiffForm,
    FormValue,
    cyclic_trace,
    omega_form,
    reduced_coproduct,
    top_coefficient_at,
)
from .graphcomplex import coproduct_ck
from .graphs import (
    Graph,
    canonical_certificate,
    complete_graph,
    contract,
    degrees,
    delete,
    has_odd_automorphism,
    has_tadpole,
    is_connected,
    reduced_incidence,
    t5,
    wheel,
    zigzag5,
)
from .identities import PointCertificate, point_certify, predicts_vanishing, random_points
from .laplacian import graph_polynomial
from .models import CheckOutcome, IntegralEstimate, Sampler, StokesReport, StokesTerm
from .polyring import MultiPoly

logger = logging.getLogger(__name__)

BLOCK = 4096
PSI_FLOOR = 1e-300
ZERO_SCALE = 1e-6
CERTIFY_POINTS = 3

# Top coefficients of omega^(4n+1) on W_{2n+1}: sum_j a_j Y^j / Psi^2, Y = prod(spokes) / Psi.
WHEEL_COEFFICIENTS: dict[int, tuple[int, ...]] = {
    1: (10,),
    2: (18, 216),
    3: (26, 1560, 9360),
}
K6_FACTOR = Fraction(math.factorial(9), 8)


# -- reference constants ----------------------------------------------------


def _nested_zeta(a: int, b: int) -> mpmath.mpf:
    """sum over 1 <= n1 < n2 of 1 / (n1^a n2^b)."""
    za = mpmath.zeta(a)
    return mpmath.nsum(lambda n: (za - mpmath.zeta(a, n)) / n**b, [2, mpmath.inf])


@dataclass(frozen=True)
class ReferenceConstants:
    """High-precision constants the numeric checks compare against."""

    zeta3: mpmath.mpf
    zeta5: mpmath.mpf
    zeta7: mpmath.mpf
    zeta9: mpmath.mpf
    zeta11: mpmath.mpf
    zeta35: mpmath.mpf
    pi8: mpmath.mpf
    dps: int = 40

    @classmethod
    def compute(cls, dps: int = 40) -> ReferenceConstants:
        """Evaluate every constant and cross-check it against an independent series.

        Raises:
            InvariantViolation: If a cross-check disagrees beyond 30 digits.
        """
        with mpmath.workdps(dps):
            tolerance = mpmath.mpf(10) ** -30
            single = {}
            for s in (3, 5, 7, 8, 9, 11):
                value = mpmath.zeta(s)
                series = mpmath.nsum(lambda m, s=s: 1 / mpmath.mpf(m) ** s, [1, mpmath.inf])
                if abs(value - series) > tolerance:
                    raise InvariantViolation(f"zeta({s}) series disagrees with mpmath.zeta")
                single[s] = value
            zeta35 = _nested_zeta(3, 5)
            zeta53 = _nested_zeta(5, 3)
            # stuffle: zeta(3) zeta(5) = zeta(3,5) + zeta(5,3) + zeta(8)
            if abs(single[3] * single[5] - zeta35 - zeta53 - single[8]) > tolerance:
                raise InvariantViolation("zeta(3,5) fails the stuffle relation")
            return cls(
                zeta3=+single[3],
                zeta5=+single[5],
                zeta7=+single[7],
                zeta9=+single[9],
                zeta11=+single[11],
                zeta35=+zeta35,
                pi8=+(mpmath.pi**8),
                dps=dps,
            )

    def zeta(self, s: int) -> mpmath.mpf:
        return {3: self.zeta3, 5: self.zeta5, 7: self.zeta7, 9: self.zeta9, 11: self.zeta11}[s]

    def k6_target(self) -> mpmath.mpf:
        with mpmath.workdps(self.dps):
            return (
                mpmath.factorial(9)
                / 16
                * (360 * self.zeta35 + 690 * self.zeta3 * self.zeta5 - 29 * self.pi8 / 315)
            )


_constants: ReferenceConstants | None = None


def reference_constants() -> ReferenceConstants:
    global _constants
    if _constants is None:
        _constants = ReferenceConstants.compute()
    return _constants


def wheel_conjecture_target(n: int) -> mpmath.mpf:
    """(2n+1) binom(4n+2, 2n+1) zeta(2n+1); reported, never asserted beyond n <= 3."""
    return (2 * n + 1) * math.comb(4 * n + 2, 2 * n + 1) * mpmath.zeta(2 * n + 1)


def _moment_polynomial(k: int) -> list[int]:
    """Coefficients c_j of prod_{l=1..k} (m^2 - l^2) = sum_j c_j m^(2j)."""
    coeffs = [1]
    for ell in range(1, k + 1):
        shifted = [0, *coeffs]
        coeffs = [s - ell * ell * c for s, c in zip(shifted, [*coeffs, 0], strict=True)]
    return coeffs


def wheel_moment(n: int, k: int, dps: int = 30) -> mpmath.mpf:
    """Integral over W_{2n+1} of Y^k Omega / Psi^2 with Y the spoke product over Psi.

    Raises:
        UsageError: If the series diverges.
    """
    if n < 1 or k < 0 or 4 * n - 2 * k - 1 < 3:
        raise UsageError(f"wheel_moment({n}, {k}) lies outside the convergent range")
    with mpmath.workdps(dps + 10):
        total = mpmath.mpf(0)
        for j, c in enumerate(_moment_polynomial(k)):
            if c:
                total += c * mpmath.zeta(4 * n - 1 - 2 * j)
        value = 2 * math.comb(4 * n, 2 * n) * total / mpmath.factorial(2 * k + 2)
    return +value


def wheel_series_value(n: int) -> mpmath.mpf:
    """Integral of the closed-form wheel integrand, assembled from wheel moments."""
    return sum(a * wheel_moment(n, j) for j, a in enumerate(WHEEL_COEFFICIENTS[n]))


def conjecture_table(ns: Sequence[int] = (1, 2, 3)) -> list[dict]:
    rows = []
    for n in ns:
        series = wheel_series_value(n)
        target = wheel_conjecture_target(n)
        rows.append(
            {
                "n": n,
                "wheel": f"W{2 * n + 1}",
                "series": float(series),
                "conjecture": float(target),
                "relative_difference": float(abs(series - target) / target),
            }
        )
    return rows


# -- integrands -------------------------------------------------------------


class Integrand:
    """Top coefficient of a projective form, vectorized over the rows of x."""

    source = "generic"

    def __init__(self, graph: Graph):
        self.graph = graph
        self.nvars = graph.edge_count
        poly = graph_polynomial(graph)
        self._exponents = np.array(list(poly.terms), dtype=float).reshape(-1, self.nvars)
        self._coefficients = np.array([float(c) for c in poly.terms.values()])

    def psi(self, x: np.ndarray) -> np.ndarray:
        """Graph polynomial accumulated over spanning-tree monomials."""
        logs = np.log(np.maximum(x, np.finfo(float).tiny))
        return np.exp(logs @ self._exponents.T) @ self._coefficients

    def density(self, x: np.ndarray, psi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def exact(self, point: Sequence[int]) -> Fraction:
        raise NotImplementedError


class FeynmanIntegrand(Integrand):
    source = "feynman"

    def density(self, x: np.ndarray, psi: np.ndarray) -> np.ndarray:
        return 1.0 / psi**2

    def exact(self, point: Sequence[int]) -> Fraction:
        return 1 / Fraction(graph_polynomial(self.graph).eval_rational(point)) ** 2


class WheelIntegrand(Integrand):
    """sign * sum_j a_j Y^j / Psi^2 with Y = prod(spokes) / Psi."""

    source = "closed form"

    def __init__(self, graph: Graph, coefficients: Sequence[int], spokes: Sequence[int]):
        super().__init__(graph)
        self.coefficients = tuple(coefficients)
        self.spokes = list(spokes)
        self.sign = 1

    def density(self, x: np.ndarray, psi: np.ndarray) -> np.ndarray:
        y = np.prod(x[:, self.spokes], axis=1) / psi
        return self.sign * np.polynomial.polynomial.polyval(y, self.coefficients) / psi**2

    def exact(self, point: Sequence[int]) -> Fraction:
        psi = Fraction(graph_polynomial(self.graph).eval_rational(point))
        y = Fraction(math.prod(point[s] for s in self.spokes)) / psi
        return self.sign * sum(a * y**j for j, a in enumerate(self.coefficients)) / psi**2


class MonomialIntegrand(Integrand):
    """sign * factor * prod(x) / Psi^power."""

    source = "closed form"

    def __init__(self, graph: Graph, factor: Fraction, power: int):
        super().__init__(graph)
        self.factor = factor
        self.power = power
        self.sign = 1

    def density(self, x: np.ndarray, psi: np.ndarray) -> np.ndarray:
        return self.sign * float(self.factor) * np.prod(x, axis=1) / psi**self.power

    def exact(self, point: Sequence[int]) -> Fraction:
        psi = Fraction(graph_polynomial(self.graph).eval_rational(point))
        return self.sign * self.factor * math.prod(point) / psi**self.power


class TraceIntegrand(Integrand):
    """Cyclic traces of the edge block of the inverse graph matrix, batched."""

    source = "trace"

    def __init__(self, graph: Graph, spec: CanonicalFormSpec):
        super().__init__(graph)
        self.spec = spec
        e = self.nvars
        eps = reduced_incidence(graph)
        size = e + len(eps)
        base = np.zeros((size, size))
        for a, row in enumerate(eps):
            for edge, c in enumerate(row):
                base[e + a, edge] = c
                base[edge, e + a] = -c
        self._base = base

    def density(self, x: np.ndarray, psi: np.ndarray) -> np.ndarray:
        e = self.nvars
        matrices = np.repeat(self._base[None, :, :], len(x), axis=0)
        diag = np.arange(e)
        matrices[:, diag, diag] = x
        inverse = np.linalg.inv(matrices)[:, :e, :e]
        keys = list(range(e - 1))
        value = FormValue(e, 0, {(): np.ones(len(x))})
        for k in self.spec:
            comps = cyclic_trace(lambda i, j: inverse[:, i, j], keys, 4 * k + 1)
            value = value.wedge(FormValue(e, 4 * k + 1, comps), within=keys)
        f = value.top_coefficient(list(x.T))
        return np.broadcast_to(np.asarray(f, dtype=float), (len(x),))


class ChartIntegrand(Integrand):
    """Evaluate a base integrand in the chart x_a = 1 and map back."""

    def __init__(self, base: Integrand, chart_edge: int):
        self.__dict__.update(base.__dict__)
        self.base = base
        self.chart_edge = chart_edge
        self.source = f"{base.source}, chart x{chart_edge + 1} = 1"

    def density(self, x: np.ndarray, psi: np.ndarray) -> np.ndarray:
        anchor = x[:, self.chart_edge]
        y = x / anchor[:, None]
        return self.base.density(y, self.base.psi(y)) * anchor ** (-self.nvars)


def _wheel_spokes(graph: Graph, n: int) -> list[int]:
    hub = max(range(graph.vertex_count), key=lambda v: degrees(graph)[v])
    return [i for i, (t, h) in enumerate(graph.edges) if hub in (t, h)][:n]


def closed_form_integrand(graph: Graph, spec: CanonicalFormSpec) -> Integrand | None:
    """Known top coefficient for odd wheels and for omega^5 ∧ omega^9 on K6, unsigned."""
    key = canonical_certificate(graph).canonical_key
    if spec.is_primitive:
        k = spec.indices[0]
        if k in WHEEL_COEFFICIENTS and graph.edge_count == 4 * k + 2:
            if key == canonical_certificate(wheel(2 * k + 1)).canonical_key:
                spokes = _wheel_spokes(graph, 2 * k + 1)
                return WheelIntegrand(graph, WHEEL_COEFFICIENTS[k], spokes)
    if spec.indices == (1, 2) and graph.edge_count == 15:
        if key == canonical_certificate(complete_graph(6)).canonical_key:
            return MonomialIntegrand(graph, K6_FACTOR, 3)
    return None


def certify_closed_form(
    graph: Graph, spec: CanonicalFormSpec, points: int = CERTIFY_POINTS, seed: int = 0
) -> tuple[Integrand, PointCertificate] | None:
    """Compare the closed form with exact top coefficients at random points.

    The overall sign is fixed at the first point; the certificate covers all of them.
    Returns None when no closed form is known for the graph and spec.
    """
    closed = closed_form_integrand(graph, spec)
    if closed is None:
        return None
    rng = random.Random(seed)
    sample = random_points(rng, graph.edge_count, max(points, 1), high=1000)
    exact = {p: top_coefficient_at(graph, spec, p) for p in sample}
    if closed.exact(sample[0]) != exact[sample[0]]:
        closed.sign = -1
    certificate = point_certify(exact.__getitem__, closed.exact, sample)
    return closed, certificate


def build_integrand(
    graph: Graph, spec: CanonicalFormSpec, certify_points: int = CERTIFY_POINTS, seed: int = 0
) -> Integrand:
    """Closed form when one applies and agrees at exact points, else the trace integrand."""
    certified = certify_closed_form(graph, spec, certify_points, seed)
    if certified is not None:
        closed, certificate = certified
        if certificate.passed:
            logger.info("%s: closed form certified at %d points", graph.name(), certificate.points)
            return closed
        logger.warning("%s: closed form disagrees with %s; using traces", graph.name(), spec)
    return TraceIntegrand(graph, spec)


def feynman_residue_integrand(graph: Graph) -> DiffForm:
    """Omega / Psi^2 for a primitive log-divergent graph.

    Raises:
        InvalidGraphError: If the graph is not of degree 0 or has a subdivergence.
    """
    _check_residue_graph(graph)
    e = graph.edge_count
    return omega_form(e).scale_poly(MultiPoly.one(e), graph_polynomial(graph), 2)


def _check_residue_graph(graph: Graph) -> None:
    if not is_connected(graph):
        raise InvalidGraphError(f"{graph.name()} is not connected")
    if graph.edge_count != 2 * graph.loop_number:
        raise InvalidGraphError(
            f"{graph.name()} has degree {graph.degree}; a Feynman residue needs degree 0"
        )
    for pair in coproduct_ck(graph):
        sub = pair.subgraph
        if sub.edge_count <= 2 * sub.loop_number:
            raise InvalidGraphError(
                f"{graph.name()} has a subdivergence on edges {[i + 1 for i in pair.edges]}"
            )


# -- sampling ---------------------------------------------------------------


def _generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed << 64) | block))


def draw_points(
    rng: np.random.Generator, sampler: Sampler, size: int, nvars: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sample points with weights whose mean of weight * f is the simplex integral."""
    if sampler is Sampler.UNIFORM:
        g = rng.standard_exponential((size, nvars))
        x = g / g.sum(axis=1, keepdims=True)
        return x, np.full(size, 1.0 / math.factorial(nvars - 1))
    # Hepp sectors: a random total order, largest coordinate 1, the rest
    # running products of uniform ratios.
    t = rng.random((size, nvars - 1))
    order = np.argsort(rng.random((size, nvars)), axis=1)
    ordered = np.concatenate([np.ones((size, 1)), np.cumprod(t, axis=1)], axis=1)
    x = np.empty((size, nvars))
    np.put_along_axis(x, order, ordered, axis=1)
    powers = np.arange(nvars - 2, -1, -1)
    weight = math.factorial(nvars) * np.prod(t**powers, axis=1)
    return x, weight


@dataclass(frozen=True)
class BlockSums:
    block: int
    total: float
    squares: float
    absolute: float
    count: int
    resampled: int


def run_block(integrand: Integrand, sampler: Sampler, seed: int, block: int, size: int) -> BlockSums:
    rng = _generator(seed, block)
    chunks = []
    need, resampled = size, 0
    while need:
        x, weight = draw_points(rng, sampler, need, integrand.nvars)
        psi = integrand.psi(x)
        ok = np.isfinite(psi) & (np.abs(psi) >= PSI_FLOOR)
        if ok.any():
            chunks.append(integrand.density(x[ok], psi[ok]) * weight[ok])
        need = int((~ok).sum())
        resampled += need
        if resampled > 100 * size:
            raise InvariantViolation("graph polynomial keeps vanishing on the simplex")
    values = np.concatenate(chunks)
    if not np.all(np.isfinite(values)):
        raise InvariantViolation(f"non-finite integrand on {integrand.graph.name()}")
    if resampled:
        logger.debug("block %d: resampled %d points", block, resampled)
    return BlockSums(
        block,
        math.fsum(values),
        math.fsum(values * values),
        math.fsum(np.abs(values)),
        size,
        resampled,
    )


def integrate_top_coefficient(
    integrand: Integrand,
    sampler: Sampler = Sampler.HEPP,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> IntegralEstimate:
    """Monte Carlo estimate of the simplex integral of an integrand."""
    if samples < 2:
        raise UsageError(f"need at least 2 samples, got {samples}")
    blocks = [(b, min(BLOCK, samples - b * BLOCK)) for b in range(math.ceil(samples / BLOCK))]
    indices = [b for b, _ in blocks]
    sizes = [s for _, s in blocks]
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sums = list(
                pool.map(
                    run_block,
                    repeat(integrand),
                    repeat(sampler),
                    repeat(seed),
                    indices,
                    sizes,
                    chunksize=max(1, len(blocks) // (4 * workers)),
                )
            )
    else:
        sums = []
        for b, size in blocks:
            sums.append(run_block(integrand, sampler, seed, b, size))
            logger.debug("block %d/%d done", b + 1, len(blocks))
    n = sum(s.count for s in sums)
    mean = math.fsum(s.total for s in sums) / n
    second = math.fsum(s.squares for s in sums) / n
    variance = max(second - mean * mean, 0.0) * n / (n - 1)
    estimate = IntegralEstimate(
        value=mean,
        std_error=math.sqrt(variance / n),
        samples=n,
        sampler=sampler,
        seed=seed,
        resampled=sum(s.resampled for s in sums),
        abs_mean=math.fsum(s.absolute for s in sums) / n,
    )
    logger.info(
        "%s (%s): %.8g ± %.2g from %d samples",
        integrand.graph.name(),
        integrand.source,
        estimate.value,
        estimate.std_error,
        n,
    )
    return estimate


# -- canonical integrals ----------------------------------------------------


def vanishing_reason(graph: Graph, spec: CanonicalFormSpec) -> str | None:
    """Why I_G(omega) is exactly zero, or None when it has to be sampled."""
    if not is_connected(graph):
        if spec.is_primitive:
            return "disconnected graph"
        raise InvalidGraphError(f"{graph.name()} is not connected")
    reason = predicts_vanishing(graph, spec)
    if reason is not None:
        return reason
    if spec.is_primitive and graph.degree != 0:
        return "primitive form on a graph of nonzero degree"
    if has_odd_automorphism(graph):
        return "odd automorphism"
    return None


def _check_degree(graph: Graph, spec: CanonicalFormSpec, extra: int = 1) -> None:
    if graph.edge_count != spec.degree + extra:
        raise DegreeMismatchError(
            f"{spec} has degree {spec.degree}; {graph.name()} needs "
            f"{spec.degree + extra} edges, has {graph.edge_count}"
        )


def integrate_spec(
    graph: Graph,
    spec: CanonicalFormSpec,
    sampler: Sampler = Sampler.HEPP,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    certify_points: int = CERTIFY_POINTS,
) -> IntegralEstimate:
    """Estimate I_G(omega_spec).

    Raises:
        DegreeMismatchError: If the graph does not have degree(spec) + 1 edges.
    """
    _check_degree(graph, spec)
    reason = vanishing_reason(graph, spec)
    if reason is not None:
        logger.info("%s: %s vanishes (%s)", graph.name(), spec, reason)
        return IntegralEstimate.zero(sampler, seed)
    integrand = build_integrand(graph, spec, certify_points, seed)
    return integrate_top_coefficient(integrand, sampler, samples, seed, workers)


integrate = integrate_spec


def integrate_chart(
    graph: Graph,
    spec: CanonicalFormSpec,
    chart_edge: int,
    sampler: Sampler = Sampler.HEPP,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> IntegralEstimate:
    """Same integral with the integrand evaluated in the chart x_chart = 1."""
    _check_degree(graph, spec)
    if not 0 <= chart_edge < graph.edge_count:
        raise UsageError(f"chart edge {chart_edge} out of range")
    if vanishing_reason(graph, spec) is not None:
        return IntegralEstimate.zero(sampler, seed)
    base = build_integrand(graph, spec, seed=seed)
    return integrate_top_coefficient(ChartIntegrand(base, chart_edge), sampler, samples, seed, workers)


def feynman_residue(
    graph: Graph,
    sampler: Sampler = Sampler.HEPP,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> IntegralEstimate:
    _check_residue_graph(graph)
    return integrate_top_coefficient(FeynmanIntegrand(graph), sampler, samples, seed, workers)


def check_against_target(
    estimate: IntegralEstimate, target: float, rel_tol: float
) -> CheckOutcome:
    """Pass when |value - target| <= max(rel_tol * |target|, 3 sigma).

    A zero target uses max(1e-6 * mean |integrand|, 3 sigma) instead.
    """
    diff = abs(estimate.value - target)
    sigma = estimate.std_error
    sigmas = diff / sigma if sigma > 0 else (0.0 if diff == 0 else math.inf)
    if target == 0:
        allowed = max(ZERO_SCALE * estimate.abs_mean, 3 * sigma)
        relative = diff
    else:
        allowed = max(rel_tol * abs(target), 3 * sigma)
        relative = diff / abs(target)
    return CheckOutcome(passed=diff <= allowed, sigmas=sigmas, relative_error=relative, target=target)


# -- Stokes residuals -------------------------------------------------------


def _term_seed(seed: int, index: int) -> int:
    return (seed + 1_000_003 * (index + 1)) % 2**64


def stokes_residual(
    graph: Graph,
    spec: CanonicalFormSpec,
    sampler: Sampler = Sampler.HEPP,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> StokesReport:
    """Signed sum of all boundary integrals of omega_spec over the faces of sigma_G.

    Face x_e = 0 of the ordered simplex carries (-1)^e (edges counted from 1).
    Product faces carry the shuffle sign of (E_gamma, E minus E_gamma).

    Raises:
        DegreeMismatchError: If the graph does not have degree(spec) + 2 edges.
        InvalidGraphError: If the graph has a tadpole.
    """
    _check_degree(graph, spec, extra=2)
    if has_tadpole(graph):
        raise InvalidGraphError("Stokes residuals need a graph without tadpoles")
    terms: list[StokesTerm] = []

    def add(label: str, sign: int, face: Graph, face_spec: CanonicalFormSpec) -> StokesTerm:
        reason = vanishing_reason(face, face_spec)
        if reason is not None:
            term = StokesTerm(label, sign, IntegralEstimate.zero(sampler, seed), reason)
        else:
            estimate = integrate_spec(
                face, face_spec, sampler, samples, _term_seed(seed, len(terms)), workers
            )
            term = StokesTerm(label, sign, estimate)
        terms.append(term)
        return term

    for i in range(graph.edge_count):
        sign = -1 if (i + 1) % 2 else 1
        add(f"G/e{i + 1}", sign, contract(graph, i), spec)
        add(f"G\\e{i + 1}", sign, delete(graph, i), spec)

    value = math.fsum(t.sign * t.estimate.value for t in terms)
    variance = math.fsum(t.estimate.std_error**2 for t in terms)

    pieces = reduced_coproduct(spec)
    if pieces:
        for pair in coproduct_ck(graph):
            for piece in pieces:
                left, right = piece.left, piece.right
                if pair.subgraph.edge_count != left.degree + 1:
                    continue
                if pair.quotient.edge_count != right.degree + 1:
                    continue
                name = "gamma(" + ",".join(str(e + 1) for e in pair.edges) + ")"
                sign = piece.sign * pair.sign
                a = add(f"{name}:{left}", sign, pair.subgraph, left).estimate
                b = add(f"G/{name}:{right}", 1, pair.quotient, right).estimate
                value += sign * a.value * b.value
                variance += (b.value * a.std_error) ** 2 + (a.value * b.std_error) ** 2
    return StokesReport(
        graph=graph.name(),
        spec=spec.to_text(),
        value=value,
        std_error=math.sqrt(max(variance, 0.0)),
        terms=terms,
    )


def stokes_outcome(report: StokesReport) -> CheckOutcome:
    """A residual passes when it is exactly zero or within 3 sigma of zero."""
    if report.exact_zero:
        return CheckOutcome(passed=True, sigmas=0.0, relative_error=0.0, target=0.0)
    scale = math.fsum(t.estimate.abs_mean for t in report.terms)
    diff = abs(report.value)
    sigma = report.std_error
    return CheckOutcome(
        passed=diff <= max(ZERO_SCALE * scale, 3 * sigma),
        sigmas=diff / sigma if sigma > 0 else math.inf,
        relative_error=diff,
        target=0.0,
    )


# -- targets ----------------------------------------------------------------


@dataclass(frozen=True)
class Target:
    name: str
    graph: Graph
    spec: CanonicalFormSpec
    value: float
    rel_tol: float


def known_targets(constants: ReferenceConstants | None = None) -> list[Target]:
    c = constants or reference_constants()
    return [
        Target("W3", wheel(3), CanonicalFormSpec((1,)), float(60 * c.zeta3), 0.005),
        Target("W5", wheel(5), CanonicalFormSpec((2,)), float(1260 * c.zeta5), 0.01),
        Target("Z5", zigzag5(), CanonicalFormSpec((2,)), float(630 * c.zeta5), 0.01),
        Target("T5", t5(), CanonicalFormSpec((2,)), 0.0, 0.0),
        Target("W7", wheel(7), CanonicalFormSpec((3,)), float(24024 * c.zeta7), 0.02),
        Target("K6", complete_graph(6), CanonicalFormSpec((1, 2)), float(c.k6_target()), 0.05),
    ]


_TARGET_SHAPES = {
    "W3": (lambda: wheel(3), (1,)),
    "W5": (lambda: wheel(5), (2,)),
    "Z5": (zigzag5, (2,)),
    "T5": (t5, (2,)),
    "W7": (lambda: wheel(7), (3,)),
    "K6": (lambda: complete_graph(6), (1, 2)),
}


def find_target(graph: Graph, spec: CanonicalFormSpec) -> Target | None:
    """Reference value for an isomorphic copy of a known graph, signed by its orientation."""
    cert = canonical_certificate(graph)
    for name, (build, indices) in _TARGET_SHAPES.items():
        if spec.indices != indices:
            continue
        reference = canonical_certificate(build())
        if reference.canonical_key != cert.canonical_key:
            continue
        target = next(t for t in known_targets() if t.name == name)
        sign = reference.edge_sign * cert.edge_sign
        return Target(name, graph, spec, sign * target.value, target.rel_tol)
    return None


def residue_target(graph: Graph) -> Target | None:
    """Feynman residues of the wheels with three and four spokes."""
    key = canonical_certificate(graph).canonical_key
    empty = CanonicalFormSpec()
    if key == canonical_certificate(wheel(3)).canonical_key:
        return Target("W3", graph, empty, float(wheel_moment(1, 0)), 0.01)
    if key == canonical_certificate(wheel(4)).canonical_key:
        return Target("W4", graph, empty, float(20 * reference_constants().zeta5), 0.01)
    return None
