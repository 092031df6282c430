"""Differential forms, invariant traces and the canonical forms of graphs.

A `DiffForm` stores its components on ascending index subsets S (the basis
element dx_S), each with a polynomial numerator over a common power of one
base polynomial (det X or the graph polynomial). Forms are kept reduced: the
exponent of the base is as small as exact division allows.

Heavy identities are checked at exact rational points with `FormValue`, which
holds the numeric components of a form at one point. Values may also be numpy
arrays, in which case each component carries a whole batch of points.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Protocol

import numpy as np

from .errors import (
    DegreeMismatchError,
    InvariantViolation,
    PoleError,
    SingularMatrixError,
    UsageError,
)
from .graphs import Graph, components, edge_subgraph, permutation_sign, reduced_incidence
from .laplacian import (
    dodgson_matrix,
    dodgson_matrix_at,
    graph_matrix,
    graph_polynomial,
    laplacian,
)
from .polyring import MultiPoly, PolyMatrix, Scalar, exact_divide, mat_det, mat_inverse, mat_mul

logger = logging.getLogger(__name__)

Subset = tuple[int, ...]

ROUTES = ("lambda", "dual", "graph_matrix", "eta", "dodgson")


# -- canonical form specs and the coproduct ---------------------------------


@dataclass(frozen=True)
class CanonicalFormSpec:
    """Wedge of generators omega^(4k+1) for strictly increasing k >= 1."""

    indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        indices = tuple(int(k) for k in self.indices)
        object.__setattr__(self, "indices", indices)
        if any(k < 1 for k in indices):
            raise UsageError(f"spec indices must be >= 1, got {list(indices)}")
        if any(a >= b for a, b in zip(indices, indices[1:], strict=False)):
            raise UsageError(f"spec indices must be strictly increasing, got {list(indices)}")

    @classmethod
    def parse(cls, text: str | Iterable[int]) -> CanonicalFormSpec:
        if isinstance(text, str):
            parts = [p for p in text.replace(",", " ").split() if p]
            try:
                return cls(tuple(int(p) for p in parts))
            except ValueError as exc:
                raise UsageError(f"malformed spec {text!r}") from exc
        return cls(tuple(text))

    @property
    def degree(self) -> int:
        return sum(4 * k + 1 for k in self.indices)

    @property
    def is_primitive(self) -> bool:
        return len(self.indices) == 1

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def to_text(self) -> str:
        if not self.indices:
            return "1"
        return "∧".join(f"ω^{4 * k + 1}" for k in self.indices)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class CoproductTerm:
    left: CanonicalFormSpec
    right: CanonicalFormSpec
    sign: int


def coproduct(spec: CanonicalFormSpec) -> list[CoproductTerm]:
    """Graded shuffle coproduct; every generator is primitive and of odd degree."""
    positions = range(len(spec))
    terms = []
    for size in range(len(spec) + 1):
        for chosen in combinations(positions, size):
            rest = [p for p in positions if p not in chosen]
            crossings = sum(1 for c in rest for s in chosen if c < s)
            terms.append(
                CoproductTerm(
                    left=CanonicalFormSpec(tuple(spec.indices[p] for p in chosen)),
                    right=CanonicalFormSpec(tuple(spec.indices[p] for p in rest)),
                    sign=-1 if crossings % 2 else 1,
                )
            )
    return terms


def reduced_coproduct(spec: CanonicalFormSpec) -> list[CoproductTerm]:
    return [t for t in coproduct(spec) if t.left.indices and t.right.indices]


# -- helpers ----------------------------------------------------------------


def _live(value: Any) -> bool:
    if isinstance(value, np.ndarray):
        return True
    return bool(value)


def _merge_sign(first: Subset, second: Subset) -> int:
    inversions = sum(1 for a in first for b in second if a > b)
    return -1 if inversions % 2 else 1


def _sorted_with_sign(indices: Sequence[int]) -> tuple[Subset, int]:
    order = sorted(range(len(indices)), key=lambda i: indices[i])
    return tuple(indices[i] for i in order), permutation_sign(order)


def _insert_sign(subset: Subset, v: int) -> int:
    """Sign of moving dx_v from the front into sorted position within dx_S."""
    below = sum(1 for s in subset if s < v)
    return -1 if below % 2 else 1


# -- symbolic forms ---------------------------------------------------------


@dataclass(frozen=True)
class RationalSection:
    """numerator / base^exponent."""

    numerator: MultiPoly
    base: MultiPoly
    exponent: int

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        b = self.base.eval_rational(point) if self.exponent else 1
        if not b:
            raise PoleError("denominator vanishes at the point")
        return Fraction(self.numerator.eval_rational(point)) / Fraction(b) ** self.exponent

    def to_text(self, names: Sequence[str] | str = "x") -> str:
        if not self.exponent:
            return self.numerator.to_text(names)
        return f"({self.numerator.to_text(names)}) / ({self.base.to_text(names)})^{self.exponent}"


class DiffForm:
    """Homogeneous-degree differential form sum_S N_S / B^n dx_S."""

    __slots__ = ("nvars", "degree", "base", "exponent", "components")

    def __init__(
        self,
        nvars: int,
        degree: int,
        components: Mapping[Subset, MultiPoly] | None = None,
        base: MultiPoly | None = None,
        exponent: int = 0,
    ):
        self.nvars = nvars
        self.degree = degree
        base = MultiPoly.one(nvars) if base is None else base
        comps = {tuple(s): n for s, n in (components or {}).items() if n}
        for s in comps:
            if len(s) != degree or list(s) != sorted(set(s)):
                raise ValueError(f"component {s} is not an ascending {degree}-subset")
        if base.is_constant() and exponent:
            scale = Fraction(1) / Fraction(base.constant_value()) ** exponent
            comps = {s: n * scale for s, n in comps.items()}
            base, exponent = MultiPoly.one(nvars), 0
        if not comps:
            exponent = 0
        self.base = base
        self.exponent = exponent
        self.components: dict[Subset, MultiPoly] = comps

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, degree: int, base: MultiPoly | None = None) -> DiffForm:
        return cls(nvars, degree, {}, base)

    @classmethod
    def constant(cls, nvars: int, value: Scalar = 1) -> DiffForm:
        return cls(nvars, 0, {(): MultiPoly.constant(nvars, value)})

    @classmethod
    def dlog(cls, poly: MultiPoly) -> DiffForm:
        """d log p = sum_v (dp/dx_v) / p dx_v."""
        comps = {(v,): poly.derivative(v) for v in range(poly.nvars)}
        return cls(poly.nvars, 1, comps, poly, 1).reduce()

    # -- basic protocol -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffForm):
            return NotImplemented
        if self.nvars != other.nvars or self.degree != other.degree:
            return False
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash((self.nvars, self.degree, frozenset(self.components)))

    def coefficient(self, subset: Subset) -> RationalSection:
        return RationalSection(
            self.components.get(tuple(subset), MultiPoly.zero(self.nvars)),
            self.base,
            self.exponent,
        )

    def _lifted(self, exponent: int) -> dict[Subset, MultiPoly]:
        if exponent == self.exponent:
            return dict(self.components)
        factor = self.base ** (exponent - self.exponent)
        return {s: n * factor for s, n in self.components.items()}

    def _common_base(self, other: DiffForm) -> MultiPoly:
        if self.base == other.base or other.base.is_constant():
            return self.base
        if self.base.is_constant():
            return other.base
        raise ValueError("forms have different denominator bases")

    def rebase(self, base: MultiPoly, cofactor: MultiPoly) -> DiffForm:
        """Rewrite over `base` given base = cofactor * self.base."""
        factor = cofactor**self.exponent
        return DiffForm(
            self.nvars,
            self.degree,
            {s: n * factor for s, n in self.components.items()},
            base,
            self.exponent,
        )

    def __add__(self, other: DiffForm) -> DiffForm:
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise ValueError("cannot add forms of different shape")
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        base = self._common_base(other)
        exponent = max(self.exponent, other.exponent)
        left = self.rebase(base, MultiPoly.one(self.nvars)) if self.base != base else self
        right = other.rebase(base, MultiPoly.one(self.nvars)) if other.base != base else other
        comps = left._lifted(exponent)
        for s, n in right._lifted(exponent).items():
            comps[s] = comps[s] + n if s in comps else n
        return DiffForm(self.nvars, self.degree, comps, base, exponent).reduce()

    def __neg__(self) -> DiffForm:
        return self.scale(-1)

    def __sub__(self, other: DiffForm) -> DiffForm:
        return self + (-other)

    def scale(self, factor: Scalar) -> DiffForm:
        return DiffForm(
            self.nvars,
            self.degree,
            {s: n * factor for s, n in self.components.items()},
            self.base,
            self.exponent,
        )

    # -- algebra --------------------------------------------------------

    def reduce(self) -> DiffForm:
        """Divide numerators by the base while every one of them allows it."""
        comps = dict(self.components)
        exponent = self.exponent
        while exponent > 0 and comps:
            divided = {}
            for s, n in comps.items():
                quotient = exact_divide(n, self.base)
                if quotient is None:
                    break
                divided[s] = quotient
            else:
                comps, exponent = divided, exponent - 1
                continue
            break
        return DiffForm(self.nvars, self.degree, comps, self.base, exponent)

    def wedge(self, other: DiffForm) -> DiffForm:
        if self.nvars != other.nvars:
            raise ValueError("forms live in different rings")
        base = self._common_base(other)
        left = self if self.base == base else self.rebase(base, MultiPoly.one(self.nvars))
        right = other if other.base == base else other.rebase(base, MultiPoly.one(self.nvars))
        comps: dict[Subset, MultiPoly] = {}
        for s1, n1 in left.components.items():
            for s2, n2 in right.components.items():
                if set(s1) & set(s2):
                    continue
                key = tuple(sorted(s1 + s2))
                term = n1 * n2
                if _merge_sign(s1, s2) < 0:
                    term = -term
                comps[key] = comps[key] + term if key in comps else term
        return DiffForm(
            self.nvars, self.degree + other.degree, comps, base, left.exponent + right.exponent
        ).reduce()

    def exterior_derivative(self) -> DiffForm:
        n = self.exponent
        comps: dict[Subset, MultiPoly] = {}
        for s, num in self.components.items():
            for v in range(self.nvars):
                if v in s:
                    continue
                term = num.derivative(v) * self.base
                if n:
                    term = term - num * self.base.derivative(v) * n
                if not term:
                    continue
                key = tuple(sorted(s + (v,)))
                if _insert_sign(s, v) < 0:
                    term = -term
                comps[key] = comps[key] + term if key in comps else term
        return DiffForm(self.nvars, self.degree + 1, comps, self.base, n + 1).reduce()

    def euler_contraction(self) -> DiffForm:
        """Contraction with sum_v x_v d/dx_v; zero for projective forms."""
        if self.degree == 0:
            return DiffForm.zero(self.nvars, 0)
        comps: dict[Subset, MultiPoly] = {}
        for s, num in self.components.items():
            for j, v in enumerate(s):
                key = s[:j] + s[j + 1 :]
                term = num * MultiPoly.variable(self.nvars, v)
                if j % 2:
                    term = -term
                comps[key] = comps[key] + term if key in comps else term
        return DiffForm(self.nvars, self.degree - 1, comps, self.base, self.exponent).reduce()

    def restrict_edge_zero(self, e: int) -> DiffForm:
        """Set x_e = 0 and dx_e = 0, dropping the variable.

        Raises:
            PoleError: If the denominator vanishes identically on x_e = 0.
        """
        assignment = {e: 0}
        comps = {}
        for s, num in self.components.items():
            if e in s:
                continue
            restricted = num.substitute(assignment)
            if restricted:
                comps[tuple(x - 1 if x > e else x for x in s)] = restricted.drop_variable(e)
        base = self.base.substitute(assignment)
        if self.exponent and not base:
            if comps:
                raise PoleError(f"denominator vanishes identically on x{e + 1} = 0")
            return DiffForm.zero(self.nvars - 1, self.degree)
        return DiffForm(
            self.nvars - 1, self.degree, comps, base.drop_variable(e), self.exponent
        ).reduce()

    def embed(self, index_map: Sequence[int], nvars: int, base: MultiPoly) -> DiffForm:
        """Move variable i to index_map[i] in a ring of `nvars` variables over `base`.

        `base` must be a multiple of the image of this form's base.
        """
        moved_base = self.base.remap(index_map, nvars)
        cofactor = exact_divide(base, moved_base)
        if cofactor is None:
            raise ValueError("target base is not a multiple of the moved base")
        factor = cofactor**self.exponent
        comps = {}
        for s, num in self.components.items():
            key, sign = _sorted_with_sign([index_map[x] for x in s])
            moved = num.remap(index_map, nvars) * factor
            comps[key] = -moved if sign < 0 else moved
        return DiffForm(nvars, self.degree, comps, base, self.exponent)

    def evaluate(self, point: Sequence[Scalar]) -> FormValue:
        b = Fraction(self.base.eval_rational(point)) if self.exponent else Fraction(1)
        if not b:
            raise PoleError("denominator vanishes at the point")
        denominator = b**self.exponent
        return FormValue(
            self.nvars,
            self.degree,
            {s: Fraction(n.eval_rational(point)) / denominator for s, n in self.components.items()},
        )

    def top_coefficient(self) -> RationalSection:
        """The f with form = f * Omega, for a projective form of degree nvars - 1.

        Raises:
            InvariantViolation: If the form is not a multiple of Omega.
        """
        m = self.nvars
        if self.degree != m - 1:
            raise DegreeMismatchError(f"top coefficient needs degree {m - 1}, form has {self.degree}")
        if self.is_zero():
            return RationalSection(MultiPoly.zero(m), self.base, 0)
        numerator = self.components.get(tuple(range(m - 1)), MultiPoly.zero(m))
        quotient = exact_divide(numerator, MultiPoly.variable(m, m - 1))
        if quotient is None:
            raise InvariantViolation("form is not a multiple of Omega")
        if m % 2:
            quotient = -quotient
        candidate = omega_form(m).scale_poly(quotient, self.base, self.exponent)
        if candidate != self:
            raise InvariantViolation("form is not a multiple of Omega")
        return RationalSection(quotient, self.base, self.exponent)

    def scale_poly(self, factor: MultiPoly, base: MultiPoly, exponent: int) -> DiffForm:
        """Multiply a base-free form by factor / base^exponent."""
        lifted = {s: n * factor for s, n in self._lifted(self.exponent).items()}
        return DiffForm(self.nvars, self.degree, lifted, base, exponent).reduce()

    def to_text(self, names: Sequence[str] | str = "x") -> str:
        prefix = names if isinstance(names, str) else "x"
        lines = [f"degree {self.degree} form in {self.nvars} variables"]
        if self.exponent:
            lines.append(f"denominator: ({self.base.to_text(names)})^{self.exponent}")
        if not self.components:
            lines.append("0")
        for s in sorted(self.components):
            basis = "∧".join(f"d{prefix}{i + 1}" for i in s) or "1"
            lines.append(f"{basis}: {self.components[s].to_text(names)}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return (
            f"DiffForm(nvars={self.nvars}, degree={self.degree}, "
            f"terms={len(self.components)}, exponent={self.exponent})"
        )


def omega_form(nvars: int) -> DiffForm:
    """Omega = sum_i (-1)^i x_i dx_1 ... (dx_i omitted) ... dx_n, i counted from 1."""
    comps = {}
    for i in range(nvars):
        key = tuple(j for j in range(nvars) if j != i)
        var = MultiPoly.variable(nvars, i)
        comps[key] = var if (i + 1) % 2 == 0 else -var
    return DiffForm(nvars, nvars - 1, comps)


# -- point values -----------------------------------------------------------


@dataclass
class FormValue:
    """Numeric components of a form at a point (or a batch of points)."""

    nvars: int
    degree: int
    components: dict[Subset, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.components = {tuple(s): v for s, v in self.components.items() if _live(v)}

    def get(self, subset: Subset) -> Any:
        return self.components.get(tuple(subset), 0)

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormValue):
            return NotImplemented
        return (self.nvars, self.degree, self.components) == (
            other.nvars,
            other.degree,
            other.components,
        )

    def __add__(self, other: FormValue) -> FormValue:
        comps = dict(self.components)
        for s, v in other.components.items():
            comps[s] = comps[s] + v if s in comps else v
        return FormValue(self.nvars, self.degree, comps)

    def scale(self, factor: Any) -> FormValue:
        return FormValue(self.nvars, self.degree, {s: v * factor for s, v in self.components.items()})

    def __sub__(self, other: FormValue) -> FormValue:
        return self + other.scale(-1)

    def wedge(self, other: FormValue, within: Sequence[int] | None = None) -> FormValue:
        """Exterior product; with `within`, only components on subsets of it are kept."""
        if within is not None and self.degree + other.degree == len(within):
            return self._wedge_onto(other, tuple(sorted(within)))
        allowed = None if within is None else set(within)
        comps: dict[Subset, Any] = {}
        for s1, v1 in self.components.items():
            for s2, v2 in other.components.items():
                if set(s1) & set(s2):
                    continue
                key = tuple(sorted(s1 + s2))
                if allowed is not None and not allowed.issuperset(key):
                    continue
                term = v1 * v2 if _merge_sign(s1, s2) > 0 else -(v1 * v2)
                comps[key] = comps[key] + term if key in comps else term
        return FormValue(self.nvars, self.degree + other.degree, comps)

    def _wedge_onto(self, other: FormValue, target: Subset) -> FormValue:
        members = set(target)
        total: Any = 0
        for s1, v1 in self.components.items():
            if not members.issuperset(s1):
                continue
            s2 = tuple(x for x in target if x not in s1)
            v2 = other.components.get(s2)
            if v2 is None:
                continue
            term = v1 * v2
            total = total + term if _merge_sign(s1, s2) > 0 else total - term
        return FormValue(self.nvars, len(target), {target: total})

    def top_coefficient(self, point: Sequence[Any]) -> Any:
        """f(point) where the form equals f * Omega."""
        m = self.nvars
        if self.degree != m - 1:
            raise DegreeMismatchError(f"top coefficient needs degree {m - 1}, got {self.degree}")
        value = self.get(tuple(range(m - 1)))
        last = point[m - 1]
        if isinstance(value, int | Fraction) and isinstance(last, int | Fraction):
            value = Fraction(value) / last
        else:
            value = value / last
        return value if m % 2 == 0 else -value

    def permute(self, perm: Sequence[int]) -> FormValue:
        """Relabel variable i as perm[i]."""
        comps = {}
        for s, v in self.components.items():
            key, sign = _sorted_with_sign([perm[x] for x in s])
            comps[key] = v if sign > 0 else -v
        return FormValue(self.nvars, self.degree, comps)

    def pullback(self, jacobian: Sequence[Sequence[Scalar]], nvars: int) -> FormValue:
        """Pull back along a map with Jacobian J[i][j] = d x_i / d y_j at the point."""
        comps: dict[Subset, Any] = {}
        for target in combinations(range(nvars), self.degree):
            total: Any = 0
            for s, v in self.components.items():
                minor = [[jacobian[i][j] for j in target] for i in s]
                d = mat_det(minor)
                if d:
                    total = total + v * d
            if _live(total):
                comps[target] = total
        return FormValue(nvars, self.degree, comps)

    def embed(self, index_map: Sequence[int], nvars: int) -> FormValue:
        comps = {}
        for s, v in self.components.items():
            key, sign = _sorted_with_sign([index_map[x] for x in s])
            comps[key] = v if sign > 0 else -v
        return FormValue(nvars, self.degree, comps)


def omega_value(point: Sequence[Scalar]) -> FormValue:
    n = len(point)
    comps = {}
    for i in range(n):
        key = tuple(j for j in range(n) if j != i)
        comps[key] = point[i] if (i + 1) % 2 == 0 else -point[i]
    return FormValue(n, n - 1, comps)


# -- trace dynamic programs -------------------------------------------------


class _MatrixAlgebra(Protocol):
    def mul(self, a: Any, b: Any) -> Any: ...
    def add(self, a: Any, b: Any) -> Any: ...
    def neg(self, a: Any) -> Any: ...
    def trace(self, a: Any) -> Any: ...


class _RationalMatrices:
    @staticmethod
    def mul(a, b):
        return mat_mul(a, b)

    @staticmethod
    def add(a, b):
        return [[x + y for x, y in zip(ra, rb, strict=True)] for ra, rb in zip(a, b, strict=True)]

    @staticmethod
    def neg(a):
        return [[-x for x in row] for row in a]

    @staticmethod
    def trace(a):
        return sum((a[i][i] for i in range(len(a))), Fraction(0))


class _PolyMatrices:
    @staticmethod
    def mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
        return a @ b

    @staticmethod
    def add(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
        return a + b

    @staticmethod
    def neg(a: PolyMatrix) -> PolyMatrix:
        return a.scale(-1)

    @staticmethod
    def trace(a: PolyMatrix) -> MultiPoly:
        total = MultiPoly.zero(a.nvars)
        for i in range(a.rows):
            total = total + a[i, i]
        return total


def _mask_subset(keys: Sequence[int], mask: int) -> Subset:
    return tuple(k for i, k in enumerate(keys) if mask >> i & 1)


def matrix_trace_power(
    factors: Mapping[int, Any], n: int, algebra: _MatrixAlgebra
) -> dict[Subset, Any]:
    """Components of tr(mu^n) for mu = sum_v factors[v] dx_v.

    For odd n every cyclic class of orderings is summed once, starting at its
    smallest index, and weighted by n.
    """
    keys = sorted(factors)
    mats = [factors[k] for k in keys]
    out: dict[Subset, Any] = {}
    if n <= 0:
        raise ValueError("trace power needs n >= 1")
    odd = n % 2 == 1
    starts = range(len(keys))
    layers: list[dict[int, Any]] = []
    if odd:
        for si in starts:
            layers.append({1 << si: mats[si]})
    else:
        layers.append({1 << si: mats[si] for si in starts})
    for layer in layers:
        lowest = (layer and min(layer).bit_length() - 1) if odd else -1
        for _ in range(n - 1):
            nxt: dict[int, Any] = {}
            for mask, value in layer.items():
                for vi in range(lowest + 1, len(keys)):
                    bit = 1 << vi
                    if mask & bit:
                        continue
                    prod = algebra.mul(value, mats[vi])
                    if (mask >> (vi + 1)).bit_count() % 2:
                        prod = algebra.neg(prod)
                    new = mask | bit
                    nxt[new] = algebra.add(nxt[new], prod) if new in nxt else prod
            layer = nxt
        for mask, value in layer.items():
            t = algebra.trace(value)
            if _live(t):
                key = _mask_subset(keys, mask)
                out[key] = out[key] + t if key in out else t
    if odd and n > 1:
        out = {s: v * n for s, v in out.items()}
    return out


def cyclic_trace(
    entry: Callable[[int, int], Any], keys: Sequence[int], n: int
) -> dict[Subset, Any]:
    """Components of tr(eta^n) for eta_ij = entry(i, j) dx_j and odd n.

    Values may be ints, Fractions, polynomials or numpy arrays.
    """
    if n % 2 == 0:
        raise ValueError("cyclic_trace handles odd powers only")
    keys = sorted(keys)
    out: dict[Subset, Any] = {}
    if n == 1:
        for k in keys:
            value = entry(k, k)
            if _live(value):
                out[(k,)] = value
        return out
    m = len(keys)
    for si in range(m):
        s = keys[si]
        layer: dict[tuple[int, int], Any] = {(1 << si, si): 1}
        for step in range(n - 1):
            nxt: dict[tuple[int, int], Any] = {}
            for (mask, last), value in layer.items():
                for vi in range(si + 1, m):
                    bit = 1 << vi
                    if mask & bit:
                        continue
                    factor = entry(keys[last], keys[vi])
                    if not _live(factor):
                        continue
                    prod = value * factor
                    if (mask >> (vi + 1)).bit_count() % 2:
                        prod = -prod
                    state = (mask | bit, vi)
                    nxt[state] = nxt[state] + prod if state in nxt else prod
            layer = nxt
            if not layer:
                break
        else:
            for (mask, last), value in layer.items():
                closing = entry(keys[last], s)
                if not _live(closing):
                    continue
                key = _mask_subset(keys, mask)
                term = value * closing
                out[key] = out[key] + term if key in out else term
    return {key: v * n for key, v in out.items() if _live(v)}


# -- invariant traces of matrices -------------------------------------------


def maurer_cartan_trace(matrix: PolyMatrix, n: int) -> DiffForm:
    """beta^n_X = tr((X^{-1} dX)^n), reduced to the minimal power of det X.

    Raises:
        SingularMatrixError: If det X is the zero polynomial.
    """
    if not matrix.is_square():
        raise ValueError("invariant traces need a square matrix")
    determinant = matrix.det()
    if not determinant:
        raise SingularMatrixError("matrix is singular as a polynomial matrix")
    adjugate = matrix.adjugate()
    factors = {}
    for v in range(matrix.nvars):
        derivative = matrix.derivative(v)
        if any(e for row in derivative.entries for e in row):
            factors[v] = adjugate @ derivative
    if n > matrix.nvars or not factors:
        return DiffForm.zero(matrix.nvars, n, determinant)
    comps = matrix_trace_power(factors, n, _PolyMatrices())
    return DiffForm(matrix.nvars, n, comps, determinant, n).reduce()


def beta_at(
    value: Sequence[Sequence[Scalar]],
    derivatives: Mapping[int, Sequence[Sequence[Scalar]]],
    n: int,
    nvars: int,
) -> FormValue:
    """beta^n at a point from X(p) and the nonzero partial derivatives of X at p.

    Raises:
        PoleError: If X(p) is singular.
    """
    try:
        inverse = mat_inverse(value)
    except SingularMatrixError as exc:
        raise PoleError("matrix is singular at the point") from exc
    factors = {v: mat_mul(inverse, d) for v, d in derivatives.items()}
    if n > len(factors):
        return FormValue(nvars, n)
    return FormValue(nvars, n, matrix_trace_power(factors, n, _RationalMatrices()))


def beta_of_matrix_at(matrix: PolyMatrix, n: int, point: Sequence[Scalar]) -> FormValue:
    derivatives = {}
    for v in range(matrix.nvars):
        d = matrix.derivative(v)
        if any(e for row in d.entries for e in row):
            derivatives[v] = d.eval_at(point)
    return beta_at(matrix.eval_at(point), derivatives, n, matrix.nvars)


def generic_matrix(size: int) -> PolyMatrix:
    """Generic square matrix: diagonal a_1..a_r first, then the off-diagonal entries row by row."""
    nvars = size * size
    entries: list[list[MultiPoly]] = [[MultiPoly.zero(nvars)] * size for _ in range(size)]
    for i in range(size):
        entries[i][i] = MultiPoly.variable(nvars, i)
    index = size
    for i in range(size):
        for j in range(size):
            if i != j:
                entries[i][j] = MultiPoly.variable(nvars, index)
                index += 1
    return PolyMatrix(entries, nvars)


def generic_symmetric_matrix(size: int) -> PolyMatrix:
    """Generic symmetric matrix: diagonal first, then the upper triangle row by row."""
    nvars = size * (size + 1) // 2
    entries: list[list[MultiPoly]] = [[MultiPoly.zero(nvars)] * size for _ in range(size)]
    for i in range(size):
        entries[i][i] = MultiPoly.variable(nvars, i)
    index = size
    for i in range(size):
        for j in range(i + 1, size):
            entries[i][j] = entries[j][i] = MultiPoly.variable(nvars, index)
            index += 1
    return PolyMatrix(entries, nvars)


# -- canonical forms of graphs ----------------------------------------------


def _split(graph: Graph) -> list[tuple[Graph, list[int]]]:
    """Connected pieces with edges, each with the original indices of its edges."""
    pieces = []
    for vertices in components(graph):
        members = set(vertices)
        edges = [e for e, (t, _) in enumerate(graph.edges) if t in members]
        if edges:
            pieces.append((edge_subgraph(graph, edges), edges))
    return pieces


def _omega_connected(graph: Graph, k: int, route: str) -> DiffForm:
    n = 4 * k + 1
    e = graph.edge_count
    psi = graph_polynomial(graph)
    if graph.loop_number == 0 or n > e:
        return DiffForm.zero(e, n, psi)
    if route == "auto":
        route = "lambda" if graph.loop_number <= graph.vertex_count - 1 else "eta"
    if route == "lambda":
        return maurer_cartan_trace(laplacian(graph).lambda_matrix, n)
    if route == "eta":
        p_matrix = dodgson_matrix(graph)
        comps = cyclic_trace(lambda i, j: p_matrix[i, j], range(e), n)
        return DiffForm(e, n, comps, psi, n).reduce()
    raise UsageError(f"symbolic route must be 'lambda', 'eta' or 'auto', got {route!r}")


def omega(graph: Graph, k: int, route: str = "auto") -> DiffForm:
    """omega^(4k+1) of a graph; disconnected graphs give the sum over components."""
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    pieces = _split(graph)
    if len(pieces) == 1 and pieces[0][0].vertex_count == graph.vertex_count:
        return _omega_connected(graph, k, route)
    e = graph.edge_count
    psi = MultiPoly.one(e)

    for piece, edges in pieces:
        moved = graph_polynomial(piece).remap(edges, e)
        psi = psi * moved
    total = DiffForm.zero(e, 4 * k + 1, psi)
    for piece, edges in pieces:
        form = _omega_connected(piece, k, route)
        if not form.is_zero():
            total = total + form.embed(edges, e, psi)
    return total


def canonical_form(graph: Graph, spec: CanonicalFormSpec, route: str = "auto") -> DiffForm:
    """Wedge of omega^(4k+1) over the spec, in the edge variables of the graph."""
    e = graph.edge_count
    result = DiffForm.constant(e)
    for k in spec:
        if result.is_zero():
            break
        result = result.wedge(omega(graph, k, route))
    if result.is_zero():
        return DiffForm.zero(e, spec.degree)
    return result


def canonical_form_via_eta(graph: Graph, k: int) -> DiffForm:
    return omega(graph, k, route="eta")


# -- canonical forms at points ----------------------------------------------


def _omega_connected_at(
    graph: Graph, n: int, point: Sequence[Scalar], route: str, keys: Sequence[int]
) -> dict[Subset, Any]:
    e = graph.edge_count
    if graph.loop_number == 0 or n > len(keys):
        return {}
    if route == "eta" and not all(isinstance(x, int) or Fraction(x).denominator == 1 for x in point):
        route = "dodgson"
    if route == "eta":
        try:
            p_matrix, psi = dodgson_matrix_at(graph, [int(x) for x in point])
        except SingularMatrixError as exc:
            raise PoleError("graph polynomial vanishes at the point") from exc
        comps = cyclic_trace(lambda i, j: p_matrix[i][j], keys, n)
        denominator = Fraction(psi) ** n
        return {s: Fraction(v) / denominator for s, v in comps.items()}
    if route == "dodgson":
        try:
            inverse = mat_inverse(graph_matrix(graph).eval_at(point))
        except SingularMatrixError as exc:
            raise PoleError("graph matrix is singular at the point") from exc
        return cyclic_trace(lambda i, j: inverse[i][j], keys, n)
    if route == "lambda":
        bundle = laplacian(graph)
        try:
            inverse = mat_inverse(bundle.lambda_matrix.eval_at(point))
        except SingularMatrixError as exc:
            raise PoleError("Laplacian is singular at the point") from exc
        factors = {}
        for v in keys:
            row = bundle.basis[v]
            if any(row):
                u = [sum(inverse[i][j] * row[j] for j in range(len(row))) for i in range(len(row))]
                factors[v] = [[ui * c for c in row] for ui in u]
        return matrix_trace_power(factors, n, _RationalMatrices()) if len(factors) >= n else {}
    if route == "dual":
        eps = reduced_incidence(graph)
        if not eps:
            return {}
        size = len(eps)
        weights = [Fraction(1) / Fraction(x) for x in point]
        lap = [
            [sum(eps[a][f] * eps[b][f] * weights[f] for f in range(e)) for b in range(size)]
            for a in range(size)
        ]
        try:
            inverse = mat_inverse(lap)
        except SingularMatrixError as exc:
            raise PoleError("dual Laplacian is singular at the point") from exc
        factors = {}
        for v in keys:
            col = [eps[a][v] for a in range(size)]
            if any(col):
                scale = -weights[v] ** 2
                u = [scale * sum(inverse[i][j] * col[j] for j in range(size)) for i in range(size)]
                factors[v] = [[ui * c for c in col] for ui in u]
        return matrix_trace_power(factors, n, _RationalMatrices()) if len(factors) >= n else {}
    if route == "graph_matrix":
        try:
            inverse = mat_inverse(graph_matrix(graph).eval_at(point))
        except SingularMatrixError as exc:
            raise PoleError("graph matrix is singular at the point") from exc
        size = len(inverse)
        factors = {}
        for v in keys:
            factors[v] = [[inverse[i][v] if j == v else 0 for j in range(size)] for i in range(size)]
        return matrix_trace_power(factors, n, _RationalMatrices())
    raise UsageError(f"unknown route {route!r}; expected one of {', '.join(ROUTES)}")


def omega_at(
    graph: Graph,
    k: int,
    point: Sequence[Scalar],
    route: str = "eta",
    edges: Iterable[int] | None = None,
) -> FormValue:
    """Exact components of omega^(4k+1) at a point, optionally only on a subset of edges."""
    n = 4 * k + 1
    e = graph.edge_count
    if len(point) != e:
        raise UsageError(f"point has {len(point)} coordinates, graph has {e} edges")
    allowed = set(range(e) if edges is None else edges)
    total = FormValue(e, n)
    for piece, piece_edges in _split(graph):
        local = [i for i, f in enumerate(piece_edges) if f in allowed]
        sub_point = [point[f] for f in piece_edges]
        comps = _omega_connected_at(piece, n, sub_point, route, local)
        total = total + FormValue(piece.edge_count, n, comps).embed(piece_edges, e)
    return total


def canonical_form_at(
    graph: Graph,
    spec: CanonicalFormSpec,
    point: Sequence[Scalar],
    route: str = "eta",
    edges: Iterable[int] | None = None,
) -> FormValue:
    e = graph.edge_count
    allowed = list(range(e) if edges is None else edges)
    result = FormValue(e, 0, {(): Fraction(1)})
    for k in spec:
        result = result.wedge(omega_at(graph, k, point, route, allowed), within=allowed)
        if result.is_zero():
            return FormValue(e, spec.degree)
    return result


def top_coefficient_at(
    graph: Graph, spec: CanonicalFormSpec, point: Sequence[Scalar], route: str = "eta"
) -> Fraction:
    """f(point) for omega_spec = f * Omega on a graph with degree(spec) + 1 edges.

    Raises:
        DegreeMismatchError: If the edge count does not match.
    """
    e = graph.edge_count
    if spec.degree != e - 1:
        raise DegreeMismatchError(
            f"{spec} has degree {spec.degree} but {graph.name()} has {e} edges"
        )
    value = canonical_form_at(graph, spec, point, route, edges=range(e - 1))
    return Fraction(value.top_coefficient(point))


def eval_form_at_point(form: DiffForm, point: Sequence[Scalar]) -> FormValue:
    return form.evaluate(point)


def beta5_dihedral_at(graph: Graph, point: Sequence[Scalar]) -> FormValue:
    """omega^5 as 10 times a sum over dihedral orderings of 5-subsets.

    Uses the edge block of the inverse graph matrix for Psi^{ij} / Psi.
    """
    e = graph.edge_count
    try:
        inverse = mat_inverse(graph_matrix(graph).eval_at(point))
    except SingularMatrixError as exc:
        raise PoleError("graph matrix is singular at the point") from exc
    comps: dict[Subset, Any] = {}
    for subset in combinations(range(e), 5):
        first, rest = subset[0], subset[1:]
        total = Fraction(0)
        for middle in _orderings(rest):
            if middle[0] > middle[-1]:
                continue
            cyclic = (first, *middle)
            product = Fraction(1)
            for a, b in zip(cyclic, cyclic[1:] + cyclic[:1], strict=True):
                product *= inverse[a][b]
                if not product:
                    break
            if product:
                _, sign = _sorted_with_sign(cyclic)
                total += sign * product
        if total:
            comps[subset] = 10 * total
    return FormValue(e, 5, comps)


def _orderings(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if len(items) <= 1:
        yield tuple(items)
        return
    for i, x in enumerate(items):
        for tail in _orderings(items[:i] + items[i + 1 :]):
            yield (x, *tail)
