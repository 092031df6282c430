"""Exact sparse multivariate polynomials over the rationals.

A `MultiPoly` maps exponent tuples (one slot per variable x_1..x_n) to exact
coefficients. Coefficients are Python ints whenever they are integral and
`Fraction` otherwise. Term order is graded lexicographic.

`PolyMatrix` holds rectangular matrices of polynomials and computes
determinants by fraction-free (Bareiss) elimination. A few helpers for dense
matrices of rationals live here as well, since the form evaluators work on
numeric points.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping, Sequence
from fractions import Fraction
from operator import add, sub

from .errors import InvariantViolation, SingularMatrixError

Exponent = tuple[int, ...]
Scalar = int | Fraction


def _norm(c: Scalar) -> Scalar:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _grlex(exp: Exponent) -> tuple[int, Exponent]:
    return (sum(exp), exp)


def _is_scalar(value: object) -> bool:
    return isinstance(value, int | Fraction)


class MultiPoly:
    """Sparse polynomial in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar] | None = None):
        self.nvars = nvars
        self.terms: dict[Exponent, Scalar] = {}
        if terms:
            for exp, coeff in terms.items():
                exp = tuple(exp)
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} does not have {nvars} slots")
                if coeff:
                    self.terms[exp] = _norm(coeff)

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Scalar]) -> MultiPoly:
        poly = cls.__new__(cls)
        poly.nvars = nvars
        poly.terms = terms
        return poly

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> MultiPoly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: Scalar) -> MultiPoly:
        if not value:
            return cls._raw(nvars, {})
        return cls._raw(nvars, {(0,) * nvars: _norm(value)})

    @classmethod
    def one(cls, nvars: int) -> MultiPoly:
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, index: int) -> MultiPoly:
        """The variable x_{index+1} (indices are 0-based)."""
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exp = [0] * nvars
        exp[index] = 1
        return cls._raw(nvars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: Scalar = 1) -> MultiPoly:
        return cls(len(exp), {tuple(exp): coeff})

    @classmethod
    def product_of_variables(cls, nvars: int, indices: Iterable[int]) -> MultiPoly:
        exp = [0] * nvars
        for i in indices:
            exp[i] += 1
        return cls._raw(nvars, {tuple(exp): 1})

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_value(self) -> Scalar:
        return self.terms.get((0,) * self.nvars, 0)

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other: MultiPoly | Scalar) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"ring mismatch: {self.nvars} vs {other.nvars} variables")
            return other
        if _is_scalar(other):
            return MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other: MultiPoly | Scalar) -> MultiPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for exp, coeff in small.items():
            value = out.get(exp, 0) + coeff
            if value:
                out[exp] = _norm(value)
            else:
                out.pop(exp, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: MultiPoly | Scalar) -> MultiPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: MultiPoly | Scalar) -> MultiPoly:
        return (-self) + other

    def __mul__(self, other: MultiPoly | Scalar) -> MultiPoly:
        if _is_scalar(other):
            if not other:
                return MultiPoly.zero(self.nvars)
            return MultiPoly._raw(
                self.nvars, {e: _norm(c * other) for e, c in self.terms.items()}
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Exponent, Scalar] = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(map(add, e1, e2))
                out[exp] = get(exp, 0) + c1 * c2
        return MultiPoly._raw(self.nvars, {e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> MultiPoly:
        if not _is_scalar(other):
            return NotImplemented
        return self * (Fraction(1) / other)

    def __pow__(self, exponent: int) -> MultiPoly:
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.one(self.nvars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if _is_scalar(other):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- structure ----------------------------------------------------

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, index: int) -> int:
        if not self.terms:
            return -1
        return max(e[index] for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading_term(self) -> tuple[Exponent, Scalar]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex)
        return exp, self.terms[exp]

    def sorted_terms(self) -> list[tuple[Exponent, Scalar]]:
        """Terms in descending graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda item: _grlex(item[0]), reverse=True)

    def variables(self) -> set[int]:
        return {i for exp in self.terms for i, k in enumerate(exp) if k}

    def derivative(self, index: int) -> MultiPoly:
        out: dict[Exponent, Scalar] = {}
        for exp, coeff in self.terms.items():
            k = exp[index]
            if k:
                lowered = list(exp)
                lowered[index] = k - 1
                out[tuple(lowered)] = coeff * k
        return MultiPoly._raw(self.nvars, out)

    def coefficient_in(self, index: int, power: int) -> MultiPoly:
        """Coefficient of x_index^power, as a polynomial in the same ring."""
        out: dict[Exponent, Scalar] = {}
        for exp, coeff in self.terms.items():
            if exp[index] == power:
                stripped = list(exp)
                stripped[index] = 0
                out[tuple(stripped)] = coeff
        return MultiPoly._raw(self.nvars, out)

    def reverse_in(self, index: int) -> tuple[MultiPoly, int]:
        """Return (x^d p(1/x), d) for x = x_index and d = deg_x p."""
        d = self.degree_in(index)
        out: dict[Exponent, Scalar] = {}
        for exp, coeff in self.terms.items():
            flipped = list(exp)
            flipped[index] = d - exp[index]
            out[tuple(flipped)] = coeff
        return MultiPoly._raw(self.nvars, out), max(d, 0)

    # -- substitution -------------------------------------------------

    def compose(self, images: Sequence[MultiPoly | Scalar], nvars: int) -> MultiPoly:
        """Substitute images[i] for x_i, landing in a ring with `nvars` variables."""
        if len(images) != self.nvars:
            raise ValueError(f"need {self.nvars} images, got {len(images)}")
        lifted = [
            img if isinstance(img, MultiPoly) else MultiPoly.constant(nvars, img) for img in images
        ]
        powers: dict[tuple[int, int], MultiPoly] = {}

        def power(i: int, k: int) -> MultiPoly:
            key = (i, k)
            if key not in powers:
                powers[key] = lifted[i] if k == 1 else power(i, k - 1) * lifted[i]
            return powers[key]

        result = MultiPoly.zero(nvars)
        for exp, coeff in self.terms.items():
            term = MultiPoly.constant(nvars, coeff)
            for i, k in enumerate(exp):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def substitute(self, assignment: Mapping[int, MultiPoly | Scalar]) -> MultiPoly:
        """Replace selected variables by polynomials or rationals of the same ring."""
        images: list[MultiPoly | Scalar] = [
            assignment[i] if i in assignment else MultiPoly.variable(self.nvars, i)
            for i in range(self.nvars)
        ]
        if all(_is_scalar(v) for v in assignment.values()):
            return self._substitute_scalars(assignment)
        return self.compose(images, self.nvars)

    def _substitute_scalars(self, assignment: Mapping[int, Scalar]) -> MultiPoly:
        out: dict[Exponent, Scalar] = {}
        for exp, coeff in self.terms.items():
            value = coeff
            reduced = list(exp)
            for i, v in assignment.items():
                k = exp[i]
                if k:
                    value = value * v**k
                    reduced[i] = 0
            if value:
                key = tuple(reduced)
                out[key] = out.get(key, 0) + value
        return MultiPoly._raw(self.nvars, {e: _norm(c) for e, c in out.items() if c})

    def eval_rational(self, point: Sequence[Scalar]) -> Scalar:
        """Exact value at a point given one rational per variable."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, ring has {self.nvars}")
        powers: dict[tuple[int, int], Scalar] = {}
        total: Scalar = 0
        for exp, coeff in self.terms.items():
            value = coeff
            for i, k in enumerate(exp):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = point[i] ** k
                    value = value * powers[key]
            total += value
        return _norm(total)

    __call__ = eval_rational

    def eval_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for exp, coeff in self.terms.items():
            value = float(coeff)
            for i, k in enumerate(exp):
                if k:
                    value *= point[i] ** k
            total += value
        return total

    # -- ring changes -------------------------------------------------

    def remap(self, index_map: Sequence[int | None], nvars: int) -> MultiPoly:
        """Move variable i to slot index_map[i]; a None slot must not occur in any term."""
        out: dict[Exponent, Scalar] = {}
        for exp, coeff in self.terms.items():
            new = [0] * nvars
            for i, k in enumerate(exp):
                if k:
                    target = index_map[i]
                    if target is None:
                        raise ValueError(f"variable x{i + 1} occurs but is dropped")
                    new[target] += k
            key = tuple(new)
            out[key] = out.get(key, 0) + coeff
        return MultiPoly._raw(nvars, {e: _norm(c) for e, c in out.items() if c})

    def drop_variable(self, index: int) -> MultiPoly:
        mapping: list[int | None] = [i if i < index else i - 1 for i in range(self.nvars)]
        mapping[index] = None
        return self.remap(mapping, self.nvars - 1)

    def insert_variable(self, index: int) -> MultiPoly:
        mapping = [i if i < index else i + 1 for i in range(self.nvars)]
        return self.remap(mapping, self.nvars + 1)

    # -- text ---------------------------------------------------------

    def to_text(self, names: Sequence[str] | str = "x") -> str:
        """Canonical serialization, terms in descending grlex order."""
        if not self.terms:
            return "0"
        if isinstance(names, str):
            prefix = names
            names = [f"{prefix}{i + 1}" for i in range(self.nvars)]
        pieces: list[str] = []
        for exp, coeff in self.sorted_terms():
            factors = []
            for i, k in enumerate(exp):
                if k == 1:
                    factors.append(names[i])
                elif k:
                    factors.append(f"{names[i]}^{k}")
            negative = coeff < 0
            magnitude = -coeff if negative else coeff
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = f"{magnitude}*" + "*".join(factors)
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_text()})"

    def __str__(self) -> str:
        return self.to_text()


def exact_divide(num: MultiPoly, den: MultiPoly) -> MultiPoly | None:
    """Return num / den when den divides num exactly, otherwise None.

    Raises:
        ZeroDivisionError: If den is the zero polynomial.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return MultiPoly.zero(num.nvars)
    if den.is_constant():
        return num * (Fraction(1) / den.constant_value())
    lead_exp, lead_coeff = den.leading_term()
    remainder = dict(num.terms)
    quotient: dict[Exponent, Scalar] = {}
    den_terms = list(den.terms.items())
    while remainder:
        exp = max(remainder, key=_grlex)
        shift = tuple(map(sub, exp, lead_exp))
        if min(shift) < 0:
            return None
        coeff = remainder[exp]
        if isinstance(coeff, int) and isinstance(lead_coeff, int) and coeff % lead_coeff == 0:
            q = coeff // lead_coeff
        else:
            q = _norm(Fraction(coeff) / lead_coeff)
        quotient[shift] = q
        for dexp, dcoeff in den_terms:
            target = tuple(map(add, shift, dexp))
            value = remainder.get(target, 0) - q * dcoeff
            if value:
                remainder[target] = value
            else:
                remainder.pop(target, None)
    result = MultiPoly(num.nvars, quotient)
    if result * den != num:
        return None
    return result


def divide_out(num: MultiPoly, base: MultiPoly, exponent: int) -> tuple[MultiPoly, int]:
    """Cancel factors of `base` from num / base**exponent as far as possible."""
    while exponent > 0 and not base.is_constant():
        quotient = exact_divide(num, base)
        if quotient is None:
            break
        num = quotient
        exponent -= 1
    return num, exponent


class PolyMatrix:
    """Rectangular matrix with MultiPoly entries in a common ring."""

    __slots__ = ("nvars", "rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly | Scalar]], nvars: int):
        self.nvars = nvars
        self.entries: list[list[MultiPoly]] = [
            [e if isinstance(e, MultiPoly) else MultiPoly.constant(nvars, e) for e in row]
            for row in entries
        ]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(row) != self.cols for row in self.entries):
            raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, rows: int, cols: int, nvars: int) -> PolyMatrix:
        return cls([[0] * cols for _ in range(rows)], nvars)

    @classmethod
    def identity(cls, size: int, nvars: int) -> PolyMatrix:
        return cls([[1 if i == j else 0 for j in range(size)] for i in range(size)], nvars)

    @classmethod
    def from_integers(cls, rows: Sequence[Sequence[int]], nvars: int) -> PolyMatrix:
        return cls([list(row) for row in rows], nvars)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> MultiPoly:
        i, j = index
        return self.entries[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.shape, tuple(tuple(row) for row in self.entries)))

    def map(self, fn: Callable[[MultiPoly], MultiPoly | Scalar], nvars: int | None = None):
        return PolyMatrix(
            [[fn(e) for e in row] for row in self.entries],
            self.nvars if nvars is None else nvars,
        )

    def transpose(self) -> PolyMatrix:
        return PolyMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.nvars
        )

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix(
            [[a + b for a, b in zip(r1, r2, strict=True)] for r1, r2 in zip(self.entries, other.entries, strict=True)],
            self.nvars,
        )

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        return self + other.scale(-1)

    def scale(self, factor: MultiPoly | Scalar) -> PolyMatrix:
        return PolyMatrix([[e * factor for e in row] for row in self.entries], self.nvars)

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = MultiPoly.zero(self.nvars)
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, self.nvars)

    def derivative(self, index: int) -> PolyMatrix:
        return self.map(lambda e: e.derivative(index))

    def substitute(self, assignment: Mapping[int, MultiPoly | Scalar]) -> PolyMatrix:
        return self.map(lambda e: e.substitute(assignment))

    def eval_at(self, point: Sequence[Scalar]) -> list[list[Scalar]]:
        return [[e.eval_rational(point) for e in row] for row in self.entries]

    def minor(self, drop_rows: Iterable[int], drop_cols: Iterable[int]) -> PolyMatrix:
        rows = sorted(set(range(self.rows)) - set(drop_rows))
        cols = sorted(set(range(self.cols)) - set(drop_cols))
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows], self.nvars)

    def det(self) -> MultiPoly:
        return det(self)

    def adjugate(self) -> PolyMatrix:
        if not self.is_square():
            raise ValueError("adjugate of a non-square matrix")
        n = self.rows
        if n == 1:
            return PolyMatrix([[1]], self.nvars)
        adj = [[MultiPoly.zero(self.nvars)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                cofactor = det(self.minor([i], [j]))
                adj[j][i] = -cofactor if (i + j) % 2 else cofactor
        return PolyMatrix(adj, self.nvars)

    def to_text(self, names: Sequence[str] | str = "x") -> str:
        return "\n".join(
            "[" + ", ".join(e.to_text(names) for e in row) + "]" for row in self.entries
        )

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols})"


def _cofactor_det(entries: list[list[MultiPoly]], nvars: int) -> MultiPoly:
    n = len(entries)
    if n == 0:
        return MultiPoly.one(nvars)
    if n == 1:
        return entries[0][0]
    if n == 2:
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    total = MultiPoly.zero(nvars)
    for j, pivot in enumerate(entries[0]):
        if not pivot:
            continue
        sub_rows = [row[:j] + row[j + 1 :] for row in entries[1:]]
        term = pivot * _cofactor_det(sub_rows, nvars)
        total = total - term if j % 2 else total + term
    return total


def det(matrix: PolyMatrix) -> MultiPoly:
    """Exact determinant; cofactor expansion below size 4, Bareiss elimination otherwise.

    Raises:
        ValueError: If the matrix is not square.
    """
    if not matrix.is_square():
        raise ValueError(f"determinant of a non-square {matrix.rows}x{matrix.cols} matrix")
    n = matrix.rows
    if n < 4:
        return _cofactor_det(matrix.entries, matrix.nvars)
    m = [list(row) for row in matrix.entries]
    sign = 1
    previous = MultiPoly.one(matrix.nvars)
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[i], m[k] = m[k], m[i]
                    sign = -sign
                    break
            else:
                return MultiPoly.zero(matrix.nvars)
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                elt = pivot * m[i][j] - m[i][k] * m[k][j]
                if k:
                    quotient = exact_divide(elt, previous)
                    if quotient is None:
                        raise InvariantViolation("Bareiss step left a non-exact quotient")
                    elt = quotient
                m[i][j] = elt
        previous = pivot
    result = m[n - 1][n - 1]
    return -result if sign < 0 else result


# -- dense rational matrices ------------------------------------------------

RationalMatrix = list[list[Scalar]]


def mat_mul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> RationalMatrix:
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j in range(cols):
                    y = brow[j]
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def mat_transpose(a: Sequence[Sequence[Scalar]]) -> RationalMatrix:
    return [list(col) for col in zip(*a, strict=True)] if a else []


def mat_det(a: Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant by fraction-free elimination (exact for ints and Fractions)."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    previous: Scalar = 1
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[i], m[k] = m[k], m[i]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                value = pivot * m[i][j] - m[i][k] * m[k][j]
                if isinstance(value, int) and isinstance(previous, int):
                    m[i][j] = value // previous
                else:
                    m[i][j] = _norm(Fraction(value) / previous)
        previous = pivot
    return _norm(sign * m[n - 1][n - 1])


def mat_inverse(a: Sequence[Sequence[Scalar]]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over the rationals.

    Raises:
        SingularMatrixError: If the matrix is singular.
    """
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot_row is None:
            raise SingularMatrixError("matrix is singular")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        inv_pivot = 1 / pivot
        prow = [x * inv_pivot for x in aug[col]]
        aug[col] = prow
        for r in range(n):
            if r != col:
                factor = aug[r][col]
                if factor:
                    row = aug[r]
                    aug[r] = [x - factor * y for x, y in zip(row, prow, strict=True)]
    return [row[n:] for row in aug]


def mat_adjugate_int(a: Sequence[Sequence[int]]) -> tuple[list[list[int]], int]:
    """Adjugate and determinant of an integer matrix, both exact integers."""
    d = mat_det(a)
    if d == 0:
        raise SingularMatrixError("matrix is singular")
    inverse = mat_inverse(a)
    adj = []
    for row in inverse:
        out = []
        for x in row:
            value = x * d
            if value.denominator != 1:
                raise InvariantViolation("adjugate of an integer matrix is not integral")
            out.append(value.numerator)
        adj.append(out)
    return adj, int(d)
