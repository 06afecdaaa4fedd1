"""Exact normal-ordered bosonic operator algebra, graded by deformation order.

Operators are finite sums of normal-ordered monomials a^dag^m a^n.  Every
coefficient is a pair of complex rationals (order g^0 and order g^1 in the
dimensionless deformation strength g); products discard g^2 and higher, so the
algebra is the quotient ring over C(rational)[g]/(g^2).  All arithmetic is
exact: the point of this module is that nested-commutator coefficient tables
like 121/3 come out as equalities, not float approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping

#: (dagger_power, annihilation_power); (0, 0) is the identity.
Monomial = tuple[int, int]

IDENTITY: Monomial = (0, 0)
A: Monomial = (0, 1)
A_DAG: Monomial = (1, 0)
A3: Monomial = (0, 3)
A_DAG3: Monomial = (3, 0)
A_DAG_A2: Monomial = (1, 2)
A_DAG2_A: Monomial = (2, 1)

#: The six monomials carrying the first-order part of the evolved annihilation
#: operator, in reporting order.
EVOLVED_MONOMIALS: tuple[Monomial, ...] = (A, A_DAG, A3, A_DAG3, A_DAG_A2, A_DAG2_A)

MONOMIAL_LABELS: dict[Monomial, str] = {
    A: "a",
    A_DAG: "adag",
    A3: "a^3",
    A_DAG3: "adag^3",
    A_DAG_A2: "adag.a^2",
    A_DAG2_A: "adag^2.a",
}


@dataclass(frozen=True)
class ComplexRational:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def coerce(value) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, (int, Fraction)):
            return ComplexRational(Fraction(value))
        raise TypeError(f"cannot coerce {value!r} to ComplexRational")

    def __add__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __mul__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}{'+' if self.im >= 0 else ''}{self.im}i)"


CR_ZERO = ComplexRational()
CR_ONE = ComplexRational(Fraction(1))
CR_I = ComplexRational(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class ExactCoefficient:
    """Coefficient split by deformation order: value = order0 + order1 * g."""

    order0: ComplexRational = CR_ZERO
    order1: ComplexRational = CR_ZERO

    @staticmethod
    def coerce(value) -> "ExactCoefficient":
        if isinstance(value, ExactCoefficient):
            return value
        return ExactCoefficient(ComplexRational.coerce(value))

    def __add__(self, other):
        other = ExactCoefficient.coerce(other)
        return ExactCoefficient(self.order0 + other.order0, self.order1 + other.order1)

    def __sub__(self, other):
        other = ExactCoefficient.coerce(other)
        return ExactCoefficient(self.order0 - other.order0, self.order1 - other.order1)

    def __neg__(self):
        return ExactCoefficient(-self.order0, -self.order1)

    def __mul__(self, other):
        # (p0 + p1 g)(q0 + q1 g) with the g^2 term discarded
        other = ExactCoefficient.coerce(other)
        return ExactCoefficient(
            self.order0 * other.order0,
            self.order0 * other.order1 + self.order1 * other.order0,
        )

    __rmul__ = __mul__

    def times_g(self) -> "ExactCoefficient":
        """Multiply by g, truncating: order1 -> order2 is dropped."""
        return ExactCoefficient(CR_ZERO, self.order0)

    def conjugate(self) -> "ExactCoefficient":
        return ExactCoefficient(self.order0.conjugate(), self.order1.conjugate())

    def is_zero(self) -> bool:
        return self.order0.is_zero() and self.order1.is_zero()


def monomial_product(left: Monomial, right: Monomial) -> dict[Monomial, int]:
    """Integer expansion of (a^dag^m1 a^n1)(a^dag^m2 a^n2) in normal order.

    Repeated use of [a, a^dag] = 1 gives
        a^n a^dag^m = sum_k C(n,k) C(m,k) k! a^dag^(m-k) a^(n-k),
    so the product is a sum over k of integer multiples of single monomials.
    """
    m1, n1 = left
    m2, n2 = right
    out: dict[Monomial, int] = {}
    for k in range(min(n1, m2) + 1):
        coeff = math.comb(n1, k) * math.comb(m2, k) * math.factorial(k)
        key = (m1 + m2 - k, n1 + n2 - k)
        out[key] = out.get(key, 0) + coeff
    return out


class OperatorPolynomial:
    """Finite sum of normal-ordered monomials with exact graded coefficients.

    Canonical form: no stored zero coefficients, so dict equality is
    polynomial equality.  Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, ExactCoefficient] | None = None):
        self.terms: dict[Monomial, ExactCoefficient] = {
            mono: coeff for mono, coeff in (terms or {}).items() if not coeff.is_zero()
        }

    @classmethod
    def monomial(cls, mono: Monomial, coeff=1, order: int = 0) -> "OperatorPolynomial":
        cr = ComplexRational.coerce(coeff)
        ec = ExactCoefficient(cr) if order == 0 else ExactCoefficient(CR_ZERO, cr)
        return cls({mono: ec})

    @classmethod
    def zero(cls) -> "OperatorPolynomial":
        return cls()

    def coefficient(self, mono: Monomial) -> ExactCoefficient:
        return self.terms.get(mono, ExactCoefficient())

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, ExactCoefficient()) + coeff
        return OperatorPolynomial(terms)

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + (-other)

    def __neg__(self) -> "OperatorPolynomial":
        return OperatorPolynomial({m: -c for m, c in self.terms.items()})

    def __mul__(self, scalar) -> "OperatorPolynomial":
        coeff = scalar if isinstance(scalar, ExactCoefficient) \
            else ExactCoefficient.coerce(scalar)
        return OperatorPolynomial({m: c * coeff for m, c in self.terms.items()})

    __rmul__ = __mul__

    def times_g(self) -> "OperatorPolynomial":
        return OperatorPolynomial({m: c.times_g() for m, c in self.terms.items()})

    def __matmul__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        """Operator product, normal ordered, g-truncated."""
        terms: dict[Monomial, ExactCoefficient] = {}
        for mono1, coeff1 in self.terms.items():
            for mono2, coeff2 in other.terms.items():
                coeff = coeff1 * coeff2
                if coeff.is_zero():
                    continue
                for mono, factor in monomial_product(mono1, mono2).items():
                    contrib = coeff * factor
                    prev = terms.get(mono)
                    terms[mono] = contrib if prev is None else prev + contrib
        return OperatorPolynomial(terms)

    def adjoint(self) -> "OperatorPolynomial":
        return OperatorPolynomial(
            {(n, m): c.conjugate() for (m, n), c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "OperatorPolynomial(0)"
        bits = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            bits.append(f"{MONOMIAL_LABELS.get(mono, mono)}: "
                        f"{c.order0!r} + g*{c.order1!r}")
        return "OperatorPolynomial({" + ", ".join(bits) + "})"


def normal_order(left: Monomial, right: Monomial) -> OperatorPolynomial:
    """Normal-ordered expansion of the product of two monomials."""
    return OperatorPolynomial({
        mono: ExactCoefficient(ComplexRational(Fraction(c)))
        for mono, c in monomial_product(left, right).items()
    })


def commutator(p: OperatorPolynomial, q: OperatorPolynomial) -> OperatorPolynomial:
    """[P, Q] = PQ - QP, normal ordered, g-truncated."""
    return (p @ q) - (q @ p)


def hamiltonian_polynomial() -> OperatorPolynomial:
    """Deformed oscillator Hamiltonian divided by hbar*omega.

    H/(hbar omega) = a^dag a + 1/2 + (g/12)(a - a^dag)^4 with g = hbar m omega
    beta, so every nested-commutator coefficient below is a dimensionless
    rational.
    """
    q = OperatorPolynomial.monomial(A) - OperatorPolynomial.monomial(A_DAG)
    q2 = q @ q
    quartic = (q2 @ q2).times_g() * ComplexRational(Fraction(1, 12))
    number = OperatorPolynomial.monomial((1, 1))
    half = OperatorPolynomial.monomial(IDENTITY, Fraction(1, 2))
    return number + half + quartic


@dataclass(frozen=True)
class BchTerm:
    """k-fold nested commutator [H,[H,...,[H, B]...]].

    The scalar factor (i tau)^k / k! multiplying the body is carried
    implicitly by the index k; the Taylor matcher reinstates it.
    """

    index: int
    body: OperatorPolynomial


def bch_term(k: int, hamiltonian: OperatorPolynomial,
             operator: OperatorPolynomial) -> BchTerm:
    """Single term of the similarity-transform expansion e^{xA} B e^{-xA}."""
    if k < 0:
        raise ValueError(f"nesting depth must be >= 0, got {k}")
    body = operator
    for _ in range(k):
        body = commutator(hamiltonian, body)
    return BchTerm(k, body)


def bch_bodies(k_max: int, hamiltonian: OperatorPolynomial,
               operator: OperatorPolynomial) -> Iterator[OperatorPolynomial]:
    """Yield nested-commutator bodies for k = 0..k_max, computed incrementally."""
    body = operator
    yield body
    for _ in range(k_max):
        body = commutator(hamiltonian, body)
        yield body


@dataclass(frozen=True)
class TaylorSeries:
    """Coefficients c_k of a series sum_k c_k (i tau)^k / k!."""

    coefficients: tuple[ComplexRational, ...]

    def __len__(self):
        return len(self.coefficients)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, tau: float) -> complex:
        """Numeric partial sum at real tau."""
        total = 0.0 + 0.0j
        power = 1.0 + 0.0j
        fact = 1.0
        for k, c in enumerate(self.coefficients):
            if k > 0:
                power *= 1j * tau
                fact *= k
            total += complex(c) * power / fact
        return total


def collect_monomial_series(mono: Monomial, k_max: int,
                            hamiltonian: OperatorPolynomial | None = None) -> TaylorSeries:
    """Order-g coefficients of ``mono`` across nested-commutator depths 0..k_max."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    h = hamiltonian if hamiltonian is not None else hamiltonian_polynomial()
    a = OperatorPolynomial.monomial(A)
    coeffs = tuple(body.coefficient(mono).order1 for body in bch_bodies(k_max, h, a))
    return TaylorSeries(coeffs)


_FORM_IDS = ("base", "drift", "sine", "a3", "adag3")


def closed_form_taylor(form_id: str, k_max: int) -> TaylorSeries:
    """Exact Taylor coefficients (basis (i tau)^k / k!) of the five closed forms
    the collected coefficient series resum to:

    base   e^{-i tau}                     c_k = (-1)^k
    drift  -i tau e^{-i tau}              c_k = k (-1)^k
    sine   i sin tau                      c_k = 1 (k odd), 0 (k even)
    a3     (e^{-i tau} - e^{-3 i tau})/6  c_k = -(-1)^k (3^k - 1)/6
    adag3  (e^{-i tau} - e^{3 i tau})/12  c_k = -(3^k - (-1)^k)/12
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    rules: dict[str, Callable[[int], Fraction]] = {
        "base": lambda k: Fraction((-1) ** k),
        "drift": lambda k: Fraction(k * (-1) ** k),
        "sine": lambda k: Fraction(k % 2),
        "a3": lambda k: Fraction(-((-1) ** k) * (3 ** k - 1), 6),
        "adag3": lambda k: Fraction(-(3 ** k - (-1) ** k), 12),
    }
    if form_id not in rules:
        raise ValueError(f"unknown form {form_id!r}; expected one of {_FORM_IDS}")
    rule = rules[form_id]
    return TaylorSeries(tuple(ComplexRational(rule(k)) for k in range(k_max + 1)))


def closed_form_value(form_id: str, tau: float) -> complex:
    """Numeric value of a closed form at real tau."""
    e = lambda x: complex(math.cos(x), math.sin(x))
    forms: dict[str, complex] = {
        "base": e(-tau),
        "drift": -1j * tau * e(-tau),
        "sine": 1j * math.sin(tau),
        "a3": (e(-tau) - e(-3 * tau)) / 6.0,
        "adag3": (e(-tau) - e(3 * tau)) / 12.0,
    }
    if form_id not in forms:
        raise ValueError(f"unknown form {form_id!r}; expected one of {_FORM_IDS}")
    return forms[form_id]


#: Closed form resumming each evolved monomial's order-g coefficient series.
MONOMIAL_FORMS: dict[Monomial, str] = {
    A: "drift",
    A_DAG: "sine",
    A3: "a3",
    A_DAG3: "adag3",
    A_DAG_A2: "drift",
    A_DAG2_A: "sine",
}


@dataclass(frozen=True)
class MonomialVerification:
    monomial: Monomial
    label: str
    form_id: str
    verified_through: int
    first_mismatch: int | None

    @property
    def passed(self) -> bool:
        return self.first_mismatch is None


@dataclass(frozen=True)
class BchVerification:
    k_max: int
    rows: tuple[MonomialVerification, ...]

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.rows)


def verify_bch_collection(k_max: int) -> BchVerification:
    """Check, exactly, that each evolved monomial's collected order-g series
    matches its closed-form Taylor coefficients through depth k_max.

    A mismatch is reported per monomial (first offending depth), not raised:
    it signals a transcription error in one of the two routes.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    h = hamiltonian_polynomial()
    a = OperatorPolynomial.monomial(A)
    bodies = list(bch_bodies(k_max, h, a))
    rows = []
    for mono in EVOLVED_MONOMIALS:
        form_id = MONOMIAL_FORMS[mono]
        expected = closed_form_taylor(form_id, k_max).coefficients
        first_mismatch = None
        for k, body in enumerate(bodies):
            if body.coefficient(mono).order1 != expected[k]:
                first_mismatch = k
                break
        verified = k_max if first_mismatch is None else first_mismatch - 1
        rows.append(MonomialVerification(
            monomial=mono, label=MONOMIAL_LABELS[mono], form_id=form_id,
            verified_through=verified, first_mismatch=first_mismatch))
    return BchVerification(k_max=k_max, rows=tuple(rows))
