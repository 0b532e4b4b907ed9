"""Exact arithmetic: p-adic scalars at finite precision and prime-power cyclotomic sums.

Rationals are plain :class:`fractions.Fraction` throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicScalar:
    """The value ``p**valuation * unit`` with ``unit`` known modulo ``p**precision``.

    ``valuation is None`` marks zero. For zero, ``precision`` is the absolute
    precision: the value is only known to be divisible by ``p**precision``.
    """

    prime: int
    precision: int
    valuation: int | None
    unit: int

    def __post_init__(self):
        if self.prime < 2:
            raise InputError("prime must be >= 2")
        if self.valuation is None:
            if self.unit != 0:
                raise InputError("zero marker must have unit 0")
            return
        if self.precision < 1:
            raise InputError("relative precision must be positive")
        mod = self.prime**self.precision
        if self.unit % self.prime == 0 or not 0 < self.unit < mod:
            raise InputError(f"unit {self.unit} not a reduced unit mod {self.prime}^{self.precision}")

    @classmethod
    def zero(cls, p: int, abs_precision: int) -> PadicScalar:
        return cls(p, abs_precision, None, 0)

    @classmethod
    def from_int(cls, n: int, p: int, k: int) -> PadicScalar:
        """``n`` with ``k`` digits of relative precision; zero gets absolute precision ``k``."""
        if n == 0:
            return cls.zero(p, k)
        v = vp(n, p)
        return cls(p, k, v, (n // p**v) % p**k)

    @classmethod
    def from_fraction(cls, q, p: int, k: int) -> PadicScalar:
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, k)
        num, den = q.numerator, q.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        mod = p**k
        return cls(p, k, v, num * pow(den, -1, mod) % mod)

    @classmethod
    def power_of_p(cls, p: int, e: int, k: int) -> PadicScalar:
        return cls(p, k, e, 1)

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def abs_precision(self) -> int:
        """Exponent a such that the value is known modulo p**a."""
        if self.valuation is None:
            return self.precision
        return self.valuation + self.precision

    def to_fraction(self) -> Fraction:
        """The canonical representative ``p**v * unit`` (0 for the zero marker)."""
        if self.valuation is None:
            return Fraction(0)
        return Fraction(self.prime) ** self.valuation * self.unit

    def _check(self, other):
        if not isinstance(other, PadicScalar):
            other = PadicScalar.from_fraction(other, self.prime, self.precision)
        if other.prime != self.prime:
            raise InputError("mixed primes")
        return other

    def __neg__(self):
        if self.is_zero:
            return self
        mod = self.prime**self.precision
        return PadicScalar(self.prime, self.precision, self.valuation, (-self.unit) % mod)

    def __add__(self, other):
        other = self._check(other)
        p = self.prime
        a = min(self.abs_precision, other.abs_precision)
        terms = [x for x in (self, other) if not x.is_zero]
        if not terms:
            return PadicScalar.zero(p, a)
        v = min(x.valuation for x in terms)
        if v >= a:
            return PadicScalar.zero(p, a)
        s = sum(x.unit * p ** (x.valuation - v) for x in terms)
        s %= p ** (a - v)
        if s == 0:
            # cancellation below the known digits: an approximate zero
            return PadicScalar.zero(p, a)
        w = vp(s, p)
        k = a - v - w
        return PadicScalar(p, k, v + w, (s // p**w) % p**k)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) + (-self)

    def __mul__(self, other):
        other = self._check(other)
        p = self.prime
        if self.is_zero or other.is_zero:
            if self.is_zero and other.is_zero:
                return PadicScalar.zero(p, self.precision + other.precision)
            z, x = (self, other) if self.is_zero else (other, self)
            return PadicScalar.zero(p, z.precision + x.valuation)
        k = min(self.precision, other.precision)
        return PadicScalar(p, k, self.valuation + other.valuation, self.unit * other.unit % p**k)

    __rmul__ = __mul__

    def inverse(self) -> PadicScalar:
        if self.is_zero:
            raise ZeroDivisionError("inverse of p-adic zero")
        mod = self.prime**self.precision
        return PadicScalar(self.prime, self.precision, -self.valuation, pow(self.unit, -1, mod))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def unit_part(self) -> PadicScalar:
        """The unit u with self = p**v * u."""
        return PadicScalar(self.prime, self.precision, 0, self.unit)

    def reduce_mod(self, e: int) -> Fraction:
        """Representative of self modulo p**e * Z_p, in [0, p**e) with p-power denominator."""
        p = self.prime
        if self.is_zero:
            return Fraction(0)
        if self.abs_precision < e:
            from .errors import InsufficientPrecision

            raise InsufficientPrecision(f"value known mod p^{self.abs_precision}, need mod p^{e}")
        if self.valuation >= e:
            return Fraction(0)
        # value = p^v * u, v < e; reduce u modulo p^(e-v)
        r = self.unit % p ** (e - self.valuation)
        return Fraction(p) ** self.valuation * r

    def __repr__(self):
        if self.is_zero:
            return f"O({self.prime}^{self.precision})"
        return f"{self.prime}^{self.valuation}*{self.unit} (+O({self.prime}^{self.abs_precision}))"


def valuation(x: PadicScalar) -> int | None:
    return x.valuation


def norm(x: PadicScalar) -> Fraction:
    """p-adic absolute value p**(-valuation); the zero marker has norm 0."""
    if x.is_zero:
        return Fraction(0)
    return Fraction(x.prime) ** (-x.valuation)


@dataclass(frozen=True)
class CycloSum:
    """sum_j coeffs[j] * zeta**j with zeta a primitive p**m-th root of unity.

    Stored in the full group-ring basis; :meth:`canonical` reduces modulo the
    cyclotomic polynomial only when asked.
    """

    prime: int
    m: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.prime**self.m:
            raise InputError("CycloSum needs exactly p**m coefficients")

    @property
    def order(self) -> int:
        return self.prime**self.m

    @classmethod
    def constant(cls, c: int, p: int, m: int) -> CycloSum:
        coeffs = [0] * p**m
        coeffs[0] = c
        return cls(p, m, tuple(coeffs))

    @classmethod
    def root(cls, j: int, p: int, m: int, c: int = 1) -> CycloSum:
        n = p**m
        coeffs = [0] * n
        coeffs[j % n] = c
        return cls(p, m, tuple(coeffs))

    @classmethod
    def from_angle(cls, q: Fraction, p: int, m: int) -> CycloSum:
        """exp(2*pi*i*q) for q in p**-m Z / Z."""
        q = Fraction(q) * p**m
        if q.denominator != 1:
            raise InputError(f"{q / p**m} is not a p^{m}-th root angle")
        return cls.root(int(q), p, m)

    def _same(self, other: CycloSum):
        if (self.prime, self.m) != (other.prime, other.m):
            raise InputError("CycloSum order mismatch")

    def __add__(self, other: CycloSum) -> CycloSum:
        self._same(other)
        return CycloSum(self.prime, self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CycloSum(self.prime, self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other: CycloSum) -> CycloSum:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycloSum(self.prime, self.m, tuple(other * a for a in self.coeffs))
        self._same(other)
        n = self.order
        out = [0] * n
        other_nz = [(j, b) for j, b in enumerate(other.coeffs) if b]
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in other_nz:
                    out[(i + j) % n] += a * b
        return CycloSum(self.prime, self.m, tuple(out))

    __rmul__ = __mul__

    def conj(self) -> CycloSum:
        n = self.order
        out = [0] * n
        for j, a in enumerate(self.coeffs):
            out[(-j) % n] += a
        return CycloSum(self.prime, self.m, tuple(out))

    def canonical(self) -> tuple:
        """Coefficients of the reduction modulo Phi_{p^m}, length phi(p^m)."""
        p, m = self.prime, self.m
        if m == 0:
            return (sum(self.coeffs),)
        block = p ** (m - 1)
        deg = (p - 1) * block
        c = list(self.coeffs)
        # x^(deg + r) = -sum_{j<p-1} x^(j*block + r)
        for e in range(len(c) - 1, deg - 1, -1):
            a = c[e]
            if a:
                c[e] = 0
                r = e - deg
                for j in range(p - 1):
                    c[j * block + r] -= a
        return tuple(c[:deg])

    def __eq__(self, other):
        if not isinstance(other, CycloSum):
            return NotImplemented
        return (self.prime, self.m) == (other.prime, other.m) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.prime, self.m, self.canonical()))


def cyclo_inner_reduce(z: CycloSum) -> Fraction | None:
    """The rational value of z, or None when z is not rational."""
    c = z.canonical()
    if any(c[1:]):
        return None
    return Fraction(c[0])


def cyclo_canonical_terms(terms: dict, p: int, m: int) -> tuple:
    """Sparse version of :meth:`CycloSum.canonical`: terms maps exponents mod p**m
    to integer coefficients; returns the sorted nonzero (exponent, coeff) pairs
    of the reduction modulo Phi_{p^m}."""
    n = p**m
    out = {}
    for e, a in terms.items():
        e %= n
        out[e] = out.get(e, 0) + a
    if m > 0:
        block = p ** (m - 1)
        deg = (p - 1) * block
        for e in [e for e in out if e >= deg]:
            a = out.pop(e)
            if a:
                r = e - deg
                for j in range(p - 1):
                    out[j * block + r] = out.get(j * block + r, 0) - a
    return tuple(sorted((e, a) for e, a in out.items() if a))
