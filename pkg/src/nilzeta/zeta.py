"""Coefficient series and exact rational-function fits."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError


@dataclass(frozen=True)
class CoeffSeries:
    prime: int | None
    coefficients: tuple
    tag: str = ""

    def __post_init__(self):
        if any(int(a) != a or a < 0 for a in self.coefficients):
            raise InputError("coefficients must be nonnegative integers")

    @property
    def m(self) -> int:
        return len(self.coefficients) - 1


def _clean(poly) -> tuple:
    poly = [Fraction(c) for c in poly]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(int(c) if c.denominator == 1 else c for c in poly)


@dataclass(frozen=True)
class RationalFunction:
    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        if not self.denominator or self.denominator[0] != 1:
            raise InputError("denominator must have constant term 1")

    @property
    def degrees(self):
        return len(self.numerator) - 1, len(self.denominator) - 1

    def to_json(self):
        def enc(c):
            return c if isinstance(c, int) else str(c)

        return {"numerator": [enc(c) for c in self.numerator], "denominator": [enc(c) for c in self.denominator]}

    def __str__(self):
        def poly(cs):
            terms = []
            for i, c in enumerate(cs):
                if c == 0:
                    continue
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                if mono and abs(c) == 1:
                    coef = "-" if c < 0 else "+"
                    terms.append(f"{coef} {mono}")
                else:
                    sign = "-" if c < 0 else "+"
                    body = f"{abs(c)}{'*' + mono if mono else ''}"
                    terms.append(f"{sign} {body}")
            s = " ".join(terms) or "0"
            if s.startswith("+ "):
                s = s[2:]
            elif s.startswith("- "):
                s = "-" + s[2:]
            return s

        return f"({poly(self.numerator)})/({poly(self.denominator)})"


@dataclass(frozen=True)
class NoFit:
    """No rational function of the allowed degrees reproduces the series."""

    max_deg: int
    observed_through: int
    residual_index: int | None
    reason: str

    def to_json(self):
        return {"fit": None, "reason": self.reason, "residual_index": self.residual_index}


def _solve_fraction(A, b):
    """A particular solution of A x = b over Q (free variables 0), or None."""
    rows = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(A, b)]
    ncols = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in rows):
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return x


def _candidate(a, dP: int, dQ: int):
    """Denominator with Q(0)=1 from the Hankel equations, and the matching numerator."""
    def coef(n):
        return a[n] if 0 <= n < len(a) else 0

    A = [[coef(n - j) for j in range(1, dQ + 1)] for n in range(dP + 1, dP + dQ + 1)]
    b = [-coef(n) for n in range(dP + 1, dP + dQ + 1)]
    if dQ:
        sol = _solve_fraction(A, b)
        if sol is None:
            return None
    else:
        sol = []
    Q = [Fraction(1)] + sol
    P = [sum(Q[j] * coef(n - j) for j in range(0, min(n, dQ) + 1)) for n in range(dP + 1)]
    return P, Q


def _first_mismatch(a, P, Q):
    for n in range(len(a)):
        lhs = sum(Q[j] * a[n - j] for j in range(0, min(n, len(Q) - 1) + 1))
        rhs = P[n] if n < len(P) else 0
        if lhs != rhs:
            return n
    return None


def degree_pairs(max_deg: int):
    """(d_P, d_Q) in the search order: total degree, then denominator degree."""
    for total in range(2 * max_deg + 1):
        for dQ in range(0, total + 1):
            dP = total - dQ
            if dP <= max_deg and dQ <= max_deg:
                yield dP, dQ


def fit_rational(s, max_deg: int):
    """Smallest-degree P/Q with Q(0)=1 reproducing every observed coefficient.

    A candidate is determined by the first d_P+d_Q+1 coefficients and must
    then match at least one further, held-out coefficient.
    """
    a = [Fraction(x) for x in (s.coefficients if isinstance(s, CoeffSeries) else s)]
    m = len(a) - 1
    if m < 0:
        raise InputError("empty series")
    residual = None
    for dP, dQ in degree_pairs(max_deg):
        if dP + dQ + 1 > m:
            continue
        cand = _candidate(a, dP, dQ)
        if cand is None:
            continue
        P, Q = cand
        bad = _first_mismatch(a, P, Q)
        if bad is None:
            return RationalFunction(_clean(P), _clean(Q))
        if residual is None:
            residual = bad
    if m < 1:
        reason = "need at least one held-out coefficient"
    elif residual is None:
        reason = f"too few coefficients to test degrees up to {max_deg}"
    else:
        reason = f"no fit with degrees <= {max_deg}"
    return NoFit(max_deg, m, residual, reason)


def expand(r: RationalFunction, m: int) -> list:
    """First m+1 Taylor coefficients of r by the recurrence Q * A = P."""
    P, Q = r.numerator, r.denominator
    out = []
    for n in range(m + 1):
        v = Fraction(P[n]) if n < len(P) else Fraction(0)
        for j in range(1, min(n, len(Q) - 1) + 1):
            v -= Q[j] * out[n - j]
        out.append(v)
    return [int(v) if v.denominator == 1 else v for v in out]


def growth_bound_check(s):
    """(K, c) with c the largest observed ratio a_{n+1}/a_n and K = max a_n / c^n;
    asserts a_n <= K c^n on the whole window."""
    a = [Fraction(x) for x in (s.coefficients if isinstance(s, CoeffSeries) else s)]
    ratios = [a[n + 1] / a[n] for n in range(len(a) - 1) if a[n] > 0]
    c = max(ratios, default=Fraction(1))
    if c == 0 and any(x > 0 for x in a[1:]):
        c = Fraction(1)
    K = max((x / c**n for n, x in enumerate(a) if x > 0), default=Fraction(0))
    for n, x in enumerate(a):
        if x > K * c**n:
            raise AssertionError(f"a_{n} = {x} exceeds K c^n = {K * c**n}")
    return K, c
