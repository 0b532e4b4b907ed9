"""Nilpotent groups given by triangular polynomial laws on Z^R, their finite
quotients mod p^k, and subgroups of those quotients in canonical good-basis form.

A law is ``(x*y)_i = x_i + y_i + P_i(x_1..x_{i-1}, y_1..y_{i-1})`` with
integer-coefficient P_i. The coordinate series N_i = {x : x_j = 0 for j < i}
consists of normal subgroups, and x -> x_i is a homomorphism on N_i; all of
the subgroup machinery below rests on those two facts.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from importlib import resources
from itertools import product
from pathlib import Path

from .errors import ContextMismatch, InputError, InvalidPresentation

ASSOC_SAMPLES = 1000


@dataclass(frozen=True)
class MalcevPresentation:
    name: str
    rank: int
    nil_class: int
    # products[i] = ((coeff, x_exponents, y_exponents), ...), exponent tuples of length rank
    products: tuple
    relators: tuple = ()

    @classmethod
    def from_dict(cls, data: dict) -> MalcevPresentation:
        try:
            R = int(data["rank"])
            prods = data["products"]
            name = str(data.get("name", "unnamed"))
            c = int(data.get("class", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPresentation(f"malformed presentation: {exc}") from exc
        if len(prods) != R:
            raise InvalidPresentation(f"expected {R} product lists, got {len(prods)}")
        products = []
        for i, terms in enumerate(prods):
            merged = {}
            for term in terms:
                coeff, xe, ye = term
                xe = tuple(int(e) for e in xe) + (0,) * (R - len(xe))
                ye = tuple(int(e) for e in ye) + (0,) * (R - len(ye))
                if len(xe) != R or len(ye) != R or min(xe + ye) < 0:
                    raise InvalidPresentation(f"bad exponent vector in coordinate {i + 1}")
                merged[(xe, ye)] = merged.get((xe, ye), 0) + int(coeff)
            products.append(tuple((c_, xe, ye) for (xe, ye), c_ in sorted(merged.items()) if c_))
        relators = tuple(tuple(int(v) for v in r) for r in data.get("relators", []) or [])
        if any(len(r) != R for r in relators):
            raise InvalidPresentation("relator length differs from rank")
        pres = cls(name, R, c, tuple(products), relators)
        pres.validate()
        return pres

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rank": self.rank,
            "class": self.nil_class,
            "products": [[[c, list(xe), list(ye)] for c, xe, ye in terms] for terms in self.products],
            "relators": [list(r) for r in self.relators],
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def validate(self, samples: int = ASSOC_SAMPLES, seed: int = 0):
        R = self.rank
        if self.products and self.products[0]:
            raise InvalidPresentation("coordinate 1 must have an empty product list")
        for i, terms in enumerate(self.products):
            for _, xe, ye in terms:
                if any(xe[j] or ye[j] for j in range(i, R)):
                    raise InvalidPresentation(f"coordinate {i + 1} uses a variable of index >= {i + 1}")
                if not any(xe) or not any(ye):
                    raise InvalidPresentation(f"coordinate {i + 1} has a term vanishing only on one side; 0 would not be the identity")
        mul = self.integer_law()
        rng = random.Random(seed)
        for _ in range(samples):
            x, y, z = (tuple(rng.randint(-6, 6) for _ in range(R)) for _ in range(3))
            if mul(mul(x, y), z) != mul(x, mul(y, z)):
                raise InvalidPresentation(f"law is not associative at {x}, {y}, {z}")

    def _source(self, modulus: bool) -> str:
        R = self.rank
        xs = ", ".join(f"x{i}" for i in range(R)) + ","
        ys = ", ".join(f"y{i}" for i in range(R)) + ","
        out = []
        for i, terms in enumerate(self.products):
            expr = f"x{i} + y{i}"
            for c, xe, ye in terms:
                factors = [str(c)]
                for j, e in enumerate(xe):
                    if e:
                        factors.append(f"x{j}" if e == 1 else f"x{j}**{e}")
                for j, e in enumerate(ye):
                    if e:
                        factors.append(f"y{j}" if e == 1 else f"y{j}**{e}")
                expr += " + " + "*".join(factors)
            out.append(f"({expr}) % q" if modulus else f"({expr})")
        body = f"def mul(x, y):\n    {xs} = x\n    {ys} = y\n    return ({', '.join(out)},)\n"
        # inverse: solve (x*g)_i = 0 for x_i by forward substitution
        inv = [f"def inv(g):\n    {ys} = g"]
        for i, terms in enumerate(self.products):
            expr = f"-y{i}"
            for c, xe, ye in terms:
                factors = [str(-c)]
                for j, e in enumerate(xe):
                    if e:
                        factors.append(f"x{j}" if e == 1 else f"x{j}**{e}")
                for j, e in enumerate(ye):
                    if e:
                        factors.append(f"y{j}" if e == 1 else f"y{j}**{e}")
                expr += " + " + "*".join(factors)
            inv.append(f"    x{i} = ({expr}) % q" if modulus else f"    x{i} = {expr}")
        inv.append(f"    return ({', '.join(f'x{i}' for i in range(R))},)\n")
        return body + "\n".join(inv)

    def compile(self, q: int | None):
        ns = {"q": q}
        exec(self._source(q is not None), ns)  # noqa: S102 - source built from integer data only
        return ns["mul"], ns["inv"]

    def integer_law(self):
        return self.compile(None)[0]


def load_presentation(path_or_name) -> MalcevPresentation:
    """Load a presentation from a JSON file, or a shipped one by name (e.g. 'heisenberg')."""
    p = Path(str(path_or_name))
    if p.suffix == ".json" and p.exists():
        text = p.read_text()
    else:
        name = p.stem if p.suffix == ".json" else str(path_or_name)
        try:
            text = resources.files("nilzeta.presentations").joinpath(f"{name}.json").read_text()
        except FileNotFoundError as exc:
            raise InputError(f"no presentation file or shipped presentation named {path_or_name!r}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidPresentation(f"presentation is not valid JSON: {exc}") from exc
    return MalcevPresentation.from_dict(data)


def shipped_presentations() -> list:
    names = [f.name[:-5] for f in resources.files("nilzeta.presentations").iterdir() if f.name.endswith(".json")]
    return sorted(names)


def _val(a: int, p: int, cap: int) -> int:
    if a == 0:
        return cap
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


class FiniteQuotient:
    """G_k = Z^R mod p^k with the induced law, or its quotient by the normal
    closure N of the relator images.

    Elements are coordinate tuples. With relators, ``canon`` maps a tuple to the
    lexicographically least representative of its N-coset.
    """

    def __init__(self, presentation: MalcevPresentation, p: int, k: int, validate: bool = True):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise InputError(f"{p} is not prime")
        if k < 1:
            raise InputError("precision k must be >= 1")
        self.presentation = presentation
        self.p, self.k, self.q = p, k, p**k
        self.R = presentation.rank
        self.mul, self.inv = presentation.compile(self.q)
        self.identity = (0,) * self.R
        self.relator_subgroup = None
        if validate:
            self._validate_kernel()
        if presentation.relators:
            gens = [tuple(v % self.q for v in r) for r in presentation.relators]
            self.relator_subgroup = closure(self, gens, normal=True)

    def __reduce__(self):
        return (FiniteQuotient, (self.presentation, self.p, self.k, False))

    @property
    def lift_order(self) -> int:
        return self.q**self.R

    @property
    def order(self) -> int:
        if self.relator_subgroup is None:
            return self.lift_order
        return self.lift_order // self.relator_subgroup.order

    @property
    def nil_class(self) -> int:
        return self.presentation.nil_class

    def _validate_kernel(self, samples: int = 200, seed: int = 1):
        mul_z, inv_z = self.presentation.compile(None)
        rng = random.Random(seed)
        q = self.q
        for _ in range(samples):
            g = tuple(rng.randint(-q, q) for _ in range(self.R))
            h = tuple(q * rng.randint(-3, 3) for _ in range(self.R))
            h2 = tuple(q * rng.randint(-3, 3) for _ in range(self.R))
            conj = mul_z(mul_z(g, h), inv_z(g))
            if any(c % q for c in conj) or any(c % q for c in mul_z(h, h2)):
                raise InvalidPresentation("coordinates divisible by p^k do not form a normal subgroup")

    def generators(self):
        return [tuple(int(i == j) for j in range(self.R)) for i in range(self.R)]

    def canon(self, x):
        if self.relator_subgroup is None:
            return x
        return self.relator_subgroup.coset_rep(x)

    def power(self, x, n: int):
        if n < 0:
            x, n = self.inv(x), -n
        result = self.identity
        while n:
            if n & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            n >>= 1
        return result

    def conj(self, g, x):
        """g x g^-1"""
        return self.mul(self.mul(g, x), self.inv(g))

    def elements(self):
        """Canonical representatives of all elements, lexicographic order."""
        if self.relator_subgroup is None:
            return [tuple(x) for x in product(range(self.q), repeat=self.R)]
        return self.relator_subgroup.transversal()

    def element(self, coords) -> GroupElement:
        return GroupElement(self, self.canon(tuple(int(c) % self.q for c in coords)))

    def full_group(self) -> Subgroup:
        rows = tuple(tuple(int(i == j) for j in range(self.R)) for i in range(self.R))
        return Subgroup(self, rows)

    def element_order(self, x) -> int:
        n, y = 1, self.canon(x)
        while y != self.canon(self.identity):
            y = self.canon(self.mul(y, x))
            n += 1
        return n

    def __repr__(self):
        rel = f"/N(|N|={self.relator_subgroup.order})" if self.relator_subgroup else ""
        return f"FiniteQuotient({self.presentation.name}, p={self.p}, k={self.k}{rel})"


@dataclass(frozen=True)
class GroupElement:
    context: FiniteQuotient = field(compare=False, repr=False)
    coords: tuple

    def _same(self, other):
        if other.context is not self.context:
            raise ContextMismatch("elements belong to different quotients")

    def __mul__(self, other: GroupElement) -> GroupElement:
        self._same(other)
        return multiply(self, other)

    def inverse(self) -> GroupElement:
        return inverse(self)

    def __pow__(self, n: int) -> GroupElement:
        return power(self, n)


def build_quotient(pres: MalcevPresentation, p: int, k: int) -> FiniteQuotient:
    return FiniteQuotient(pres, p, k)


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.context is not h.context:
        raise ContextMismatch("elements belong to different quotients")
    Q = g.context
    return GroupElement(Q, Q.canon(Q.mul(g.coords, h.coords)))


def inverse(g: GroupElement) -> GroupElement:
    Q = g.context
    return GroupElement(Q, Q.canon(Q.inv(g.coords)))


def power(g: GroupElement, n: int) -> GroupElement:
    Q = g.context
    return GroupElement(Q, Q.canon(Q.power(g.coords, n)))


class Subgroup:
    """A subgroup of G_k in canonical good-basis form.

    ``rows[i]`` is either None (H meets N_i and N_{i+1} in the same set) or the
    unique h_i in H with coordinates 0 before i, p**e_i at i, and coordinate j
    in [0, p**e_j) for every later present row j. Every element of H is
    uniquely h_1^m_1 ... h_R^m_R with 0 <= m_i < p**(k - e_i).
    """

    __slots__ = ("Q", "rows", "exps", "_pe", "_powcache", "_hash")

    def __init__(self, Q: FiniteQuotient, rows):
        self.Q = Q
        self.rows = tuple(rows)
        k = Q.k
        self.exps = tuple(k if r is None else _val(r[i], Q.p, k) for i, r in enumerate(self.rows))
        self._pe = tuple(Q.p**e for e in self.exps)
        self._powcache = {}
        self._hash = hash(self.rows)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Subgroup(exps={self.exps})"

    @property
    def order(self) -> int:
        return self.Q.p ** sum(self.Q.k - e for e in self.exps)

    @property
    def lift_index(self) -> int:
        """Index in G_k."""
        return self.Q.p ** sum(self.exps)

    @property
    def index(self) -> int:
        """Index in the quotient (equal to the index in G_k for subgroups containing N)."""
        return self.lift_index

    @property
    def present(self):
        return [i for i, r in enumerate(self.rows) if r is not None]

    def pcgs(self):
        return [r for r in self.rows if r is not None]

    def relative_orders(self):
        return [self.Q.p ** (self.Q.k - e) for e, r in zip(self.exps, self.rows) if r is not None]

    def _row_power(self, i: int, m: int):
        key = (i, m)
        val = self._powcache.get(key)
        if val is None:
            val = self.Q.power(self.rows[i], m)
            self._powcache[key] = val
        return val

    def sift(self, x):
        """Exponents (m_i over present rows) with x = prod h_i^m_i, or None if x is not in H."""
        mul = self.Q.mul
        exps = []
        for i, r in enumerate(self.rows):
            xi = x[i]
            if r is None:
                if xi:
                    return None
                continue
            pe = self._pe[i]
            if xi % pe:
                return None
            m = xi // pe
            exps.append(m)
            if m:
                x = mul(self._row_power(i, -m), x)
        return exps

    def __contains__(self, x) -> bool:
        return self.sift(x) is not None

    def word(self, exps):
        x = self.Q.identity
        for r, m in zip(self.pcgs(), exps):
            if m:
                x = self.Q.mul(x, self.Q.power(r, m))
        return x

    def coset_rep(self, x):
        """Lexicographically least element of the left coset x H."""
        Q = self.Q
        for i, r in enumerate(self.rows):
            if r is None:
                continue
            m = x[i] // self._pe[i]
            if m:
                x = Q.mul(x, self._row_power(i, -m))
        return x

    def transversal(self):
        """All canonical left-coset representatives, lexicographic order."""
        ranges = [range(self.Q.p ** e) for e in self.exps]
        return [tuple(x) for x in product(*ranges)]

    def elements(self):
        Q = self.Q
        out = [Q.identity]
        # build left to right: prefix * h_i^m
        for r, o in zip(self.pcgs(), self.relative_orders()):
            powers = [Q.identity]
            for _ in range(o - 1):
                powers.append(Q.mul(powers[-1], r))
            out = [Q.mul(x, y) for x in out for y in powers]
        return out

    def contains_subgroup(self, other: Subgroup) -> bool:
        return all(g in self for g in other.pcgs())

    def conjugate(self, g) -> Subgroup:
        """g H g^-1"""
        return closure(self.Q, [self.Q.conj(g, h) for h in self.pcgs()])


def _insert(Q: FiniteQuotient, table: list, x) -> bool:
    """Sift x into the echelon table, extending it where needed. True if the table changed."""
    p, k, q = Q.p, Q.k, Q.q
    changed = False
    while True:
        d = next((i for i, c in enumerate(x) if c), None)
        if d is None:
            return changed
        r = table[d]
        if r is None:
            table[d] = x
            return True
        vx, vr = _val(x[d], p, k), _val(r[d], p, k)
        if vx < vr:
            table[d], x = x, r
            changed = True
            continue
        u = r[d] // p**vr
        m = (x[d] // p**vr) * pow(u, -1, q) % q
        x = Q.mul(Q.power(r, -m), x)


def _normalise(Q: FiniteQuotient, table: list):
    p, q = Q.p, Q.q
    rows = list(table)
    for i, r in enumerate(rows):
        if r is None:
            continue
        v = _val(r[i], p, Q.k)
        u = r[i] // p**v
        if u != 1:
            rows[i] = Q.power(r, pow(u, -1, q))
    exps = [Q.k if r is None else _val(r[i], p, Q.k) for i, r in enumerate(rows)]
    for i, r in enumerate(rows):
        if r is None:
            continue
        x = r
        for j in range(i + 1, Q.R):
            if rows[j] is None:
                continue
            m = x[j] // p ** exps[j]
            if m:
                x = Q.mul(x, Q.power(rows[j], -m))
        rows[i] = x
    return rows


def closure(Q: FiniteQuotient, gens, normal: bool = False, extra=None) -> Subgroup:
    """Subgroup of G_k generated by ``gens`` (normal closure if ``normal``).

    ``extra`` lists elements that must also lie in the result (e.g. the relator subgroup's rows).
    """
    table = [None] * Q.R
    pending = [tuple(g) for g in gens]
    if extra:
        pending.extend(extra)
    conj_by = Q.generators() if normal else []
    while True:
        while pending:
            _insert(Q, table, pending.pop())
        rows = [r for r in table if r is not None]
        trial = Subgroup(Q, _normalise(Q, table))
        for r, o in zip(trial.pcgs(), trial.relative_orders()):
            y = Q.power(r, o)
            if y not in trial:
                pending.append(y)
        pc = trial.pcgs()
        for a in range(len(pc)):
            ia = Q.inv(pc[a])
            for b in range(a + 1, len(pc)):
                y = Q.mul(Q.mul(ia, pc[b]), pc[a])
                if y not in trial:
                    pending.append(y)
        for g in conj_by:
            gi = Q.inv(g)
            for r in rows:
                y = Q.mul(Q.mul(g, r), gi)
                if y not in trial:
                    pending.append(y)
        if not pending:
            return trial
        table = list(trial.rows)
