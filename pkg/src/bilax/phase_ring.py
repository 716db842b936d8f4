"""Exact phase-space algebra.

Phase-space functions are Laurent polynomials in named generators with exact
rational coefficients: coordinates enter only through their exponentials
``u_j = e^{x_j}`` (the one generator kind allowed negative exponents), so
every identity we care about is decided by exact normalization.  A Poisson
bracket is declared on generator pairs and extended to arbitrary elements as
a biderivation; boundary parameters are central generators, so a verified
identity holds for every parameter value at once.

A small fraction field (``Fraction``) sits on top for ratio Hamiltonians.
Denominators are kept factored and reduced only by scalar content, never by
multivariate gcd; equality is decided by cross-multiplication.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction as _PyFraction

from .backend import QQ
from .backend import kernel as K


class StructureError(ValueError):
    """Malformed algebraic input: unknown generator, zero denominator, ..."""


class Kind(enum.Enum):
    COORD_EXP = "coord_exp"  # u_j = e^{x_j}; Laurent (negative powers allowed)
    MOMENTUM = "momentum"
    SL2_E = "sl2_e"
    SL2_F = "sl2_f"
    SL2_H = "sl2_h"
    PARAMETER = "parameter"
    SPECTRAL = "spectral"


FIELD_KINDS = frozenset(
    {Kind.COORD_EXP, Kind.MOMENTUM, Kind.SL2_E, Kind.SL2_F, Kind.SL2_H}
)

#: spectral slots appended to every ring (lam, mu for two-variable relations,
#: nu only for the Yang-Baxter check)
SPECTRAL_NAMES = ("lam", "mu", "nu")


@dataclass(frozen=True)
class Generator:
    name: str
    kind: Kind
    site: int | None = None


def _qq(c):
    """Coerce to the exact rational backend; floats are rejected."""
    if isinstance(c, float):
        raise StructureError("floating point coefficient in exact ring: %r" % c)
    try:
        return QQ(c)
    except TypeError:
        return QQ(c.numerator, c.denominator)


_ONE = QQ(1)


class PhaseRing:
    """Ordered generator registry; all elements carry a reference to it."""

    def __init__(self, generators):
        gens = list(generators)
        names = [g.name for g in gens]
        for s in SPECTRAL_NAMES:
            if s not in names:
                gens.append(Generator(s, Kind.SPECTRAL))
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise StructureError("duplicate generator names: %r" % names)
        self.generators = tuple(gens)
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(names)}
        self.nvars = len(gens)
        self.zero_exp = (0,) * self.nvars
        self._laurent = tuple(g.kind is Kind.COORD_EXP for g in gens)
        self._field_slots = tuple(
            i for i, g in enumerate(gens) if g.kind in FIELD_KINDS
        )
        self._spectral_slots = tuple(
            i for i, g in enumerate(gens) if g.kind is Kind.SPECTRAL
        )
        self._pow_cache: dict = {}
        self.zero = RingElement(self, {})
        self.one = RingElement(self, {self.zero_exp: _ONE})

    def __repr__(self):
        return "PhaseRing(%s)" % ", ".join(self.names)

    def compatible(self, other) -> bool:
        return self is other or self.names == other.names

    def slot(self, name: str) -> int:
        i = self.index.get(name)
        if i is None:
            raise StructureError("unknown generator %r" % name)
        return i

    def gen(self, name: str) -> "RingElement":
        i = self.slot(name)
        exp = self.zero_exp[:i] + (1,) + self.zero_exp[i + 1 :]
        return RingElement(self, {exp: _ONE})

    def kind_of(self, name: str) -> Kind:
        return self.generators[self.slot(name)].kind

    def gens_of_kind(self, kind: Kind):
        return tuple(g.name for g in self.generators if g.kind is kind)

    def const(self, c) -> "RingElement":
        c = _qq(c)
        return RingElement(self, {self.zero_exp: c} if c else {})

    def monomial(self, powers: dict, coeff=1) -> "RingElement":
        """Monomial from {generator name: exponent}; only u may be negative."""
        exp = list(self.zero_exp)
        for name, e in powers.items():
            i = self.slot(name)
            if e < 0 and not self._laurent[i]:
                raise StructureError(
                    "negative exponent on non-Laurent generator %r" % name
                )
            exp[i] = e
        c = _qq(coeff)
        return RingElement(self, {tuple(exp): c} if c else {})

    def element(self, terms: dict) -> "RingElement":
        return RingElement(self, terms)

    def _pow_terms(self, el: "RingElement", p: int) -> dict:
        key = (el.key(), p)
        out = self._pow_cache.get(key)
        if out is None:
            out = {self.zero_exp: _ONE}
            for _ in range(p):
                out = K.mul(out, el.terms)
            self._pow_cache[key] = out
        return out


class RingElement:
    """Exact Laurent polynomial over a :class:`PhaseRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PhaseRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- predicates ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (
            len(self.terms) == 1 and self.ring.zero_exp in self.terms
        )

    def constant_value(self):
        if not self.terms:
            return QQ(0)
        if not self.is_constant:
            raise StructureError("not a constant: %s" % self)
        return self.terms[self.ring.zero_exp]

    def is_parameter_constant(self) -> bool:
        """True when no field or spectral generator appears."""
        slots = self.ring._field_slots + self.ring._spectral_slots
        return all(all(e[i] == 0 for i in slots) for e in self.terms)

    def involves(self, name: str) -> bool:
        i = self.ring.slot(name)
        return any(e[i] for e in self.terms)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RingElement):
            if not self.ring.compatible(other.ring):
                raise StructureError("elements from incompatible rings")
            return other
        if isinstance(other, Fraction):
            return None
        if isinstance(other, float):
            raise StructureError("floating point in exact ring")
        try:
            return self.ring.const(other)
        except (TypeError, AttributeError):
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElement(self.ring, K.add(self.terms, o.terms))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElement(self.ring, K.sub(self.terms, o.terms))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElement(self.ring, K.sub(o.terms, self.terms))

    def __mul__(self, other):
        if isinstance(other, RingElement):
            if not self.ring.compatible(other.ring):
                raise StructureError("elements from incompatible rings")
            return RingElement(self.ring, K.mul(self.terms, other.terms))
        if isinstance(other, Fraction):
            return NotImplemented
        if isinstance(other, float):
            raise StructureError("floating point in exact ring")
        try:
            c = _qq(other)
        except (TypeError, AttributeError):
            return NotImplemented
        return RingElement(self.ring, K.scale(self.terms, c))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, K.neg(self.terms))

    def __pow__(self, p: int):
        if not isinstance(p, int):
            return NotImplemented
        if p < 0:
            if len(self.terms) != 1:
                raise StructureError("negative power of a non-monomial")
            (exp, c), = self.terms.items()
            for i, e in enumerate(exp):
                if e and not self.ring._laurent[i]:
                    raise StructureError(
                        "negative power touches non-Laurent generator"
                    )
            return RingElement(
                self.ring, {tuple(e * p for e in exp): _ONE / (c ** (-p))}
            )
        out = {self.ring.zero_exp: _ONE}
        base = self.terms
        k = p
        while k:
            if k & 1:
                out = K.mul(out, base)
            k >>= 1
            if k:
                base = K.mul(base, base)
        return RingElement(self.ring, out)

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return self.ring.compatible(other.ring) and self.terms == other.terms
        if isinstance(other, Fraction):
            return other.__eq__(self)
        try:
            c = _qq(other)
        except (TypeError, AttributeError, StructureError):
            return NotImplemented
        if not c:
            return not self.terms
        return self.terms == {self.ring.zero_exp: c}

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None  # mutable term dict; use .key() when hashing is needed

    # -- calculus & structure -------------------------------------------

    def diff(self, name: str) -> "RingElement":
        return RingElement(self.ring, K.diff(self.terms, self.ring.slot(name)))

    def coeff_of(self, name: str, power: int) -> "RingElement":
        """Coefficient of name**power (the slot is zeroed in the result)."""
        i = self.ring.slot(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == power:
                out[e[:i] + (0,) + e[i + 1 :]] = c
        return RingElement(self.ring, out)

    def degree_in(self, name: str) -> int:
        i = self.ring.slot(name)
        return max((e[i] for e in self.terms), default=0)

    def min_degree_in(self, name: str) -> int:
        i = self.ring.slot(name)
        return min((e[i] for e in self.terms), default=0)

    def key(self):
        """Hashable canonical form (sorted term tuple)."""
        return tuple(sorted(self.terms.items()))

    def leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def substitute(self, mapping: dict) -> "Fraction":
        """Substitute generators by elements/fractions/rationals.

        Negative powers of a substituted generator require the value to be
        invertible (handled at the Fraction level).
        """
        ring = self.ring
        sub = {}
        for name, val in mapping.items():
            sub[ring.slot(name)] = as_fraction(ring, val)
        out = Fraction(ring.zero)
        powcache: dict = {}
        for exps, c in self.terms.items():
            rest = list(exps)
            fac = None
            for i, val in sub.items():
                e = exps[i]
                if e:
                    rest[i] = 0
                    p = powcache.get((i, e))
                    if p is None:
                        p = val ** e
                        powcache[(i, e)] = p
                    fac = p if fac is None else fac * p
            term = Fraction(RingElement(ring, {tuple(rest): c}))
            out = out + (term if fac is None else term * fac)
        return out

    def evaluate(self, values: dict) -> float:
        """Plain floating-point evaluation at {generator name: value}."""
        names = self.ring.names
        total = 0.0
        for exps, c in self.terms.items():
            v = float(c)
            for i, e in enumerate(exps):
                if e:
                    v *= values[names[i]] ** e
            total += v
        return total

    # -- formatting ------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.names
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            mono = "*".join(
                names[i] if e == 1 else "%s^%d" % (names[i], e)
                for i, e in enumerate(exps)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append("%s*%s" % (c, mono))
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self):
        return "<RingElement %s>" % self


def _factor_add(factors: dict, el: RingElement, power: int):
    key = el.key()
    if key in factors:
        old_el, old_p = factors[key]
        factors[key] = (old_el, old_p + power)
    else:
        factors[key] = (el, power)


def _push_den(ring: PhaseRing, num_terms: dict, factors: dict, el: RingElement, power: int) -> dict:
    """Fold el**power into the denominator; returns the adjusted numerator.

    Monomial factors reduce to per-variable atoms (Laurent variables fold
    straight into the numerator); other factors are made monic with respect
    to the term order, the scalar going into the numerator.
    """
    t = el.terms
    if not t:
        raise StructureError("zero denominator")
    if len(t) == 1:
        (exp, c), = t.items()
        fold = [0] * ring.nvars
        for i, e in enumerate(exp):
            if e:
                if ring._laurent[i]:
                    fold[i] = -e * power
                else:
                    _factor_add(factors, ring.gen(ring.names[i]), e * power)
        return K.mul_term(num_terms, tuple(fold), _ONE / (c ** power))
    lead_exp, lc = el.leading()
    if lc != 1:
        el = el * (_ONE / lc)
        num_terms = K.scale(num_terms, (_ONE / lc) ** power)
    _factor_add(factors, el, power)
    return num_terms


def _cancel(ring: PhaseRing, num_terms: dict, factors: dict) -> tuple:
    """Drop factors cancelled by the numerator (single-variable atoms only)."""
    if not num_terms:
        return ()
    out = []
    for key, (el, p) in factors.items():
        if p == 0:
            continue
        if len(el.terms) == 1:
            (exp, c), = el.terms.items()
            live = [i for i, e in enumerate(exp) if e]
            if c == 1 and len(live) == 1 and exp[live[0]] == 1:
                i = live[0]
                m = min(e[i] for e in num_terms)
                take = p if ring._laurent[i] else min(p, max(m, 0))
                if take > 0:
                    shift = [0] * ring.nvars
                    shift[i] = -take
                    num_terms_new = K.mul_term(num_terms, tuple(shift), _ONE)
                    num_terms.clear()
                    num_terms.update(num_terms_new)
                    p -= take
                if p == 0:
                    continue
        out.append((key, el, p))
    out.sort(key=lambda kep: kep[0])
    return tuple((el, p) for _, el, p in out)


class Fraction:
    """Quotient of ring elements with a factored, content-reduced denominator."""

    __slots__ = ("ring", "num", "_factors", "_den")

    def __init__(self, num: RingElement, den: RingElement | None = None):
        if isinstance(num, Fraction):
            raise TypeError("already a Fraction; use as_fraction()")
        ring = num.ring
        factors: dict = {}
        terms = num.terms
        if den is not None and den.terms != ring.one.terms:
            if not ring.compatible(den.ring):
                raise StructureError("num/den from incompatible rings")
            terms = _push_den(ring, terms, factors, den, 1)
        self.ring = ring
        self.num = RingElement(ring, dict(terms))
        self._factors = _cancel(ring, self.num.terms, factors)
        self._den = None

    @classmethod
    def _make(cls, ring: PhaseRing, num_terms: dict, factors: dict) -> "Fraction":
        self = object.__new__(cls)
        self.ring = ring
        self.num = RingElement(ring, num_terms)
        self._factors = _cancel(ring, num_terms, factors)
        self._den = None
        return self

    # -- structure -------------------------------------------------------

    @property
    def den(self) -> RingElement:
        d = self._den
        if d is None:
            terms = {self.ring.zero_exp: _ONE}
            for el, p in self._factors:
                terms = K.mul(terms, self.ring._pow_terms(el, p))
            d = RingElement(self.ring, terms)
            self._den = d
        return d

    @property
    def den_factors(self):
        return self._factors

    @property
    def is_zero(self) -> bool:
        return not self.num.terms

    def as_ring_element(self) -> RingElement:
        if self._factors:
            raise StructureError("fraction has a nontrivial denominator")
        return self.num

    def is_parameter_constant(self) -> bool:
        return self.num.is_parameter_constant() and all(
            el.is_parameter_constant() for el, _ in self._factors
        )

    def _factor_dict(self) -> dict:
        return {el.key(): (el, p) for el, p in self._factors}

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        o = as_fraction(self.ring, other)
        if o is None:
            return NotImplemented
        if self._factors == o._factors:
            terms = K.add(self.num.terms, o.num.terms)
            return Fraction._make(self.ring, terms, self._factor_dict())
        fs, fo = self._factor_dict(), o._factor_dict()
        union: dict = dict(fs)
        for key, (el, p) in fo.items():
            if key in union:
                union[key] = (el, max(union[key][1], p))
            else:
                union[key] = (el, p)
        a = self.num.terms
        b = o.num.terms
        for key, (el, p) in union.items():
            ps = p - fs.get(key, (None, 0))[1]
            po = p - fo.get(key, (None, 0))[1]
            if ps:
                a = K.mul(a, self.ring._pow_terms(el, ps))
            if po:
                b = K.mul(b, self.ring._pow_terms(el, po))
        return Fraction._make(self.ring, K.add(a, b), union)

    __radd__ = __add__

    def __sub__(self, other):
        o = as_fraction(self.ring, other)
        if o is None:
            return NotImplemented
        return self.__add__(-o)

    def __rsub__(self, other):
        o = as_fraction(self.ring, other)
        if o is None:
            return NotImplemented
        return o.__add__(-self)

    def __mul__(self, other):
        o = as_fraction(self.ring, other)
        if o is None:
            return NotImplemented
        factors = self._factor_dict()
        for key, (el, p) in o._factor_dict().items():
            if key in factors:
                factors[key] = (el, factors[key][1] + p)
            else:
                factors[key] = (el, p)
        return Fraction._make(
            self.ring, K.mul(self.num.terms, o.num.terms), factors
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_fraction(self.ring, other)
        if o is None:
            return NotImplemented
        return self.__mul__(o.reciprocal())

    def __rtruediv__(self, other):
        o = as_fraction(self.ring, other)
        if o is None:
            return NotImplemented
        return o.__mul__(self.reciprocal())

    def __neg__(self):
        return Fraction._make(
            self.ring, K.neg(self.num.terms), self._factor_dict()
        )

    def reciprocal(self) -> "Fraction":
        if self.is_zero:
            raise StructureError("zero denominator (reciprocal of zero)")
        factors: dict = {}
        terms = {self.ring.zero_exp: _ONE}
        for el, p in self._factors:
            terms = K.mul(terms, self.ring._pow_terms(el, p))
        terms = _push_den(self.ring, terms, factors, self.num, 1)
        return Fraction._make(self.ring, terms, factors)

    def __pow__(self, p: int):
        if not isinstance(p, int):
            return NotImplemented
        if p < 0:
            return self.reciprocal() ** (-p)
        out = Fraction(self.ring.one)
        base = self
        while p:
            if p & 1:
                out = out * base
            p >>= 1
            if p:
                base = base * base
        return out

    def __eq__(self, other):
        o = as_fraction(self.ring, other)
        if o is None:
            return NotImplemented
        if self._factors == o._factors:
            return self.num.terms == o.num.terms
        left = K.mul(self.num.terms, o.den.terms)
        right = K.mul(o.num.terms, self.den.terms)
        return left == right

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None

    # -- misc -------------------------------------------------------------

    def substitute(self, mapping: dict) -> "Fraction":
        out = self.num.substitute(mapping)
        for el, p in self._factors:
            out = out / (el.substitute(mapping) ** p)
        return out

    def evaluate(self, values: dict) -> float:
        d = 1.0
        for el, p in self._factors:
            d *= el.evaluate(values) ** p
        return self.num.evaluate(values) / d

    def __str__(self):
        if not self._factors:
            return str(self.num)
        dens = "*".join(
            "(%s)" % el if p == 1 else "(%s)^%d" % (el, p)
            for el, p in self._factors
        )
        return "(%s)/(%s)" % (self.num, dens)

    def __repr__(self):
        return "<Fraction %s>" % self


def as_fraction(ring: PhaseRing, value) -> Fraction | None:
    """Coerce to a Fraction over ring; None when the value is foreign."""
    if isinstance(value, Fraction):
        if not ring.compatible(value.ring):
            raise StructureError("fraction from incompatible ring")
        return value
    if isinstance(value, RingElement):
        if not ring.compatible(value.ring):
            raise StructureError("element from incompatible ring")
        return Fraction(value)
    if isinstance(value, float):
        raise StructureError("floating point in exact ring")
    if isinstance(value, (int, _PyFraction)) or type(value) is type(_ONE):
        return Fraction(ring.const(value))
    try:
        return Fraction(ring.const(_qq(value)))
    except (TypeError, AttributeError, StructureError):
        return None


class PoissonStructure:
    """Antisymmetric bracket table on generators, extended as a biderivation."""

    def __init__(self, ring: PhaseRing, table: dict | None = None):
        self.ring = ring
        self._table: dict = {}
        if table:
            for (a, b), el in table.items():
                self.set_bracket(a, b, el)

    def set_bracket(self, a: str, b: str, value: RingElement):
        ring = self.ring
        i, j = ring.slot(a), ring.slot(b)
        if i == j:
            raise StructureError("bracket of a generator with itself is zero")
        if not ring.compatible(value.ring):
            raise StructureError("table entry from incompatible ring")
        if i < j:
            self._table[(i, j)] = value
        else:
            self._table[(j, i)] = -value

    def gen_bracket(self, a: str, b: str) -> RingElement:
        ring = self.ring
        i, j = ring.slot(a), ring.slot(b)
        if i < j:
            return self._table.get((i, j), ring.zero)
        if j < i:
            el = self._table.get((j, i))
            return -el if el is not None else ring.zero
        return ring.zero

    @classmethod
    def standard(cls, ring: PhaseRing) -> "PoissonStructure":
        """Canonical pairs {X_j, u_j} = u_j plus the sl(2) triple.

        Parameters and spectral variables are central; sl(2) commutes with
        the canonical pairs.
        """
        ps = cls(ring)
        by_site = {}
        for g in ring.generators:
            if g.kind is Kind.COORD_EXP:
                by_site.setdefault(g.site, {})["u"] = g.name
            elif g.kind is Kind.MOMENTUM:
                by_site.setdefault(g.site, {})["X"] = g.name
        for site, pair in sorted(by_site.items(), key=lambda kv: str(kv[0])):
            if "u" in pair and "X" in pair:
                ps.set_bracket(pair["X"], pair["u"], ring.gen(pair["u"]))
        e = ring.gens_of_kind(Kind.SL2_E)
        f = ring.gens_of_kind(Kind.SL2_F)
        h = ring.gens_of_kind(Kind.SL2_H)
        if e and f and h:
            E, F, H = e[0], f[0], h[0]
            ps.set_bracket(H, E, ring.gen(E))
            ps.set_bracket(H, F, -ring.gen(F))
            ps.set_bracket(E, F, 2 * ring.gen(H))
        return ps

    # -- brackets ----------------------------------------------------------

    def bracket(self, f: RingElement, g: RingElement) -> RingElement:
        """Exact Poisson bracket: bilinear, antisymmetric, Leibniz in both."""
        ring = self.ring
        if not (ring.compatible(f.ring) and ring.compatible(g.ring)):
            raise StructureError("bracket arguments from incompatible rings")
        ft, gt = f.terms, g.terms
        if not ft or not gt:
            return ring.zero
        out: dict = {}
        for (i, j), el in self._table.items():
            dfi = K.diff(ft, i)
            dgj = K.diff(gt, j) if dfi else {}
            dfj = K.diff(ft, j)
            dgi = K.diff(gt, i) if dfj else {}
            s = K.mul(dfi, dgj) if dfi and dgj else {}
            if dfj and dgi:
                s = K.sub(s, K.mul(dfj, dgi))
            if s:
                K.mul_acc(out, s, el.terms)
        return RingElement(ring, out)

    def bracket_fraction(self, f, g) -> Fraction:
        """Bracket on the fraction field via the quotient rule."""
        ring = self.ring
        F = as_fraction(ring, f)
        G = as_fraction(ring, g)
        if F is None or G is None:
            raise StructureError("bracket_fraction on non-algebraic input")
        if not F._factors and not G._factors:
            return Fraction(self.bracket(F.num, G.num))
        p, s = F.num, G.num
        q, t = F.den, G.den
        num = (
            q * t * self.bracket(p, s)
            - q * s * self.bracket(p, t)
            - p * t * self.bracket(q, s)
            + p * s * self.bracket(q, t)
        )
        factors: dict = {}
        for el, pw in F._factors:
            _factor_add(factors, el, 2 * pw)
        for el, pw in G._factors:
            _factor_add(factors, el, 2 * pw)
        return Fraction._make(ring, num.terms, factors)

    # -- structure checks ---------------------------------------------------

    def jacobi_residual(self, f, g, h) -> RingElement:
        return (
            self.bracket(f, self.bracket(g, h))
            + self.bracket(g, self.bracket(h, f))
            + self.bracket(h, self.bracket(f, g))
        )

    def check_generator_jacobi(self):
        """Jacobi residuals on all generator triples; all must vanish."""
        bad = []
        gens = [
            self.ring.gen(g.name)
            for g in self.ring.generators
            if g.kind is not Kind.SPECTRAL
        ]
        for a, b, c in itertools.combinations(gens, 3):
            r = self.jacobi_residual(a, b, c)
            if not r.is_zero:
                bad.append((str(a), str(b), str(c), str(r)))
        return bad


def exact_divide(num: RingElement, den: RingElement) -> RingElement | None:
    """Exact polynomial quotient num/den, or None when den does not divide.

    Laurent slots may go negative in the quotient; all other slots must stay
    non-negative.
    """
    ring = num.ring
    if den.is_zero:
        raise StructureError("division by zero element")
    if num.is_zero:
        return ring.zero
    ed, cd = den.leading()
    q: dict = {}
    r = dict(num.terms)
    steps = 0
    while r:
        # Laurent slots break well-foundedness of the term order; a
        # non-multiple can descend forever, so cap the division length.
        steps += 1
        if steps > 1000:
            return None
        er = max(r)
        cr = r[er]
        qe = tuple(a - b for a, b in zip(er, ed))
        if any(e < 0 and not ring._laurent[i] for i, e in enumerate(qe)):
            return None
        qc = cr / cd
        q[qe] = qc
        for e, c in K.mul_term(den.terms, qe, qc).items():
            c0 = r.get(e)
            if c0 is None:
                r[e] = -c
            else:
                c0 = c0 - c
                if c0:
                    r[e] = c0
                else:
                    del r[e]
    return RingElement(ring, q)


def casimir(ps: PoissonStructure) -> RingElement:
    """The sl(2) Casimir H^2 + E*F of the structure's ring."""
    ring = ps.ring
    e = ring.gens_of_kind(Kind.SL2_E)
    f = ring.gens_of_kind(Kind.SL2_F)
    h = ring.gens_of_kind(Kind.SL2_H)
    if not (e and f and h):
        raise StructureError("ring has no sl(2) generators")
    E, F, H = ring.gen(e[0]), ring.gen(f[0]), ring.gen(h[0])
    return H * H + E * F
