"""
Sparse multivariate polynomials over F_p.

A Polynomial maps exponent tuples (monomials) to nonzero residues in [0, p).
Terms are kept in a dict; the list of terms sorted by the ring's monomial
order is built on first use and cached, so leading-term access is O(1)
afterwards. Polynomials are never mutated after construction.
"""
import logging
import math
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

from . import config
from .errors import ExponentOverflowError, FieldError, InputError, UnknownVariableError
from .field import FieldElem, PrimeField, get_field

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _order_key(order, n, block):
    """Return a function mapping an exponent tuple to a flat int tuple.

    Larger key means larger monomial. `block` > 0 selects an elimination
    order: the first `block` variables are compared first (degrevlex), then
    the rest (degrevlex).
    """
    if block:
        def key(e):
            head, tail = e[:block], e[block:]
            return (sum(head),) + tuple(-x for x in reversed(head)) + (sum(tail),) + tuple(-x for x in reversed(tail))
        return key
    if order == "degrevlex":
        return lambda e: (sum(e),) + tuple(-x for x in reversed(e))
    if order == "deglex":
        return lambda e: (sum(e),) + e
    if order == "lex":
        return lambda e: e
    raise InputError(f"unknown monomial order {order!r}")


@dataclass(frozen=True)
class RingContext:
    """The polynomial ring F_p[x_1..x_n] with a fixed monomial order."""

    field: PrimeField
    variables: tuple
    order: str = config.DEFAULT_ORDER
    block: int = 0
    _index: dict = dataclass_field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if not 1 <= len(variables) <= config.MAX_VARIABLES + 1:
            raise InputError(f"a ring needs between 1 and {config.MAX_VARIABLES} variables, got {len(variables)}")
        if any(not isinstance(v, str) or not v for v in variables):
            raise InputError("variable names must be nonempty strings")
        if len(set(variables)) != len(variables):
            raise InputError(f"duplicate variable names in {variables}")
        if self.order not in config.ORDERS:
            raise InputError(f"unknown monomial order {self.order!r}; expected one of {config.ORDERS}")
        if not 0 <= self.block < len(variables):
            raise InputError(f"elimination block {self.block} out of range")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(variables)})

    @classmethod
    def create(cls, p, variables, order=config.DEFAULT_ORDER):
        """Build a user-facing ring; enforces the variable limit strictly."""
        if isinstance(variables, str):
            variables = [v.strip() for v in variables.split(",") if v.strip()]
        if len(variables) > config.MAX_VARIABLES:
            raise InputError(f"at most {config.MAX_VARIABLES} variables are supported, got {len(variables)}")
        return cls(get_field(p), tuple(variables), order)

    @property
    def p(self):
        return self.field.p

    @property
    def n(self):
        return len(self.variables)

    @property
    def key(self):
        return _order_key(self.order, len(self.variables), self.block)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}; ring variables are {', '.join(self.variables)}") from None

    def with_order(self, order, block=0):
        return RingContext(self.field, self.variables, order, block)

    def subring(self, names):
        """Ring on the given variables (kept in this ring's order)."""
        keep = [v for v in self.variables if v in set(names)]
        return RingContext(self.field, tuple(keep), self.order)

    def zero(self):
        return Polynomial(self, {}, trusted=True)

    def one(self):
        return Polynomial(self, {(0,) * self.n: 1}, trusted=True)

    def constant(self, c):
        return Polynomial(self, {(0,) * self.n: c})

    def var(self, name):
        i = name if isinstance(name, int) else self.index(name)
        e = [0] * self.n
        e[i] = 1
        return Polynomial(self, {tuple(e): 1}, trusted=True)

    def gens(self):
        return [self.var(i) for i in range(self.n)]

    def monomial(self, exps, coeff=1):
        return Polynomial(self, {tuple(exps): coeff})

    def __str__(self):
        return f"F_{self.p}[{', '.join(self.variables)}] ({self.order})"


def _check_exponents(exps):
    if any(x > config.MAX_EXPONENT for x in exps):
        raise ExponentOverflowError(f"exponent exceeds {config.MAX_EXPONENT}")


def monomial_divides(a, b):
    """True when x^a divides x^b."""
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def monomial_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def monomial_quotient(b, a):
    return tuple(y - x for x, y in zip(a, b))


def _mul_terms(a, b, p, bound=None):
    """Product of two term dicts; with `bound`, monomials having an exponent >= bound are skipped."""
    if len(a) > len(b):
        a, b = b, a
    acc = {}
    get = acc.get
    for ea, ca in a.items():
        for eb, cb in b.items():
            m = tuple(x + y for x, y in zip(ea, eb))
            if bound is not None and max(m) >= bound:
                continue
            acc[m] = get(m, 0) + ca * cb
    return {m: c % p for m, c in acc.items() if c % p}


class Polynomial:
    """An element of a RingContext; `terms` maps exponent tuples to residues."""

    __slots__ = ("ring", "terms", "_sorted")

    def __init__(self, ring, terms=None, trusted=False):
        self.ring = ring
        self._sorted = None
        if trusted:
            self.terms = terms
            return
        p = ring.p
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != ring.n:
                raise InputError(f"monomial {exps} does not match {ring.n} variables")
            if any(x < 0 for x in exps):
                raise InputError(f"negative exponent in {exps}")
            _check_exponents(exps)
            if isinstance(c, FieldElem):
                if c.field.p != p:
                    raise FieldError(f"coefficient from {c.field} in a ring over F_{p}")
                c = c.residue
            c %= p
            if c:
                clean[exps] = (clean.get(exps, 0) + c) % p
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean

    # -- inspection ---------------------------------------------------------

    def sorted_terms(self):
        """Terms as (exponents, residue) pairs, largest monomial first."""
        if self._sorted is None:
            key = self.ring.key
            self._sorted = sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)
        return self._sorted

    @property
    def LM(self):
        return self.sorted_terms()[0][0]

    @property
    def LC(self):
        return self.sorted_terms()[0][1]

    def coefficient(self, exps):
        return FieldElem(self.ring.field, self.terms.get(tuple(exps), 0))

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def is_monomial(self):
        return len(self.terms) == 1

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self):
        """Order of vanishing at the origin (least total degree of a term)."""
        return min((sum(e) for e in self.terms), default=math.inf)

    def is_homogeneous(self):
        return len({sum(e) for e in self.terms}) <= 1

    def support(self):
        """Indices of the variables that occur in some term."""
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return frozenset(used)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise InputError("polynomials belong to different rings")
            return other
        if isinstance(other, (int, FieldElem)):
            return self.ring.constant(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = (out.get(e, 0) + c) % p
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out, trusted=True)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {e: p - c for e, c in self.terms.items()}, trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = _mul_terms(self.terms, other.terms, self.ring.p)
        for e in out:
            _check_exponents(e)
        return Polynomial(self.ring, out, trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise InputError(f"polynomial exponent must be a nonnegative integer, got {k!r}")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c):
        p = self.ring.p
        c = int(c) % p
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {e: v * c % p for e, v in self.terms.items()}, trusted=True)

    def mul_term(self, exps, c=1):
        """Multiply by c * x^exps."""
        p = self.ring.p
        out = {}
        for e, v in self.terms.items():
            m = tuple(x + y for x, y in zip(e, exps))
            out[m] = v * c % p
        return Polynomial(self.ring, {m: v for m, v in out.items() if v}, trusted=True)

    def monic(self):
        if not self.terms:
            return self
        return self.scale(self.ring.field.inverse_residue(self.LC))

    def exact_divide(self, g):
        """Return h with self = g * h, or None when g does not divide self."""
        if not g:
            raise InputError("division by the zero polynomial")
        ring = self.ring
        p = ring.p
        key = ring.key
        lm, inv = g.LM, ring.field.inverse_residue(g.LC)
        rest = dict(self.terms)
        quotient = {}
        while rest:
            m = max(rest, key=key)
            if not monomial_divides(lm, m):
                return None
            shift = monomial_quotient(m, lm)
            c = rest[m] * inv % p
            quotient[shift] = c
            for e, v in g.terms.items():
                t = monomial_mul(e, shift)
                s = (rest.get(t, 0) - c * v) % p
                if s:
                    rest[t] = s
                else:
                    rest.pop(t, None)
        return Polynomial(ring, quotient, trusted=True)

    # -- comparison and printing -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, int):
            return self.terms == self.ring.constant(other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.variables
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for name, x in zip(names, e):
                if x == 1:
                    factors.append(name)
                elif x:
                    factors.append(f"{name}^{x}")
            if c != 1 or not factors:
                factors.insert(0, str(c))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({self})"


def frobenius_image(f, e):
    """f^(p^e), computed termwise: exponents times p^e, coefficients fixed by Fermat."""
    if e < 0:
        raise InputError(f"Frobenius level must be nonnegative, got {e}")
    q = f.ring.p ** e
    out = {}
    for exps, c in f.terms.items():
        m = tuple(x * q for x in exps)
        _check_exponents(m)
        out[m] = c
    return Polynomial(f.ring, out, trusted=True)


def truncate(f, q):
    """Drop every monomial lying in m^[q] (some exponent >= q)."""
    return Polynomial(f.ring, {e: c for e, c in f.terms.items() if max(e, default=0) < q}, trusted=True)


def _truncated_power_terms(terms, t, q, p, n):
    one = {(0,) * n: 1}
    if t == 0:
        return one
    if q == 1:
        c = terms.get((0,) * n, 0)
        c = pow(c, t, p)
        return {(0,) * n: c} if c else {}
    if t >= p and q % p == 0:
        # f^t = f^(t mod p) * (f^(t div p))^[p], and x^(p*b) lies in m^[q] iff b lies in m^[q/p]
        inner = _truncated_power_terms(terms, t // p, q // p, p, n)
        lifted = {tuple(x * p for x in e): c for e, c in inner.items()}
        if t % p == 0:
            return lifted
        low = _truncated_power_terms(terms, t % p, q, p, n)
        return _mul_terms(low, lifted, p, bound=q)
    base = {e: c for e, c in terms.items() if max(e, default=0) < q}
    result = one
    while t:
        if t & 1:
            result = _mul_terms(result, base, p, bound=q)
            if not result:
                return {}
        t >>= 1
        if t:
            base = _mul_terms(base, base, p, bound=q)
    return result


def truncated_power(f, t, q):
    """f^t modulo the monomial ideal m^[q], truncating after every multiplication."""
    if t < 0:
        raise InputError(f"power must be nonnegative, got {t}")
    ring = f.ring
    terms = _truncated_power_terms(f.terms, t, q, ring.p, ring.n)
    return Polynomial(ring, terms, trusted=True)


def min_degree_below_q(f, q):
    """Least total degree of a monomial of f with all exponents < q; math.inf if none."""
    return min((sum(e) for e in f.terms if max(e, default=0) < q), default=math.inf)


def in_bracket_power_of_max(f, q):
    """True when every monomial of f has some exponent >= q, i.e. f lies in m^[q]."""
    return all(max(e, default=0) >= q for e in f.terms)


def embed(f, target):
    """Rename f into `target`, whose variables must include every variable f uses."""
    source = f.ring
    if source == target:
        return f
    if source.p != target.p:
        raise FieldError(f"cannot move a polynomial from F_{source.p} to F_{target.p}")
    positions = []
    for i, name in enumerate(source.variables):
        if name in target._index:
            positions.append(target._index[name])
        else:
            positions.append(None)
    n = target.n
    out = {}
    for e, c in f.terms.items():
        m = [0] * n
        for i, x in enumerate(e):
            if x:
                if positions[i] is None:
                    raise UnknownVariableError(f"variable {source.variables[i]!r} is not in {target}")
                m[positions[i]] = x
        out[tuple(m)] = c
    return Polynomial(target, out, trusted=True)


def substitute_one(f, keep, target=None):
    """Set every variable outside `keep` to 1 and return the result in the subring on `keep`."""
    ring = f.ring
    target = target or ring.subring(keep)
    positions = [ring.index(v) for v in target.variables]
    p = ring.p
    out = {}
    for e, c in f.terms.items():
        m = tuple(e[i] for i in positions)
        out[m] = (out.get(m, 0) + c) % p
    return Polynomial(target, {m: c for m, c in out.items() if c}, trusted=True)
