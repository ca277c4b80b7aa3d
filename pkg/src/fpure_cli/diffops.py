"""
Divided-power differential operators and differential powers.

The operator d^(a) of level e (every a_i < p^e) acts on monomials by

    d^(a) x^b = C(b_1, a_1) ... C(b_n, a_n) x^(b - a)

with binomials reduced mod p. Operators are never materialized; only their
images on the polynomials at hand are computed.
"""
import logging
from dataclasses import dataclass

from . import config
from .errors import BudgetExhaustedError, InputError, PreconditionError
from .field import binomial_residue
from .frobenius import NOT_FPURE, fedder_colon
from .groebner import IdealHandle, ideal_contains, is_unit_ideal
from .poly import Polynomial, monomial_divides

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DividedPowerIndex:
    """Exponent vector a of the operator d^(a), at level e."""

    alpha: tuple
    e: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        if self.e < 0 or any(a < 0 for a in self.alpha):
            raise InputError(f"invalid divided-power index {self.alpha} at level {self.e}")

    @property
    def order(self):
        return sum(self.alpha)

    def check(self, ring):
        q = ring.p ** self.e
        if len(self.alpha) != ring.n:
            raise InputError(f"operator index {self.alpha} does not match {ring.n} variables")
        if any(a >= q for a in self.alpha):
            raise InputError(f"operator index {self.alpha} has an entry >= {q}")


def _apply(alpha, f):
    p = f.ring.p
    out = {}
    for beta, c in f.terms.items():
        if not monomial_divides(alpha, beta):
            continue
        coeff = c
        for b, a in zip(beta, alpha):
            if a:
                coeff = coeff * binomial_residue(b, a, p) % p
                if not coeff:
                    break
        if coeff:
            out[tuple(b - a for b, a in zip(beta, alpha))] = coeff
    return Polynomial(f.ring, out, trusted=True)


def apply_divided_power(idx, f):
    """The image d^(alpha)(f); terms with a vanishing Lucas product drop out."""
    idx.check(f.ring)
    return _apply(idx.alpha, f)


def _indices_of_order(d, f, q):
    """Operator indices of order d (entries < q) that do not kill every term of f."""
    seen = set()
    for beta in f.terms:
        caps = [min(b, q - 1) for b in beta]
        if sum(caps) < d:
            continue
        for alpha in _bounded_compositions(d, caps):
            if alpha not in seen:
                seen.add(alpha)
                yield alpha


def _bounded_compositions(d, caps):
    """Vectors a with sum d and 0 <= a_i <= caps[i], in lexicographically decreasing order."""
    n = len(caps)
    if n == 0:
        if d == 0:
            yield ()
        return
    rest_cap = sum(caps[1:])
    for a in range(min(d, caps[0]), max(0, d - rest_cap) - 1, -1):
        for tail in _bounded_compositions(d - a, caps[1:]):
            yield (a,) + tail


class _OperatorCounter:
    def __init__(self, budget=None):
        self.budget = config.OPERATOR_BUDGET if budget is None else budget
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.budget:
            logger.warning(f"Operator sweep stopped after {self.budget} applications")
            raise BudgetExhaustedError()


def diff_power_member(f, P, n, e):
    """True iff f lies in the differential power P^<n, p^e>.

    That is, d^(a)(f) lies in P for every a with |a| <= n-1 and a_i < p^e.
    """
    if n <= 0:
        return True
    q = f.ring.p ** e
    counter = _OperatorCounter()
    for d in range(n):
        for alpha in _indices_of_order(d, f, q):
            counter.tick()
            image = _apply(alpha, f)
            if image and not P.contains(image):
                return False
    return True


def _variables_of_monomial_prime(P):
    """Indices of the variables generating P, or None when P is not generated by variables."""
    indices = []
    for g in P.generators:
        if not g.is_monomial() or g.LC != 1:
            return None
        exps = g.LM
        if sum(exps) != 1:
            return None
        indices.append(exps.index(1))
    return frozenset(indices)


def _order_outside(g, P, q, counter, prime_vars):
    """Least |a| (a_i < q) with d^(a)(g) outside P; None when every image lies in P."""
    if prime_vars is not None and g.is_monomial():
        # d^(a) x^b leaves P exactly when a agrees with b on the prime's variables
        beta = g.LM
        if any(beta[i] >= q for i in prime_vars):
            return None
        return sum(beta[i] for i in prime_vars)
    top = g.total_degree()
    for d in range(top + 1):
        for alpha in _indices_of_order(d, g, q):
            counter.tick()
            image = _apply(alpha, g)
            if image and not P.contains(image):
                return d
    return None


def theta_at_prime(I, P, e, colon=None):
    """Theta_e(I S_P) = max{n : I^[q] : I is inside P^<n, q>}, or NOT_FPURE when S_P/I S_P is not F-pure."""
    ring = I.ring
    q = ring.p ** e
    if not ideal_contains(P, I):
        raise PreconditionError(f"the ideal is not contained in the prime {P}")
    colon = fedder_colon(I, e) if colon is None else colon
    counter = _OperatorCounter()
    prime_vars = _variables_of_monomial_prime(P)
    best = None
    for g in colon.generators:
        h = _order_outside(g, P, q, counter, prime_vars)
        if h is not None and (best is None or h < best):
            best = h
            if best == 0:
                break
    logger.debug(f"theta at {P} level {e}: {best} after {counter.used} operator applications")
    return NOT_FPURE if best is None else best


def _image_generators(colon, d, q, counter):
    for g in colon.generators:
        for alpha in _indices_of_order(d, g, q):
            counter.tick()
            image = _apply(alpha, g)
            if image:
                yield image


def global_fedder(I, e):
    """Global Fedder criterion: S/I is F-pure iff the operator images of I^[q] : I generate S."""
    ring = I.ring
    q = ring.p ** e
    colon = fedder_colon(I, e)
    counter = _OperatorCounter()
    images = []
    for g in colon.generators:
        top = g.total_degree()
        for d in range(top + 1):
            for alpha in _indices_of_order(d, g, q):
                counter.tick()
                image = _apply(alpha, g)
                if not image:
                    continue
                if image.is_constant():
                    return True
                images.append(image)
    if all(h.is_homogeneous() for h in images):
        # nonconstant homogeneous images all lie in m
        return False
    return is_unit_ideal(IdealHandle(ring, images))


def theta_global(I, e):
    """Largest n such that the images of I^[q] : I under operators of order <= n-1 generate a proper ideal."""
    ring = I.ring
    q = ring.p ** e
    if I.is_zero():
        return 0
    colon = fedder_colon(I, e)
    counter = _OperatorCounter()
    top = max(g.total_degree() for g in colon.generators)
    images = []
    homogeneous = True
    for d in range(top + 1):
        fresh = list(_image_generators(colon, d, q, counter))
        if any(h.is_constant() for h in fresh):
            return d
        images.extend(fresh)
        homogeneous = homogeneous and all(h.is_homogeneous() for h in fresh)
        if not homogeneous and is_unit_ideal(IdealHandle(ring, images)):
            return d
    return NOT_FPURE
