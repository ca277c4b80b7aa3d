"""
Splitting ideals, Loewy lengths, Theta_e at the origin and certified
threshold intervals.

With q = p^e, n = dim S, Theta = Theta_e(I) and b = b(p^e) = n(q-1) - Theta,
every F-pure R = S/I satisfies

    fpt(R)  in [b/q, (b+n)/q]
    dfpt(R) in [Theta/q - ht(I), (Theta+n)/q - ht(I)]
    mfpt(R) in [Theta/q, (Theta+n)/q]          (when I lies in m^2)

All bounds are exact Fractions.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import config
from .diffops import theta_global
from .errors import BudgetExhaustedError, PreconditionError, PresentationError
from .frobenius import NOT_FPURE, bracket_power, check_origin_presentation, fedder_colon, hypersurface_theta
from .groebner import (
    IdealHandle,
    colength,
    colon_by_element,
    colon_by_ideal,
    is_unit_ideal,
    krull_dimension,
    normal_form,
)
from .poly import Polynomial, min_degree_below_q, truncated_power

logger = logging.getLogger(__name__)


def render_fraction(x):
    """Canonical "num/den" text for an exact rational."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def render_interval(interval):
    if interval is None:
        return None
    return [render_fraction(interval[0]), render_fraction(interval[1])]


FORMULAS = {
    "theta": "Theta_e = max{n : I^[q]:I in m^n + m^[q]}",
    "loewy": "loewy = n(q-1) + 1 - Theta_e",
    "b": "b(q) = loewy - 1",
    "fpt": "b/q <= fpt <= (b+n)/q",
    "dfpt": "Theta_e/q - ht <= dfpt <= (Theta_e+n)/q - ht",
    "mfpt": "Theta_e/q <= mfpt <= (Theta_e+n)/q",
}


@dataclass
class InvariantReport:
    """Per-level certificate: Theta_e, Loewy length, b(p^e) and the threshold intervals."""

    e: int
    q: int
    n: int
    fpure: bool
    theta: Optional[int] = None
    loewy: Optional[int] = None
    b_value: Optional[int] = None
    fpt_interval: Optional[tuple] = None
    dfpt_interval: Optional[tuple] = None
    mfpt_interval: Optional[tuple] = None
    height: Optional[int] = None
    dim_R: Optional[int] = None
    clamped: bool = False
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "e": self.e,
            "q": self.q,
            "n": self.n,
            "theta": self.theta,
            "loewy": self.loewy,
            "b": self.b_value,
            "fpt": render_interval(self.fpt_interval),
            "dfpt": render_interval(self.dfpt_interval),
            "mfpt": render_interval(self.mfpt_interval),
            "height": self.height,
            "dimR": self.dim_R,
            "clamped": self.clamped,
            "fpure": self.fpure,
            "formulas": dict(FORMULAS) if self.fpure else {},
            "warnings": list(self.warnings),
        }


@dataclass
class MainFormulaVerdict:
    e: int
    q: int
    n: int
    theta: object
    loewy: Optional[int]
    holds: bool

    def to_dict(self):
        return {
            "check": "main-formula",
            "e": self.e,
            "q": self.q,
            "theta": str(self.theta) if self.theta is NOT_FPURE else self.theta,
            "loewy": self.loewy,
            "expected": self.n * (self.q - 1) + 1,
            "holds": self.holds,
            "formula": "loewy(R/I_e(R)) + Theta_e = n(q-1) + 1",
        }


@dataclass
class SignatureEntry:
    e: int
    q: int
    colength: object
    value: Fraction
    finite: bool

    def to_dict(self):
        return {
            "e": self.e,
            "q": self.q,
            "colength": self.colength if self.finite else "inf",
            "value": render_fraction(self.value),
            "finite": self.finite,
            "formula": "colength(R/I_e(R)) / q^dim(R)",
        }


@dataclass
class GlobalDfptReport:
    e: int
    q: int
    n: int
    fpure: bool
    theta: Optional[int] = None
    height: Optional[int] = None
    dim_R: Optional[int] = None
    dfpt_interval: Optional[tuple] = None
    clamped: bool = False

    def to_dict(self):
        return {
            "e": self.e,
            "q": self.q,
            "theta": self.theta,
            "height": self.height,
            "dimR": self.dim_R,
            "dfpt": render_interval(self.dfpt_interval),
            "clamped": self.clamped,
            "fpure": self.fpure,
            "formula": "Theta_e(I)/q - ht(I) <= dfpt(X) <= (Theta_e(I)+n)/q - ht(I)",
        }


@dataclass
class PrincipalPullback:
    """m^[q] : g for one polynomial g, answering monomial membership from the terms of g.

    x^a g lies in m^[q] iff every term x^b of g has a_i + b_i >= q for some i.
    """

    g: Polynomial
    q: int

    @property
    def ring(self):
        return self.g.ring

    def contains_monomial(self, exps):
        q = self.q
        return all(any(a + b >= q for a, b in zip(exps, term)) for term in self.g.terms)


def principal_pullback(f, e):
    """m^[q] : f^(q-1), which only depends on f^(q-1) mod m^[q]."""
    q = f.ring.p ** e
    return PrincipalPullback(truncated_power(f, q - 1, q), q)


def splitting_ideal_pullback(I, e, colon=None):
    """m^[q] : (I^[q] : I), the preimage in S of the splitting ideal I_e(R)."""
    ring = I.ring
    max_bracket = bracket_power(IdealHandle.maximal(ring), e)
    if colon is None and len(I.generators) == 1:
        power = principal_pullback(I.generators[0], e).g
        if not power:
            return IdealHandle.unit(ring)
        return colon_by_element(max_bracket, power)
    colon = fedder_colon(I, e) if colon is None else colon
    return colon_by_ideal(max_bracket, colon)


def is_fsplit_at_level(I, e):
    """True when I_e(R) is a proper ideal of R."""
    if len(I.generators) == 1:
        return bool(principal_pullback(I.generators[0], e).g)
    return not is_unit_ideal(splitting_ideal_pullback(I, e))


def _monomials_of_degree(n, t, cap):
    """Exponent vectors of total degree t with every entry <= cap."""
    if n == 1:
        if t <= cap:
            yield (t,)
        return
    for a in range(min(t, cap), max(0, t - cap * (n - 1)) - 1, -1):
        for rest in _monomials_of_degree(n - 1, t - a, cap):
            yield (a,) + rest


def _contains_monomial(J, exps):
    if isinstance(J, PrincipalPullback):
        return J.contains_monomial(exps)
    return not normal_form(Polynomial(J.ring, {exps: 1}, trusted=True), J)


def _power_of_max_contained(J, t, q):
    """True when m^t lies in J, checking only monomials outside m^[q]."""
    ring = J.ring
    n = ring.n
    cap = q - 1 if q else t
    count = 0
    for exps in _monomials_of_degree(n, t, cap):
        count += 1
        if count > config.LOEWY_SCAN_CAP:
            raise BudgetExhaustedError()
        if not _contains_monomial(J, exps):
            return False
    return True


def loewy_length(J, q=None, bound=None):
    """Least t with m^t inside J, by binary search over [0, bound].

    With q given, J must contain m^[q]; bound defaults to n(q-1)+1.
    """
    ring = J.ring
    n = ring.n
    if q is not None:
        for i in range(n):
            exps = [0] * n
            exps[i] = q
            if not _contains_monomial(J, tuple(exps)):
                raise PreconditionError(f"the ideal does not contain m^[{q}]")
        bound = n * (q - 1) + 1 if bound is None else bound
    if bound is None:
        raise PreconditionError("loewy_length needs q or an explicit bound")
    if not _power_of_max_contained(J, bound, q):
        raise PreconditionError(f"m^{bound} is not inside the ideal; the ring is not F-pure or the bound is wrong")
    lo, hi = 0, bound
    while lo < hi:
        mid = (lo + hi) // 2
        if _power_of_max_contained(J, mid, q):
            hi = mid
        else:
            lo = mid + 1
    return lo


def theta_local(I, e, colon=None, generic=False):
    """Theta_e(I) at the origin: least degree of a colon monomial outside m^[q]."""
    check_origin_presentation(I)
    q = I.ring.p ** e
    if colon is None and len(I.generators) == 1 and not generic:
        return hypersurface_theta(I.generators[0], e)
    colon = fedder_colon(I, e, generic=generic) if colon is None else colon
    degree = min((min_degree_below_q(g, q) for g in colon.generators), default=math.inf)
    if degree == math.inf:
        return NOT_FPURE
    return degree


def main_formula_check(I, e, generic=False):
    """Compute loewy(R/I_e(R)) and Theta_e(I) independently and test their sum."""
    ring = I.ring
    n = ring.n
    q = ring.p ** e
    if len(I.generators) == 1 and not generic:
        check_origin_presentation(I)
        theta = hypersurface_theta(I.generators[0], e)
        if theta is NOT_FPURE:
            return MainFormulaVerdict(e, q, n, theta, None, False)
        pullback = principal_pullback(I.generators[0], e)
    else:
        colon = fedder_colon(I, e, generic=generic)
        theta = theta_local(I, e, colon=colon)
        if theta is NOT_FPURE:
            return MainFormulaVerdict(e, q, n, theta, None, False)
        pullback = splitting_ideal_pullback(I, e, colon=colon)
    loewy = loewy_length(pullback, q=q)
    holds = loewy + theta == n * (q - 1) + 1
    if not holds:
        logger.warning(f"Main formula fails at e={e}: loewy {loewy} + theta {theta} != {n * (q - 1) + 1}")
    return MainFormulaVerdict(e, q, n, theta, loewy, holds)


def height_of(I):
    """ht(I) = n - dim S/I."""
    return I.ring.n - krull_dimension(I)


def _clamp(interval, lo_bound, hi_bound):
    lo, hi = interval
    new = (max(lo, lo_bound), min(hi, hi_bound))
    return new, new != (lo, hi)


def fpt_bounds(I, e, require_minimal=False, theta=None):
    """InvariantReport for level e; a non-F-pure ring gives fpure=False and no numbers."""
    ring = I.ring
    n = ring.n
    q = ring.p ** e
    warnings = check_origin_presentation(I)
    if warnings and require_minimal:
        raise PresentationError("presentation not minimal")
    if theta is None:
        theta = theta_local(I, e)
    if theta is NOT_FPURE:
        logger.info(f"Level {e}: not F-pure at the origin")
        return InvariantReport(e=e, q=q, n=n, fpure=False, warnings=warnings)
    height = height_of(I)
    dim_R = n - height
    loewy = n * (q - 1) + 1 - theta
    b = loewy - 1
    fpt, fpt_clamped = _clamp((Fraction(b, q), Fraction(b + n, q)), Fraction(0), Fraction(dim_R))
    dfpt = (dim_R - fpt[1], dim_R - fpt[0])
    mfpt = None if warnings else (n - fpt[1], n - fpt[0])
    report = InvariantReport(
        e=e, q=q, n=n, fpure=True, theta=theta, loewy=loewy, b_value=b,
        fpt_interval=fpt, dfpt_interval=dfpt, mfpt_interval=mfpt,
        height=height, dim_R=dim_R, clamped=fpt_clamped, warnings=warnings,
    )
    logger.info(f"Level {e}: theta={theta}, dfpt in [{dfpt[0]}, {dfpt[1]}]")
    return report


def _generator_products(gens, target, budget_name, limit):
    """Largest t such that some t-fold product of `gens` is outside `target`; -1 when even t=0 fails."""
    ring = target.ring
    one = ring.one()
    if not normal_form(one, target):
        return -1
    level = {(): one}
    t = 0
    formed = 0
    while True:
        nxt = {}
        for word, value in level.items():
            start = word[-1] if word else 0
            for i in range(start, len(gens)):
                formed += 1
                if formed > limit:
                    logger.warning(f"{budget_name} exhausted after {limit} products")
                    raise BudgetExhaustedError()
                prod = normal_form(value * gens[i], target)
                if prod:
                    nxt[word + (i,)] = prod
        if not nxt:
            return t
        level = nxt
        t += 1


def _power_in(g, J, max_exponent):
    power = g
    for _ in range(max_exponent):
        if not normal_form(power, J):
            return True
        power = power * g
    return False


def nu_value(I, J, e):
    """nu_I^J(p^e) = max{t : I^t not inside J^[q]}."""
    if is_unit_ideal(J):
        raise PreconditionError("nu is undefined for the unit ideal J")
    for g in I.generators:
        if not _power_in(g, J, config.RADICAL_CHECK_EXPONENT):
            raise PreconditionError(f"generator {g} has no power in J up to {config.RADICAL_CHECK_EXPONENT}")
    target = bracket_power(J, e)
    gens = list(I.generators)
    if not gens:
        raise PreconditionError("nu is undefined for the zero ideal I")
    return _generator_products(gens, target, "nu product budget", config.NU_PRODUCT_BUDGET)


def b_value(I, A, e):
    """b_A(p^e) = max{t : A^t not inside I_e(R)}, or NOT_FPURE when I_e(R) = R."""
    pullback = splitting_ideal_pullback(I, e)
    if is_unit_ideal(pullback):
        return NOT_FPURE
    if A.is_zero():
        raise PreconditionError("b is undefined for the zero ideal")
    return _generator_products(list(A.generators), pullback, "b-value product budget", config.NU_PRODUCT_BUDGET)


def fsignature_estimate(I, e_max):
    """colength(S / I_e pullback) / q^dim(R) for e = 1..e_max."""
    ring = I.ring
    dim_R = krull_dimension(I)
    entries = []
    for e in range(1, e_max + 1):
        q = ring.p ** e
        length = colength(splitting_ideal_pullback(I, e))
        finite = length != math.inf
        value = Fraction(length, q ** dim_R) if finite else Fraction(0)
        if not finite:
            logger.warning(f"Level {e}: splitting ideal has infinite colength, reporting 0")
        entries.append(SignatureEntry(e, q, length, value, finite))
    return entries


def global_dfpt_bounds(I, e):
    """Bounds on dfpt(S/I) from the global Theta_e(I) and ht(I)."""
    ring = I.ring
    n = ring.n
    q = ring.p ** e
    theta = theta_global(I, e)
    if theta is NOT_FPURE:
        return GlobalDfptReport(e=e, q=q, n=n, fpure=False)
    height = height_of(I)
    dim_R = n - height
    raw = (Fraction(theta, q) - height, Fraction(theta + n, q) - height)
    interval, clamped = _clamp(raw, Fraction(0), Fraction(dim_R))
    return GlobalDfptReport(e=e, q=q, n=n, fpure=True, theta=theta, height=height,
                            dim_R=dim_R, dfpt_interval=interval, clamped=clamped)


def report_sequence(I, e_max):
    """InvariantReports for e = 1..e_max."""
    return [fpt_bounds(I, e) for e in range(1, e_max + 1)]


def nested(reports):
    """True when each dfpt interval lies inside the previous one."""
    live = [r for r in reports if r.fpure]
    for a, b in zip(live, live[1:]):
        if not (a.dfpt_interval[0] <= b.dfpt_interval[0] and b.dfpt_interval[1] <= a.dfpt_interval[1]):
            return False
    return True
