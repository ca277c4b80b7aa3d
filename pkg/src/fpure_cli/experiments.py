"""
Drivers that test structural statements on concrete instances: stratification
over monomial primes, hyperplane sections, high-order perturbations and
tensor products over disjoint variable blocks.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .diffops import theta_at_prime
from .errors import PreconditionError
from .frobenius import NOT_FPURE, fedder_colon
from .groebner import IdealHandle, ideal_sum
from .invariants import render_interval, theta_local
from .poly import RingContext, embed, substitute_one

logger = logging.getLogger(__name__)

MONOMIAL_PRIME_NOTE = "only monomial primes are examined"


@dataclass
class StratumRecord:
    """Invariants of the localization at one monomial prime P."""

    prime_generators: tuple
    height_P: int
    dim_S_P: int
    e: int
    q: int
    theta_P: object
    dfpt_interval_P: Optional[tuple] = None
    mfpt_interval_P: Optional[tuple] = None
    minimal_presentation: bool = False

    @property
    def dim_R_P(self):
        return self.dim_S_P - self.height_P

    def to_dict(self):
        return {
            "prime": list(self.prime_generators),
            "height": self.height_P,
            "dimS_P": self.dim_S_P,
            "dimR_P": self.dim_R_P,
            "e": self.e,
            "q": self.q,
            "theta": str(self.theta_P) if self.theta_P is NOT_FPURE else self.theta_P,
            "dfpt": render_interval(self.dfpt_interval_P),
            "mfpt": render_interval(self.mfpt_interval_P),
            "minimal_presentation": self.minimal_presentation,
            "formula": "Theta_e(I S_P)/q - ht <= dfpt(R_P) <= (Theta_e(I S_P)+|P|)/q - ht",
            "note": MONOMIAL_PRIME_NOTE,
        }


@dataclass
class Verdict:
    """Outcome of one structural check; `status` is pass, fail or precondition."""

    check: str
    e: int
    q: int
    status: str
    values: dict = field(default_factory=dict)
    message: str = ""

    @property
    def passed(self):
        return self.status == "pass"

    def to_dict(self):
        values = {k: (str(v) if v is NOT_FPURE else v) for k, v in self.values.items()}
        return {
            "check": self.check,
            "e": self.e,
            "q": self.q,
            "status": self.status,
            "values": values,
            "message": self.message,
        }


# -- monomial ideals -------------------------------------------------------


def _supports(I):
    if not I.is_monomial():
        raise PreconditionError("expected an ideal generated by monomials")
    return [frozenset(i for i, x in enumerate(g.LM) if x) for g in I.groebner_basis()]


def _covers(supports, chosen):
    pending = [s for s in supports if not (s & chosen)]
    if not pending:
        yield chosen
        return
    # branch on the variables of the smallest uncovered support
    target = min(pending, key=len)
    for v in sorted(target):
        yield from _covers(pending, chosen | {v})


def monomial_minimal_primes(I):
    """Minimal primes of a monomial ideal, as tuples of variable names."""
    supports = _supports(I)
    if any(not s for s in supports):
        return []
    covers = set(_covers(supports, frozenset()))
    minimal = [c for c in covers if not any(other < c for other in covers)]
    names = I.ring.variables
    minimal.sort(key=lambda c: (len(c), sorted(c)))
    return [tuple(names[i] for i in sorted(c)) for c in minimal]


def monomial_primes_containing(I):
    """Every monomial prime containing some minimal prime of I, smallest first."""
    names = I.ring.variables
    minimal = [set(c) for c in monomial_minimal_primes(I)]
    found = []
    for size in range(len(names) + 1):
        for subset in itertools.combinations(names, size):
            if any(m <= set(subset) for m in minimal):
                found.append(subset)
    return found


def localize_ideal(I, names):
    """I S_P for the monomial prime P on `names`: the other variables become 1."""
    sub = I.ring.subring(names)
    return IdealHandle(sub, [substitute_one(g, names, sub) for g in I.generators])


def stratify_monomial(I, e):
    """StratumRecords for all monomial primes containing a squarefree monomial ideal I."""
    if not I.is_monomial():
        raise PreconditionError("stratification needs a monomial ideal")
    if any(max(g.LM) > 1 for g in I.groebner_basis()):
        raise PreconditionError("not radical; F-purity fails")
    ring = I.ring
    q = ring.p ** e
    minimal = [set(c) for c in monomial_minimal_primes(I)]
    colon = fedder_colon(I, e)
    records = []
    for names in monomial_primes_containing(I):
        P = IdealHandle.of_variables(ring, names)
        height = min(len(m) for m in minimal if m <= set(names))
        size = len(names)
        theta = theta_at_prime(I, P, e, colon=colon)
        local = localize_ideal(I, names) if names else None
        minimal_presentation = local is not None and all(g.min_degree() >= 2 for g in local.groebner_basis())
        if theta is NOT_FPURE:
            dfpt = mfpt = None
        else:
            lo = max(Fraction(theta, q) - height, Fraction(0))
            hi = min(Fraction(theta + size, q) - height, Fraction(size - height))
            dfpt = (lo, hi)
            mfpt = (Fraction(theta, q), Fraction(theta + size, q))
        records.append(StratumRecord(tuple(names), height, size, e, q, theta, dfpt, mfpt, minimal_presentation))
    logger.info(f"Stratified {len(records)} monomial primes at level {e} ({MONOMIAL_PRIME_NOTE})")
    return records


def semicontinuity_violations(records):
    """Pairs P ⊆ Q whose thetas decrease, which upper semicontinuity forbids."""
    bad = []
    for a, b in itertools.permutations(records, 2):
        if set(a.prime_generators) < set(b.prime_generators):
            if a.theta_P is NOT_FPURE or b.theta_P is NOT_FPURE:
                continue
            if a.theta_P > b.theta_P:
                bad.append((a.prime_generators, b.prime_generators))
    return bad


# -- structural checks -------------------------------------------------------


def hyperplane_check(I, f, e):
    """Theta_e(I + (f)) >= Theta_e(I) + (q-1) ord(f) for Gorenstein S/I and a nonzerodivisor f."""
    ring = I.ring
    q = ring.p ** e
    order = f.min_degree()
    theta_I = theta_local(I, e)
    theta_J = theta_local(ideal_sum(I, IdealHandle(ring, [f])), e)
    values = {"theta_I": theta_I, "theta_J": theta_J, "ord_f": order}
    if theta_I is NOT_FPURE or theta_J is NOT_FPURE:
        return Verdict("hyperplane", e, q, "precondition", values, "S/I or S/(I+f) is not F-pure")
    bound = theta_I + (q - 1) * order
    values["bound"] = bound
    values["equality"] = theta_J == bound
    status = "pass" if theta_J >= bound else "fail"
    if status == "fail":
        logger.warning(f"Hyperplane inequality fails at e={e}: {theta_J} < {bound}")
    return Verdict("hyperplane", e, q, status, values)


def _in_high_order_part(h, q):
    n = h.ring.n
    top = n * (q - 1) + 1
    return all(max(e) >= q or sum(e) >= top for e in h.terms)


def perturbation_check(I, f_list, h_list, e):
    """Theta_e(I + (f_i)) = Theta_e(I + (f_i + h_i)) when every h_i lies in m^[q] + m^(n(q-1)+1)."""
    ring = I.ring
    q = ring.p ** e
    if len(f_list) != len(h_list):
        raise PreconditionError("perturbation needs one h for every f")
    for h in h_list:
        if not _in_high_order_part(h, q):
            return Verdict("perturbation", e, q, "precondition", {"h": str(h)},
                           f"{h} is not inside m^[q] + m^(n(q-1)+1)")
    J = ideal_sum(I, IdealHandle(ring, list(f_list)))
    J_h = ideal_sum(I, IdealHandle(ring, [f + h for f, h in zip(f_list, h_list)]))
    before, after = theta_local(J, e), theta_local(J_h, e)
    status = "pass" if before == after else "fail"
    return Verdict("perturbation", e, q, status, {"theta": before, "theta_perturbed": after})


def tensor_check(I, J, e):
    """Theta_e of I + J over the joined variables equals Theta_e(I) + Theta_e(J)."""
    left, right = I.ring, J.ring
    if set(left.variables) & set(right.variables):
        raise PreconditionError("tensor_check needs disjoint variable blocks")
    if left.p != right.p:
        raise PreconditionError("tensor_check needs a common characteristic")
    joined = RingContext(left.field, left.variables + right.variables, left.order)
    total = IdealHandle(joined, [embed(g, joined) for g in I.generators + J.generators])
    q = left.p ** e
    theta_I, theta_J, theta_total = theta_local(I, e), theta_local(J, e), theta_local(total, e)
    values = {"theta_I": theta_I, "theta_J": theta_J, "theta_joined": theta_total}
    if NOT_FPURE in (theta_I, theta_J):
        return Verdict("tensor", e, q, "precondition", values, "a factor is not F-pure")
    status = "pass" if theta_total == theta_I + theta_J else "fail"
    return Verdict("tensor", e, q, status, values)
