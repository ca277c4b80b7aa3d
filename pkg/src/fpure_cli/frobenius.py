"""
Frobenius bracket powers, the Fedder colon I^[q] : I and F-purity at the origin.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import PreconditionError
from .groebner import IdealHandle, colon_by_ideal, ideal_sum, is_unit_ideal
from .poly import Polynomial, frobenius_image, min_degree_below_q, truncated_power

logger = logging.getLogger(__name__)


class Sentinel(enum.Enum):
    NOT_FPURE = "NOT_FPURE"

    def __str__(self):
        return self.value


NOT_FPURE = Sentinel.NOT_FPURE


@dataclass
class FedderWitness:
    """Outcome of Fedder's criterion at the origin for one level e."""

    e: int
    q: int
    colon_generators: list
    fpure: bool
    witness: Optional[Polynomial] = None
    witness_monomial: Optional[tuple] = None
    warnings: list = field(default_factory=list)
    colon_power: int = 1
    reduced: bool = False

    def _generator_text(self, g):
        if self.colon_power == 1:
            return str(g)
        return f"({g})^{self.colon_power}"

    def to_dict(self):
        monomial = None
        if self.witness_monomial is not None:
            exps, coeff = self.witness_monomial
            monomial = {
                "exponents": list(exps),
                "coefficient": coeff,
                "text": str(Polynomial(self.witness.ring, {exps: coeff}, trusted=True)),
            }
        return {
            "e": self.e,
            "q": self.q,
            "fpure": self.fpure,
            "colon_generators": [self._generator_text(g) for g in self.colon_generators],
            "witness": str(self.witness) if self.witness is not None else None,
            "witness_reduced": self.reduced,
            "witness_monomial": monomial,
            "formula": "R F-pure iff I^[q]:I not contained in m^[q]",
            "warnings": list(self.warnings),
        }


def bracket_power(I, e):
    """I^[p^e], generated by the Frobenius images of the generators of I."""
    return IdealHandle(I.ring, [frobenius_image(g, e) for g in I.generators])


def fedder_colon(I, e, generic=False):
    """I^[q] : I. A principal ideal (f) answers (f^(q-1)) unless `generic` is set."""
    ring = I.ring
    q = ring.p ** e
    if I.is_zero():
        return IdealHandle.unit(ring)
    if is_unit_ideal(I):
        raise PreconditionError("the Fedder colon needs a proper ideal")
    if len(I.generators) == 1 and not generic:
        f = I.generators[0]
        return IdealHandle(ring, [f ** (q - 1)])
    logger.debug(f"Computing I^[{q}] : I with {len(I.generators)} generators")
    return colon_by_ideal(bracket_power(I, e), I)


def check_origin_presentation(I):
    """Generators must vanish at the origin; returns warnings for generators outside m^2."""
    warnings = []
    for g in I.generators:
        if g.min_degree() == 0:
            raise PreconditionError(f"generator {g} is a unit at the origin")
        if g.min_degree() < 2:
            warnings.append(f"generator {g} is not in m^2; the presentation is not minimal")
    for w in warnings:
        logger.warning(w)
    return warnings


def _monomial_below_q(g, q):
    """The least monomial (degree, then order) of g with every exponent < q, with its coefficient."""
    below = [(e, c) for e, c in g.terms.items() if max(e, default=0) < q]
    if not below:
        return None
    key = g.ring.key
    return min(below, key=lambda t: (sum(t[0]), key(t[0])))


def is_fpure_at_origin(I, e=1, generic=False):
    """Fedder's criterion: R is F-pure at the origin iff I^[q] : I is not inside m^[q]."""
    warnings = check_origin_presentation(I)
    q = I.ring.p ** e
    if len(I.generators) == 1 and not generic:
        # f^(q-1) outside m^[q] iff its truncation mod m^[q] is nonzero
        f = I.generators[0]
        power = truncated_power(f, q - 1, q)
        found = _monomial_below_q(power, q) if power else None
        if found is None:
            return FedderWitness(e, q, [f], False, None, None, warnings, colon_power=q - 1)
        return FedderWitness(e, q, [f], True, power, found, warnings, colon_power=q - 1, reduced=True)
    colon = fedder_colon(I, e, generic=generic)
    for g in colon.generators:
        found = _monomial_below_q(g, q)
        if found is not None:
            return FedderWitness(e, q, list(colon.generators), True, g, found, warnings)
    return FedderWitness(e, q, list(colon.generators), False, None, None, warnings)


def hypersurface_theta(f, e):
    """Theta_e((f)) at the origin from the truncated power f^(q-1) mod m^[q]."""
    if not f:
        raise PreconditionError("hypersurface_theta needs a nonzero polynomial")
    if f.min_degree() == 0:
        raise PreconditionError(f"{f} does not vanish at the origin")
    q = f.ring.p ** e
    power = truncated_power(f, q - 1, q)
    if not power:
        return NOT_FPURE
    degree = min_degree_below_q(power, q)
    logger.debug(f"Truncated f^{q - 1} has {len(power)} terms, least degree {degree}")
    return NOT_FPURE if degree == math.inf else degree


def gorenstein_colon_shift(I, f, e):
    """(J^[q] : J) for J = I + (f), as f^(q-1) (I^[q] : I) + J^[q].

    Valid when S/I is Gorenstein and f is a nonzerodivisor on it; neither
    is checked here.
    """
    ring = I.ring
    q = ring.p ** e
    lift = f ** (q - 1)
    shifted = [lift * g for g in fedder_colon(I, e).generators]
    bracket = bracket_power(ideal_sum(I, IdealHandle(ring, [f])), e)
    return IdealHandle(ring, shifted + list(bracket.generators))
