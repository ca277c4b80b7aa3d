"""
Arithmetic in the prime field F_p and characteristic-p binomial coefficients.

Polynomial code stores coefficients as plain residues in [0, p); the
FieldElem wrapper is the public, self-checking face of the same arithmetic.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache

from . import config
from .errors import FieldDivisionError, FieldError

logger = logging.getLogger(__name__)


def is_prime(n):
    """Trial division; the primes used here are small."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p with p < 2^31."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise FieldError(f"characteristic must be an integer, got {self.p!r}")
        if self.p < 2 or self.p >= config.MAX_PRIME:
            raise FieldError(f"characteristic {self.p} outside [2, 2^31)")
        if not is_prime(self.p):
            raise FieldError(f"characteristic {self.p} is not prime")

    def __call__(self, value):
        return FieldElem(self, value % self.p)

    def elements(self):
        return [FieldElem(self, r) for r in range(self.p)]

    def inverse_residue(self, residue):
        residue %= self.p
        if residue == 0:
            raise FieldDivisionError()
        return pow(residue, self.p - 2, self.p)

    def __str__(self):
        return f"F_{self.p}"


@lru_cache(maxsize=None)
def get_field(p):
    """Shared PrimeField instance for p (primality is checked once)."""
    return PrimeField(p)


@dataclass(frozen=True)
class FieldElem:
    """A residue of F_p, always reduced into [0, p)."""

    field: PrimeField
    residue: int

    def __post_init__(self):
        if not 0 <= self.residue < self.field.p:
            object.__setattr__(self, "residue", self.residue % self.field.p)

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field.p != self.field.p:
                raise FieldError(f"cannot mix {self.field} and {other.field}")
            return other.residue
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return FieldElem(self.field, (self.residue + r) % self.field.p)

    __radd__ = __add__

    def __sub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return FieldElem(self.field, (self.residue - r) % self.field.p)

    def __rsub__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return FieldElem(self.field, (r - self.residue) % self.field.p)

    def __mul__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return FieldElem(self.field, (self.residue * r) % self.field.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        r = self._coerce(other)
        if r is NotImplemented:
            return r
        return self * self.field.inverse_residue(r)

    def __neg__(self):
        return FieldElem(self.field, (-self.residue) % self.field.p)

    def __pow__(self, k):
        if k < 0:
            return ff_inv(self) ** (-k)
        return FieldElem(self.field, pow(self.residue, k, self.field.p))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field.p == other.field.p and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.residue))

    def __bool__(self):
        return self.residue != 0

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"{self.residue} mod {self.field.p}"


def ff_inv(a):
    """Multiplicative inverse of a nonzero element of F_p."""
    return FieldElem(a.field, a.field.inverse_residue(a.residue))


@lru_cache(maxsize=1 << 16)
def binomial_residue(n, k, p):
    """C(n, k) mod p as a plain int, digit by digit in base p (Lucas)."""
    if k < 0 or n < 0 or k > n:
        return 0
    result = 1
    while k:
        n_digit, k_digit = n % p, k % p
        if k_digit > n_digit:
            return 0
        result = result * _small_binomial(n_digit, k_digit, p) % p
        n //= p
        k //= p
    return result


@lru_cache(maxsize=1 << 16)
def _small_binomial(n, k, p):
    # n < p, so n!/(k!(n-k)!) has no factor p
    num = den = 1
    for i in range(k):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * pow(den, p - 2, p) % p


def lucas_binomial(n, k, p):
    """C(n, k) in F_p; zero when some base-p digit of k exceeds that of n."""
    return FieldElem(get_field(p), binomial_residue(n, k, p))
