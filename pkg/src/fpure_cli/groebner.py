"""
Buchberger's algorithm and the ideal operations built on it.

Pair handling follows the usual structure: normal selection (least lcm
first), Gebauer-Moeller pair elimination on update, then minimalize and
interreduce to reach the reduced basis. Ideals generated by monomials skip
Buchberger entirely.
"""
import heapq
import itertools
import logging
import math
import threading
from functools import lru_cache

from . import config
from .errors import BudgetExhaustedError, EmptyVarietyError, InternalError, PreconditionError
from .poly import (
    Polynomial,
    RingContext,
    embed,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
    monomial_quotient,
)

logger = logging.getLogger(__name__)


class IdealHandle:
    """An ideal given by generators, with its reduced Groebner basis computed once and cached."""

    def __init__(self, ring, generators=()):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring != ring:
                g = embed(g, ring)
            if g:
                gens.append(g)
        self.generators = tuple(gens)
        self._gb = None
        self._lock = threading.Lock()

    @classmethod
    def zero(cls, ring):
        return cls(ring, ())

    @classmethod
    def unit(cls, ring):
        return cls(ring, (ring.one(),))

    @classmethod
    def maximal(cls, ring):
        """The homogeneous maximal ideal m = (x_1, ..., x_n)."""
        return cls(ring, ring.gens())

    @classmethod
    def of_variables(cls, ring, names):
        return cls(ring, [ring.var(v) for v in names])

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def groebner_basis(self):
        if self._gb is None:
            with self._lock:
                if self._gb is None:
                    self._gb = _compute_reduced_basis(self.ring, self.generators)
        return list(self._gb)

    def is_zero(self):
        return not self.generators

    def is_monomial(self):
        return all(g.is_monomial() for g in self.generators)

    def is_homogeneous(self):
        return all(g.is_homogeneous() for g in self.generators)

    def contains(self, f):
        return not normal_form(f, self)

    def __eq__(self, other):
        if not isinstance(other, IdealHandle):
            return NotImplemented
        return self.ring == other.ring and self.groebner_basis() == other.groebner_basis()

    def __hash__(self):
        return hash((self.ring, tuple(self.groebner_basis())))

    def __len__(self):
        return len(self.generators)

    def __str__(self):
        if not self.generators:
            return "(0)"
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    def __repr__(self):
        return f"IdealHandle{self}"


# -- monomial ideals ---------------------------------------------------------


def minimalize_monomials(monomials):
    """Minimal generators of the monomial ideal generated by `monomials` (sorted by total degree)."""
    result = []
    for m in sorted(set(monomials), key=lambda e: (sum(e), e)):
        if not any(monomial_divides(g, m) for g in result):
            result.append(m)
    return result


def _monomial_basis(ring, generators):
    key = ring.key
    minimal = minimalize_monomials(g.LM for g in generators)
    return [Polynomial(ring, {m: 1}, trusted=True) for m in sorted(minimal, key=key)]


# -- division ------------------------------------------------------------------


def _remainder(terms, basis, lms, ring):
    """Full remainder of `terms` on division by the monic polynomials `basis`."""
    key = ring.key
    p = ring.p
    rest = dict(terms)
    heap = [(tuple(-x for x in key(m)), m) for m in rest]
    heapq.heapify(heap)
    remainder = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = rest.pop(m, None)
        if c is None:
            continue
        for g, lm in zip(basis, lms):
            if monomial_divides(lm, m):
                shift = monomial_quotient(m, lm)
                for e, v in g.terms.items():
                    if e == lm:
                        continue
                    t = monomial_mul(e, shift)
                    old = rest.get(t)
                    s = ((old or 0) - c * v) % p
                    if s:
                        rest[t] = s
                        if old is None:
                            heapq.heappush(heap, (tuple(-x for x in key(t)), t))
                    elif old is not None:
                        del rest[t]
                break
        else:
            remainder[m] = c
    return remainder


def reduce_polynomial(f, basis):
    """Remainder of f modulo a list of polynomials (made monic here)."""
    monic = [g.monic() for g in basis if g]
    terms = _remainder(f.terms, monic, [g.LM for g in monic], f.ring)
    return Polynomial(f.ring, terms, trusted=True)


def spoly(f, g):
    """S-polynomial of monic f and g."""
    lcm = monomial_lcm(f.LM, g.LM)
    return f.mul_term(monomial_quotient(lcm, f.LM)) - g.mul_term(monomial_quotient(lcm, g.LM))


# -- Buchberger ----------------------------------------------------------------


def _update(G, lmG, pairs, heap, f, key):
    """Add f to the basis; drop and create pairs with the Gebauer-Moeller criteria."""
    lmf = f.LM
    k = len(G)
    for (i, j) in list(pairs):
        L = monomial_lcm(lmG[i], lmG[j])
        if (monomial_divides(lmf, L)
                and L != monomial_lcm(lmG[i], lmf)
                and L != monomial_lcm(lmG[j], lmf)):
            pairs.discard((i, j))
    lcm_groups = {}
    for i in range(k):
        lcm_groups.setdefault(monomial_lcm(lmG[i], lmf), []).append(i)
    kept = []
    for L in sorted(lcm_groups, key=key):
        if all(not monomial_divides(M, L) for M in kept):
            kept.append(L)
    for L in kept:
        group = lcm_groups[L]
        # coprime leading monomials: the pair reduces to zero
        if any(L == monomial_mul(lmG[i], lmf) for i in group):
            continue
        pair = (min(group), k)
        pairs.add(pair)
        heapq.heappush(heap, (key(L), pair))
    G.append(f)
    lmG.append(lmf)


def buchberger(ring, generators, budget=None):
    """A Groebner basis (not yet reduced) of the given nonzero polynomials."""
    budget = config.PAIR_BUDGET if budget is None else budget
    key = ring.key
    G, lmG = [], []
    pairs, heap = set(), []
    for f in sorted(generators, key=lambda g: key(g.LM)):
        r = Polynomial(ring, _remainder(f.terms, G, lmG, ring), trusted=True) if G else f
        if r:
            _update(G, lmG, pairs, heap, r.monic(), key)
    processed = 0
    while heap:
        _, pair = heapq.heappop(heap)
        if pair not in pairs:
            continue
        pairs.discard(pair)
        processed += 1
        if processed > budget:
            logger.warning(f"Buchberger stopped after {budget} pairs with {len(G)} basis elements")
            raise BudgetExhaustedError()
        i, j = pair
        s = spoly(G[i], G[j])
        r = _remainder(s.terms, G, lmG, ring)
        if r:
            r = Polynomial(ring, r, trusted=True).monic()
            if r.is_constant():
                logger.debug("Basis reached the unit ideal")
                return [ring.one()]
            _update(G, lmG, pairs, heap, r, key)
    logger.debug(f"Buchberger processed {processed} pairs, basis size {len(G)}")
    return G


def minimalize(G):
    """A minimal Groebner basis from an arbitrary one."""
    if not G:
        return []
    key = G[0].ring.key
    Gmin = []
    for f in sorted(G, key=lambda h: key(h.LM)):
        if all(not monomial_divides(g.LM, f.LM) for g in Gmin):
            Gmin.append(f)
    return Gmin


def interreduce(G):
    """The reduced Groebner basis from a minimal one."""
    Gred = []
    for i, g in enumerate(G):
        others = G[:i] + G[i + 1:]
        r = _remainder(g.terms, others, [h.LM for h in others], g.ring)
        Gred.append(Polynomial(g.ring, r, trusted=True).monic())
    return Gred


def _compute_reduced_basis(ring, generators):
    if not generators:
        return []
    if any(g.is_constant() for g in generators):
        return [ring.one()]
    if all(g.is_monomial() for g in generators):
        return _monomial_basis(ring, generators)
    G = interreduce(minimalize(buchberger(ring, generators)))
    G.sort(key=lambda g: ring.key(g.LM))
    if config.CHECK_BUCHBERGER_CRITERION and not verify_groebner_basis(G):
        raise InternalError("computed basis fails Buchberger's criterion")
    return G


def verify_groebner_basis(G):
    """Buchberger's criterion: every S-polynomial reduces to zero modulo G."""
    if not G:
        return True
    ring = G[0].ring
    monic = [g.monic() for g in G]
    lms = [g.LM for g in monic]
    for i, j in itertools.combinations(range(len(monic)), 2):
        if _remainder(spoly(monic[i], monic[j]).terms, monic, lms, ring):
            return False
    return True


# -- ideal operations --------------------------------------------------------


def groebner_basis(I):
    return I.groebner_basis()


def normal_form(f, I):
    """Remainder of f on division by the reduced basis of I; zero iff f lies in I."""
    if f.ring != I.ring:
        f = embed(f, I.ring)
    G = I.groebner_basis()
    if not G:
        return f
    if G[0].is_constant():
        return I.ring.zero()
    if I.is_monomial():
        lms = [g.LM for g in G]
        kept = {e: c for e, c in f.terms.items() if not any(monomial_divides(m, e) for m in lms)}
        return Polynomial(f.ring, kept, trusted=True)
    return Polynomial(f.ring, _remainder(f.terms, G, [g.LM for g in G], I.ring), trusted=True)


def is_unit_ideal(I):
    G = I.groebner_basis()
    return len(G) == 1 and G[0].is_constant()


def ideal_sum(I, J):
    return IdealHandle(I.ring, I.generators + J.generators)


def ideal_product(I, J):
    return IdealHandle(I.ring, [f * g for f in I.generators for g in J.generators])


def ideal_contains(I, J):
    """True when J is a subset of I."""
    return all(I.contains(g) for g in J.generators)


def ideals_equal(I, J):
    return ideal_contains(I, J) and ideal_contains(J, I)


def _tag_name(ring):
    name = "t"
    while name in ring.variables:
        name += "_"
    return name


def ideal_intersection(I, J):
    """I ∩ J, by eliminating t from t*I + (1-t)*J."""
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return IdealHandle.zero(ring)
    if is_unit_ideal(I):
        return J
    if is_unit_ideal(J):
        return I
    if I.is_monomial() and J.is_monomial():
        gens = minimalize_monomials(
            monomial_lcm(f.LM, g.LM) for f in I.groebner_basis() for g in J.groebner_basis()
        )
        return IdealHandle(ring, [Polynomial(ring, {m: 1}, trusted=True) for m in gens])
    tagged = RingContext(ring.field, (_tag_name(ring),) + ring.variables, "degrevlex", block=1)
    t = tagged.var(0)
    one_minus_t = tagged.one() - t
    gens = [t * embed(f, tagged) for f in I.generators]
    gens += [one_minus_t * embed(g, tagged) for g in J.generators]
    basis = interreduce(minimalize(buchberger(tagged, gens)))
    kept = [g for g in basis if all(e[0] == 0 for e in g.terms)]
    result = [Polynomial(ring, {e[1:]: c for e, c in g.terms.items()}, trusted=True) for g in kept]
    logger.debug(f"Intersection kept {len(result)} of {len(basis)} tagged basis elements")
    return IdealHandle(ring, result)


def _pure_power_bounds(lms, n):
    """Smallest a_i with x_i^a_i among the monomials, or None when some variable has none."""
    bounds = []
    for i in range(n):
        powers = [m[i] for m in lms if m[i] and not any(x for j, x in enumerate(m) if j != i)]
        if not powers:
            return None
        bounds.append(min(powers))
    return bounds


def _reduced_echelon(rows, ring, pivots):
    """Add `rows` (dicts) to the fully reduced echelon form `pivots` (leading monomial -> monic row)."""
    key = ring.key
    p = ring.p
    for row in rows:
        row = dict(row)
        for lm in [m for m in row if m in pivots]:
            c = row.get(lm)
            if not c:
                continue
            for m, v in pivots[lm].items():
                s = (row.get(m, 0) - c * v) % p
                if s:
                    row[m] = s
                else:
                    row.pop(m, None)
        if not row:
            continue
        lm = max(row, key=key)
        inv = pow(row[lm], p - 2, p)
        row = {m: v * inv % p for m, v in row.items()}
        for other in pivots.values():
            c = other.get(lm)
            if c:
                for m, v in row.items():
                    s = (other.get(m, 0) - c * v) % p
                    if s:
                        other[m] = s
                    else:
                        other.pop(m, None)
        pivots[lm] = row
    return pivots


def _block_kernel(block, gens, standard, p):
    """Combinations of the monomials in `block` whose products with every generator vanish mod the monomial ideal."""
    echelon = {}
    kernel = []
    for mu in block:
        vec = {}
        for i, g in enumerate(gens):
            for e, c in g.terms.items():
                m = monomial_mul(e, mu)
                if m in standard:
                    k = (i, m)
                    s = (vec.get(k, 0) + c) % p
                    if s:
                        vec[k] = s
                    else:
                        vec.pop(k, None)
        combo = {mu: 1}
        while vec:
            pivot = max(vec)
            if pivot not in echelon:
                inv = pow(vec[pivot], p - 2, p)
                echelon[pivot] = ({k: v * inv % p for k, v in vec.items()}, {k: v * inv % p for k, v in combo.items()})
                break
            evec, ecombo = echelon[pivot]
            c = vec[pivot]
            for k, v in evec.items():
                s = (vec.get(k, 0) - c * v) % p
                if s:
                    vec[k] = s
                else:
                    vec.pop(k, None)
            for k, v in ecombo.items():
                s = (combo.get(k, 0) - c * v) % p
                if s:
                    combo[k] = s
                else:
                    combo.pop(k, None)
        else:
            kernel.append(combo)
    return kernel


def _colon_of_artinian_monomial(I, J):
    """(I : J) for a monomial ideal I of finite colength, by linear algebra on S/I.

    Returns None when S/I is too large for this route. The result has its
    reduced Groebner basis filled in.
    """
    ring = I.ring
    lms = [g.LM for g in I.groebner_basis()]
    bounds = _pure_power_bounds(lms, ring.n)
    if bounds is None:
        return None
    size = 1
    for b in bounds:
        size *= b
    if size > config.LINEAR_COLON_CAP:
        return None
    standard = {
        e for e in itertools.product(*(range(b) for b in bounds))
        if not any(monomial_divides(m, e) for m in lms)
    }
    gens = list(J.generators)
    if all(g.is_homogeneous() for g in gens):
        by_degree = {}
        for e in standard:
            by_degree.setdefault(sum(e), []).append(e)
        blocks = [sorted(by_degree[d]) for d in sorted(by_degree)]
    else:
        blocks = [sorted(standard)]
    pivots = {}
    for block in blocks:
        _reduced_echelon(_block_kernel(block, gens, standard, ring.p), ring, pivots)
    leading = minimalize_monomials(lms + list(pivots))
    basis = [
        Polynomial(ring, pivots[m] if m in pivots else {m: 1}, trusted=True)
        for m in sorted(leading, key=ring.key)
    ]
    logger.debug(f"Linear colon over {len(standard)} standard monomials gave {len(basis)} basis elements")
    result = IdealHandle(ring, basis)
    result._gb = list(basis)
    return result


def colon_by_element(I, f):
    """(I : f) = {g : g*f in I}, as (I ∩ (f)) / f."""
    ring = I.ring
    if not f:
        raise PreconditionError("colon by the zero polynomial")
    if f.is_constant() or I.is_zero():
        return I
    if is_unit_ideal(I):
        return I
    if I.is_monomial() and not f.is_monomial():
        fast = _colon_of_artinian_monomial(I, IdealHandle(ring, [f]))
        if fast is not None:
            return fast
    if I.is_monomial() and f.is_monomial():
        fm = f.LM
        gens = [
            Polynomial(ring, {tuple(max(a - b, 0) for a, b in zip(g.LM, fm)): 1}, trusted=True)
            for g in I.groebner_basis()
        ]
        return IdealHandle(ring, gens)
    meet = ideal_intersection(I, IdealHandle(ring, [f]))
    quotients = []
    for g in meet.generators:
        h = g.exact_divide(f)
        if h is None:
            raise InternalError(f"intersection generator {g} is not divisible by {f}")
        quotients.append(h)
    return IdealHandle(ring, quotients)


def colon_by_ideal(I, J):
    """(I : J) as the intersection of the colons by each generator of J."""
    if J.is_zero():
        raise PreconditionError("colon by the zero ideal")
    if is_unit_ideal(J):
        return I
    if I.is_monomial() and not J.is_monomial() and not is_unit_ideal(I):
        fast = _colon_of_artinian_monomial(I, J)
        if fast is not None:
            return fast
    result = None
    for g in J.generators:
        part = colon_by_element(I, g)
        # S ∩ X = X: unit parts never shrink the intersection
        if is_unit_ideal(part):
            continue
        result = part if result is None else ideal_intersection(result, part)
    return IdealHandle.unit(I.ring) if result is None else result


def krull_dimension(I):
    """dim S/I: the largest variable set containing the support of no leading monomial."""
    G = I.groebner_basis()
    n = I.ring.n
    if G and G[0].is_constant():
        raise EmptyVarietyError("empty variety: the ideal is the unit ideal")
    masks = set()
    for g in G:
        mask = 0
        for i, x in enumerate(g.LM):
            if x:
                mask |= 1 << i
        masks.add(mask)
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            U = 0
            for i in subset:
                U |= 1 << i
            if all(m & ~U for m in masks):
                return size
    return 0


@lru_cache(maxsize=1 << 14)
def _staircase_count(gens, n):
    if any(not any(g) for g in gens):
        return 0
    if n == 0:
        return 1
    bound = min(g[-1] for g in gens if not any(g[:-1]))
    total = 0
    for k in range(bound):
        slice_gens = minimalize_monomials(g[:-1] for g in gens if g[-1] <= k)
        total += _staircase_count(tuple(sorted(slice_gens)), n - 1)
    return total


def colength(I):
    """dim_F(S/I) as the number of standard monomials; math.inf when infinite."""
    G = I.groebner_basis()
    n = I.ring.n
    if G and G[0].is_constant():
        return 0
    lms = [g.LM for g in G]
    for i in range(n):
        if not any(m[i] and not any(x for j, x in enumerate(m) if j != i) for m in lms):
            return math.inf
    return _staircase_count(tuple(sorted(minimalize_monomials(lms))), n)


def leading_monomial_ideal(I):
    """The initial ideal in(I) as a monomial IdealHandle."""
    ring = I.ring
    return IdealHandle(ring, [Polynomial(ring, {g.LM: 1}, trusted=True) for g in I.groebner_basis()])
