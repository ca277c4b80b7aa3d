"""
Builtin instance corpus and the property suites run by `fpure-cli check`.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache

from tqdm import tqdm

from .diffops import diff_power_member, global_fedder, theta_at_prime, theta_global
from .errors import JobSpecError
from .experiments import (
    hyperplane_check,
    monomial_primes_containing,
    perturbation_check,
    semicontinuity_violations,
    stratify_monomial,
    tensor_check,
)
from .frobenius import NOT_FPURE, is_fpure_at_origin
from .groebner import IdealHandle
from .invariants import main_formula_check, theta_local
from .parser import parse_poly
from .poly import Polynomial, RingContext, min_degree_below_q

logger = logging.getLogger(__name__)

QUADRIC = "x^2 - w^2*(y^2 + z^2)"
ELLIPTIC_CONE = "x^3 + y^3 + z^3"
STRATIFICATION_VARIABLES = ("x1", "x2", "x3", "x4", "x5", "y")
STRATIFICATION_GENERATORS = ("y*x3", "y*x1*x4", "y*x1*x5", "y*x2*x4", "y*x2*x5")


@dataclass
class CorpusInstance:
    name: str
    p: int
    variables: tuple
    generators: tuple
    kinds: frozenset = frozenset()
    levels: tuple = (1, 2)

    def ring(self):
        return RingContext.create(self.p, list(self.variables))

    def ideal(self):
        ring = self.ring()
        return IdealHandle(ring, [parse_poly(g, ring) for g in self.generators])


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: int = 0
    records: list = field(default_factory=list)

    def add(self, record, ok):
        self.checked += 1
        if not ok:
            self.failures += 1
        record = dict(record)
        record["ok"] = ok
        self.records.append(record)

    def to_dict(self):
        return {"suite": self.name, "checked": self.checked, "failures": self.failures, "records": self.records}


@lru_cache(maxsize=None)
def _squarefree_families(n):
    """Antichains of nonempty subsets of range(n), one per orbit of variable permutations."""
    subsets = [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]
    perms = list(itertools.permutations(range(n)))
    seen = set()
    families = []
    for mask in range(1 << len(subsets)):
        family = [s for i, s in enumerate(subsets) if mask >> i & 1]
        if any(a < b for a in family for b in family):
            continue
        canon = min(
            tuple(sorted(tuple(sorted(perm[i] for i in s)) for s in family))
            for perm in perms
        )
        if canon in seen:
            continue
        seen.add(canon)
        families.append(canon)
    families.sort(key=lambda fam: (len(fam), fam))
    return families


def builtin_corpus():
    """Squarefree monomial ideals in x,y,z,w up to symmetry at p = 2, 3, plus two hypersurfaces."""
    names = ("x", "y", "z", "w")
    corpus = []
    for p in (2, 3):
        for family in _squarefree_families(len(names)):
            gens = tuple("*".join(names[i] for i in s) for s in family)
            label = ",".join(gens) if gens else "0"
            corpus.append(CorpusInstance(
                f"({label}) p={p}", p, names, gens,
                frozenset({"monomial", "homogeneous"}),
            ))
    corpus.append(CorpusInstance(
        f"({QUADRIC}) p=3", 3, names, (QUADRIC,),
        frozenset({"hypersurface", "homogeneous", "gorenstein"}), (1, 2),
    ))
    corpus.append(CorpusInstance(
        f"({ELLIPTIC_CONE}) p=7", 7, ("x", "y", "z"), (ELLIPTIC_CONE,),
        frozenset({"hypersurface", "homogeneous", "gorenstein"}), (1, 2),
    ))
    return corpus


def _instance_levels(instance, e_max):
    return [e for e in instance.levels if e <= e_max]


def _progress(items, desc):
    return tqdm(items, desc=desc, unit="inst", leave=False)


# -- individual suites -------------------------------------------------------


def suite_main_formula(corpus, e_max):
    result = SuiteResult("main-formula")
    for inst in _progress(corpus, "main-formula"):
        I = inst.ideal()
        for e in _instance_levels(inst, e_max):
            verdict = main_formula_check(I, e)
            result.add({"instance": inst.name, **verdict.to_dict()}, verdict.holds)
    return result


def _random_polynomial(ring, rng, q):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        exps = tuple(rng.randint(0, 2 * q) for _ in range(ring.n))
        terms[exps] = rng.randint(1, ring.p - 1)
    return Polynomial(ring, terms)


def suite_diffpow_oracle(corpus=None, e_max=None, samples=200, seed=0):
    """diff_power_member at m against the direct test f in m^n + m^[q]."""
    result = SuiteResult("diffpow-oracle")
    rng = random.Random(seed)
    for p, e in ((2, 1), (3, 1), (2, 2), (2, 3), (3, 2)):
        ring = RingContext.create(p, ["x", "y", "z"])
        q = p ** e
        m = IdealHandle.maximal(ring)
        polys = [_random_polynomial(ring, rng, q) for _ in range(samples)]
        polys += [ring.monomial(exps) for d in range(7) for exps in _exponents_of_degree(3, d)]
        mismatches = 0
        for f in _progress(polys, f"diffpow q={q}"):
            for n in range(1, 7):
                if diff_power_member(f, m, n, e) != (min_degree_below_q(f, q) >= n):
                    mismatches += 1
                    logger.warning(f"diff_power_member mismatch: f={f}, n={n}, q={q}")
        result.add({"q": q, "polynomials": len(polys), "mismatches": mismatches}, mismatches == 0)
    return result


def _exponents_of_degree(n, d):
    for combo in itertools.combinations_with_replacement(range(n), d):
        exps = [0] * n
        for i in combo:
            exps[i] += 1
        yield tuple(exps)


TENSOR_PAIRS = (
    (3, ("x", "y"), ("x*y",), ("u", "v"), ("u*v",)),
    (2, ("x", "y", "z"), ("x*y", "x*z", "y*z"), ("u", "v"), ("u*v",)),
    (7, ("x", "y", "z"), (ELLIPTIC_CONE,), ("u",), ()),
    (3, ("x",), (), ("u",), ()),
    (3, ("x", "y", "z"), ("x^2 - y*z",), ("u", "v"), ()),
)


def suite_tensor(corpus=None, e_max=2):
    result = SuiteResult("tensor")
    for p, xs, fs, us, gs in _progress(TENSOR_PAIRS, "tensor"):
        left, right = RingContext.create(p, list(xs)), RingContext.create(p, list(us))
        I = IdealHandle(left, [parse_poly(f, left) for f in fs])
        J = IdealHandle(right, [parse_poly(g, right) for g in gs])
        for e in range(1, e_max + 1):
            verdict = tensor_check(I, J, e)
            result.add({"instance": f"{fs} x {gs} p={p}", **verdict.to_dict()}, verdict.passed)
    return result


def suite_stratification(corpus=None, e_max=2):
    """The two-prime example: dfpt and mfpt peak at different maximal ideals."""
    result = SuiteResult("stratification")
    ring = RingContext.create(2, list(STRATIFICATION_VARIABLES))
    I = IdealHandle(ring, [parse_poly(g, ring) for g in STRATIFICATION_GENERATORS])
    e = min(2, e_max)
    records = {r.prime_generators: r for r in stratify_monomial(I, e)}
    expected = {
        ("x1", "x2", "x3", "x4", "y"): (3, 4),
        ("x1", "x2", "x3", "x4", "x5"): (2, 5),
    }
    for prime, (dfpt, mfpt) in expected.items():
        record = records[prime]
        ok = (record.dfpt_interval_P is not None
              and record.dfpt_interval_P[0] <= dfpt <= record.dfpt_interval_P[1]
              and record.mfpt_interval_P[0] <= mfpt <= record.mfpt_interval_P[1])
        result.add({**record.to_dict(), "expected_dfpt": dfpt, "expected_mfpt": mfpt}, ok)
    violations = semicontinuity_violations(list(records.values()))
    result.add({"check": "semicontinuity", "violations": [list(map(list, v)) for v in violations]}, not violations)
    return result


def suite_semicontinuity(corpus, e_max):
    result = SuiteResult("semicontinuity")
    for inst in _progress([c for c in corpus if "monomial" in c.kinds], "semicontinuity"):
        I = inst.ideal()
        for e in _instance_levels(inst, e_max):
            violations = semicontinuity_violations(stratify_monomial(I, e))
            result.add({"instance": inst.name, "e": e, "violations": [list(map(list, v)) for v in violations]},
                       not violations)
    return result


def suite_scaling(corpus, e_max):
    """p Theta_e <= Theta_{e+1} <= p Theta_e + n(p-1) and b(p^{e+1}) >= p b(p^e)."""
    result = SuiteResult("scaling")
    for inst in _progress(corpus, "scaling"):
        I = inst.ideal()
        p, n = inst.p, len(inst.variables)
        top = max(e_max, 2)
        thetas = [theta_local(I, e) for e in range(1, top + 1)]
        for e in range(1, top):
            a, b = thetas[e - 1], thetas[e]
            if a is NOT_FPURE or b is NOT_FPURE:
                result.add({"instance": inst.name, "e": e, "status": "not F-pure"}, a is b)
                continue
            q = p ** e
            b_e, b_next = n * (q - 1) - a, n * (p * q - 1) - b
            ok = p * a <= b <= p * a + n * (p - 1) and b_next >= p * b_e
            result.add({"instance": inst.name, "e": e, "theta": a, "theta_next": b, "b": b_e, "b_next": b_next}, ok)
    return result


HYPERPLANE_CASES = (
    (7, ("x", "y", "z"), (), ELLIPTIC_CONE),
    (3, ("x", "y"), (), "x"),
    (3, ("x", "y", "z", "w"), (), QUADRIC),
    (3, ("x", "y", "z"), ("x*y",), "z"),
    (3, ("x", "y", "z", "w"), ("x^2 - y*z",), "w"),
)

PERTURBATION_CASES = (
    (3, ("x", "y", "z", "w"), QUADRIC, "x^6"),
    (3, ("x", "y", "z", "w"), QUADRIC, "0"),
    (3, ("x", "y"), "x*y", "x^3*y^3"),
    (7, ("x", "y", "z"), ELLIPTIC_CONE, "x^7*y"),
    (3, ("x", "y", "z"), "x^2 - y*z", "y^3"),
)


def suite_hyperplane(corpus=None, e_max=1):
    result = SuiteResult("hyperplane")
    for p, names, gens, f in _progress(HYPERPLANE_CASES, "hyperplane"):
        ring = RingContext.create(p, list(names))
        I = IdealHandle(ring, [parse_poly(g, ring) for g in gens])
        verdict = hyperplane_check(I, parse_poly(f, ring), 1)
        result.add({"instance": f"{gens} + ({f}) p={p}", **verdict.to_dict()}, verdict.passed)
    return result


def suite_perturbation(corpus=None, e_max=1):
    result = SuiteResult("perturbation")
    for p, names, f, h in _progress(PERTURBATION_CASES, "perturbation"):
        ring = RingContext.create(p, list(names))
        verdict = perturbation_check(IdealHandle.zero(ring), [parse_poly(f, ring)], [parse_poly(h, ring)], 1)
        result.add({"instance": f"({f}) + ({h}) p={p}", **verdict.to_dict()}, verdict.passed)
    return result


def suite_fedder_levels(corpus, e_max):
    """F-purity at e = 1 persists at higher levels."""
    result = SuiteResult("fedder-levels")
    for inst in _progress(corpus, "fedder-levels"):
        I = inst.ideal()
        first = is_fpure_at_origin(I, 1).fpure
        for e in _instance_levels(inst, max(e_max, 2)):
            if e == 1:
                continue
            later = is_fpure_at_origin(I, e).fpure
            result.add({"instance": inst.name, "e": e, "fpure_e1": first, "fpure": later}, later == first)
    return result


def suite_global_consistency(corpus, e_max):
    """Homogeneous ideals: global and local answers agree; monomial ideals: global theta is the max over strata."""
    result = SuiteResult("global-consistency")
    for inst in _progress([c for c in corpus if "monomial" in c.kinds], "global-consistency"):
        I = inst.ideal()
        ring = I.ring
        for e in _instance_levels(inst, min(e_max, 1)):
            local = theta_local(I, e)
            glob = theta_global(I, e)
            fedder_ok = global_fedder(I, e) == is_fpure_at_origin(I, e).fpure
            strata = [theta_at_prime(I, IdealHandle.of_variables(ring, names), e)
                      for names in monomial_primes_containing(I)]
            strata = [t for t in strata if t is not NOT_FPURE]
            ok = fedder_ok and glob == local and (not strata or glob == max(strata))
            result.add({"instance": inst.name, "e": e, "theta_local": local, "theta_global": glob,
                        "max_strata": max(strata) if strata else None}, ok)
    return result


SUITES = {
    "main-formula": suite_main_formula,
    "diffpow-oracle": suite_diffpow_oracle,
    "tensor": suite_tensor,
    "stratification": suite_stratification,
    "semicontinuity": suite_semicontinuity,
    "scaling": suite_scaling,
    "hyperplane": suite_hyperplane,
    "perturbation": suite_perturbation,
    "fedder-levels": suite_fedder_levels,
    "global-consistency": suite_global_consistency,
}


def run_suite(name, corpus=None, e_max=2):
    """Run one named suite (or "all"); returns a list of SuiteResult."""
    corpus = builtin_corpus() if corpus is None else corpus
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise JobSpecError(f"unknown suite {name!r}; choose from {', '.join(['all', *SUITES])}")
    results = []
    for suite in names:
        logger.info(f"Running suite {suite}")
        res = SUITES[suite](corpus, e_max)
        logger.info(f"Suite {suite}: {res.checked} checks, {res.failures} failures")
        results.append(res)
    return results
