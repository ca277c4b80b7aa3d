import pytest
import sys
import os

# Adjust import path based on structure
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from fpure_cli.errors import JobSpecError
from fpure_cli.suites import (
    SUITES,
    CorpusInstance,
    SuiteResult,
    _squarefree_families,
    builtin_corpus,
    run_suite,
    suite_diffpow_oracle,
    suite_fedder_levels,
    suite_global_consistency,
    suite_hyperplane,
    suite_main_formula,
    suite_perturbation,
    suite_scaling,
    suite_semicontinuity,
    suite_stratification,
    suite_tensor,
)


# --- Fixtures ---

@pytest.fixture
def small_corpus():
    """A handful of instances that keep each suite quick."""
    return [
        CorpusInstance("(x*y) p=3", 3, ("x", "y"), ("x*y",), frozenset({"monomial", "homogeneous"})),
        CorpusInstance("(x*y,x*z,y*z) p=2", 2, ("x", "y", "z"), ("x*y", "x*z", "y*z"),
                       frozenset({"monomial", "homogeneous"})),
        CorpusInstance("(x^2 - y*z) p=3", 3, ("x", "y", "z"), ("x^2 - y*z",),
                       frozenset({"hypersurface", "homogeneous"})),
        CorpusInstance("(x^3 + y^3 + z^3) p=5", 5, ("x", "y", "z"), ("x^3 + y^3 + z^3",),
                       frozenset({"hypersurface", "homogeneous"}), (1,)),
    ]


# --- corpus ---

def test_squarefree_families_up_to_symmetry():
    assert _squarefree_families(2) == [
        (),
        ((0,),),
        ((0, 1),),
        ((0,), (1,)),
    ]


def test_builtin_corpus():
    corpus = builtin_corpus()
    names = [inst.name for inst in corpus]
    assert "(x^2 - w^2*(y^2 + z^2)) p=3" in names
    assert "(x^3 + y^3 + z^3) p=7" in names
    assert "(0) p=2" in names
    monomial = [inst for inst in corpus if "monomial" in inst.kinds]
    assert len(monomial) == 2 * len(_squarefree_families(4))
    assert {inst.p for inst in monomial} == {2, 3}


def test_corpus_instance_builds_ideal():
    inst = CorpusInstance("node", 3, ("x", "y"), ("x*y",))
    I = inst.ideal()
    assert I.ring.p == 3
    assert [str(g) for g in I.generators] == ["x*y"]


def test_suite_result_counts():
    result = SuiteResult("demo")
    result.add({"a": 1}, True)
    result.add({"a": 2}, False)
    data = result.to_dict()
    assert data["checked"] == 2
    assert data["failures"] == 1
    assert data["records"][1] == {"a": 2, "ok": False}


# --- suites ---

def test_main_formula_suite(small_corpus):
    result = suite_main_formula(small_corpus, 1)
    assert result.checked == 4
    # the cone at p = 5 is not F-pure, so the formula does not apply there
    assert result.failures == 1
    assert result.records[-1]["holds"] is False


def test_main_formula_suite_on_builtin_corpus():
    corpus = builtin_corpus()
    cone = next(inst for inst in corpus if inst.name == "(x^3 + y^3 + z^3) p=7")
    assert cone.levels == (1, 2)

    result = suite_main_formula(corpus, 2)

    assert result.failures == 0
    cone_records = [r for r in result.records if r["instance"] == cone.name]
    assert [r["theta"] for r in cone_records] == [18, 144]


def test_stratification_suite():
    result = suite_stratification(None, 2)
    assert result.checked == 3
    assert result.failures == 0


def test_hyperplane_suite():
    result = suite_hyperplane()
    assert result.failures == 0
    assert all(r["status"] == "pass" for r in result.records)


def test_perturbation_suite():
    result = suite_perturbation()
    assert result.failures == 0
    assert result.checked == 5


def test_tensor_suite():
    result = suite_tensor(None, 1)
    assert result.checked == 5
    assert result.failures == 0


def test_diffpow_oracle_suite():
    result = suite_diffpow_oracle(samples=15, seed=4)
    assert result.failures == 0
    assert [r["q"] for r in result.records] == [2, 3, 4, 8, 9]


def test_semicontinuity_suite(small_corpus):
    result = suite_semicontinuity(small_corpus, 1)
    assert result.checked == 2
    assert result.failures == 0


def test_global_consistency_suite(small_corpus):
    result = suite_global_consistency(small_corpus, 1)
    assert result.checked == 2
    assert result.failures == 0
    assert result.records[0]["theta_global"] == result.records[0]["theta_local"]


def test_scaling_suite(small_corpus):
    result = suite_scaling(small_corpus, 2)
    assert result.failures == 0


def test_fedder_levels_suite(small_corpus):
    result = suite_fedder_levels(small_corpus, 2)
    assert result.failures == 0
    assert result.checked == 3


# --- dispatch ---

def test_run_suite_unknown_name():
    with pytest.raises(JobSpecError, match="unknown suite"):
        run_suite("nope", corpus=[])


def test_run_suite_single(mocker):
    fake = SuiteResult("stratification", checked=1)
    mocker.patch.dict(SUITES, {"stratification": lambda corpus, e_max: fake})
    results = run_suite("stratification", corpus=[], e_max=1)
    assert results == [fake]


def test_run_suite_all_runs_every_suite(mocker):
    called = []

    def fake_suite(name):
        def run(corpus, e_max):
            called.append(name)
            return SuiteResult(name)
        return run

    mocker.patch.dict(SUITES, {name: fake_suite(name) for name in SUITES})
    results = run_suite("all", corpus=[], e_max=1)
    assert called == list(SUITES)
    assert [r.name for r in results] == list(SUITES)
