"""
Full-size seeded runs: free modules up to rank 3, a two-coordinate corpus
of random modules and the determinism of ``fimhom verify``.
"""

import json
from collections import Counter

import pytest

from conftest import point_presentation
from fimhom.category import Grid
from fimhom.checks import Verdict
from fimhom.cli import EXIT_OK, main
from fimhom.harness import HarnessConfig, free_degrees, free_module_problems, random_cases, run_cases
from fimhom.homology import degree_report
from fimhom.linalg import PrimeField
from fimhom.module import RandomParams, evaluate_presentation, free_module


CORPUS_SIZE = 100
CORPUS_NAMES = {
    "gd_derivative",
    "gd_chain",
    "prd_shift",
    "prd_derivative",
    "torsion_kernel_gd",
    "torsion_shift",
    "filtration",
    "f_sequence",
    "recursive_inequality",
    "tree_termination",
    "tree_leaves",
    "euler",
}


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("bounds", [(4,), (3, 3)])
def test_free_modules_up_to_rank_three(bounds, p):
    grid = Grid(bounds)
    degrees = free_degrees(grid)
    assert len(degrees) == (4 if len(bounds) == 1 else 10)
    for d in degrees:
        assert free_module_problems(d, grid, PrimeField(p)) == (), d


@pytest.mark.parametrize("p", [2, 3, 5])
def test_point_module_closed_form(p):
    report = degree_report(evaluate_presentation(point_presentation((6,), p)), 3)
    assert report.hd == (0, 1, 2, 3)
    assert report.reg == 0


@pytest.mark.parametrize("d, bounds", [((2,), (5,)), ((1, 1), (3, 3)), ((0, 2), (3, 3))])
def test_free_module_regularity_is_its_rank(f3, d, bounds):
    assert degree_report(free_module(d, Grid(bounds), f3), 2).reg == sum(d)


@pytest.fixture(scope="module")
def corpus_results():
    results = {}
    for p in (2, 3):
        cases = random_cases(2024 + p, CORPUS_SIZE, RandomParams(2, (3, 3), p, max_gens=2, max_rels=2))
        results[p] = (cases, run_cases(cases, HarnessConfig(s_max=3, workers=4)))
    return results


@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3])
def test_two_coordinate_corpus_has_no_failures(corpus_results, p):
    cases, results = corpus_results[p]
    assert len(cases) == CORPUS_SIZE
    failures = [r.to_dict() for r in results if r.verdict is Verdict.FAIL]
    assert failures == []


@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3])
def test_two_coordinate_corpus_reaches_every_law(corpus_results, p):
    _, results = corpus_results[p]
    cases_per_name = {name: len({r.case for r in results if r.name == name}) for name in CORPUS_NAMES}
    assert all(count >= 50 for count in cases_per_name.values()), cases_per_name
    verdicts = Counter(r.verdict for r in results if r.name in CORPUS_NAMES)
    assert verdicts[Verdict.PASS] > 0


@pytest.mark.slow
def test_verify_is_byte_identical_across_runs(capsys):
    argv = ["verify", "--random", "--seed", "42", "--count", "25", "--m", "1", "--bounds", "5", "--field", "3"]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    second = capsys.readouterr().out
    assert first == second


@pytest.mark.slow
def test_verify_json_reports_every_case(capsys):
    argv = ["verify", "--random", "--seed", "42", "--count", "25", "--m", "1", "--bounds", "5", "--field", "3"]
    assert main(argv + ["--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["cases"] == 25
    assert {r["case"] for r in report["results"]} == set(range(25))
