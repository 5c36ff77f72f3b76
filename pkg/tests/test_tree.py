import pytest

from fimhom.category import Grid
from fimhom.checks import Verdict
from fimhom.module import direct_sum, free_module, zero_module
from fimhom.tree import (
    CAPPED,
    EXHAUSTED,
    EXPANDED,
    TORSION_FREE,
    ZERO,
    RegularIndexError,
    build_tree,
    child,
    child_exactness,
    f_sequence_check,
    filtration_check,
    format_set,
    recursive_inequality_check,
    regular_indices,
    singular_indices,
    tree_step_checks,
    tree_structure_checks,
)


def _dims(V):
    return [d for _, d in V.dims_table()]


def test_format_set_is_one_based():
    assert format_set([1, 0]) == "{1,2}"
    assert format_set([]) == "{}"


def test_singular_and_regular_indices(point_module, f2):
    assert singular_indices(point_module((2, 2))) == {0, 1}
    V = direct_sum([free_module((0, 0), Grid((2, 2)), f2), free_module((1, 0), Grid((2, 2)), f2)])
    assert singular_indices(V) == frozenset()
    assert regular_indices(V) == {0, 1}


def test_child_of_free_plus_point(free_plus_point):
    Q = child(free_plus_point(3), 0)
    assert Q.grid == Grid((2,))
    assert _dims(Q) == [1, 1, 1]


def test_child_of_regular_coordinate_is_rejected(f2):
    with pytest.raises(RegularIndexError):
        child(free_module((0,), Grid((2,)), f2), 0)


def test_tree_of_point_module(point_module):
    tree = build_tree(point_module((2, 2)), level_cap=5)
    assert tree.node_count == 3
    assert tree.depth == 1
    assert tree.terminated
    assert not tree.truncated
    assert tree.root.status == EXPANDED
    assert [node.path_text() for node in tree.nodes()] == ["root", "1", "2"]
    assert [leaf.status for leaf in tree.leaves()] == [ZERO, ZERO]
    assert tree.root.children[0].module.grid == Grid((1, 2))
    assert tree.root.children[1].level == -1
    assert len(list(tree.edges())) == 2


def test_tree_with_torsion_free_leaf(free_plus_point):
    tree = build_tree(free_plus_point(3), level_cap=5)
    assert tree.node_count == 2
    (leaf,) = tree.leaves()
    assert leaf.status == TORSION_FREE
    assert leaf.tsum == -1
    assert tree.root.tsum == 0


def test_tree_of_torsion_free_module_is_a_single_node(f2):
    tree = build_tree(free_module((1,), Grid((3,)), f2), level_cap=0)
    assert tree.node_count == 1
    assert tree.root.status == TORSION_FREE
    assert tree.terminated


def test_level_cap_stops_expansion(point_module):
    tree = build_tree(point_module((3,)), level_cap=0)
    assert tree.root.status == CAPPED
    assert not tree.terminated
    checks = tree_structure_checks(tree, 1)
    assert [r.verdict for r in checks.results] == [Verdict.FAIL, Verdict.FAIL]

    with pytest.raises(ValueError):
        build_tree(point_module((3,)), level_cap=-1)


def test_exhausted_leaf_marks_tree_truncated(free_plus_point):
    tree = build_tree(free_plus_point(1), level_cap=5)
    (leaf,) = tree.leaves()
    assert leaf.status == EXHAUSTED
    assert leaf.tsum is None
    assert tree.truncated
    assert tree.terminated

    checks = tree_structure_checks(tree, 1)
    by_name = {r.name: r.verdict for r in checks.results}
    assert by_name == {"tree_termination": Verdict.PASS, "tree_leaves": Verdict.SKIPPED}

    steps = tree_step_checks(tree)
    assert [r.verdict for r in steps.results if r.name == "tree_descent"] == [Verdict.SKIPPED]


def test_tree_checks_pass_on_small_modules(point_module, free_plus_point):
    for V, m in ((point_module((2, 2)), 2), (free_plus_point(4), 1), (point_module((3,), p=3), 1)):
        tree = build_tree(V, level_cap=6)
        assert tree_structure_checks(tree, m).ok
        steps = tree_step_checks(tree)
        assert steps.ok
        assert {r.name for r in steps.results} >= {"tree_descent", "tree_step3"}


def test_child_exactness(free_plus_point, point_module):
    assert child_exactness(free_plus_point(3), 0).verdict is Verdict.PASS
    result = child_exactness(point_module((2, 2)), 1)
    assert result.verdict is Verdict.PASS
    assert result.name == "child_exact"


def test_filtration_and_f_sequences(point_module, free_plus_point, f3):
    assert filtration_check(point_module((2, 2))).verdict is Verdict.PASS
    assert filtration_check(free_plus_point(3)).verdict is Verdict.PASS

    V = free_module((1, 0), Grid((2, 2)), f3)
    for S, T in (((), (0,)), ((0,), (0, 1)), ((), (0, 1))):
        result = f_sequence_check(V, S, T)
        assert result.verdict is Verdict.PASS, result.detail


def test_recursive_inequality(free_plus_point, f2):
    report = recursive_inequality_check(free_plus_point(4), 1)
    assert report.ok
    assert len(report.results) == 1

    free = free_module((1, 0), Grid((3, 3)), f2)
    report = recursive_inequality_check(free, 1)
    assert len(report.results) == 4
    assert report.ok

    zero_report = recursive_inequality_check(zero_module(Grid((2,)), f2), 1)
    assert [r.detail for r in zero_report.results] == ["zero module"]


def test_zero_module_on_a_zero_bound_grid_is_a_zero_leaf(f2):
    tree = build_tree(zero_module(Grid((2, 0)), f2), level_cap=3)
    assert tree.root.status == ZERO
    assert tree.root.torsion.t == (-1, -1)
    assert tree.terminated
    assert singular_indices(zero_module(Grid((0, 2)), f2)) == frozenset()


@pytest.mark.parametrize("i", [0, 1])
def test_child_lives_on_the_shrunken_grid(torsion_gap, i):
    V = torsion_gap()
    Q = child(V, i)
    assert Q.grid == V.grid.shrink(tuple(1 if k == i else 0 for k in range(2)))
