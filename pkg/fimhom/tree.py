"""
The tree of quotient modules V/K_iV and the exact sequences around it.

A child V/K_iV is the image of V -> Σ_iV, so it is realized on bounds
b - o_i.  Nodes whose grid has a zero bound cannot be analyzed further and
are kept as "exhausted" leaves; the tree is then reported as truncated.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .category import Obj, format_obj
from .checks import CheckReport, CheckResult, Verdict, from_violations
from .functors import (
    FourTermSequence,
    common_grid,
    derivative,
    f_map,
    f_s,
    four_term,
    quotient_by_kernel,
)
from .homology import DegreeReport, TorsionVector, degree_report, torsion_vector
from .linalg import matmul, rank
from .module import GridError, PointwiseModule, validate, validate_map


logger = logging.getLogger(__name__)

ZERO = "zero"
EXHAUSTED = "exhausted"
TORSION_FREE = "torsion-free"
EXPANDED = "expanded"
CAPPED = "capped"


class RegularIndexError(ValueError):
    """Raised when a child is requested for a regular coordinate."""


def format_set(coords: Sequence[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in sorted(coords)) + "}"


def singular_indices(V: PointwiseModule) -> FrozenSet[int]:
    """Coordinates i with K_iV != 0 (0-based)."""
    if V.is_zero():
        return frozenset()
    return frozenset(torsion_vector(V).singular())


def regular_indices(V: PointwiseModule) -> FrozenSet[int]:
    return frozenset(range(V.m)) - singular_indices(V)


def child(V: PointwiseModule, i: int, seq: FourTermSequence | None = None) -> PointwiseModule:
    """
    V/K_iV, realized on the shrunken grid b - o_i.

    The quotient is the image of V in Σ_iV, so it lives where Σ_iV does and
    loses the top layer n_i = b_i of the parent grid.
    """
    seq = seq or four_term(i, V)
    if seq.K.is_zero():
        raise RegularIndexError(f"coordinate {i + 1} is regular for this module, it has no child")
    Q, _ = quotient_by_kernel(i, V, seq)
    return Q


@dataclass(frozen=True, eq=False)
class TreeNode:
    module: PointwiseModule
    level: int  # 0 at the root, -1 for its children, ...
    path: Tuple[int, ...]
    report: DegreeReport
    torsion: Optional[TorsionVector]  # None on exhausted nodes
    singular: FrozenSet[int]
    children: Tuple["TreeNode", ...] = ()
    status: str = TORSION_FREE

    @property
    def depth(self) -> int:
        return -self.level

    @property
    def tsum(self) -> Optional[int]:
        return None if self.torsion is None else self.torsion.tsum

    def path_text(self) -> str:
        return "root" if not self.path else "/".join(str(i + 1) for i in self.path)


@dataclass(frozen=True, eq=False)
class TorsionTree:
    root: TreeNode
    node_count: int
    depth: int
    terminated: bool
    truncated: bool
    level_cap: int
    s_max: int

    def nodes(self) -> Iterator[TreeNode]:
        """Depth-first, children in coordinate order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def edges(self) -> Iterator[Tuple[TreeNode, TreeNode]]:
        for node in self.nodes():
            for c in node.children:
                yield node, c

    def leaves(self) -> List[TreeNode]:
        return [node for node in self.nodes() if not node.children]


def _expand(V: PointwiseModule, level: int, path: Tuple[int, ...], level_cap: int, s_max: int) -> TreeNode:
    report = degree_report(V, s_max)
    if V.is_zero():
        return TreeNode(V, level, path, report, TorsionVector.of_zero(V.m), frozenset(), status=ZERO)
    if any(b < 1 for b in V.grid.bounds):
        logger.warning("Tree node %s sits on grid %s with a zero bound, not expanded", path, format_obj(V.grid.bounds))
        return TreeNode(V, level, path, report, None, frozenset(), status=EXHAUSTED)

    t = torsion_vector(V)
    singular = frozenset(t.singular())
    if not singular:
        return TreeNode(V, level, path, report, t, singular, status=TORSION_FREE)
    if -level >= level_cap:
        logger.warning("Tree node %s hit the level cap %d with singular indices %s", path, level_cap, format_set(singular))
        return TreeNode(V, level, path, report, t, singular, status=CAPPED)

    children = tuple(_expand(child(V, i), level - 1, path + (i,), level_cap, s_max) for i in sorted(singular))
    return TreeNode(V, level, path, report, t, singular, children, EXPANDED)


def build_tree(V: PointwiseModule, level_cap: int, s_max: int = 1) -> TorsionTree:
    """Expand V/K_iV over singular i until every leaf is zero, torsion-free, exhausted or capped."""
    if level_cap < 0:
        raise ValueError(f"level_cap must be >= 0, got {level_cap}")
    root = _expand(V, 0, (), level_cap, s_max)
    nodes = []
    stack = [root]
    while stack:
        node = stack.pop()
        nodes.append(node)
        stack.extend(node.children)
    tree = TorsionTree(
        root=root,
        node_count=len(nodes),
        depth=max(node.depth for node in nodes),
        terminated=not any(node.status == CAPPED for node in nodes),
        truncated=any(node.status == EXHAUSTED for node in nodes),
        level_cap=level_cap,
        s_max=s_max,
    )
    logger.info(
        "Built tree: %d node(s), depth %d, terminated=%s, truncated=%s",
        tree.node_count,
        tree.depth,
        tree.terminated,
        tree.truncated,
    )
    return tree


# ─────────────────────────────────────────────────────────────────────────────
# Exact sequences
# ─────────────────────────────────────────────────────────────────────────────


def _sequences(V: PointwiseModule) -> List[FourTermSequence]:
    for i in range(V.m):
        if V.grid.bounds[i] < 1:
            raise GridError(f"F-functors need every bound >= 1, grid is {format_obj(V.grid.bounds)}")
    return [four_term(i, V) for i in range(V.m)]


def _children_embedding(
    V: PointwiseModule,
    coords: Sequence[int],
    source: PointwiseModule,
    seqs: Sequence[FourTermSequence],
    S: FrozenSet[int],
) -> Tuple[Dict[Obj, int], Dict[Obj, np.ndarray]]:
    """⊕_{i∈coords} V/K_iV -> F_S V, each child through its embedding into Σ_iV."""
    grid = common_grid(V)
    embeds = [quotient_by_kernel(i, V, seqs[i])[1] for i in coords]
    dims: Dict[Obj, int] = {}
    mats: Dict[Obj, np.ndarray] = {}
    for n in grid.objects():
        block_dims = [seq.D.dim(n) if seq.coord in S else seq.SigmaV.dim(n) for seq in seqs]
        offsets = np.cumsum([0] + block_dims)
        widths = [e.source.dim(n) for e in embeds]
        out = V.field.zeros(source.dim(n), sum(widths))
        col = 0
        for i, e, w in zip(coords, embeds, widths):
            out[offsets[i] : offsets[i + 1], col : col + w] = e.mats[n]
            col += w
        dims[n] = sum(widths)
        mats[n] = out
    return dims, mats


def f_sequence_check(
    V: PointwiseModule,
    S: Sequence[int],
    T: Sequence[int],
    seqs: Sequence[FourTermSequence] | None = None,
    name: str = "f_sequence",
) -> CheckResult:
    """0 -> ⊕_{i∈T∖S} V/K_iV -> F_S V -> F_T V -> 0 is exact at every object of b - (1, ..., 1)."""
    S, T = frozenset(S), frozenset(T)
    seqs = seqs if seqs is not None else _sequences(V)
    fm = f_map(S, T, V, seqs)
    violations = validate_map(fm)
    coords = sorted(T - S)
    child_dims, emb = _children_embedding(V, coords, fm.source, seqs, S)
    F = V.field
    for n in fm.source.objects():
        where = format_obj(n)
        r = fm.rank_at(n)
        if r != fm.target.dim(n):
            violations.append(f"{where}: F_S -> F_T has rank {r}, target dim {fm.target.dim(n)}")
        if matmul(fm.mats[n], emb[n], F).any():
            violations.append(f"{where}: children do not land in the kernel of F_S -> F_T")
        if rank(emb[n], F) != child_dims[n]:
            violations.append(f"{where}: children do not embed into F_S")
        if fm.source.dim(n) - r != child_dims[n]:
            violations.append(f"{where}: kernel dim {fm.source.dim(n) - r} but children sum to {child_dims[n]}")
    detail = f"S={format_set(S)} T={format_set(T)}"
    result = from_violations(name, violations, detail)
    if result.failed:
        result.detail = f"{detail}: {result.detail}"
    return result


def filtration_check(V: PointwiseModule, seqs: Sequence[FourTermSequence] | None = None) -> CheckResult:
    """F_{R(V)}V -> D_[m]V is onto and its kernel is ⊕ over the children."""
    regular = regular_indices(V)
    return f_sequence_check(V, regular, range(V.m), seqs, name="filtration")


def child_exactness(V: PointwiseModule, i: int, seq: FourTermSequence | None = None) -> CheckResult:
    """0 -> K_iV -> V -> V/K_iV -> 0 pointwise and V/K_iV embeds into Σ_iV."""
    seq = seq or four_term(i, V)
    Q, embed = quotient_by_kernel(i, V, seq)
    violations = [f"child {i + 1}: {v}" for v in validate(Q)]
    for n in seq.V.objects():
        where = f"{format_obj(n)} coordinate {i + 1}"
        if seq.K.dim(n) + Q.dim(n) != seq.V.dim(n):
            violations.append(f"{where}: dim K + dim child = {seq.K.dim(n) + Q.dim(n)}, dim V = {seq.V.dim(n)}")
        if embed.rank_at(n) != Q.dim(n):
            violations.append(f"{where}: child does not embed into the shift")
    return from_violations("child_exact", violations, f"i={i + 1}")


# ─────────────────────────────────────────────────────────────────────────────
# Regularity
# ─────────────────────────────────────────────────────────────────────────────


def _reg_leq(lhs: DegreeReport, rhs: DegreeReport, s_max: int, what: str) -> Tuple[Verdict, str]:
    if lhs.reg is None or rhs.reg is None:
        return Verdict.PASS, f"{what}: zero module, holds vacuously"
    if lhs.touches_shell(s_max) or rhs.touches_shell(s_max):
        return Verdict.SKIPPED, f"{what}: homology touches the grid shell"
    margin = rhs.reg + 1 - lhs.reg
    verdict = Verdict.PASS if margin >= 0 else Verdict.FAIL
    return verdict, f"{what}: reg {lhs.reg} <= {rhs.reg} + 1 (margin {margin})"


def recursive_inequality_check(
    V: PointwiseModule,
    s_max: int,
    seqs: Sequence[FourTermSequence] | None = None,
    report: DegreeReport | None = None,
) -> CheckReport:
    """reg(V) <= reg(F_S V) + 1 for every S ⊆ R(V), one result per S."""
    out = CheckReport()
    report = report or degree_report(V, s_max)
    if V.is_zero():
        out.passed("recursive_inequality", "zero module")
        return out
    seqs = seqs if seqs is not None else _sequences(V)
    regular = sorted(regular_indices(V))
    for size in range(len(regular) + 1):
        for S in itertools.combinations(regular, size):
            rhs = degree_report(f_s(S, V, seqs), s_max)
            verdict, detail = _reg_leq(report, rhs, s_max, f"S={format_set(S)}")
            out.add("recursive_inequality", verdict, detail, "" if verdict is not Verdict.FAIL else f"S={format_set(S)}")
    return out


def tree_structure_checks(tree: TorsionTree, m: int) -> CheckReport:
    """Termination within tsum(root) + m + 1 levels and zero/torsion-free leaves."""
    out = CheckReport()
    root_tsum = tree.root.tsum
    if not tree.terminated:
        out.failed("tree_termination", f"level cap {tree.level_cap} reached", "capped node")
    elif root_tsum is None:
        out.skipped("tree_termination", "root grid has a zero bound")
    elif tree.depth > root_tsum + m + 1:
        out.failed("tree_termination", f"depth {tree.depth} > tsum {root_tsum} + m + 1", "root")
    else:
        out.passed("tree_termination", f"depth {tree.depth} <= {root_tsum + m + 1}")

    bad = [leaf for leaf in tree.leaves() if leaf.status not in (ZERO, TORSION_FREE, EXHAUSTED)]
    if bad:
        out.failed("tree_leaves", f"leaf with status {bad[0].status}", bad[0].path_text())
    elif any(leaf.status == EXHAUSTED for leaf in tree.leaves()):
        out.skipped("tree_leaves", "some leaves sit on exhausted grids")
    else:
        out.passed("tree_leaves", f"{len(tree.leaves())} leaf(s)")
    return out


def tree_step_checks(tree: TorsionTree) -> CheckReport:
    """
    Over every edge W -> W/K_iW: prd(W/K_iW) <= max(prd(W), hd_2(D_iW)) and
    tsum drops by at least one; over every analyzable node:
    reg(W) <= reg(F_{R(W)}W) + 1.
    """
    out = CheckReport()
    for parent, node in tree.edges():
        i = node.path[-1]
        where = node.path_text()
        d_report = degree_report(derivative(i, parent.module), 2)
        if parent.report.touches_shell(1) or node.report.touches_shell(1) or d_report.touches_shell(2):
            out.skipped("tree_step1", f"{where}: homology touches the grid shell")
        else:
            bound = max(parent.report.prd, d_report.hd_at(2))
            if node.report.prd <= bound:
                out.passed("tree_step1", f"{where}: prd {node.report.prd} <= {bound}")
            else:
                out.failed("tree_step1", f"prd {node.report.prd} > {bound}", where)

        if node.tsum is None:
            out.skipped("tree_descent", f"{where}: exhausted grid")
        elif node.tsum <= parent.tsum - 1:
            out.passed("tree_descent", f"{where}: tsum {node.tsum} <= {parent.tsum} - 1")
        else:
            out.failed("tree_descent", f"tsum {node.tsum} > {parent.tsum} - 1", where)

    for node in tree.nodes():
        if node.status in (ZERO, EXHAUSTED):
            continue
        regular = frozenset(range(node.module.m)) - node.singular
        rhs = degree_report(f_s(regular, node.module, _sequences(node.module)), tree.s_max)
        verdict, detail = _reg_leq(node.report, rhs, tree.s_max, node.path_text())
        out.add("tree_step3", verdict, detail, node.path_text() if verdict is Verdict.FAIL else "")
    return out


__all__ = [
    "CAPPED",
    "EXHAUSTED",
    "EXPANDED",
    "RegularIndexError",
    "TORSION_FREE",
    "TorsionTree",
    "TreeNode",
    "ZERO",
    "build_tree",
    "child",
    "child_exactness",
    "f_sequence_check",
    "filtration_check",
    "format_set",
    "recursive_inequality_check",
    "regular_indices",
    "singular_indices",
    "tree_step_checks",
    "tree_structure_checks",
]
