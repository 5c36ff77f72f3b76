"""
Seeded verification harness.

Every case evaluates one presentation and runs the full list of named checks
on it.  Properties that compare observed suprema are SKIPPED(boundary) when
the homology they read touches the grid shell; per-object statements are
exact on the grid and always decided.
"""

from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .category import Grid, Obj, format_obj, hom_count, obj_rank
from .checks import CheckReport, CheckResult, Verdict, from_violations
from .functors import (
    FourTermSequence,
    d_set,
    derivative,
    four_term,
    map_cokernel,
    map_image,
    map_kernel,
    minimal_cover,
    natural_map,
    quotient_by_kernel,
    sigma,
    sigma_map,
    sigma_set,
)
from .homology import (
    DegreeReport,
    TorsionVector,
    degree_report,
    degree_report_from_table,
    euler_defect,
    homology_table,
    resolve,
    torsion_vector,
)
from .linalg import PrimeField, rank
from .module import (
    Presentation,
    RandomParams,
    compose_maps,
    evaluate_presentation,
    free_module,
    random_presentation,
    validate,
    validate_map,
    yoneda_map,
)
from .tree import (
    build_tree,
    child_exactness,
    f_sequence_check,
    filtration_check,
    format_set,
    recursive_inequality_check,
    singular_indices,
    tree_step_checks,
    tree_structure_checks,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HarnessConfig:
    s_max: int = 2
    tree_smax: int = 1
    level_cap: Optional[int] = None  # None: tsum(root) + m + margin
    level_cap_margin: int = 2
    workers: int = 1


@dataclass(frozen=True)
class Case:
    index: int
    seed: int
    presentation: Presentation


def random_cases(seed: int, count: int, params: RandomParams) -> List[Case]:
    """``count`` presentations whose seeds are drawn from one master seed."""
    rng = random.Random(seed)
    cases = []
    for index in range(count):
        case_seed = rng.randrange(2**32)
        cases.append(Case(index, case_seed, random_presentation(case_seed, params)))
    return cases


def _subsets(coords: Sequence[int], nonempty: bool = False) -> List[Tuple[int, ...]]:
    start = 1 if nonempty else 0
    return [S for size in range(start, len(coords) + 1) for S in itertools.combinations(coords, size)]


class CaseAnalysis:
    """Lazily computed data shared by the checks of one case."""

    def __init__(self, case: Case, config: HarnessConfig):
        self.case = case
        self.config = config
        self.presentation = case.presentation
        self.V = evaluate_presentation(case.presentation)
        self.rng = random.Random(case.seed)

    @property
    def m(self) -> int:
        return self.V.m

    @property
    def shiftable(self) -> bool:
        return all(b >= 1 for b in self.V.grid.bounds)

    @cached_property
    def report(self) -> DegreeReport:
        return degree_report(self.V, self.config.s_max)

    @cached_property
    def seqs(self) -> List[FourTermSequence]:
        return [four_term(i, self.V) for i in range(self.m)]

    @cached_property
    def torsion(self):
        return torsion_vector(self.V)

    @cached_property
    def singular(self):
        return singular_indices(self.V)

    def level_cap(self) -> int:
        if self.config.level_cap is not None:
            return self.config.level_cap
        return max(0, self.torsion.tsum + self.m + self.config.level_cap_margin)


# ─────────────────────────────────────────────────────────────────────────────
# Checks.  Each returns the results it produced; names are stable.
# ─────────────────────────────────────────────────────────────────────────────


def check_module_valid(a: CaseAnalysis) -> List[CheckResult]:
    return [from_violations("module_valid", validate(a.V), f"total dim {a.V.total_dim()}")]


def check_euler(a: CaseAnalysis) -> List[CheckResult]:
    res = resolve(a.V, a.config.s_max)
    defect = euler_defect(res, a.V)
    bad = [f"{format_obj(n)}: defect {d}" for n, d in defect.items() if d]
    return [from_violations("euler", bad, f"{res.length} step(s), terminated={res.terminated}")]


def check_cover_minimal(a: CaseAnalysis) -> List[CheckResult]:
    """P -> V is onto and its generators of degree n stay independent modulo I_n."""
    cover = minimal_cover(a.V)
    counts = dict(cover.free.blocks)
    bad = []
    for n in a.V.objects():
        k = counts.get(n, 0)
        if k != cover.h0.dims[n]:
            bad.append(f"{format_obj(n)}: {k} generator(s) vs H_0(V) dim {cover.h0.dims[n]}")
            continue
        if not k:
            continue
        # the identity of n comes first in enumerate_hom(n, n)
        start = cover.free.offsets(n)[[d for d, _ in cover.free.blocks].index(n)]
        cols = start + np.arange(k) * hom_count(n, n)
        residue = cover.h0.spaces[n].reduce(cover.mats[n][:, cols].T.copy())
        if rank(residue, a.V.field) != k:
            bad.append(f"{format_obj(n)}: generators are dependent modulo the lower image")
    if not cover.is_surjective():
        bad.append("cover: P -> V is not surjective")
    return [from_violations("cover_minimal", bad, f"{len(cover.degrees)} generator(s)")]


def check_four_term(a: CaseAnalysis) -> List[CheckResult]:
    out = []
    for seq in a.seqs:
        violations = seq.exactness_violations()
        for label, W in (("Σ", seq.SigmaV), ("K", seq.K), ("D", seq.D)):
            violations.extend(f"{label}_{seq.coord + 1}: {v}" for v in validate(W))
        out.append(from_violations("four_term", violations, f"i={seq.coord + 1}"))
    return out


FREE_DEGREE_LIMIT = 3
FREE_SMAX = 3


def free_degrees(grid: Grid, limit: int = FREE_DEGREE_LIMIT) -> List[Obj]:
    return [d for d in grid.objects() if obj_rank(d) <= limit]


@lru_cache(maxsize=256)
def free_module_problems(d: Obj, grid: Grid, field: PrimeField, s_max: int = FREE_SMAX) -> Tuple[str, ...]:
    """
    M(d) is projective, M(d) -> Σ_iM(d) is injective, Σ_iM(d) and D_iM(d)
    are projective and gd(D_iM(d)) <= |d| - 1.
    """
    M = free_module(d, grid, field)
    where = f"M{format_obj(d)}"
    table = homology_table(M, s_max)
    problems = [f"{where}: H_{s} != 0 at {format_obj(n)}" for s in range(1, s_max + 1) for n in table.support(s)[:1]]
    for i in range(grid.m):
        if not natural_map(i, M).is_injective():
            problems.append(f"{where}: M -> Σ_{i + 1}M is not injective")
        if homology_table(sigma(i, M), 1).support(1):
            problems.append(f"{where}: H_1(Σ_{i + 1}M) != 0")
        d_table = homology_table(derivative(i, M), 1)
        if d_table.support(1):
            problems.append(f"{where}: H_1(D_{i + 1}M) != 0")
        gd_d = degree_report_from_table(d_table).gd
        if gd_d > obj_rank(d) - 1:
            problems.append(f"{where}: gd(D_{i + 1}M) = {gd_d} > {obj_rank(d) - 1}")
    return tuple(problems)


def check_free_shift_projective(a: CaseAnalysis) -> List[CheckResult]:
    """Every M(d) on the case grid with |d| <= 3."""
    report = CheckReport()
    for d in free_degrees(a.V.grid):
        where = f"M{format_obj(d)}"
        problems = free_module_problems(d, a.V.grid, a.V.field)
        if problems:
            report.failed("free_shift_projective", "; ".join(problems), where)
        else:
            report.passed("free_shift_projective", where)
    return report.results


def check_gd_derivative(a: CaseAnalysis) -> List[CheckResult]:
    out = CheckReport()
    if a.V.is_zero():
        out.passed("gd_derivative", "zero module")
        out.passed("gd_chain", "zero module")
        return out.results
    all_coords = range(a.m)
    d_rep = degree_report(d_set(all_coords, a.V), a.config.s_max)
    s_rep = degree_report(sigma_set(all_coords, a.V), a.config.s_max)
    if a.report.boundary_flag or d_rep.boundary_flag:
        out.skipped("gd_derivative", "homology touches the grid shell")
    elif a.report.gd == d_rep.gd + 1:
        out.passed("gd_derivative", f"gd {a.report.gd} = {d_rep.gd} + 1")
    else:
        out.failed("gd_derivative", f"gd(V) = {a.report.gd}, gd(D_[m]V) = {d_rep.gd}", "D_[m]")

    if a.report.boundary_flag or d_rep.boundary_flag or s_rep.boundary_flag:
        out.skipped("gd_chain", "homology touches the grid shell")
    elif d_rep.gd <= s_rep.gd <= a.report.gd:
        out.passed("gd_chain", f"{d_rep.gd} <= {s_rep.gd} <= {a.report.gd}")
    else:
        out.failed("gd_chain", f"gd chain {d_rep.gd}, {s_rep.gd}, {a.report.gd} is not monotone", "Σ_[m]")
    return out.results


def check_prd(a: CaseAnalysis) -> List[CheckResult]:
    out = CheckReport()
    if a.V.is_zero():
        out.passed("prd_shift", "zero module")
        out.passed("prd_derivative", "zero module")
        return out.results
    prd = a.report.prd
    for S in _subsets(range(a.m), nonempty=True):
        label = f"S={format_set(S)}"
        for name, build, bound in (("prd_shift", sigma_set, prd), ("prd_derivative", d_set, prd - 1)):
            rep = degree_report(build(S, a.V), 1)
            if a.report.touches_shell(1) or rep.touches_shell(1):
                out.skipped(name, f"{label}: homology touches the grid shell")
            elif rep.prd <= bound:
                out.passed(name, f"{label}: prd {rep.prd} <= {bound}")
            else:
                out.failed(name, f"prd {rep.prd} > {bound}", label)
    return out.results


def check_torsion_kernel_gd(a: CaseAnalysis) -> List[CheckResult]:
    out = CheckReport()
    for seq in a.seqs:
        i = seq.coord
        t_i = a.torsion.t[i]
        gd_k = degree_report(seq.K, 0).gd
        if t_i <= gd_k:
            out.passed("torsion_kernel_gd", f"i={i + 1}: t {t_i} <= gd(K) {gd_k}")
        else:
            out.failed("torsion_kernel_gd", f"t {t_i} > gd(K) {gd_k}", f"i={i + 1}")
        # observed only, equality is not a law once m > 1
        relation = "=" if t_i == gd_k else "<" if t_i < gd_k else ">"
        out.passed("torsion_gd_observation", f"i={i + 1}: t {relation} gd(K) ({t_i}, {gd_k})")
    return out.results


def check_torsion_shift(a: CaseAnalysis) -> List[CheckResult]:
    out = CheckReport()
    t = a.torsion.t
    for j in range(a.m):
        shifted = sigma(j, a.V)
        if shifted.is_zero():
            ts = TorsionVector.of_zero(a.m).t
        elif any(b < 1 for b in shifted.grid.bounds):
            out.skipped("torsion_shift", f"j={j + 1}: shifted grid has a zero bound")
            continue
        else:
            ts = torsion_vector(shifted).t
        bad = []
        for i in range(a.m):
            if ts[i] > t[i] or (i == j and t[i] >= 0 and ts[i] >= t[i]):
                bad.append(f"t_{i + 1}(Σ_{j + 1}V) = {ts[i]} vs t_{i + 1}(V) = {t[i]}")
        if bad:
            out.failed("torsion_shift", "; ".join(bad), f"j={j + 1}")
        else:
            out.passed("torsion_shift", f"j={j + 1}: {list(ts)} <= {list(t)}")
    return out.results


def check_children(a: CaseAnalysis) -> List[CheckResult]:
    """Descent of t to each child, child exactness and the kernel generation bounds."""
    out = CheckReport()
    for seq in a.seqs:
        out.results.append(child_exactness(a.V, seq.coord, seq))
    for i in sorted(a.singular):
        seq = a.seqs[i]
        Q, _ = quotient_by_kernel(i, a.V, seq)
        label = f"i={i + 1}"
        if not Q.is_zero() and any(b < 1 for b in Q.grid.bounds):
            out.skipped("child_descent", f"{label}: child grid has a zero bound")
        else:
            tq = TorsionVector.of_zero(a.m) if Q.is_zero() else torsion_vector(Q)
            if tq.tsum <= a.torsion.tsum - 1 and tq.t[i] < a.torsion.t[i]:
                out.passed("child_descent", f"{label}: tsum {tq.tsum} <= {a.torsion.tsum} - 1")
            else:
                out.failed("child_descent", f"t(child) = {list(tq.t)}, t(V) = {list(a.torsion.t)}", label)

        d_rep = degree_report(seq.D, 2)
        k_rep = degree_report(seq.K, 0)
        q_rep = degree_report(Q, 1)
        if a.report.touches_shell(1) or d_rep.touches_shell(2) or k_rep.touches_shell(0) or q_rep.touches_shell(1):
            out.skipped("kernel_generation_bound", f"{label}: homology touches the grid shell")
            continue
        bound = max(a.report.prd, d_rep.hd_at(2))
        values = {"gd(K)": k_rep.gd, "prd(child)": q_rep.prd, "t_i": a.torsion.t[i]}
        over = [f"{k} = {v}" for k, v in values.items() if v > bound]
        if over:
            out.failed("kernel_generation_bound", f"{', '.join(over)} > {bound}", label)
        else:
            out.passed("kernel_generation_bound", f"{label}: all <= {bound}")
    return out.results


def check_f_sequences(a: CaseAnalysis) -> List[CheckResult]:
    out = [filtration_check(a.V, a.seqs)]
    coords = range(a.m)
    for T in _subsets(coords, nonempty=True):
        for S in _subsets(T):
            if S != T:
                out.append(f_sequence_check(a.V, S, T, a.seqs))
    return out


def check_recursive_inequality(a: CaseAnalysis) -> List[CheckResult]:
    return recursive_inequality_check(a.V, a.config.s_max, a.seqs, a.report).results


def check_tree(a: CaseAnalysis) -> List[CheckResult]:
    tree = build_tree(a.V, a.level_cap(), a.config.tree_smax)
    out = tree_structure_checks(tree, a.m)
    out.extend(tree_step_checks(tree))
    return out.results


def _random_vector(rng: random.Random, dim: int, p: int) -> np.ndarray:
    return np.array([rng.randrange(p) for _ in range(dim)], dtype=np.int64)


def check_abelian_closure(a: CaseAnalysis) -> List[CheckResult]:
    """Kernel, image and cokernel of a random M(d) -> V, and Σ_i of the same sequence."""
    V = a.V
    candidates: List[Obj] = [n for n in V.objects() if V.dim(n)] or V.objects()
    d = a.rng.choice(candidates)
    f = yoneda_map(V, d, _random_vector(a.rng, V.dim(d), V.field.p))
    where = f"M{format_obj(d)} -> V"

    violations = validate_map(f)
    K, k_incl = map_kernel(f)
    I, _ = map_image(f)
    C, c_proj = map_cokernel(f)
    for label, W in (("ker", K), ("im", I), ("coker", C)):
        violations.extend(f"{label}: {v}" for v in validate(W))
    violations.extend(f"ker -> M: {v}" for v in validate_map(k_incl))
    violations.extend(f"V -> coker: {v}" for v in validate_map(c_proj))
    for n in V.objects():
        if K.dim(n) + I.dim(n) != f.source.dim(n) or I.dim(n) + C.dim(n) != V.dim(n):
            violations.append(f"{format_obj(n)}: ker/im/coker dims {K.dim(n)}/{I.dim(n)}/{C.dim(n)} do not add up")
        if compose_maps(c_proj, f).mats[n].any():
            violations.append(f"{format_obj(n)}: V -> coker does not kill the image")
    results = [from_violations("abelian_closure", violations, where)]

    exact = []
    for i in range(a.m):
        if V.grid.bounds[i] < 1:
            continue
        sf = sigma_map(i, f)
        SK, _ = map_kernel(sf)
        SC, _ = map_cokernel(sf)
        shifted_k, shifted_c = sigma(i, K), sigma(i, C)
        for n in sf.source.objects():
            if SK.dim(n) != shifted_k.dim(n) or SC.dim(n) != shifted_c.dim(n):
                exact.append(f"{format_obj(n)} coordinate {i + 1}: Σ does not commute with ker/coker")
    results.append(from_violations("sigma_exact", exact, where))
    return results


CHECKS: Tuple[Tuple[Tuple[str, ...], bool, Callable[[CaseAnalysis], List[CheckResult]]], ...] = (
    # (result names, needs every bound >= 1, check)
    (("module_valid",), False, check_module_valid),
    (("euler",), False, check_euler),
    (("cover_minimal",), False, check_cover_minimal),
    (("four_term",), True, check_four_term),
    (("free_shift_projective",), True, check_free_shift_projective),
    (("gd_derivative", "gd_chain"), True, check_gd_derivative),
    (("prd_shift", "prd_derivative"), True, check_prd),
    (("torsion_kernel_gd", "torsion_gd_observation"), True, check_torsion_kernel_gd),
    (("torsion_shift",), True, check_torsion_shift),
    (("child_exact", "child_descent", "kernel_generation_bound"), True, check_children),
    (("filtration", "f_sequence"), True, check_f_sequences),
    (("recursive_inequality",), True, check_recursive_inequality),
    (("tree_termination", "tree_leaves", "tree_step1", "tree_descent", "tree_step3"), True, check_tree),
    (("abelian_closure", "sigma_exact"), False, check_abelian_closure),
)


def run_case(case: Case, config: HarnessConfig) -> List[CheckResult]:
    """All checks for one case, in the fixed order of CHECKS."""
    logger.info("Running case %d (seed %d)", case.index, case.seed)
    results: List[CheckResult] = []
    try:
        a = CaseAnalysis(case, config)
    except Exception as e:
        logger.exception("Case %d could not be evaluated", case.index)
        return [CheckResult("module_valid", Verdict.FAIL, f"{type(e).__name__}: {e}", "evaluate", case=case.index)]
    for names, needs_shift, check in CHECKS:
        if needs_shift and not a.shiftable:
            detail = f"grid {format_obj(a.V.grid.bounds)} has a zero bound"
            results.extend(CheckResult(name, Verdict.SKIPPED, detail) for name in names)
            continue
        try:
            results.extend(check(a))
        except Exception as e:
            logger.exception("Check %s crashed on case %d", names[0], case.index)
            results.append(CheckResult(names[0], Verdict.FAIL, f"{type(e).__name__}: {e}", "exception"))
    for r in results:
        r.case = case.index
    failed = sum(r.failed for r in results)
    if failed:
        logger.warning("Case %d: %d failing check(s)", case.index, failed)
    return results


def run_cases(cases: Sequence[Case], config: HarnessConfig) -> List[CheckResult]:
    """Run cases, possibly in worker threads; results stay in case order."""
    if config.workers <= 1:
        batches = [run_case(case, config) for case in cases]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            batches = list(executor.map(lambda c: run_case(c, config), cases))
    results = [r for batch in batches for r in batch]
    logger.info(
        "Harness finished: %d case(s), %d result(s), %d FAIL",
        len(cases),
        len(results),
        sum(r.failed for r in results),
    )
    return results


__all__ = [
    "CHECKS",
    "Case",
    "CaseAnalysis",
    "HarnessConfig",
    "random_cases",
    "run_case",
    "run_cases",
]
