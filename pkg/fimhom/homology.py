"""
Minimal resolutions, homological degrees and torsion vectors.

Per-object homology on a downward closed grid is exact; only the suprema
(hd_s, gd, prd, reg) are truncated, which is why every DegreeReport carries
the shell rows that touched the grid boundary.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .category import Grid, Obj, format_obj, obj_rank
from .free_sum import FreeSum, cover_matrix, family_h0, group_by_degree
from .functors import minimal_cover
from .linalg import kernel_basis, rank
from .module import GridError, PointwiseModule


logger = logging.getLogger(__name__)

NEG_INF = "-inf"


@dataclass(frozen=True)
class HomologyTable:
    grid: Grid
    s_max: int
    entries: Dict[Tuple[int, Obj], int]

    def dim(self, s: int, n: Obj) -> int:
        return self.entries.get((s, n), 0)

    def row(self, s: int) -> List[Tuple[Obj, int]]:
        return [(n, self.dim(s, n)) for n in self.grid.objects()]

    def support(self, s: int) -> List[Obj]:
        return [n for n in self.grid.objects() if self.dim(s, n)]


@dataclass(frozen=True)
class Resolution:
    """Fiber dimensions of P_0, ..., P_S and of syzygy_1, ..., syzygy_{S+1}."""

    grid: Grid
    table: HomologyTable
    covers: Tuple[Dict[Obj, int], ...]
    degrees: Tuple[Tuple[Obj, ...], ...]
    syzygies: Tuple[Dict[Obj, int], ...]
    terminated: bool

    @property
    def length(self) -> int:
        return len(self.covers)


def _degree_list(grid: Grid, dims: Dict[Obj, int]) -> Tuple[Obj, ...]:
    return tuple(n for n in grid.objects() for _ in range(dims.get(n, 0)))


def resolve(V: PointwiseModule, s_max: int) -> Resolution:
    """
    Iterated minimal covers: H_s(V) = H_0(syzygy_s) with syzygy_0 = V.

    Only the first cover touches V.  Every later syzygy is a subspace family
    of the previous free sum, and the last step takes ranks without building
    its cover.
    """
    if s_max < 0:
        raise ValueError(f"s_max must be >= 0, got {s_max}")
    entries: Dict[Tuple[int, Obj], int] = {}
    covers: List[Dict[Obj, int]] = []
    degrees: List[Tuple[Obj, ...]] = []
    syzygies: List[Dict[Obj, int]] = []
    terminated = V.is_zero()
    if not terminated:
        cover = minimal_cover(V)
        P = cover.free
        _record(entries, 0, cover.h0.dims)
        covers.append(P.dims())
        degrees.append(cover.degrees)
        if s_max == 0:
            syzygies.append({n: P.dim(n) - V.dim(n) for n in P.objects()})
        else:
            spaces = {n: kernel_basis(cover.mats[n], V.field, canonical=False) for n in P.objects()}
            syzygies.append({n: W.rank for n, W in spaces.items()})
        logger.debug("resolve: step 0, %d generator(s)", P.rank())
        for s in range(1, s_max + 1):
            if not any(syzygies[-1].values()):
                break
            final = s == s_max
            dims, generators = family_h0(P, spaces, with_generators=not final)
            _record(entries, s, dims)
            if final:
                Q = FreeSum.on(V.grid, V.field, _degree_list(V.grid, dims))
                syzygies.append({n: Q.dim(n) - spaces[n].rank for n in Q.objects()})
            else:
                grouped = group_by_degree(generators)
                Q = FreeSum(V.grid, V.field, tuple((d, len(vs)) for d, vs in grouped.items()))
                spaces = {
                    n: kernel_basis(cover_matrix(P, Q, grouped, n), V.field, canonical=False) for n in Q.objects()
                }
                syzygies.append({n: W.rank for n, W in spaces.items()})
            covers.append(Q.dims())
            degrees.append(Q.degrees())
            logger.debug("resolve: step %d, %d generator(s), syzygy total dim %d", s, Q.rank(), sum(syzygies[-1].values()))
            P = Q
        terminated = not any(syzygies[-1].values())
    table = HomologyTable(V.grid, s_max, entries)
    logger.info(
        "Resolved module on grid %s up to s=%d (%d step(s), terminated=%s)",
        format_obj(V.grid.bounds),
        s_max,
        len(covers),
        terminated,
    )
    return Resolution(V.grid, table, tuple(covers), tuple(degrees), tuple(syzygies), terminated)


def _record(entries: Dict[Tuple[int, Obj], int], s: int, dims: Dict[Obj, int]) -> None:
    for n, d in dims.items():
        if d:
            entries[(s, n)] = d


def homology_table(V: PointwiseModule, s_max: int) -> HomologyTable:
    return resolve(V, s_max).table


def euler_defect(res: Resolution, V: PointwiseModule) -> Dict[Obj, int]:
    """
    dim V_n - Σ_s (-1)^s dim P_s(n) - (-1)^{S+1} dim syzygy_{S+1}(n) per object;
    all zero when the resolution is consistent.
    """
    defect: Dict[Obj, int] = {}
    S = res.length - 1
    for n in V.objects():
        total = sum((-1) ** s * cover.get(n, 0) for s, cover in enumerate(res.covers))
        tail = res.syzygies[S].get(n, 0) if S >= 0 else 0
        defect[n] = V.dim(n) - total - (-1) ** (S + 1) * tail
    return defect


@dataclass(frozen=True)
class DegreeReport:
    hd: Tuple[int, ...]
    shell_rows: Tuple[bool, ...]
    reg: Optional[int]  # None is -inf

    @property
    def gd(self) -> int:
        return self.hd[0]

    @property
    def prd(self) -> int:
        return max(self.hd[0], self.hd[1])

    @property
    def boundary_flag(self) -> bool:
        return any(self.shell_rows)

    def touches_shell(self, upto: int) -> bool:
        """True when some nonzero H_s with s <= upto sits on the grid shell."""
        return any(self.shell_rows[: upto + 1])

    def hd_at(self, s: int) -> int:
        return self.hd[s]

    def reg_text(self) -> str:
        return NEG_INF if self.reg is None else str(self.reg)


def degree_report_from_table(table: HomologyTable) -> DegreeReport:
    hd: List[int] = []
    shell: List[bool] = []
    for s in range(table.s_max + 1):
        support = table.support(s)
        hd.append(max((obj_rank(n) for n in support), default=-1))
        shell.append(any(table.grid.on_shell(n) for n in support))
    regs = [h - s for s, h in enumerate(hd) if h >= 0]
    return DegreeReport(tuple(hd), tuple(shell), max(regs) if regs else None)


def degree_report(V: PointwiseModule, s_max: int) -> DegreeReport:
    """Observed hd_s for s <= max(s_max, 1), gd, prd and reg over that range."""
    return degree_report_from_table(homology_table(V, max(s_max, 1)))


@dataclass(frozen=True)
class TorsionVector:
    t: Tuple[int, ...]

    @classmethod
    def of_zero(cls, m: int) -> "TorsionVector":
        """The zero module has no torsion, whatever grid it sits on."""
        return cls(tuple(-1 for _ in range(m)))

    @property
    def tsum(self) -> int:
        return sum(self.t)

    def singular(self) -> Tuple[int, ...]:
        return tuple(i for i, ti in enumerate(self.t) if ti >= 0)


def torsion_vector(V: PointwiseModule) -> TorsionVector:
    """Observed t_i: top n_i over grid objects where E^{(i)}_n has a kernel."""
    if any(b < 1 for b in V.grid.bounds):
        raise GridError(f"torsion vector needs every bound >= 1, grid is {format_obj(V.grid.bounds)}")
    if V.is_zero():
        return TorsionVector.of_zero(V.m)
    t = []
    for i in range(V.m):
        top = -1
        for (n, c), e in V.incl.items():
            if c == i and V.dim(n) and n[i] > top and rank(e, V.field) < V.dim(n):
                top = n[i]
        t.append(top)
    return TorsionVector(tuple(t))


def is_torsion_free(V: PointwiseModule) -> bool:
    return all(ti == -1 for ti in torsion_vector(V).t)


__all__ = [
    "DegreeReport",
    "HomologyTable",
    "NEG_INF",
    "Resolution",
    "TorsionVector",
    "degree_report",
    "degree_report_from_table",
    "euler_defect",
    "homology_table",
    "is_torsion_free",
    "resolve",
    "torsion_vector",
]
