"""
Shift functors and friends on pointwise modules.

Σ_i is pullback along n -> n + o_i, so every result lives on a grid shrunk
by o_i (F_S on b - (1, ..., 1)).  All derived modules are materialized.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from .category import Grid, Obj, add, coset_inclusions, format_obj, obj_rank, unit
from .free_sum import FreeSum, group_by_degree
from .linalg import (
    Subspace,
    block_diag,
    image_basis,
    kernel_basis,
    matmul,
    quotient_data,
    rank,
    stack_rows,
)
from .module import (
    GridError,
    ModuleMap,
    NaturalityError,
    PointwiseModule,
    action_of,
    build_module,
    direct_sum,
    free_sum_module,
    orbit_columns,
    quotient,
    restrict,
    submodule,
    validate_map,
)


logger = logging.getLogger(__name__)

SubsetS = FrozenSet[int]


def _require_shift(V: PointwiseModule, i: int) -> None:
    if not 0 <= i < V.m:
        raise GridError(f"coordinate {i + 1} out of range 1..{V.m}")
    if V.grid.bounds[i] < 1:
        raise GridError(f"shift in coordinate {i + 1} needs bound >= 1, grid is {format_obj(V.grid.bounds)}")


def sigma(i: int, V: PointwiseModule) -> PointwiseModule:
    """Σ_i V on bounds b - o_i."""
    _require_shift(V, i)
    oi = unit(V.m, i)
    grid = V.grid.shrink(oi)

    def incl_of(n: Obj, c: int) -> np.ndarray:
        up = add(n, oi)
        if c != i:
            return V.inclusion(up, c)
        # ψ(ε_n) = s_{n_i+1} ∘ ε_{n_i+1}
        top = add(up, oi)
        return matmul(V.transposition(top, i, n[i] + 1), V.inclusion(up, i), V.field)

    return build_module(
        grid,
        V.field,
        {n: V.dim(add(n, oi)) for n in grid.objects()},
        lambda n, c, j: V.transposition(add(n, oi), c, j),
        incl_of,
    )


def sigma_map(i: int, f: ModuleMap) -> ModuleMap:
    """Σ_i applied to a module map."""
    oi = unit(f.source.m, i)
    S, T = sigma(i, f.source), sigma(i, f.target)
    return ModuleMap(S, T, {n: f.mats[add(n, oi)] for n in S.objects()})


def natural_map(i: int, V: PointwiseModule) -> ModuleMap:
    """V -> Σ_i V, v ↦ ε·v, both sides on bounds b - o_i."""
    target = sigma(i, V)
    source = restrict(V, target.grid)
    return ModuleMap(source, target, {n: V.inclusion(n, i) for n in target.objects()})


def map_kernel(f: ModuleMap, check: bool = True) -> Tuple[PointwiseModule, ModuleMap]:
    if check:
        _require_natural(f)
    spaces = {n: kernel_basis(f.mats[n], f.source.field) for n in f.source.objects()}
    return submodule(f.source, spaces)


def map_image(f: ModuleMap, check: bool = True) -> Tuple[PointwiseModule, ModuleMap]:
    if check:
        _require_natural(f)
    spaces = {n: image_basis(f.mats[n], f.source.field) for n in f.source.objects()}
    return submodule(f.target, spaces)


def map_cokernel(f: ModuleMap, check: bool = True) -> Tuple[PointwiseModule, ModuleMap]:
    if check:
        _require_natural(f)
    spaces = {n: image_basis(f.mats[n], f.source.field) for n in f.source.objects()}
    return quotient(f.target, spaces)


def _require_natural(f: ModuleMap) -> None:
    violations = validate_map(f)
    if violations:
        raise NaturalityError("; ".join(violations[:3]))


@dataclass(frozen=True, eq=False)
class FourTermSequence:
    """0 -> K_iV -> V -> Σ_iV -> D_iV -> 0 on bounds b - o_i."""

    coord: int
    K: PointwiseModule
    V: PointwiseModule
    SigmaV: PointwiseModule
    D: PointwiseModule
    incl: ModuleMap
    nat: ModuleMap
    proj: ModuleMap

    def exactness_violations(self) -> List[str]:
        out = []
        for n in self.V.objects():
            r_nat = self.nat.rank_at(n)
            where = f"{format_obj(n)} coordinate {self.coord + 1}"
            if self.incl.rank_at(n) != self.K.dim(n):
                out.append(f"{where}: K -> V is not injective")
            if self.K.dim(n) != self.V.dim(n) - r_nat:
                out.append(f"{where}: dim K = {self.K.dim(n)} but dim ker(V -> ΣV) = {self.V.dim(n) - r_nat}")
            if matmul(self.nat.mats[n], self.incl.mats[n], self.V.field).any():
                out.append(f"{where}: K does not map to zero in ΣV")
            if matmul(self.proj.mats[n], self.nat.mats[n], self.V.field).any():
                out.append(f"{where}: image of V does not die in D")
            if self.D.dim(n) != self.SigmaV.dim(n) - r_nat:
                out.append(f"{where}: dim D = {self.D.dim(n)} but dim coker = {self.SigmaV.dim(n) - r_nat}")
            if self.proj.rank_at(n) != self.D.dim(n):
                out.append(f"{where}: ΣV -> D is not surjective")
        return out


def four_term(i: int, V: PointwiseModule) -> FourTermSequence:
    nat = natural_map(i, V)
    K, incl = map_kernel(nat, check=False)
    D, proj = map_cokernel(nat, check=False)
    logger.debug(
        "four_term coordinate %d: dim K=%d, dim D=%d on grid %s",
        i + 1,
        K.total_dim(),
        D.total_dim(),
        format_obj(nat.source.grid.bounds),
    )
    return FourTermSequence(i, K, nat.source, nat.target, D, incl, nat, proj)


def kernel_module(i: int, V: PointwiseModule) -> PointwiseModule:
    """K_i V."""
    return four_term(i, V).K


def derivative(i: int, V: PointwiseModule) -> PointwiseModule:
    """D_i V."""
    return four_term(i, V).D


def quotient_by_kernel(i: int, V: PointwiseModule, seq: FourTermSequence | None = None) -> Tuple[PointwiseModule, ModuleMap]:
    """
    V/K_iV on bounds b - o_i together with its embedding into Σ_iV.
    """
    seq = seq or four_term(i, V)
    spaces = {n: Subspace.from_rows(seq.incl.mats[n].T.copy(), seq.V.dim(n), V.field) for n in seq.V.objects()}
    Q, _ = quotient(seq.V, spaces)
    embed = {}
    for n in seq.V.objects():
        _, complement = quotient_data(spaces[n])
        embed[n] = seq.nat.mats[n][:, complement]
    return Q, ModuleMap(Q, seq.SigmaV, embed)


def _set_grid(V: PointwiseModule, S: Iterable[int]) -> Grid:
    by = tuple(0 for _ in range(V.m))
    for i in S:
        by = add(by, unit(V.m, i))
    return V.grid.shrink(by)


def sigma_set(S: Iterable[int], V: PointwiseModule) -> PointwiseModule:
    """Σ_S V = ⊕_{i∈S} Σ_i V on bounds b - Σ_{i∈S} o_i."""
    S = sorted(set(S))
    grid = _set_grid(V, S)
    return direct_sum([restrict(sigma(i, V), grid) for i in S], grid, V.field)


def d_set(S: Iterable[int], V: PointwiseModule) -> PointwiseModule:
    """D_S V = ⊕_{i∈S} D_i V on bounds b - Σ_{i∈S} o_i."""
    S = sorted(set(S))
    grid = _set_grid(V, S)
    return direct_sum([restrict(derivative(i, V), grid) for i in S], grid, V.field)


def _sequences(V: PointwiseModule, seqs: Sequence[FourTermSequence] | None) -> Sequence[FourTermSequence]:
    if seqs is not None:
        return seqs
    for i in range(V.m):
        _require_shift(V, i)
    return [four_term(i, V) for i in range(V.m)]


def common_grid(V: PointwiseModule) -> Grid:
    """Bounds b - (1, ..., 1), where every F_S lives."""
    return V.grid.shrink(tuple(1 for _ in range(V.m)))


def f_s(S: Iterable[int], V: PointwiseModule, seqs: Sequence[FourTermSequence] | None = None) -> PointwiseModule:
    """F_S V = D_S V ⊕ Σ_{[m]∖S} V on bounds b - (1, ..., 1)."""
    S = set(S)
    seqs = _sequences(V, seqs)
    grid = common_grid(V)
    parts = [restrict(seq.D if seq.coord in S else seq.SigmaV, grid) for seq in seqs]
    return direct_sum(parts, grid, V.field)


def f_map(
    S: Iterable[int],
    T: Iterable[int],
    V: PointwiseModule,
    seqs: Sequence[FourTermSequence] | None = None,
) -> ModuleMap:
    """F_S V -> F_T V for S ⊆ T: identities except Σ_iV -> D_iV for i ∈ T∖S."""
    S, T = set(S), set(T)
    if not S <= T:
        raise ValueError(f"F-map needs S ⊆ T, got S={sorted(S)} T={sorted(T)}")
    seqs = _sequences(V, seqs)
    grid = common_grid(V)
    source = f_s(S, V, seqs)
    target = f_s(T, V, seqs)
    mats: Dict[Obj, np.ndarray] = {}
    for n in grid.objects():
        blocks = []
        for seq in seqs:
            if seq.coord in T and seq.coord not in S:
                blocks.append(seq.proj.mats[n])
            else:
                module = seq.D if seq.coord in S else seq.SigmaV
                blocks.append(V.field.identity(module.dim(n)))
        mats[n] = block_diag(blocks)
    return ModuleMap(source, target, mats)


# ─────────────────────────────────────────────────────────────────────────────
# H_0 and minimal covers
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class H0Data:
    """Per object: the image I_n of all lower fibers and the complement lift."""

    dims: Dict[Obj, int]
    lifts: Dict[Obj, List[int]]
    spaces: Dict[Obj, Subspace]

    def support(self) -> List[Obj]:
        return [n for n, d in self.dims.items() if d]


def lower_image(V: PointwiseModule, n: Obj) -> Subspace:
    """
    I_n: the span of f·V_r over all morphisms f: r -> n of positive degree.

    Every such f factors through some n - o_i, and the morphisms
    n - o_i -> n are coset inclusions times automorphisms, so the coset
    inclusions applied to the whole of V_{n-o_i} already span I_n.
    """
    parts = []
    for i in range(V.m):
        for g in coset_inclusions(n, i):
            if V.dim(g.source):
                parts.append(action_of(g, V).T)
    return Subspace.from_rows(stack_rows(parts, V.dim(n)), V.dim(n), V.field)


def h0(V: PointwiseModule) -> H0Data:
    dims: Dict[Obj, int] = {}
    lifts: Dict[Obj, List[int]] = {}
    spaces: Dict[Obj, Subspace] = {}
    for n in V.objects():
        image = lower_image(V, n)
        _, complement = quotient_data(image)
        spaces[n] = image
        lifts[n] = complement
        dims[n] = len(complement)
    return H0Data(dims, lifts, spaces)


@dataclass(frozen=True, eq=False)
class Cover:
    """A free cover ``P -> V``; P stays a FreeSum, ``mats[n]`` is dim V_n x dim P(n)."""

    free: FreeSum
    target: PointwiseModule
    mats: Dict[Obj, np.ndarray]
    h0: H0Data

    @property
    def degrees(self) -> Tuple[Obj, ...]:
        return self.free.degrees()

    def is_surjective(self) -> bool:
        return all(rank(self.mats[n], self.target.field) == self.target.dim(n) for n in self.target.objects())

    def module_map(self) -> ModuleMap:
        """The cover as a ModuleMap out of the materialized free module."""
        return ModuleMap(free_sum_module(self.free), self.target, self.mats)


def minimal_cover(V: PointwiseModule) -> Cover:
    """Free P = ⊕ M(d) over the H_0 lifts, with the surjection P -> V."""
    data = h0(V)
    generators = []
    for n in V.objects():
        for c in data.lifts[n]:
            vec = np.zeros(V.dim(n), dtype=np.int64)
            vec[c] = 1
            generators.append((n, vec))
    grouped = group_by_degree(generators)
    P = FreeSum(V.grid, V.field, tuple((d, len(vs)) for d, vs in grouped.items()))
    mats = {n: orbit_columns(V, grouped, n) for n in V.objects()}
    if generators:
        logger.debug(
            "minimal_cover: %d generator(s) in %d degree(s), max degree rank %d",
            P.rank(),
            len(P.blocks),
            max(obj_rank(d) for d, _ in P.blocks),
        )
    return Cover(P, V, mats, data)


__all__ = [
    "Cover",
    "FourTermSequence",
    "H0Data",
    "SubsetS",
    "common_grid",
    "d_set",
    "derivative",
    "f_map",
    "f_s",
    "four_term",
    "h0",
    "kernel_module",
    "lower_image",
    "map_cokernel",
    "map_image",
    "map_kernel",
    "minimal_cover",
    "natural_map",
    "quotient_by_kernel",
    "sigma",
    "sigma_map",
    "sigma_set",
]
