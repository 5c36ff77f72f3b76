"""
Pointwise realization of FI^m-modules on a truncated grid.

A module stores one vector space dimension per grid object and the action
matrices of the generating morphisms only: adjacent transpositions in every
coordinate and the degree-1 standard inclusions.  Every other morphism acts
through its canonical factorization.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .category import (
    INCLUSION,
    Grid,
    Morphism,
    Obj,
    add,
    enumerate_hom,
    factor,
    format_obj,
    leq,
    objects_by_rank,
    standard_inclusion,
    sub,
    transposition,
    unit,
)
from .free_sum import FreeSum, group_by_degree
from .linalg import (
    PrimeField,
    Subspace,
    block_diag,
    matmul,
    quotient_data,
    rank,
    sum_and_close,
)


logger = logging.getLogger(__name__)

TransKey = Tuple[Obj, int, int]
InclKey = Tuple[Obj, int]


class GridError(ValueError):
    """Raised when an object or module falls outside the expected grid."""


class PresentationError(ValueError):
    """Raised for presentations that reference invalid generators or objects."""


class NaturalityError(ValueError):
    """Raised when a map or subspace family is not compatible with the actions."""


@dataclass(frozen=True, eq=False)
class PointwiseModule:
    grid: Grid
    field: PrimeField
    dims: Dict[Obj, int]
    trans: Dict[TransKey, np.ndarray]
    incl: Dict[InclKey, np.ndarray]

    @property
    def m(self) -> int:
        return self.grid.m

    def objects(self) -> List[Obj]:
        return objects_by_rank(self.grid)

    def dim(self, n: Obj) -> int:
        return self.dims.get(n, 0)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.dims.values())

    def transposition(self, n: Obj, i: int, j: int) -> np.ndarray:
        return self.trans[(n, i, j)]

    def inclusion(self, n: Obj, i: int) -> np.ndarray:
        """E^{(i)}_n : V_n -> V_{n+o_i}."""
        try:
            return self.incl[(n, i)]
        except KeyError:
            raise GridError(f"{format_obj(add(n, unit(self.m, i)))} is outside grid {format_obj(self.grid.bounds)}") from None

    def group_generators(self, n: Obj) -> List[np.ndarray]:
        """Transposition matrices at ``n``, coordinate-major, index ascending."""
        return [self.trans[(n, i, j)] for i in range(self.m) for j in range(1, n[i])]

    def dims_table(self) -> List[Tuple[Obj, int]]:
        return [(n, self.dim(n)) for n in self.objects()]


@dataclass(frozen=True, eq=False)
class ModuleMap:
    """A degree-0 natural transformation; ``mats[n]`` is dim_target x dim_source."""

    source: PointwiseModule
    target: PointwiseModule
    mats: Dict[Obj, np.ndarray]

    def rank_at(self, n: Obj) -> int:
        return rank(self.mats[n], self.source.field)

    def is_injective(self) -> bool:
        return all(self.rank_at(n) == self.source.dim(n) for n in self.source.objects())

    def is_surjective(self) -> bool:
        return all(self.rank_at(n) == self.target.dim(n) for n in self.source.objects())


def build_module(
    grid: Grid,
    field: PrimeField,
    dims: Mapping[Obj, int],
    trans_of: Callable[[Obj, int, int], np.ndarray],
    incl_of: Callable[[Obj, int], np.ndarray],
) -> PointwiseModule:
    """Assemble a module by asking for each generator action on the grid."""
    trans: Dict[TransKey, np.ndarray] = {}
    incl: Dict[InclKey, np.ndarray] = {}
    for n in objects_by_rank(grid):
        for i in range(grid.m):
            for j in range(1, n[i]):
                trans[(n, i, j)] = trans_of(n, i, j)
            if n[i] + 1 <= grid.bounds[i]:
                incl[(n, i)] = incl_of(n, i)
    return PointwiseModule(grid, field, {n: int(dims[n]) for n in objects_by_rank(grid)}, trans, incl)


def zero_module(grid: Grid, field: PrimeField) -> PointwiseModule:
    return build_module(
        grid,
        field,
        {n: 0 for n in objects_by_rank(grid)},
        lambda n, i, j: field.zeros(0, 0),
        lambda n, i: field.zeros(0, 0),
    )


def free_sum_module(P: FreeSum) -> PointwiseModule:
    """Materialize the permutation actions of a FreeSum."""

    def moved(g: Morphism) -> np.ndarray:
        # row k of push(I) is g·e_k, i.e. column k of the action matrix
        return P.push(P.field.identity(P.dim(g.source)), g).T.copy()

    return build_module(
        P.grid,
        P.field,
        P.dims(),
        lambda n, i, j: moved(transposition(n, i, j)),
        lambda n, i: moved(standard_inclusion(n, i)),
    )


def free_module(d: Obj, grid: Grid, field: PrimeField) -> PointwiseModule:
    """M(d) = kC(d, -), basis at n = enumerate_hom(d, n)."""
    d = tuple(d)
    if not grid.contains(d):
        raise GridError(f"generator degree {format_obj(d)} outside grid {format_obj(grid.bounds)}")
    return free_sum_module(FreeSum(grid, field, ((d, 1),)))


def action_on(f: Morphism, V: PointwiseModule, vectors: np.ndarray) -> np.ndarray:
    """Apply ``f`` to the columns of ``vectors`` (elements of V at source(f))."""
    if not V.grid.contains(f.source) or not V.grid.contains(f.target):
        raise GridError(
            f"morphism {format_obj(f.source)}->{format_obj(f.target)} leaves grid {format_obj(V.grid.bounds)}"
        )
    word = factor(f)
    out = vectors
    for atom, n in zip(word.atoms, word.objects()):
        if atom.kind == INCLUSION:
            mat = V.inclusion(n, atom.coord)
        else:
            mat = V.transposition(n, atom.coord, atom.index)
        out = matmul(mat, out, V.field)
    return out


def action_of(f: Morphism, V: PointwiseModule) -> np.ndarray:
    """Matrix of ``f`` on V, shape dim(target) x dim(source)."""
    return action_on(f, V, V.field.identity(V.dim(f.source)))


def direct_sum(
    modules: Sequence[PointwiseModule],
    grid: Grid | None = None,
    field: PrimeField | None = None,
) -> PointwiseModule:
    """Block-diagonal sum; ``grid``/``field`` are needed only for the empty sum."""
    if not modules:
        if grid is None or field is None:
            raise GridError("the empty direct sum needs an explicit grid and field")
        return zero_module(grid, field)
    grid = modules[0].grid
    field = modules[0].field
    for V in modules[1:]:
        if V.grid != grid:
            raise GridError(f"grid mismatch {format_obj(V.grid.bounds)} vs {format_obj(grid.bounds)}")
        if V.field != field:
            raise GridError(f"field mismatch F_{V.field.p} vs F_{field.p}")
    return build_module(
        grid,
        field,
        {n: sum(V.dim(n) for V in modules) for n in objects_by_rank(grid)},
        lambda n, i, j: block_diag([V.transposition(n, i, j) for V in modules]),
        lambda n, i: block_diag([V.inclusion(n, i) for V in modules]),
    )


def restrict(V: PointwiseModule, grid: Grid) -> PointwiseModule:
    if not grid.is_subgrid_of(V.grid):
        raise GridError(f"grid {format_obj(grid.bounds)} is not inside {format_obj(V.grid.bounds)}")
    if grid == V.grid:
        return V
    return build_module(grid, V.field, V.dims, V.transposition, V.inclusion)


def restrict_map(f: ModuleMap, grid: Grid) -> ModuleMap:
    return ModuleMap(restrict(f.source, grid), restrict(f.target, grid), {n: f.mats[n] for n in objects_by_rank(grid)})


def _check_stable(V: PointwiseModule, spaces: Mapping[Obj, Subspace]) -> None:
    for (n, i, j), a in V.trans.items():
        if not spaces[n].contains(matmul(spaces[n].basis, a.T.copy(), V.field)):
            raise NaturalityError(f"subspace at {format_obj(n)} not stable under s_{j} in coordinate {i + 1}")
    for (n, i), e in V.incl.items():
        target = add(n, unit(V.m, i))
        if not spaces[target].contains(matmul(spaces[n].basis, e.T.copy(), V.field)):
            raise NaturalityError(f"inclusion {i + 1} at {format_obj(n)} leaves the subspace family")


def submodule(V: PointwiseModule, spaces: Mapping[Obj, Subspace]) -> Tuple[PointwiseModule, ModuleMap]:
    """The submodule spanned by an action-stable family, in RREF coordinates."""
    _check_stable(V, spaces)

    def restricted(a: np.ndarray, n_src: Obj, n_tgt: Obj) -> np.ndarray:
        # координаты образа базиса в RREF-базисе цели = значения в опорных столбцах
        images = matmul(a, spaces[n_src].basis.T.copy(), V.field)
        return images[list(spaces[n_tgt].pivots), :]

    W = build_module(
        V.grid,
        V.field,
        {n: spaces[n].rank for n in V.objects()},
        lambda n, i, j: restricted(V.transposition(n, i, j), n, n),
        lambda n, i: restricted(V.inclusion(n, i), n, add(n, unit(V.m, i))),
    )
    inclusion = ModuleMap(W, V, {n: spaces[n].basis.T.copy() for n in V.objects()})
    return W, inclusion


def quotient(V: PointwiseModule, spaces: Mapping[Obj, Subspace]) -> Tuple[PointwiseModule, ModuleMap]:
    """V / family, realized on the RREF complement coordinates."""
    _check_stable(V, spaces)
    data = {n: quotient_data(spaces[n]) for n in V.objects()}

    def induced(a: np.ndarray, n_src: Obj, n_tgt: Obj) -> np.ndarray:
        proj_tgt = data[n_tgt][0]
        return matmul(proj_tgt, a[:, data[n_src][1]], V.field)

    Q = build_module(
        V.grid,
        V.field,
        {n: len(data[n][1]) for n in V.objects()},
        lambda n, i, j: induced(V.transposition(n, i, j), n, n),
        lambda n, i: induced(V.inclusion(n, i), n, add(n, unit(V.m, i))),
    )
    projection = ModuleMap(V, Q, {n: data[n][0] for n in V.objects()})
    return Q, projection


def identity_map(V: PointwiseModule) -> ModuleMap:
    return ModuleMap(V, V, {n: V.field.identity(V.dim(n)) for n in V.objects()})


def compose_maps(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """``g ∘ f``; f.target and g.source must agree pointwise."""
    if f.source.grid != g.source.grid:
        raise GridError("maps on different grids cannot be composed")
    mats = {}
    for n in f.source.objects():
        if f.target.dim(n) != g.source.dim(n):
            raise NaturalityError(f"dimension mismatch at {format_obj(n)} when composing maps")
        mats[n] = matmul(g.mats[n], f.mats[n], f.source.field)
    return ModuleMap(f.source, g.target, mats)


def orbit_columns(V: PointwiseModule, grouped: Mapping[Obj, Sequence[np.ndarray]], n: Obj) -> np.ndarray:
    """
    Columns ``h · v`` at n for the vectors ``grouped[d]`` of V_d and every h in
    ``enumerate_hom(d, n)``; degree blocks in order, vector-major inside a block.
    """
    blocks = []
    for d, vectors in grouped.items():
        homs = enumerate_hom(d, n)
        if not homs:
            continue
        vecs = np.stack([np.asarray(v, dtype=np.int64).reshape(-1) for v in vectors], axis=1)
        if vecs.shape[0] != V.dim(d):
            raise GridError(f"generator vector of length {vecs.shape[0]} at {format_obj(d)}, dim is {V.dim(d)}")
        acted = np.stack([action_on(h, V, vecs) for h in homs], axis=2)
        blocks.append(acted.reshape(V.dim(n), -1))
    if not blocks:
        return V.field.zeros(V.dim(n), 0)
    return np.hstack(blocks)


def free_map(V: PointwiseModule, generators: Sequence[Tuple[Obj, np.ndarray]]) -> Tuple[PointwiseModule, ModuleMap]:
    """
    The map ``⊕ M(d_k) -> V`` sending the identity of ``d_k`` to the vector
    ``v_k`` in V_{d_k}; returns the free source and the map.  Generators of
    one degree share a block of the source, blocks follow first appearance.
    """
    grouped = group_by_degree(generators)
    P = free_sum_module(FreeSum(V.grid, V.field, tuple((d, len(vs)) for d, vs in grouped.items())))
    return P, ModuleMap(P, V, {n: orbit_columns(V, grouped, n) for n in V.objects()})


def yoneda_map(V: PointwiseModule, d: Obj, vector: np.ndarray) -> ModuleMap:
    """The unique map M(d) -> V with id_d ↦ ``vector``."""
    return free_map(V, [(tuple(d), vector)])[1]


# ─────────────────────────────────────────────────────────────────────────────
# Validation
# ─────────────────────────────────────────────────────────────────────────────


def _eq(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and np.array_equal(a, b)


def validate(V: PointwiseModule) -> List[str]:
    """Violated generator relations of V; empty iff V is a genuine module on its grid."""
    F = V.field
    violations: List[str] = []
    mm = lambda a, b: matmul(a, b, F)  # noqa: E731

    for n in V.objects():
        d = V.dim(n)
        where = format_obj(n)
        for i in range(V.m):
            for j in range(1, n[i]):
                a = V.transposition(n, i, j)
                if a.shape != (d, d):
                    violations.append(f"{where}: s_{j}@{i + 1} has shape {a.shape}, expected {(d, d)}")
                    continue
                if not _eq(mm(a, a), F.identity(d)):
                    violations.append(f"{where}: s_{j}@{i + 1} is not an involution")
                if j + 1 < n[i]:
                    b = V.transposition(n, i, j + 1)
                    if not _eq(mm(a, mm(b, a)), mm(b, mm(a, b))):
                        violations.append(f"{where}: braid relation fails for s_{j}, s_{j + 1} @{i + 1}")
                for l in range(j + 2, n[i]):
                    b = V.transposition(n, i, l)
                    if not _eq(mm(a, b), mm(b, a)):
                        violations.append(f"{where}: s_{j} and s_{l} @{i + 1} do not commute")
                for i2 in range(i + 1, V.m):
                    for l in range(1, n[i2]):
                        b = V.transposition(n, i2, l)
                        if not _eq(mm(a, b), mm(b, a)):
                            violations.append(f"{where}: s_{j}@{i + 1} and s_{l}@{i2 + 1} do not commute")

        for i in range(V.m):
            if (n, i) not in V.incl:
                continue
            e = V.inclusion(n, i)
            up = add(n, unit(V.m, i))
            if e.shape != (V.dim(up), d):
                violations.append(f"{where}: E@{i + 1} has shape {e.shape}, expected {(V.dim(up), d)}")
                continue
            for i2 in range(V.m):
                for j in range(1, n[i2]):
                    if not _eq(mm(e, V.transposition(n, i2, j)), mm(V.transposition(up, i2, j), e)):
                        violations.append(f"{where}: E@{i + 1} is not natural for s_{j}@{i2 + 1}")
            up2 = add(up, unit(V.m, i))
            if (up, i) in V.incl:
                twice = mm(V.inclusion(up, i), e)
                top = V.transposition(up2, i, n[i] + 1)
                if not _eq(mm(top, twice), twice):
                    violations.append(f"{where}: s_{n[i] + 1}@{i + 1} does not fix the double inclusion")
            for i2 in range(i + 1, V.m):
                if (n, i2) not in V.incl or (up, i2) not in V.incl:
                    continue
                side = add(n, unit(V.m, i2))
                lhs = mm(V.inclusion(up, i2), e)
                rhs = mm(V.inclusion(side, i), V.inclusion(n, i2))
                if not _eq(lhs, rhs):
                    violations.append(f"{where}: inclusions @{i + 1} and @{i2 + 1} do not commute")
    return violations


def validate_map(f: ModuleMap) -> List[str]:
    """Naturality violations of a ModuleMap."""
    violations: List[str] = []
    S, T, F = f.source, f.target, f.source.field
    if S.grid != T.grid:
        return [f"source grid {format_obj(S.grid.bounds)} differs from target grid {format_obj(T.grid.bounds)}"]
    for n in S.objects():
        if f.mats[n].shape != (T.dim(n), S.dim(n)):
            violations.append(f"{format_obj(n)}: map has shape {f.mats[n].shape}")
    if violations:
        return violations
    for (n, i, j), a in S.trans.items():
        if not _eq(matmul(f.mats[n], a, F), matmul(T.transposition(n, i, j), f.mats[n], F)):
            violations.append(f"{format_obj(n)}: not natural for s_{j}@{i + 1}")
    for (n, i), e in S.incl.items():
        up = add(n, unit(S.m, i))
        if not _eq(matmul(f.mats[up], e, F), matmul(T.inclusion(n, i), f.mats[n], F)):
            violations.append(f"{format_obj(n)}: not natural for E@{i + 1}")
    return violations


# ─────────────────────────────────────────────────────────────────────────────
# Presentations
# ─────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Term:
    gen: int
    morphism: Morphism
    coeff: int


@dataclass(frozen=True)
class FreeElement:
    object: Obj
    terms: Tuple[Term, ...]


@dataclass(frozen=True)
class Presentation:
    p: int
    m: int
    bounds: Obj
    generators: Tuple[Obj, ...]
    relations: Tuple[FreeElement, ...] = ()

    @property
    def grid(self) -> Grid:
        return Grid(self.bounds)


def check_presentation(P: Presentation) -> None:
    """Raise PresentationError naming the first offending generator/relation."""
    if P.m < 1 or len(P.bounds) != P.m:
        raise PresentationError(f"bounds {list(P.bounds)} do not have m={P.m} entries")
    grid = P.grid
    for g, d in enumerate(P.generators):
        if not grid.contains(d):
            raise PresentationError(f"generators[{g}] = {list(d)} is outside bounds {list(P.bounds)}")
    for r, rel in enumerate(P.relations):
        if not grid.contains(rel.object):
            raise PresentationError(f"relations[{r}].object = {list(rel.object)} is outside bounds {list(P.bounds)}")
        for t, term in enumerate(rel.terms):
            where = f"relations[{r}].terms[{t}]"
            if not 0 <= term.gen < len(P.generators):
                raise PresentationError(f"{where}.gen = {term.gen} does not name a generator")
            f = term.morphism
            if f.source != P.generators[term.gen] or f.target != rel.object:
                raise PresentationError(
                    f"{where}: morphism {format_obj(f.source)}->{format_obj(f.target)} does not go from "
                    f"generator degree {format_obj(P.generators[term.gen])} to {format_obj(rel.object)}"
                )
            if term.coeff % P.p == 0:
                raise PresentationError(f"{where}.coeff vanishes mod {P.p}")


def evaluate_presentation(P: Presentation) -> PointwiseModule:
    """
    Realize the module presented by P on its grid: free cover fiber modulo
    the relation closure, built bottom-up in (rank, lex) order.
    """
    check_presentation(P)
    field = PrimeField(P.p)
    grid = P.grid
    frees = [free_module(d, grid, field) for d in P.generators]
    F = direct_sum(frees, grid, field)

    seeds: Dict[Obj, List[np.ndarray]] = {}
    for rel in P.relations:
        n = rel.object
        vec = np.zeros(F.dim(n), dtype=np.int64)
        offsets = np.cumsum([0] + [M.dim(n) for M in frees])
        for term in rel.terms:
            k = enumerate_hom(P.generators[term.gen], n).index(term.morphism)
            pos = offsets[term.gen] + k
            vec[pos] = (vec[pos] + term.coeff) % field.p
        seeds.setdefault(n, []).append(vec)

    relations: Dict[Obj, Subspace] = {}
    for n in objects_by_rank(grid):
        dim = F.dim(n)
        parts = [Subspace.from_rows(np.array(seeds[n]), dim, field)] if n in seeds else []
        for i in range(grid.m):
            if n[i] >= 1:
                below = sub(n, unit(grid.m, i))
                parts.append(relations[below].image(F.inclusion(below, i)))
        relations[n] = sum_and_close(parts, F.group_generators(n), field, ambient_dim=dim)

    V, _ = quotient(F, relations)
    logger.info(
        "Evaluated presentation: %d generator(s), %d relation(s) on grid %s, total dim %d",
        len(P.generators),
        len(P.relations),
        format_obj(grid.bounds),
        V.total_dim(),
    )
    return V


@dataclass(frozen=True)
class RandomParams:
    m: int
    bounds: Obj
    p: int
    max_gens: int = 3
    max_rels: int = 3
    max_terms: int = 3


def random_presentation(seed: int, params: RandomParams) -> Presentation:
    """Deterministic random presentation with degrees in the grid interior."""
    rng = random.Random(seed)
    grid = Grid(tuple(params.bounds))
    PrimeField(params.p)
    ones = tuple(1 for _ in range(params.m))
    interior = [n for n in objects_by_rank(grid) if grid.contains(add(n, ones))]
    if not interior:
        raise GridError(f"grid {format_obj(grid.bounds)} has no interior object")

    generators = tuple(rng.choice(interior) for _ in range(rng.randint(1, params.max_gens)))
    relations: List[FreeElement] = []
    for _ in range(rng.randint(0, params.max_rels)):
        n = rng.choice(interior)
        usable = [g for g, d in enumerate(generators) if leq(d, n)]
        if not usable:
            continue
        coeffs: Dict[Tuple[int, Morphism], int] = {}
        for _ in range(rng.randint(1, params.max_terms)):
            g = rng.choice(usable)
            f = rng.choice(enumerate_hom(generators[g], n))
            coeffs[(g, f)] = (coeffs.get((g, f), 0) + rng.randint(1, params.p - 1)) % params.p
        terms = tuple(Term(g, f, c) for (g, f), c in coeffs.items() if c)
        if terms:
            relations.append(FreeElement(n, terms))
    return Presentation(params.p, params.m, tuple(params.bounds), generators, tuple(relations))


__all__ = [
    "FreeElement",
    "GridError",
    "ModuleMap",
    "NaturalityError",
    "PointwiseModule",
    "Presentation",
    "PresentationError",
    "RandomParams",
    "Term",
    "action_of",
    "action_on",
    "build_module",
    "check_presentation",
    "compose_maps",
    "direct_sum",
    "evaluate_presentation",
    "free_map",
    "free_module",
    "free_sum_module",
    "identity_map",
    "orbit_columns",
    "quotient",
    "random_presentation",
    "restrict",
    "restrict_map",
    "submodule",
    "validate",
    "validate_map",
    "yoneda_map",
    "zero_module",
]
