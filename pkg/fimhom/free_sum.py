"""
Direct sums of free modules kept as index tables.

A FreeSum ⊕_d M(d)^{k_d} stores no action matrices.  Its basis at n is
ordered by (degree block, copy, ``enumerate_hom(d, n)``), every morphism
moves basis vectors to basis vectors, and vectors are pushed around with
numpy fancy indexing.  Resolutions live here: the syzygies are subspace
families of a FreeSum, never materialized as modules of their own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .category import (
    Grid,
    Morphism,
    Obj,
    compose,
    coset_inclusions,
    enumerate_hom,
    format_obj,
    hom_count,
    hom_index,
    objects_by_rank,
    sub,
    unit,
)
from .linalg import PrimeField, Subspace, rank, stack_rows


logger = logging.getLogger(__name__)

Block = Tuple[Obj, int]


@lru_cache(maxsize=8192)
def postcompose_index(r: Obj, g: Morphism) -> np.ndarray:
    """Position of ``g ∘ h`` in ``enumerate_hom(r, target)`` for each h in ``enumerate_hom(r, source)``."""
    index = hom_index(r, g.target)
    return np.array([index[compose(g, h)] for h in enumerate_hom(r, g.source)], dtype=np.int64)


@lru_cache(maxsize=1024)
def compose_table(r: Obj, d: Obj, n: Obj) -> np.ndarray:
    """``T[a, b]``: position of ``h_a ∘ g_b`` in Hom(r, n), h_a ∈ Hom(d, n), g_b ∈ Hom(r, d)."""
    homs = enumerate_hom(d, n)
    width = hom_count(r, d)
    if not homs or width == 0:
        return np.zeros((len(homs), width), dtype=np.int64)
    return np.stack([postcompose_index(r, h) for h in homs])


def group_by_degree(generators: Sequence[Tuple[Obj, np.ndarray]]) -> Dict[Obj, List[np.ndarray]]:
    """Generator vectors per degree, degrees in order of first appearance."""
    grouped: Dict[Obj, List[np.ndarray]] = {}
    for d, vec in generators:
        grouped.setdefault(tuple(d), []).append(np.asarray(vec, dtype=np.int64).reshape(-1))
    return grouped


@dataclass(frozen=True)
class FreeSum:
    """⊕ M(d)^copies over ``blocks``, degrees pairwise distinct."""

    grid: Grid
    field: PrimeField
    blocks: Tuple[Block, ...]

    def __post_init__(self) -> None:
        degrees = [d for d, _ in self.blocks]
        if len(set(degrees)) != len(degrees):
            raise ValueError(f"free sum repeats a degree: {degrees}")
        for d, copies in self.blocks:
            if not self.grid.contains(d):
                raise ValueError(f"generator degree {format_obj(d)} outside grid {format_obj(self.grid.bounds)}")
            if copies < 1:
                raise ValueError(f"degree {format_obj(d)} has {copies} copies")

    @classmethod
    def on(cls, grid: Grid, field: PrimeField, degrees: Sequence[Obj]) -> "FreeSum":
        """Group a generator degree list; the basis follows first appearance."""
        counts: Dict[Obj, int] = {}
        for d in degrees:
            counts[tuple(d)] = counts.get(tuple(d), 0) + 1
        return cls(grid, field, tuple(counts.items()))

    @property
    def m(self) -> int:
        return self.grid.m

    def objects(self) -> List[Obj]:
        return objects_by_rank(self.grid)

    def offsets(self, n: Obj) -> np.ndarray:
        """Start of each block at n, plus the total dimension."""
        return _offsets(self.blocks, tuple(n))

    def dim(self, n: Obj) -> int:
        return int(self.offsets(n)[-1])

    def dims(self) -> Dict[Obj, int]:
        return {n: self.dim(n) for n in self.objects()}

    def degrees(self) -> Tuple[Obj, ...]:
        return tuple(d for d, copies in self.blocks for _ in range(copies))

    def rank(self) -> int:
        return sum(copies for _, copies in self.blocks)

    def is_zero(self) -> bool:
        return not self.blocks

    def push(self, rows: np.ndarray, g: Morphism) -> np.ndarray:
        """``g`` applied to the row vectors ``rows`` of P(source(g))."""
        src, tgt = g.source, g.target
        out = np.zeros((rows.shape[0], self.dim(tgt)), dtype=np.int64)
        if rows.shape[0] == 0:
            return out
        so, to = self.offsets(src), self.offsets(tgt)
        for b, (d, copies) in enumerate(self.blocks):
            hs, ht = hom_count(d, src), hom_count(d, tgt)
            if hs == 0:
                continue
            idx = postcompose_index(d, g)
            cols = to[b] + (np.arange(copies)[:, None] * ht + idx[None, :]).ravel()
            out[:, cols] = rows[:, so[b] : so[b + 1]]
        return out

    def images(self, vectors: np.ndarray, d: Obj, n: Obj) -> np.ndarray:
        """
        Columns ``h · v`` for every row v of ``vectors`` (elements of P(d))
        and every h in ``enumerate_hom(d, n)``, vector-major.
        """
        H = hom_count(d, n)
        k = vectors.shape[0]
        out = np.zeros((self.dim(n), k * H), dtype=np.int64)
        if H == 0 or k == 0:
            return out
        od, on = self.offsets(d), self.offsets(n)
        cols = np.arange(k)[:, None, None] * H + np.arange(H)[None, :, None]
        for b, (r, copies) in enumerate(self.blocks):
            width = hom_count(r, d)
            if width == 0:
                continue
            table = compose_table(r, d, n)
            span = hom_count(r, n)
            for c in range(copies):
                start = od[b] + c * width
                out[on[b] + c * span + table[None, :, :], cols] = vectors[:, None, start : start + width]
        return out

    def lower_image(self, spaces: Mapping[Obj, Subspace], n: Obj) -> np.ndarray:
        """Rows spanning the image at n of every lower fiber of a submodule family."""
        parts = []
        for i in range(self.m):
            if n[i] < 1:
                continue
            below = sub(n, unit(self.m, i))
            if spaces[below].rank == 0:
                continue
            for g in coset_inclusions(n, i):
                parts.append(self.push(spaces[below].basis, g))
        return stack_rows(parts, self.dim(n))


@lru_cache(maxsize=4096)
def _offsets(blocks: Tuple[Block, ...], n: Obj) -> np.ndarray:
    sizes = [copies * hom_count(d, n) for d, copies in blocks]
    return np.cumsum([0] + sizes).astype(np.int64)


def cover_matrix(P: FreeSum, target: FreeSum, grouped: Mapping[Obj, List[np.ndarray]], n: Obj) -> np.ndarray:
    """
    At n, the map ``target -> P`` sending the k-th generator of degree d in
    ``target`` to ``grouped[d][k]`` (an element of P(d)).
    """
    blocks = []
    for d, vectors in grouped.items():
        if hom_count(d, n):
            blocks.append(P.images(np.vstack(vectors), d, n))
    if not blocks:
        return np.zeros((P.dim(n), 0), dtype=np.int64)
    out = np.hstack(blocks)
    if out.shape[1] != target.dim(n):
        raise ValueError(f"cover at {format_obj(n)} has {out.shape[1]} columns, expected {target.dim(n)}")
    return out


def family_h0(
    P: FreeSum,
    spaces: Mapping[Obj, Subspace],
    with_generators: bool = True,
) -> Tuple[Dict[Obj, int], List[Tuple[Obj, np.ndarray]]]:
    """
    H_0 of the submodule W ⊆ P given fiberwise by ``spaces``.

    Returns the dimensions of W_n / I_n and, when asked, row vectors of W_n
    lifting a basis of that quotient.  Without generators only ranks are
    taken.
    """
    dims: Dict[Obj, int] = {}
    generators: List[Tuple[Obj, np.ndarray]] = []
    for n in P.objects():
        W = spaces[n]
        if W.rank == 0:
            dims[n] = 0
            continue
        rows = P.lower_image(spaces, n)
        if not with_generators:
            dims[n] = W.rank - rank(rows, P.field)
            continue
        image = Subspace.from_rows(rows, P.dim(n), P.field)
        fresh = Subspace.from_rows(image.reduce(W.basis), P.dim(n), P.field)
        dims[n] = fresh.rank
        generators.extend((n, row) for row in fresh.basis)
    return dims, generators


__all__ = [
    "FreeSum",
    "compose_table",
    "cover_matrix",
    "family_h0",
    "group_by_degree",
    "postcompose_index",
]
