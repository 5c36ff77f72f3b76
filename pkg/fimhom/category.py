"""
Combinatorics of the truncated category FI^m.

Objects are m-tuples of naturals, morphisms are m-tuples of injections
``[r_i] -> [n_i]`` written by their 1-based image lists.  Everything here is
an immutable value; nothing depends on the coefficient field.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, NamedTuple, Sequence, Tuple


logger = logging.getLogger(__name__)

Obj = Tuple[int, ...]


class CompositionError(ValueError):
    """Raised when morphisms are composed across mismatched objects."""


def obj_rank(n: Obj) -> int:
    return sum(n)


def unit(m: int, i: int) -> Obj:
    """The object o_i (0-based coordinate i)."""
    return tuple(1 if k == i else 0 for k in range(m))


def add(a: Obj, b: Obj) -> Obj:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Obj, b: Obj) -> Obj:
    return tuple(x - y for x, y in zip(a, b))


def leq(r: Obj, n: Obj) -> bool:
    return len(r) == len(n) and all(x <= y for x, y in zip(r, n))


def format_obj(n: Obj) -> str:
    return "(" + ",".join(str(x) for x in n) + ")"


@dataclass(frozen=True)
class Grid:
    """The truncation window ``{n : 0 <= n_i <= b_i}``."""

    bounds: Obj

    def __post_init__(self) -> None:
        if len(self.bounds) < 1:
            raise ValueError("grid needs m >= 1 coordinates")
        if any(b < 0 for b in self.bounds):
            raise ValueError(f"grid bounds must be non-negative, got {self.bounds}")

    @property
    def m(self) -> int:
        return len(self.bounds)

    def contains(self, n: Obj) -> bool:
        return len(n) == self.m and all(0 <= x <= b for x, b in zip(n, self.bounds))

    def on_shell(self, n: Obj) -> bool:
        """True when some coordinate sits on the outer boundary."""
        return any(x == b for x, b in zip(n, self.bounds))

    def shrink(self, by: Obj) -> "Grid":
        bounds = sub(self.bounds, by)
        if any(b < 0 for b in bounds):
            raise ValueError(f"cannot shrink grid {self.bounds} by {by}")
        return Grid(bounds)

    def is_subgrid_of(self, other: "Grid") -> bool:
        return leq(self.bounds, other.bounds)

    def objects(self) -> List[Obj]:
        return objects_by_rank(self)


def objects_by_rank(grid: Grid) -> List[Obj]:
    """All grid objects ordered by (rank, lexicographic)."""
    objs = itertools.product(*(range(b + 1) for b in grid.bounds))
    return sorted(objs, key=lambda n: (obj_rank(n), n))


@dataclass(frozen=True)
class Injection:
    """An injection ``[source] -> [target]`` given by 1-based images."""

    source: int
    target: int
    images: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.source:
            raise ValueError(f"injection from [{self.source}] needs {self.source} images, got {len(self.images)}")
        if self.source > self.target:
            raise ValueError(f"no injection [{self.source}] -> [{self.target}]")
        if len(set(self.images)) != len(self.images):
            raise ValueError(f"duplicate image in {list(self.images)}")
        if any(not 1 <= x <= self.target for x in self.images):
            raise ValueError(f"image out of range [1, {self.target}] in {list(self.images)}")


@dataclass(frozen=True)
class Morphism:
    source: Obj
    target: Obj
    parts: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_images(cls, target: Obj, parts: Sequence[Sequence[int]]) -> "Morphism":
        """Build and validate a morphism from per-coordinate image lists."""
        if len(parts) != len(target):
            raise ValueError(f"expected {len(target)} injections, got {len(parts)}")
        injections = [Injection(len(imgs), t, tuple(imgs)) for imgs, t in zip(parts, target)]
        return cls(
            tuple(inj.source for inj in injections),
            tuple(target),
            tuple(inj.images for inj in injections),
        )

    @property
    def m(self) -> int:
        return len(self.source)

    @property
    def degree(self) -> int:
        return obj_rank(self.target) - obj_rank(self.source)

    def injections(self) -> Tuple[Injection, ...]:
        return tuple(Injection(r, n, imgs) for r, n, imgs in zip(self.source, self.target, self.parts))


def identity(n: Obj) -> Morphism:
    return Morphism(n, n, tuple(tuple(range(1, k + 1)) for k in n))


def standard_inclusion(n: Obj, i: int) -> Morphism:
    """The degree-1 morphism ``n -> n + o_i`` (x -> x in every coordinate)."""
    return Morphism(n, add(n, unit(len(n), i)), identity(n).parts)


def transposition(n: Obj, i: int, j: int) -> Morphism:
    """The automorphism of ``n`` swapping j and j+1 in coordinate i."""
    if not 1 <= j <= n[i] - 1:
        raise ValueError(f"s_{j} does not exist in coordinate {i + 1} at {format_obj(n)}")
    parts = list(identity(n).parts)
    perm = list(parts[i])
    perm[j - 1], perm[j] = perm[j], perm[j - 1]
    parts[i] = tuple(perm)
    return Morphism(n, n, tuple(parts))


@functools.lru_cache(maxsize=None)
def coset_inclusions(n: Obj, i: int) -> Tuple[Morphism, ...]:
    """
    The order-preserving morphisms ``n - o_i -> n`` that miss the point k of
    coordinate i, for k = 1..n_i (identity in the other coordinates).

    Every morphism ``n - o_i -> n`` is one of these composed with an
    automorphism of ``n - o_i``.
    """
    if n[i] < 1:
        return ()
    below = sub(n, unit(len(n), i))
    parts = list(identity(below).parts)
    out = []
    for k in range(1, n[i] + 1):
        parts[i] = tuple(x for x in range(1, n[i] + 1) if x != k)
        out.append(Morphism(below, tuple(n), tuple(parts)))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def hom_index(r: Obj, n: Obj) -> Dict[Morphism, int]:
    """Position of each morphism in ``enumerate_hom(r, n)``."""
    return {f: k for k, f in enumerate(enumerate_hom(r, n))}


def hom_count(r: Obj, n: Obj) -> int:
    if not leq(r, n):
        return 0
    return math.prod(math.perm(b, a) for a, b in zip(r, n))


def enumerate_hom(r: Obj, n: Obj) -> List[Morphism]:
    """All morphisms ``r -> n`` in lex order of concatenated image lists."""
    if not leq(r, n):
        return []
    per_coord = [itertools.permutations(range(1, b + 1), a) for a, b in zip(r, n)]
    return [Morphism(tuple(r), tuple(n), tuple(parts)) for parts in itertools.product(*per_coord)]


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g ∘ f`` (apply f first)."""
    if f.target != g.source:
        raise CompositionError(
            f"cannot compose {format_obj(f.source)}->{format_obj(f.target)} "
            f"with {format_obj(g.source)}->{format_obj(g.target)}"
        )
    parts = tuple(tuple(gi[x - 1] for x in fi) for gi, fi in zip(g.parts, f.parts))
    return Morphism(f.source, g.target, parts)


class Atom(NamedTuple):
    """One generator: ``kind`` is "inclusion" or "transposition"."""

    kind: str
    coord: int
    index: int = 0

    def __str__(self) -> str:
        if self.kind == "inclusion":
            return f"i{self.coord + 1}"
        return f"s{self.index}@{self.coord + 1}"


INCLUSION = "inclusion"
TRANSPOSITION = "transposition"


@dataclass(frozen=True)
class GeneratorWord:
    """Atoms applied left-to-right starting from ``source``."""

    source: Obj
    atoms: Tuple[Atom, ...]

    def objects(self) -> Iterator[Obj]:
        """The object reached before each atom, then the final target."""
        n = self.source
        yield n
        for atom in self.atoms:
            if atom.kind == INCLUSION:
                n = add(n, unit(len(n), atom.coord))
            yield n


def _completion(images: Sequence[int], target: int) -> List[int]:
    """Extend an injection to a permutation, unused targets in increasing order."""
    used = set(images)
    return list(images) + [x for x in range(1, target + 1) if x not in used]


def _adjacent_word(perm: Sequence[int]) -> List[int]:
    """
    Indices j with ``perm = s_{j_L} ∘ ... ∘ s_{j_1}`` for the returned list
    ``[j_1, ..., j_L]``; its length is the inversion count of ``perm``.
    """
    # позиции значений: сортировка tau соседними обменами = левые умножения на s_j
    tau = [0] * len(perm)
    for pos, value in enumerate(perm, start=1):
        tau[value - 1] = pos
    moves: List[int] = []
    for k in range(1, len(tau)):
        j = k
        while j > 0 and tau[j - 1] > tau[j]:
            tau[j - 1], tau[j] = tau[j], tau[j - 1]
            moves.append(j)
            j -= 1
    return moves[::-1]


def factor(f: Morphism) -> GeneratorWord:
    """
    Canonical word for ``f``: per coordinate (ascending), the standard
    inclusions first, then the adjacent transpositions of the completed
    permutation.
    """
    atoms: List[Atom] = []
    for i, (r, n, images) in enumerate(zip(f.source, f.target, f.parts)):
        atoms.extend(Atom(INCLUSION, i) for _ in range(n - r))
        perm = _completion(images, n)
        atoms.extend(Atom(TRANSPOSITION, i, j) for j in _adjacent_word(perm))
    return GeneratorWord(f.source, tuple(atoms))


def compose_word(word: GeneratorWord) -> Morphism:
    """Re-assemble the morphism a word denotes."""
    result = identity(word.source)
    for atom, n in zip(word.atoms, word.objects()):
        if atom.kind == INCLUSION:
            step = standard_inclusion(n, atom.coord)
        else:
            step = transposition(n, atom.coord, atom.index)
        result = compose(step, result)
    return result


__all__ = [
    "Atom",
    "CompositionError",
    "GeneratorWord",
    "Grid",
    "INCLUSION",
    "Injection",
    "Morphism",
    "Obj",
    "TRANSPOSITION",
    "add",
    "compose",
    "compose_word",
    "coset_inclusions",
    "enumerate_hom",
    "factor",
    "format_obj",
    "hom_count",
    "hom_index",
    "identity",
    "leq",
    "obj_rank",
    "objects_by_rank",
    "standard_inclusion",
    "sub",
    "transposition",
    "unit",
]
