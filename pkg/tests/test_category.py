import itertools

import pytest

from fimhom.category import (
    INCLUSION,
    TRANSPOSITION,
    Atom,
    CompositionError,
    Grid,
    Morphism,
    compose,
    compose_word,
    enumerate_hom,
    factor,
    hom_count,
    identity,
    objects_by_rank,
    standard_inclusion,
)


def _objects(max_rank, m):
    return [n for n in itertools.product(range(max_rank + 1), repeat=m) if sum(n) <= max_rank]


def _inversions(perm):
    return sum(1 for a, b in itertools.combinations(perm, 2) if a > b)


def test_hom_count_examples():
    assert hom_count((1,), (3,)) == 3
    assert hom_count((2, 2), (2, 2)) == 4
    assert hom_count((1, 0), (2, 1)) == 2
    assert hom_count((2,), (1,)) == 0


def test_enumerate_hom_examples():
    assert [f.parts for f in enumerate_hom((1,), (2,))] == [((1,),), ((2,),)]
    assert [f.parts for f in enumerate_hom((0, 0), (1, 1))] == [((), ())]
    assert [f.parts for f in enumerate_hom((2,), (2,))] == [((1, 2),), ((2, 1),)]
    assert enumerate_hom((2,), (1,)) == []


@pytest.mark.parametrize("bounds", [(4,), (3, 3)])
def test_enumerate_hom_matches_count(bounds):
    objs = objects_by_rank(Grid(bounds))
    for r in objs:
        for n in objs:
            homs = enumerate_hom(r, n)
            assert len(homs) == hom_count(r, n)
            assert len(set(homs)) == len(homs)


def test_compose_examples():
    f = Morphism((1,), (2,), ((2,),))
    g = Morphism((2,), (3,), ((3, 1),))
    assert compose(g, f) == Morphism((1,), (3,), ((1,),))
    assert compose(identity((2,)), f) == f
    assert compose(f, identity((1,))) == f

    twice = compose(standard_inclusion((1,), 0), standard_inclusion((0,), 0))
    assert twice == Morphism((0,), (2,), ((),))


def test_compose_rejects_mismatch():
    f = Morphism((1,), (2,), ((2,),))
    with pytest.raises(CompositionError):
        compose(f, f)


def test_compose_is_associative():
    for f, g, h in itertools.product(enumerate_hom((1,), (2,)), enumerate_hom((2,), (3,)), enumerate_hom((3,), (3,))):
        assert compose(h, compose(g, f)) == compose(compose(h, g), f)


def test_injection_validation():
    with pytest.raises(ValueError, match="duplicate image"):
        Morphism.from_images((2,), [[1, 1]])
    with pytest.raises(ValueError, match="out of range"):
        Morphism.from_images((2,), [[3]])
    with pytest.raises(ValueError, match="expected 2 injections"):
        Morphism.from_images((2, 2), [[1]])


def test_factor_examples():
    word = factor(Morphism((1,), (2,), ((2,),)))
    assert word.atoms == (Atom(INCLUSION, 0), Atom(TRANSPOSITION, 0, 1))
    assert factor(identity((2, 3))).atoms == ()
    assert factor(Morphism((0,), (1,), ((),))).atoms == (Atom(INCLUSION, 0),)


@pytest.mark.parametrize("m", [1, 2])
def test_factor_round_trip(m):
    for n in _objects(5, m):
        for r in _objects(sum(n), m):
            for f in enumerate_hom(r, n):
                word = factor(f)
                assert compose_word(word) == f
                inclusions = sum(1 for a in word.atoms if a.kind == INCLUSION)
                assert inclusions == f.degree


def test_factor_length_is_inversion_count():
    for f in enumerate_hom((4,), (4,)):
        assert len(factor(f).atoms) == _inversions(f.parts[0])


def test_degree_one_morphisms_factor_through_one_inclusion():
    for n in _objects(4, 2):
        for i in range(2):
            r = tuple(x - (1 if k == i else 0) for k, x in enumerate(n))
            if min(r) < 0:
                continue
            for f in enumerate_hom(r, n):
                atoms = factor(f).atoms
                assert [a for a in atoms if a.kind == INCLUSION] == [Atom(INCLUSION, i)]


def test_objects_by_rank():
    assert objects_by_rank(Grid((2,))) == [(0,), (1,), (2,)]
    assert objects_by_rank(Grid((1, 1))) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert objects_by_rank(Grid((0, 0))) == [(0, 0)]


def test_grid_shell_and_shrink():
    g = Grid((2, 3))
    assert g.on_shell((2, 0))
    assert not g.on_shell((1, 2))
    assert g.shrink((1, 0)).bounds == (1, 3)
    with pytest.raises(ValueError):
        Grid((0, 1)).shrink((1, 0))
