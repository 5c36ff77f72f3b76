import sys
from pathlib import Path

import pytest

# Ensure project root is on sys.path so that 'fimhom' package can be imported
PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from fimhom.category import Grid, Morphism, add, standard_inclusion, unit
from fimhom.config import reset_settings
from fimhom.linalg import PrimeField
from fimhom.module import FreeElement, Presentation, Term, evaluate_presentation


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Every test starts from default settings."""
    for name in (
        "FIMHOM_SMAX",
        "FIMHOM_TREE_SMAX",
        "FIMHOM_FORMAT",
        "FIMHOM_LOG_LEVEL",
        "FIMHOM_LEVEL_CAP_MARGIN",
        "FIMHOM_WORKERS",
        "FIMHOM_MAX_GENS",
        "FIMHOM_MAX_RELS",
        "FIMHOM_MAX_TERMS",
        "FIMHOM_REPORT_DIR",
    ):
        monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def f2():
    return PrimeField(2)


@pytest.fixture
def f3():
    return PrimeField(3)


def point_presentation(bounds, p=2, at=None):
    """
    k at ``at`` (the origin by default): one generator killed by every
    inclusion.  Entries of ``at`` above 1 give k[Aut(at)] instead of k.
    """
    m = len(bounds)
    at = tuple(at) if at is not None else tuple(0 for _ in range(m))
    relations = tuple(
        FreeElement(add(at, unit(m, i)), (Term(0, standard_inclusion(at, i), 1),))
        for i in range(m)
        if at[i] < bounds[i]
    )
    return Presentation(p, m, tuple(bounds), (at,), relations)


def free_plus_point_presentation(bound, p=2):
    """M(0) ⊕ (k at 0) for m = 1."""
    return Presentation(p, 1, (bound,), ((0,), (0,)), (FreeElement((1,), (Term(1, Morphism((0,), (1,), ((),)), 1),)),))


def free_presentation(d, bounds, p=2):
    return Presentation(p, len(bounds), tuple(bounds), (tuple(d),), ())


@pytest.fixture
def point_module():
    def make(bounds, p=2, at=None):
        return evaluate_presentation(point_presentation(bounds, p, at))

    return make


@pytest.fixture
def free_plus_point():
    def make(bound, p=2):
        return evaluate_presentation(free_plus_point_presentation(bound, p))

    return make


@pytest.fixture
def grid():
    return lambda *bounds: Grid(tuple(bounds))


@pytest.fixture
def presentations():
    """Builders for the small hand-checkable presentations."""

    class Builders:
        point = staticmethod(point_presentation)
        free = staticmethod(free_presentation)
        free_plus_point = staticmethod(free_plus_point_presentation)

    return Builders


def torsion_gap_presentation(p=2):
    """k at (0,1) on the (2,2) grid: t_1 = 0 while K_1 is generated in degree 1."""
    return point_presentation((2, 2), p, at=(0, 1))


@pytest.fixture
def torsion_gap():
    return lambda p=2: evaluate_presentation(torsion_gap_presentation(p))
