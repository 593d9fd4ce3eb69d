"""
Shared fixtures and seeded generators of random instances.
"""
from pathlib import Path

import numpy as np
import pytest

from core.closure import FiniteTopology, saturate, topology_from_subbase
from core.fixtures import fano, mo2, sierpinski, two_point_discrete
from core.lattice import FiniteLattice, lattice_from_family
from core.sps import FiniteSps, from_closure

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture
def two_point():
    return two_point_discrete()


@pytest.fixture
def mo():
    return mo2()


@pytest.fixture
def fano_sps() -> FiniteSps:
    return fano()


@pytest.fixture
def sierpinski_sps() -> FiniteSps:
    return sierpinski()


def random_family(rng: np.random.Generator, n: int, generators: int):
    """Intersection-closed family on n points from a few random generator masks."""
    ground = [f"s{i}" for i in range(n)]
    gens = [int(m) for m in rng.integers(0, 1 << n, size=generators)]
    return saturate(ground, gens)


def random_sps(rng: np.random.Generator, max_states: int = 7) -> FiniteSps:
    n = int(rng.integers(1, max_states + 1))
    return from_closure(random_family(rng, n, int(rng.integers(1, 7))))


def random_topology(rng: np.random.Generator, max_points: int = 6) -> FiniteTopology:
    n = int(rng.integers(1, max_points + 1))
    subbase = [int(m) for m in rng.integers(0, 1 << n, size=int(rng.integers(0, 5)))]
    return topology_from_subbase([str(i) for i in range(n)], subbase)


def random_lattice(rng: np.random.Generator, max_points: int = 4) -> FiniteLattice:
    """Inclusion lattice of a random intersection-closed family."""
    n = int(rng.integers(1, max_points + 1))
    return lattice_from_family(random_family(rng, n, int(rng.integers(0, 5))).closed_family)
