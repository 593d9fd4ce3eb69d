"""
Discretized S_ε: the SPS generated by the eigensets of a finite family of tests
on a finite, antipodally closed sample of the sphere. Also hosts the ε = 0
counterexample driver and the ε-sweep.
"""
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator
from tqdm import tqdm

from analysis.classical import operational_classical_properties
from analysis.topological import topological_properties
from core.closure import additivity_defect, close, saturate
from core.config import DOT_TOLERANCE, get_size_cap
from core.errors import DegenerateSample, EmptySample, InvalidTestSpec, InvariantViolation
from core.lattice import enumerate_orthos
from core.sps import FiniteSps, TestPair, from_closure, to_closure, verify_axioms
from core.utils import popcount
from model.sphere import SpherePoint, TestSpec, antipodal_gap, eigensets, preset_sample, sample_array

Vector = Tuple[float, float, float]


class SphereModelConfig(BaseModel):
    preset: Literal["icosahedron", "cube", "octahedron", "pair", "fibonacci"] = "icosahedron"
    points: Optional[int] = Field(default=None, ge=1)
    sample: Optional[List[Vector]] = None
    directions: Union[Literal["sample"], List[Vector]] = "sample"
    epsilon: float = Field(default=0.0, ge=0.0, le=1.0)
    d_grid: Optional[List[float]] = None
    d_resolution: int = Field(default=1, ge=1)

    @field_validator("sample", "directions")
    @classmethod
    def unit_vectors(cls, value):
        if isinstance(value, list):
            for v in value:
                try:
                    SpherePoint(*v)
                except InvalidTestSpec as e:
                    raise ValueError(str(e))
        return value

    def sample_points(self) -> Tuple[SpherePoint, ...]:
        if self.sample is not None:
            points = tuple(SpherePoint(*v) for v in self.sample)
        else:
            points = preset_sample(self.preset, self.points)
        gap = antipodal_gap(points) if points else None
        if gap is not None:
            raise InvalidTestSpec(f"Sample is not antipodally closed: point {gap} has no antipode.", witness=gap)
        return points

    def direction_points(self) -> Tuple[SpherePoint, ...]:
        if self.directions == "sample":
            return self.sample_points()
        return tuple(SpherePoint(*v) for v in self.directions)

    def grid(self) -> List[float]:
        if self.d_grid is not None:
            return list(self.d_grid)
        return uniform_d_grid(self.epsilon, self.d_resolution)


def uniform_d_grid(epsilon: float, resolution: int) -> List[float]:
    """r evenly spaced values over [−1 + ε, 1 − ε]; a single point or ε = 1 gives [0]."""
    if resolution <= 1 or epsilon >= 1.0:
        return [0.0]
    grid = np.linspace(-1.0 + epsilon, 1.0 - epsilon, resolution)
    return [float(d) for d in np.unique(np.round(grid, 12))]


def state_names(sample: Sequence[SpherePoint]) -> List[str]:
    return [f"v{i}" for i in range(len(sample))]


def model_eigensets(sample: Sequence[SpherePoint], directions: Sequence[SpherePoint],
                    epsilon: float, d_grid: Sequence[float]) -> List[Tuple[int, int]]:
    """(up, down) eigenset pairs for every direction × d, directions outermost."""
    return [eigensets(sample, TestSpec(u, epsilon, d)) for u in directions for d in d_grid]


def _assemble(sample: Sequence[SpherePoint], pairs: Sequence[Tuple[int, int]]) -> FiniteSps:
    generators = [m for pair in pairs for m in pair]
    return from_closure(saturate(state_names(sample), generators))


def build_model(c: SphereModelConfig, verify: bool = True) -> Tuple[FiniteSps, List[TestPair]]:
    """
    The closed family is the saturation of every eigenset; each test contributes
    the pair (up, down) of its eigen-properties.
    """
    sample = c.sample_points()
    if not sample:
        raise EmptySample("The sample has no points.")
    pairs = model_eigensets(sample, c.direction_points(), c.epsilon, c.grid())
    s = _assemble(sample, pairs)
    if verify:
        verdict = verify_axioms(s)
        if not verdict.passed:
            raise InvariantViolation("Saturated eigenset family is not a State Property System.",
                                     witness=verdict.failures())
    tests = sorted({TestPair(s.index_of[up], s.index_of[down]) for up, down in pairs},
                   key=lambda t: (t.yes_property, t.no_property))
    return s, tests


# ------------------------- ε = 0 counterexample -------------------------
@dataclass(frozen=True)
class CounterexampleReport:
    sps: FiniteSps
    tests: Tuple[TestPair, ...]
    direction: Optional[int]
    a_u: Optional[int]
    b_u: Optional[int]
    join: Optional[int]
    skipped: Tuple[int, ...]
    ortho_exists: Optional[bool]
    lattice_size: int
    cap: int

    @property
    def found(self) -> bool:
        return self.direction is not None

    @property
    def union_size(self) -> Optional[int]:
        if not self.found:
            return None
        return popcount(self.sps.images[self.a_u] | self.sps.images[self.b_u])

    @property
    def join_size(self) -> Optional[int]:
        return popcount(self.sps.images[self.join]) if self.found else None


def _degenerate(arr: np.ndarray, u: SpherePoint) -> bool:
    return bool(np.any(np.abs(arr @ u.vector) <= DOT_TOLERANCE))


def counterexample_eps0(sample: Sequence[SpherePoint], cap: Optional[int] = None) -> CounterexampleReport:
    """
    Build the ε = d = 0 model with the sample points as directions, skipping any
    direction orthogonal to a sample point. Look for u whose ↑-eigenset a_u is
    operationally classical while a_u ∨ close({−u}) is the whole state set and
    strictly larger than the union.
    """
    if not sample:
        raise EmptySample("The sample has no points.")
    gap = antipodal_gap(sample)
    if gap is not None:
        raise InvalidTestSpec(f"Sample is not antipodally closed: point {gap} has no antipode.", witness=gap)

    arr = sample_array(sample)
    usable, skipped = [], []
    for k, u in enumerate(sample):
        (skipped if _degenerate(arr, u) else usable).append(k)
    if not usable:
        raise DegenerateSample("Every direction has a sample point on its equator.", witness=tuple(skipped))

    pairs = model_eigensets(sample, [sample[k] for k in usable], 0.0, [0.0])
    s = _assemble(sample, pairs)
    tests = sorted({TestPair(s.index_of[up], s.index_of[down]) for up, down in pairs},
                   key=lambda t: (t.yes_property, t.no_property))
    cop = operational_classical_properties(s, tests)
    closure = to_closure(s)

    found = (None, None, None, None)
    for k, (up, _) in zip(usable, pairs):
        a_u = s.index_of[up]
        if a_u not in cop:
            continue
        antipode = sample[k].antipode()
        minus = next(i for i, v in enumerate(arr) if np.all(np.abs(v - antipode.vector) <= DOT_TOLERANCE))
        b_mask = close(closure, 1 << minus)
        joined = close(closure, up | b_mask)
        if joined == s.full and joined != up | b_mask:
            found = (k, a_u, s.index_of[b_mask], s.index_of[joined])
            break

    cap = get_size_cap(cap)
    ortho_exists = None
    if s.size <= cap:
        ortho_exists = bool(enumerate_orthos(s.lattice, cap=cap))

    direction, a_u, b_u, join = found
    return CounterexampleReport(
        sps=s,
        tests=tuple(tests),
        direction=direction,
        a_u=a_u,
        b_u=b_u,
        join=join,
        skipped=tuple(skipped),
        ortho_exists=ortho_exists,
        lattice_size=s.size,
        cap=cap,
    )


# ------------------------- ε-sweep -------------------------
@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    closed_sets: int
    topological: int
    defect: int
    t_classical: bool


def _sweep_grid(eps: float, d_resolution: int, d_grid: Optional[Sequence[float]]) -> List[float]:
    if d_grid is None:
        return uniform_d_grid(eps, d_resolution)
    grid = [float(d) for d in d_grid if abs(d) <= 1.0 - eps + DOT_TOLERANCE]
    if not grid:
        raise InvalidTestSpec(f"No d in the grid lies in [-1 + ε, 1 - ε] for ε = {eps}.", witness=tuple(d_grid))
    return grid


def epsilon_sweep(sample: Sequence[SpherePoint], directions: Sequence[SpherePoint], eps_list: Sequence[float],
                  d_resolution: int, progress: bool = False,
                  d_grid: Optional[Sequence[float]] = None) -> List[SweepRow]:
    """
    One row per ε: size of the closed family, |𝒯|, the number of closed-set pairs
    whose union is not closed, and whether the closure is additive.

    An explicit d_grid replaces the uniform grid; for each ε only its values with
    |d| <= 1 - ε are used.
    """
    if not sample:
        raise EmptySample("The sample has no points.")
    if list(eps_list) != sorted(eps_list, reverse=True):
        raise InvalidTestSpec("epsilon values must be sorted in descending order.", witness=tuple(eps_list))

    rows = []
    for eps in tqdm(eps_list, desc="Sweeping epsilon", unit="row", disable=not progress):
        pairs = model_eigensets(sample, directions, eps, _sweep_grid(eps, d_resolution, d_grid))
        s = _assemble(sample, pairs)
        defect = additivity_defect(s.closure)
        rows.append(SweepRow(
            epsilon=float(eps),
            closed_sets=s.size,
            topological=len(topological_properties(s)),
            defect=defect,
            t_classical=defect == 0,
        ))
    return rows
