"""
The (ε, d) hidden-measurement model on the unit sphere.

A test α(u, ε, d) projects the state p onto the axis u (x = p·u) and cuts an
elastic stretched over [d − ε, d + ε] at a uniformly random point λ; the outcome
is ↑ when λ < x. Eigensets are the closed caps where the outcome is certain.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from core.config import DOT_TOLERANCE, NORM_TOLERANCE, SIMULATION_BLOCK
from core.errors import InvalidTestSpec
from core.utils import mask_of


@dataclass(frozen=True)
class SpherePoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidTestSpec(f"Point ({self.x}, {self.y}, {self.z}) has norm {norm}, not 1.",
                                  witness=(self.x, self.y, self.z))

    @classmethod
    def normalized(cls, v: Sequence[float]) -> "SpherePoint":
        arr = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise InvalidTestSpec("The zero vector has no direction.")
        arr = arr / norm
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def antipode(self) -> "SpherePoint":
        return SpherePoint(-self.x, -self.y, -self.z)

    def dot(self, other: "SpherePoint") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z


@dataclass(frozen=True)
class TestSpec:
    """α(u, ε, d) with ε ∈ [0, 1] and d ∈ [−1 + ε, 1 − ε]."""

    __test__ = False  # not a pytest class

    u: SpherePoint
    epsilon: float
    d: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidTestSpec(f"epsilon must lie in [0, 1], got {self.epsilon}.", witness=self.epsilon)
        low, high = -1.0 + self.epsilon, 1.0 - self.epsilon
        if self.d < low - DOT_TOLERANCE or self.d > high + DOT_TOLERANCE:
            raise InvalidTestSpec(f"d must lie in [{low}, {high}] for epsilon {self.epsilon}, got {self.d}.",
                                  witness=self.d)


Sample = Tuple[SpherePoint, ...]


# ------------------------- Samples -------------------------
def _from_rows(rows: Sequence[Sequence[float]]) -> Sample:
    return tuple(SpherePoint.normalized(r) for r in rows)


def icosahedron() -> Sample:
    """The 12 vertices (0, ±1, ±φ) and their cyclic permutations."""
    phi = (1 + math.sqrt(5)) / 2
    rows = []
    for a in (1, -1):
        for b in (phi, -phi):
            rows += [(0, a, b), (a, b, 0), (b, 0, a)]
    return _from_rows(rows)


def cube() -> Sample:
    return _from_rows([(x, y, z) for x in (1, -1) for y in (1, -1) for z in (1, -1)])


def octahedron() -> Sample:
    return _from_rows([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])


def pair() -> Sample:
    """The poles u = (0, 0, 1) and −u."""
    return (SpherePoint(0.0, 0.0, 1.0), SpherePoint(0.0, 0.0, -1.0))


def fibonacci(n: int) -> Sample:
    """
    Golden-spiral points on the upper hemisphere plus their antipodes,
    n rounded up to an even count.
    """
    if n < 1:
        return ()
    half = (n + 1) // 2
    golden = math.pi * (3 - math.sqrt(5))
    rows = []
    for i in range(half):
        z = 1 - (i + 0.5) / half
        r = math.sqrt(max(0.0, 1 - z * z))
        rows.append((r * math.cos(golden * i), r * math.sin(golden * i), z))
    upper = _from_rows(rows)
    return upper + tuple(p.antipode() for p in upper)


PRESETS = {
    "icosahedron": icosahedron,
    "cube": cube,
    "octahedron": octahedron,
    "pair": pair,
}


def preset_sample(name: str, points: Optional[int] = None) -> Sample:
    if name == "fibonacci":
        return fibonacci(points if points is not None else 12)
    if name not in PRESETS:
        raise InvalidTestSpec(f"Unknown sample preset {name!r}.", witness=name)
    return PRESETS[name]()


def sample_array(sample: Sequence[SpherePoint]) -> np.ndarray:
    return np.array([p.vector for p in sample]).reshape(-1, 3)


def antipodal_gap(sample: Sequence[SpherePoint]) -> Optional[int]:
    """Index of a point whose antipode is missing from the sample, or None."""
    arr = sample_array(sample)
    for i, v in enumerate(arr):
        if not np.any(np.all(np.abs(arr + v) <= DOT_TOLERANCE, axis=1)):
            return i
    return None


def point_at_angle(theta_deg: float) -> SpherePoint:
    """The point at polar angle θ from u = (0, 0, 1), in the x–z plane."""
    theta = math.radians(theta_deg)
    return SpherePoint(math.sin(theta), 0.0, math.cos(theta))


NORTH = SpherePoint(0.0, 0.0, 1.0)


# ------------------------- Probabilities and eigensets -------------------------
def outcome_probability(p: SpherePoint, t: TestSpec) -> float:
    """Probability of ↑. At ε = 0 a projection exactly at d is a fair coin."""
    x = p.dot(t.u)
    if t.epsilon == 0.0:
        if abs(x - t.d) <= DOT_TOLERANCE:
            return 0.5
        return 1.0 if x > t.d else 0.0
    low = t.d - t.epsilon
    return float(np.clip((x - low) / (2 * t.epsilon), 0.0, 1.0))


def eigensets(sample: Sequence[SpherePoint], t: TestSpec) -> Tuple[int, int]:
    """(up, down) masks over the sample: the closed caps p·u ≥ d + ε and p·u ≤ d − ε."""
    if not sample:
        return 0, 0
    dots = sample_array(sample) @ t.u.vector
    up = mask_of(np.flatnonzero(dots >= t.d + t.epsilon - DOT_TOLERANCE).tolist())
    down = mask_of(np.flatnonzero(dots <= t.d - t.epsilon + DOT_TOLERANCE).tolist())
    return up, down


# ------------------------- Monte Carlo -------------------------
@dataclass(frozen=True)
class SimulationResult:
    trials: int
    up_count: int
    probability: float
    seed: int

    @property
    def frequency(self) -> float:
        return self.up_count / self.trials


def _block_sizes(n: int) -> List[int]:
    full, rest = divmod(n, SIMULATION_BLOCK)
    return [SIMULATION_BLOCK] * full + ([rest] if rest else [])


def _run_block(x: float, t: TestSpec, size: int, stream: np.random.SeedSequence) -> int:
    rng = np.random.Generator(np.random.Philox(stream))
    if t.epsilon == 0.0:
        if abs(x - t.d) <= DOT_TOLERANCE:
            return int(np.count_nonzero(rng.random(size) < 0.5))
        return size if x > t.d else 0
    cuts = rng.uniform(t.d - t.epsilon, t.d + t.epsilon, size)
    return int(np.count_nonzero(cuts < x))


def simulate(p: SpherePoint, t: TestSpec, n: int, seed: Union[int, np.random.SeedSequence],
             workers: int = 1, progress: bool = False) -> SimulationResult:
    """
    Count ↑ outcomes over n independent cuts. Trials run in blocks, each block on
    its own Philox stream spawned from the seed, so the count depends on the seed
    only, not on the number of workers.
    """
    if n < 1:
        raise InvalidTestSpec(f"Trial count must be at least 1, got {n}.", witness=n)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    sizes = _block_sizes(n)
    streams = root.spawn(len(sizes))
    x = p.dot(t.u)

    bar = tqdm(total=len(sizes), desc="Simulating", unit="block", disable=not progress)
    if workers <= 1:
        counts = []
        for size, stream in zip(sizes, streams):
            counts.append(_run_block(x, t, size, stream))
            bar.update(1)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, x, t, size, stream) for size, stream in zip(sizes, streams)]
            counts = []
            for f in futures:
                counts.append(f.result())
                bar.update(1)
    bar.close()

    entropy = root.entropy if isinstance(root.entropy, int) else int(np.asarray(root.entropy).ravel()[0])
    return SimulationResult(trials=n, up_count=sum(counts), probability=outcome_probability(p, t), seed=entropy)
