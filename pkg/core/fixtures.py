"""
Named State Property Systems and topologies used by the CLI presets and the tests.
"""
from typing import Dict, Optional, Tuple

from core.closure import FiniteTopology
from core.errors import InvalidOrtho
from core.lattice import OrthoMap
from core.sps import FiniteSps, direct_sum, direct_sum_ortho
from core.utils import mask_of


def complement_ortho(s: FiniteSps) -> OrthoMap:
    """Set complement, when the family of images is closed under it."""
    image = []
    for m in s.images:
        c = s.full & ~m
        if c not in s.index_of:
            raise InvalidOrtho("The family is not closed under complement.", witness=m)
        image.append(s.index_of[c])
    return OrthoMap(tuple(image))


def trivial_sps(state: str = "*") -> Tuple[FiniteSps, OrthoMap]:
    """One state, properties {0, 1}."""
    s = FiniteSps.from_images((state,), (0, 1))
    return s, OrthoMap((1, 0))


def two_point_discrete() -> Tuple[FiniteSps, OrthoMap]:
    s = FiniteSps.from_images(("p", "q"), (0b00, 0b01, 0b10, 0b11))
    return s, complement_ortho(s)


def boolean_sps(k: int) -> Tuple[FiniteSps, OrthoMap]:
    """Power set of k states; the property lattice is Boolean with 2^k elements."""
    s = FiniteSps.from_images(tuple(f"s{i}" for i in range(k)), range(1 << k))
    return s, complement_ortho(s)


def mo_sps(n: int) -> Tuple[FiniteSps, OrthoMap]:
    """
    MOn realised on 2n states: one state per atom, properties ∅, the singletons and Σ.
    Atoms x and x* are orthocomplements.
    """
    if n == 0:
        return trivial_sps()
    letters = "abcdefghijklmnopqrstuvwxyz"
    states = []
    for k in range(n):
        states += [letters[k], letters[k] + "*"]
    full = (1 << len(states)) - 1
    s = FiniteSps.from_images(states, [0, full] + [1 << p for p in range(len(states))])
    image = [0] * s.size
    image[s.index_of[0]] = s.index_of[full]
    image[s.index_of[full]] = s.index_of[0]
    for p in range(len(states)):
        partner = p + 1 if p % 2 == 0 else p - 1
        image[s.index_of[1 << p]] = s.index_of[1 << partner]
    return s, OrthoMap(tuple(image))


def mo2() -> Tuple[FiniteSps, OrthoMap]:
    return mo_sps(2)


def fano() -> FiniteSps:
    """
    Subspace lattice of the 3-dimensional vector space over the 2-element field:
    the 7 projective points are the states, properties are ∅, points, lines and Σ.
    """
    points = list(range(1, 8))
    states = [format(v, "03b") for v in points]
    pos = {v: i for i, v in enumerate(points)}
    lines = set()
    for x in points:
        for y in points:
            if x < y:
                lines.add(mask_of((pos[x], pos[y], pos[x ^ y])))
    full = (1 << 7) - 1
    return FiniteSps.from_images(states, [0, full] + [1 << i for i in range(7)] + sorted(lines))


def sierpinski() -> FiniteSps:
    """Closed sets {∅, {q}, Σ} of the Sierpiński space with open point p."""
    return FiniteSps.from_images(("p", "q"), (0b00, 0b10, 0b11))


def sierpinski_topology() -> FiniteTopology:
    return FiniteTopology(("p", "q"), (0b00, 0b01, 0b11))


def partition_topology() -> FiniteTopology:
    """Opens {∅, {x}, {y,z}, X}: closed and open sets coincide without being the power set."""
    return FiniteTopology(("x", "y", "z"), (0b000, 0b001, 0b110, 0b111))


def named_fixtures() -> Dict[str, Tuple[FiniteSps, Optional[OrthoMap]]]:
    """Fixtures by name, with their orthocomplementation when they have a standard one."""
    mo, mo_ortho = mo2()
    two, two_ortho = two_point_discrete()
    summed = direct_sum([mo, mo])
    mixed = direct_sum([mo, two])
    return {
        "trivial": trivial_sps(),
        "two-point": (two, two_ortho),
        "mo2": (mo, mo_ortho),
        "mo3": mo_sps(3),
        "boolean3": boolean_sps(3),
        "fano": (fano(), None),
        "sierpinski": (sierpinski(), None),
        "mo2+mo2": (summed, direct_sum_ortho([mo, mo], [mo_ortho, mo_ortho], summed)),
        "mo2+two-point": (mixed, direct_sum_ortho([mo, two], [mo_ortho, two_ortho], mixed)),
    }
