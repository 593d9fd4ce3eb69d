"""
Finite closure systems (Moore families) and finite topologies.

Families are stored as canonical tuples of bitmasks over the ground set.

Additivity on a finite carrier only needs binary unions: if the closed sets are
closed under A ∪ B, then c(A) ∪ c(B) is closed and contains A ∪ B, so
c(A ∪ B) ⊆ c(A) ∪ c(B); the reverse inclusion is monotonicity. Conversely an
additive operator sends the union of two closed sets to itself.
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from core.errors import GeneratorOutOfGround, InvariantViolation, NotAClosureSystem, NotOpen
from core.lattice import enumerate_orthos, is_boolean, lattice_from_family
from core.utils import (
    canonical_order,
    count_union_failures,
    full_mask,
    intersection_closure,
    is_subset,
    iter_bits,
    meet_irreducible_masks,
    union_failures,
)


@dataclass(frozen=True)
class FiniteClosureSystem:
    ground: Tuple[str, ...]
    closed_family: Tuple[int, ...]

    def __post_init__(self):
        top = full_mask(len(self.ground))
        members = set(self.closed_family)
        if top not in members:
            raise NotAClosureSystem("The ground set must be closed.")
        if 0 not in members:
            raise NotAClosureSystem("The empty set must be closed.")
        if any(m & ~top for m in members):
            raise NotAClosureSystem("A closed set leaves the ground set.")

    @property
    def full(self) -> int:
        return full_mask(len(self.ground))

    @cached_property
    def members(self) -> FrozenSet[int]:
        return frozenset(self.closed_family)

    @cached_property
    def irreducibles(self) -> Tuple[int, ...]:
        return tuple(meet_irreducible_masks(self.closed_family, self.full))

    def mask(self, names: Iterable[str]) -> int:
        index = {n: i for i, n in enumerate(self.ground)}
        m = 0
        for n in names:
            if n not in index:
                raise GeneratorOutOfGround(f"{n!r} is not in the ground set.", witness=n)
            m |= 1 << index[n]
        return m


@dataclass(frozen=True)
class FiniteTopology:
    ground: Tuple[str, ...]
    open_family: Tuple[int, ...]

    def __post_init__(self):
        top = full_mask(len(self.ground))
        members = set(self.open_family)
        if 0 not in members or top not in members:
            raise NotAClosureSystem("A topology contains the empty set and the ground set.")
        for a, b in itertools.combinations(self.open_family, 2):
            if a | b not in members or a & b not in members:
                raise NotAClosureSystem("Open sets must be closed under union and intersection.", witness=(a, b))

    @property
    def full(self) -> int:
        return full_mask(len(self.ground))

    @cached_property
    def closed_family(self) -> Tuple[int, ...]:
        top = self.full
        return tuple(canonical_order(top & ~o for o in self.open_family))

    def closure_system(self) -> FiniteClosureSystem:
        return FiniteClosureSystem(self.ground, self.closed_family)


# ------------------------- Closure systems -------------------------
def saturate(ground: Sequence[str], generators: Iterable[int]) -> FiniteClosureSystem:
    """
    Smallest intersection-closed family containing the generators and the ground set,
    with the empty set adjoined.
    """
    top = full_mask(len(ground))
    gens = list(generators)
    for g in gens:
        if g & ~top:
            raise GeneratorOutOfGround(f"Generator {g:#x} has elements outside the ground set.", witness=g)
    family = intersection_closure(gens, top)
    if 0 not in family:
        family = [0] + family
    return FiniteClosureSystem(tuple(ground), tuple(family))


def close(s: FiniteClosureSystem, a: int) -> int:
    """Smallest closed set containing a."""
    if a & ~s.full:
        raise GeneratorOutOfGround(f"Subset {a:#x} is not inside the ground set.", witness=a)
    if a in s.members:
        return a
    result = s.full
    for m in s.irreducibles:
        if is_subset(a, m):
            result &= m
    return result


def is_intersection_closed(family: Iterable[int]) -> bool:
    members = list(family)
    present = set(members)
    return all(a & b in present for a, b in itertools.combinations(members, 2))


def additivity_witness(s: FiniteClosureSystem) -> Optional[Tuple[int, int]]:
    """A pair of closed sets whose union is not closed, or None."""
    for i, j in union_failures(s.closed_family, len(s.ground)):
        return s.closed_family[i], s.closed_family[j]
    return None


def is_additive(s: FiniteClosureSystem) -> bool:
    """True iff c(A ∪ B) = c(A) ∪ c(B) for all A, B (binary unions of closed sets suffice)."""
    return additivity_witness(s) is None


def additivity_defect(s: FiniteClosureSystem) -> int:
    """Number of unordered pairs of closed sets whose union is not closed."""
    return count_union_failures(s.closed_family, len(s.ground))


def meet_irreducibles(s: FiniteClosureSystem) -> List[int]:
    return list(s.irreducibles)


# ------------------------- Topologies -------------------------
def topology_from_subbase(ground: Sequence[str], subbase: Iterable[int]) -> FiniteTopology:
    """Close a subbase under finite intersections, then under unions."""
    top = full_mask(len(ground))
    base = set(intersection_closure(subbase, top))
    opens: Set[int] = {0} | base
    frontier = list(opens)
    while frontier:
        current = frontier.pop()
        for b in base:
            u = current | b
            if u not in opens:
                opens.add(u)
                frontier.append(u)
    return FiniteTopology(tuple(ground), tuple(canonical_order(opens)))


def topology_from_preorder(ground: Sequence[str], below: Sequence[int]) -> FiniteTopology:
    """
    Topology whose specialisation pre-order is given: below[i] is the mask of j with j <= i.
    Open sets are the up-closed sets, generated by the principal up-sets.
    """
    n = len(ground)
    up = [0] * n
    for i in range(n):
        for j in iter_bits(below[i]):
            up[j] |= 1 << i
    return topology_from_subbase(ground, up)


def enumerate_topologies(n: int) -> List[FiniteTopology]:
    """
    All topologies on the points 0..n-1, one per pre-order.
    Pre-orders are enumerated as reflexive transitive relations over the n(n-1) off-diagonal pairs.
    """
    ground = tuple(str(i) for i in range(n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    result = []
    for bits in range(1 << len(pairs)):
        below = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if (bits >> k) & 1:
                below[j] |= 1 << i
        if all(is_subset(below[i], below[j]) for j in range(n) for i in iter_bits(below[j])):
            result.append(topology_from_preorder(ground, below))
    return result


def pseudocomplement(t: FiniteTopology, a: int) -> int:
    """
    A* = union of the open sets disjoint from A; cross-checked against X \\ c_X(A).
    """
    if a not in set(t.open_family):
        raise NotOpen(f"Subset {a:#x} is not open.", witness=a)
    star = 0
    for o in t.open_family:
        if o & a == 0:
            star |= o
    via_closure = t.full & ~close(t.closure_system(), a)
    if star != via_closure:
        raise InvariantViolation(
            f"Pseudocomplement {star:#x} differs from the complement of the closure {via_closure:#x}.",
            witness=(a, star, via_closure),
        )
    return star


@dataclass(frozen=True)
class Prop1Verdict:
    ortho_exists: bool
    boolean: bool
    clopen_coincide: bool

    @property
    def equivalence_holds(self) -> bool:
        return self.ortho_exists == self.boolean == self.clopen_coincide


def prop1_verdict(t: FiniteTopology, cap: Optional[int] = None) -> Prop1Verdict:
    """
    Evaluate, independently, whether the closed-set lattice admits an orthocomplementation,
    whether it is Boolean, and whether closed and open sets coincide.
    """
    closed = list(t.closed_family)
    lattice = lattice_from_family(closed)
    orthos = enumerate_orthos(lattice, cap=cap)
    return Prop1Verdict(
        ortho_exists=bool(orthos),
        boolean=is_boolean(lattice),
        clopen_coincide=set(closed) == set(t.open_family),
    )


def discrete_topology(ground: Sequence[str]) -> FiniteTopology:
    return FiniteTopology(tuple(ground), tuple(canonical_order(range(1 << len(ground)))))
