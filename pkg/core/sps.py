"""
Finite State Property Systems.

A FiniteSps is stored in its canonical form: the states and the Cartan image
κ(a) of every property a, as a bitmask over the states. Property determination
makes κ an order embedding, so the property lattice is the family of images
ordered by inclusion and a property is named by its image. Property indices
follow the canonical order (size, then mask), so 0 is index 0 and 1 is last.
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

from core.closure import FiniteClosureSystem, close
from core.config import get_iso_cap
from core.errors import (
    InvariantViolation,
    NotALattice,
    NotAPartialOrder,
    SizeCapExceeded,
    UnknownProperty,
)
from core.lattice import FiniteLattice, OrthoMap, lattice_from_family
from core.utils import canonical_order, full_mask, is_subset, iter_bits, popcount, render


@dataclass(frozen=True)
class TestPair:
    """A test and its inverse, given by their eigen-properties (property indices)."""

    __test__ = False  # not a pytest class

    yes_property: int
    no_property: int


@dataclass(frozen=True)
class FiniteSps:
    states: Tuple[str, ...]
    images: Tuple[int, ...]
    declared_order: Optional[Tuple[Tuple[int, int], ...]] = None

    @classmethod
    def from_images(cls, states: Sequence[str], images: Iterable[int],
                    declared_order: Optional[Iterable[Tuple[int, int]]] = None,
                    keep_duplicates: bool = False) -> "FiniteSps":
        """
        Canonically ordered system. With keep_duplicates a repeated image stays
        repeated, so that verify_axioms reports it as a failure of injectivity.
        """
        order = tuple(sorted(set(declared_order))) if declared_order is not None else None
        masks = list(images)
        if keep_duplicates:
            ordered = sorted(masks, key=lambda m: (popcount(m), m))
        else:
            ordered = canonical_order(masks)
        return cls(tuple(states), tuple(ordered), order)

    @property
    def has_duplicates(self) -> bool:
        return len(set(self.images)) != len(self.images)

    @property
    def size(self) -> int:
        return len(self.images)

    @property
    def full(self) -> int:
        return full_mask(len(self.states))

    @cached_property
    def index_of(self) -> Dict[int, int]:
        return {m: i for i, m in enumerate(self.images)}

    @cached_property
    def state_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.states)}

    @cached_property
    def lattice(self) -> FiniteLattice:
        return lattice_from_family(self.images, [self.property_name(i) for i in range(self.size)])

    @cached_property
    def closure(self) -> FiniteClosureSystem:
        return to_closure(self)

    @property
    def top(self) -> int:
        return self.property_index(self.full)

    @property
    def bottom(self) -> int:
        return self.property_index(0)

    def property_index(self, mask: int) -> int:
        try:
            return self.index_of[mask]
        except KeyError:
            raise UnknownProperty(f"No property has Cartan image {render(mask, self.states)}.", witness=mask)

    def property_named(self, state_names: Iterable[str]) -> int:
        """Property whose Cartan image is exactly the given states."""
        mask = 0
        for name in state_names:
            if name not in self.state_index:
                raise UnknownProperty(f"Unknown state {name!r}.", witness=name)
            mask |= 1 << self.state_index[name]
        return self.property_index(mask)

    def property_name(self, a: int) -> str:
        return render(self.images[a], self.states)

    def xi(self, p: int) -> FrozenSet[int]:
        """Properties actual in state p."""
        return frozenset(a for a, m in enumerate(self.images) if (m >> p) & 1)

    def meet_of(self, props: Iterable[int]) -> int:
        """Meet in L: the property whose image is the intersection of the images."""
        mask = self.full
        for a in props:
            mask &= self.images[a]
        return self.property_index(mask)

    def join_of(self, props: Iterable[int]) -> int:
        """Join in L: the closure of the union of the images."""
        mask = 0
        for a in props:
            mask |= self.images[a]
        return self.property_index(close(self.closure, mask))


@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    passed: bool
    witness: Optional[Tuple] = None
    detail: str = ""


@dataclass(frozen=True)
class AxiomVerdict:
    checks: Tuple[AxiomCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def check(self, axiom: str) -> AxiomCheck:
        return next(c for c in self.checks if c.axiom == axiom)


# ------------------------- Axioms -------------------------
def derived_preorder(s: FiniteSps) -> List[Tuple[int, int]]:
    """Pairs (p, q) with p <= q, i.e. ξ(q) ⊆ ξ(p)."""
    n = len(s.states)
    pairs = []
    for p in range(n):
        for q in range(n):
            if all((m >> p) & 1 for m in s.images if (m >> q) & 1):
                pairs.append((p, q))
    return pairs


def _preorder_closure(n: int, pairs: Iterable[Tuple[int, int]]) -> FrozenSet[Tuple[int, int]]:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(pairs)
    closure = nx.transitive_closure(graph, reflexive=True)
    return frozenset(closure.edges)


def _check_axiom2(s: FiniteSps) -> AxiomCheck:
    if s.declared_order is None:
        return AxiomCheck("axiom2", True, detail="pre-order derived from ξ")
    derived = set(derived_preorder(s))
    declared = _preorder_closure(len(s.states), s.declared_order)
    for p, q in sorted(declared.symmetric_difference(derived)):
        relation = "declared but ξ(q) ⊄ ξ(p)" if (p, q) in declared else "ξ(q) ⊆ ξ(p) but not declared"
        return AxiomCheck("axiom2", False, (s.states[p], s.states[q]), f"p <= q {relation}")
    return AxiomCheck("axiom2", True)


def verify_axioms(s: FiniteSps) -> AxiomVerdict:
    """
    Check that the family of Cartan images makes (Σ, L, ξ) a State Property System.
    Every failing check carries a concrete witness (states or property images).
    """
    names = s.states
    checks = []

    # Repeated images are an axiom 3 failure; the lattice check runs on the distinct ones.
    family = canonical_order(s.images) if s.has_duplicates else list(s.images)
    try:
        if s.has_duplicates:
            lattice_from_family(family)
        else:
            s.lattice
        checks.append(AxiomCheck("lattice", True))
    except (NotALattice, NotAPartialOrder) as e:
        witness = tuple(render(family[i], names) for i in e.witness) if isinstance(e.witness, tuple) else None
        checks.append(AxiomCheck("lattice", False, witness, str(e)))

    members = set(s.images)
    if s.full not in members:
        largest = max(s.images, key=popcount, default=0)
        p = next(iter_bits(s.full & ~largest))
        checks.append(AxiomCheck("axiom1", False, (names[p],), "1 ∉ ξ(p): no property is actual in every state"))
    elif 0 not in members:
        smallest = s.images[0]
        p = next(iter_bits(smallest))
        checks.append(AxiomCheck("axiom1", False, (names[p],), "0 ∈ ξ(p): the least property is actual somewhere"))
    else:
        checks.append(AxiomCheck("axiom1", True))

    checks.append(_check_axiom2(s))

    if len(members) != len(s.images):
        dup = next(m for m in s.images if s.images.count(m) > 1)
        checks.append(AxiomCheck("axiom3", False, (render(dup, names),), "κ is not injective"))
    else:
        checks.append(AxiomCheck("axiom3", True))

    witness = None
    for a, b in itertools.combinations(s.images, 2):
        if a & b not in members:
            witness = (render(a, names), render(b, names))
            detail = f"κ(a ∧ b) ≠ κ(a) ∩ κ(b) = {render(a & b, names)}"
            break
    if witness:
        checks.append(AxiomCheck("axiom4", False, witness, detail))
    else:
        checks.append(AxiomCheck("axiom4", True))

    return AxiomVerdict(tuple(checks))


@dataclass(frozen=True)
class ActualityCheck:
    verdict: AxiomVerdict
    sps: Optional[FiniteSps]
    property_of: Optional[Tuple[int, ...]]


def verify_actuality(states: Sequence[str], lattice: FiniteLattice,
                     actuality: Sequence[Iterable[int]]) -> ActualityCheck:
    """
    The State Property System axioms for an abstract presentation: a lattice plus,
    per state, the set of actual elements. When every axiom holds the canonical
    FiniteSps is returned together with the map lattice element -> property index.
    """
    n = len(states)
    xi = [frozenset(a) for a in actuality]
    kappa = [0] * lattice.size
    for p, actual in enumerate(xi):
        for a in actual:
            kappa[a] |= 1 << p

    checks = []
    witness = next(((states[p],) for p in range(n) if lattice.top not in xi[p] or lattice.bottom in xi[p]), None)
    checks.append(AxiomCheck("axiom1", witness is None, witness, "" if witness is None else "1 ∉ ξ(p) or 0 ∈ ξ(p)"))
    checks.append(AxiomCheck("axiom2", True, detail="pre-order derived from ξ"))

    witness = None
    for a in range(lattice.size):
        for b in range(lattice.size):
            if lattice.leq(a, b) != is_subset(kappa[a], kappa[b]):
                witness = (lattice.names[a], lattice.names[b])
                break
        if witness:
            break
    checks.append(AxiomCheck("axiom3", witness is None, witness, "" if witness is None else "a ≤ b ⇎ κ(a) ⊆ κ(b)"))

    witness = None
    for a, b in itertools.combinations(range(lattice.size), 2):
        if kappa[lattice.meet2(a, b)] != kappa[a] & kappa[b]:
            witness = (lattice.names[a], lattice.names[b])
            break
    checks.append(AxiomCheck("axiom4", witness is None, witness, "" if witness is None else "κ(a ∧ b) ≠ κ(a) ∩ κ(b)"))

    verdict = AxiomVerdict(tuple(checks))
    if not verdict.passed:
        return ActualityCheck(verdict, None, None)
    sps = FiniteSps.from_images(states, kappa)
    return ActualityCheck(verdict, sps, tuple(sps.index_of[k] for k in kappa))


# ------------------------- Cartan map and closure translation -------------------------
def cartan(s: FiniteSps, a: int) -> int:
    """κ(a) = {p | a ∈ ξ(p)} as a state mask."""
    if not 0 <= a < s.size:
        raise UnknownProperty(f"Property index {a} is outside 0..{s.size - 1}.", witness=a)
    return s.images[a]


def from_closure(c: FiniteClosureSystem) -> FiniteSps:
    """Properties are the closed sets ordered by inclusion; ξ(p) = {A | p ∈ A}."""
    return FiniteSps.from_images(c.ground, c.closed_family)


def to_closure(s: FiniteSps) -> FiniteClosureSystem:
    """The Cartan image family as a closure system."""
    return FiniteClosureSystem(s.states, s.images)


# ------------------------- Direct sums -------------------------
def _sum_state_names(summands: Sequence[FiniteSps]) -> List[str]:
    names = [n for s in summands for n in s.states]
    if len(set(names)) == len(names):
        return names
    return [f"{k}:{n}" for k, s in enumerate(summands) for n in s.states]


def _offsets(summands: Sequence[FiniteSps]) -> List[int]:
    offsets, total = [], 0
    for s in summands:
        offsets.append(total)
        total += len(s.states)
    return offsets


def direct_sum(summands: Sequence[FiniteSps]) -> FiniteSps:
    """
    States: disjoint union. Properties: the product lattice, componentwise order.
    A state of summand k makes (a_1, ..., a_n) actual iff it makes a_k actual, so
    the image of a tuple is the union of the shifted component images.
    """
    if not summands:
        raise ValueError("direct_sum needs at least one summand.")
    offsets = _offsets(summands)
    images = []
    for combo in itertools.product(*(s.images for s in summands)):
        mask = 0
        for off, m in zip(offsets, combo):
            mask |= m << off
        images.append(mask)
    return FiniteSps.from_images(_sum_state_names(summands), images)


def direct_sum_ortho(summands: Sequence[FiniteSps], orthos: Sequence[OrthoMap], total: FiniteSps) -> OrthoMap:
    """The componentwise orthocomplementation of a direct sum."""
    offsets = _offsets(summands)
    image = []
    for mask in total.images:
        out = 0
        for s, m, off in zip(summands, orthos, offsets):
            component = (mask >> off) & s.full
            out |= s.images[m(s.index_of[component])] << off
        image.append(total.index_of[out])
    return OrthoMap(tuple(image))


def compress(mask: int, block: int) -> int:
    """Re-index the bits of mask that lie in block to 0..|block|-1."""
    out = 0
    for k, p in enumerate(iter_bits(block)):
        if (mask >> p) & 1:
            out |= 1 << k
    return out


def expand(local: int, block: int) -> int:
    """Inverse of compress."""
    out = 0
    for k, p in enumerate(iter_bits(block)):
        if (local >> k) & 1:
            out |= 1 << p
    return out


def interval_subsystem(s: FiniteSps, a: int) -> FiniteSps:
    """States κ(a), properties the interval [0, a], ξ restricted."""
    block = s.images[a]
    states = [s.states[p] for p in iter_bits(block)]
    images = [compress(m, block) for m in s.images if is_subset(m, block)]
    return FiniteSps.from_images(states, images)


# ------------------------- Isomorphism -------------------------
@dataclass(frozen=True)
class SpsIsomorphism:
    state_map: Tuple[int, ...]
    property_map: Tuple[int, ...]


def sps_invariant(s: FiniteSps) -> Tuple:
    """Relabelling-invariant signature used to reject non-isomorphic pairs early."""
    degrees = sorted(len(s.xi(p)) for p in range(len(s.states)))
    return len(s.states), s.size, tuple(popcount(m) for m in s.images), tuple(degrees)


def _incidence_graph(s: FiniteSps) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from((("state", p) for p in range(len(s.states))), kind="state")
    g.add_nodes_from((("prop", a) for a in range(s.size)), kind="prop")
    for a, m in enumerate(s.images):
        g.add_edges_from((("state", p), ("prop", a)) for p in iter_bits(m))
    return g


def is_isomorphic(s1: FiniteSps, s2: FiniteSps, cap: Optional[int] = None) -> Optional[SpsIsomorphism]:
    """
    A state bijection and lattice isomorphism commuting with ξ, or None.
    Searched as an isomorphism of the state/property incidence graphs.
    """
    cap = get_iso_cap(cap)
    nodes = max(len(s1.states) + s1.size, len(s2.states) + s2.size)
    if nodes > cap:
        raise SizeCapExceeded(nodes, cap, what="isomorphism search")
    if sps_invariant(s1) != sps_invariant(s2):
        return None

    matcher = isomorphism.GraphMatcher(
        _incidence_graph(s1), _incidence_graph(s2),
        node_match=lambda x, y: x["kind"] == y["kind"],
    )
    if not matcher.is_isomorphic():
        return None
    state_map = [0] * len(s1.states)
    property_map = [0] * s1.size
    for (kind, i), (_, j) in matcher.mapping.items():
        if kind == "state":
            state_map[i] = j
        else:
            property_map[i] = j
    witness = SpsIsomorphism(tuple(state_map), tuple(property_map))
    for a, m in enumerate(s1.images):
        mapped = 0
        for p in iter_bits(m):
            mapped |= 1 << state_map[p]
        if s2.images[property_map[a]] != mapped:
            raise InvariantViolation("Incidence isomorphism does not commute with ξ.", witness=witness)
    return witness
