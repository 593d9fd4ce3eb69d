"""
Finite bounded lattices and orthocomplementations.

Elements are indices 0..n-1. The order is stored as one bitmask per element:
down[i] has bit j set when j <= i, up[i] has bit j set when i <= j. A binary meet
then exists exactly when down[i] & down[j] is itself some down[g], which makes
both validation and meet/join lookups a dictionary hit.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from core.config import get_size_cap
from core.errors import InvalidOrtho, NotALattice, NotAPartialOrder, SizeCapExceeded
from core.utils import full_mask, is_subset, iter_bits, popcount

Relation = Union[Callable[[int, int], bool], Iterable[Tuple[int, int]]]


@dataclass(frozen=True)
class FiniteLattice:
    names: Tuple[str, ...]
    down: Tuple[int, ...]
    up: Tuple[int, ...]
    bottom: int
    top: int

    @property
    def size(self) -> int:
        return len(self.names)

    @cached_property
    def _by_down(self) -> Dict[int, int]:
        return {m: i for i, m in enumerate(self.down)}

    @cached_property
    def _by_up(self) -> Dict[int, int]:
        return {m: i for i, m in enumerate(self.up)}

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"Unknown lattice element {name!r}")

    def leq(self, a: int, b: int) -> bool:
        return bool((self.down[b] >> a) & 1)

    def meet2(self, a: int, b: int) -> int:
        return self._by_down[self.down[a] & self.down[b]]

    def join2(self, a: int, b: int) -> int:
        return self._by_up[self.up[a] & self.up[b]]


@dataclass(frozen=True)
class OrthoMap:
    image: Tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.image[a]


@dataclass(frozen=True)
class OrthoCheck:
    axiom: str
    passed: bool
    witness: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class OrthoVerdict:
    checks: Tuple[OrthoCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[OrthoCheck]:
        return [c for c in self.checks if not c.passed]


# ------------------------- Construction -------------------------
def _validated(names: Sequence[str], down: List[int]) -> FiniteLattice:
    n = len(names)
    if n == 0:
        raise NotALattice("A lattice needs at least one element (0 and 1).")
    if len(set(names)) != n:
        raise NotAPartialOrder("Element names must be unique.")

    for i in range(n):
        if not (down[i] >> i) & 1:
            raise NotAPartialOrder(f"Relation is not reflexive at {names[i]!r}.", witness=(i,))

    up = [0] * n
    for j in range(n):
        for i in iter_bits(down[j]):
            up[i] |= 1 << j

    for i in range(n):
        both = down[i] & up[i] & ~(1 << i)
        if both:
            j = next(iter_bits(both))
            raise NotAPartialOrder(
                f"Relation is not antisymmetric: {names[i]!r} and {names[j]!r} are mutually below each other.",
                witness=(i, j),
            )

    for i in range(n):
        for j in iter_bits(down[i]):
            extra = down[j] & ~down[i]
            if extra:
                k = next(iter_bits(extra))
                raise NotAPartialOrder(
                    f"Relation is not transitive: {names[k]!r} <= {names[j]!r} <= {names[i]!r} "
                    f"but not {names[k]!r} <= {names[i]!r}.",
                    witness=(k, j, i),
                )

    by_down = {m: i for i, m in enumerate(down)}
    by_up = {m: i for i, m in enumerate(up)}
    for i in range(n):
        for j in range(i + 1, n):
            if down[i] & down[j] not in by_down:
                raise NotALattice(
                    f"Elements {names[i]!r} and {names[j]!r} have no greatest lower bound.", witness=(i, j)
                )
            if up[i] & up[j] not in by_up:
                raise NotALattice(
                    f"Elements {names[i]!r} and {names[j]!r} have no least upper bound.", witness=(i, j)
                )

    everything = full_mask(n)
    bottom = by_up[everything] if everything in by_up else None
    top = by_down[everything] if everything in by_down else None
    if bottom is None or top is None:
        raise NotALattice("The order has no bottom or no top element.")

    return FiniteLattice(names=tuple(names), down=tuple(down), up=tuple(up), bottom=bottom, top=top)


def build_lattice(elements: Sequence[str], leq: Relation) -> FiniteLattice:
    """
    Validate an order relation and return the lattice it defines.
    `leq` is either a predicate leq(i, j) or the collection of pairs (i, j) with i <= j.
    Raises NotAPartialOrder or NotALattice with the offending element(s) as witness.
    """
    n = len(elements)
    down = [0] * n
    if callable(leq):
        for i in range(n):
            for j in range(n):
                if leq(i, j):
                    down[j] |= 1 << i
    else:
        for i, j in leq:
            if not (0 <= i < n and 0 <= j < n):
                raise NotAPartialOrder(f"Pair ({i}, {j}) refers to an element outside the lattice.")
            down[j] |= 1 << i
    return _validated(list(elements), down)


def lattice_from_covers(names: Sequence[str], covers: Iterable[Tuple[str, str]]) -> FiniteLattice:
    """
    Build a lattice from covering pairs (lower, upper); the order is their
    reflexive-transitive closure.
    """
    index = {name: i for i, name in enumerate(names)}
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(names)))
    for lower, upper in covers:
        if lower not in index or upper not in index:
            raise NotAPartialOrder(f"Covering pair ({lower!r}, {upper!r}) names an unknown element.")
        graph.add_edge(index[lower], index[upper])
    if not nx.is_directed_acyclic_graph(graph):
        cycle = [names[u] for u, _ in nx.find_cycle(graph)]
        raise NotAPartialOrder(f"Covering pairs contain a cycle through {cycle}.", witness=tuple(cycle))
    closure = nx.transitive_closure_dag(graph)
    down = [1 << j for j in range(len(names))]
    for i, j in closure.edges:
        down[j] |= 1 << i
    return _validated(list(names), down)


def lattice_from_family(masks: Sequence[int], names: Optional[Sequence[str]] = None) -> FiniteLattice:
    """Lattice of a family of sets ordered by inclusion (masks assumed distinct)."""
    n = len(masks)
    if names is None:
        names = [str(i) for i in range(n)]
    down = [0] * n
    for j in range(n):
        mj = masks[j]
        row = 0
        for i in range(n):
            if is_subset(masks[i], mj):
                row |= 1 << i
        down[j] = row
    return _validated(list(names), down)


def covering_pairs(l: FiniteLattice) -> List[Tuple[int, int]]:
    """Hasse diagram edges (lower, upper), sorted."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(l.size))
    for j in range(l.size):
        for i in iter_bits(l.down[j] & ~(1 << j)):
            graph.add_edge(i, j)
    return sorted(nx.transitive_reduction(graph).edges)


# ------------------------- Standard lattices -------------------------
def chain(n: int) -> FiniteLattice:
    names = [str(i) for i in range(n)]
    return build_lattice(names, lambda i, j: i <= j)


def pentagon() -> FiniteLattice:
    """N5: 0 < a < c < 1 and 0 < b < 1 with b incomparable to a and c."""
    names = ["0", "a", "b", "c", "1"]
    return lattice_from_covers(names, [("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")])


def boolean_lattice(k: int) -> FiniteLattice:
    """Subsets of a k-set; element i is the subset with bitmask i."""
    masks = list(range(1 << k))
    names = ["{" + ",".join(str(b) for b in iter_bits(m)) + "}" for m in masks]
    return lattice_from_family(masks, names)


def mo_lattice(n: int) -> Tuple[FiniteLattice, OrthoMap]:
    """
    MOn: 0, 1 and n pairs of atoms x, x* that are pairwise complements.
    Returned with its standard orthocomplementation.
    """
    letters = "abcdefghijklmnopqrstuvwxyz"
    names = ["0"]
    for k in range(n):
        names += [letters[k], letters[k] + "*"]
    names.append("1")
    top = len(names) - 1
    covers = []
    for i in range(1, top):
        covers += [("0", names[i]), (names[i], "1")]
    if n == 0:
        covers = [("0", "1")]
    l = lattice_from_covers(names, covers)
    image = [0] * len(names)
    image[0], image[top] = top, 0
    for k in range(n):
        a, b = 1 + 2 * k, 2 + 2 * k
        image[a], image[b] = b, a
    return l, OrthoMap(tuple(image))


# ------------------------- Meets and joins -------------------------
def meet(l: FiniteLattice, s: Iterable[int]) -> int:
    """Greatest lower bound of s; the meet of the empty set is the top."""
    common = full_mask(l.size)
    for a in s:
        common &= l.down[a]
    return l._by_down[common]


def join(l: FiniteLattice, s: Iterable[int]) -> int:
    """Least upper bound of s; the join of the empty set is the bottom."""
    common = full_mask(l.size)
    for a in s:
        common &= l.up[a]
    return l._by_up[common]


def atoms(l: FiniteLattice) -> List[int]:
    return [i for i in range(l.size) if i != l.bottom and l.down[i] == (1 << i) | (1 << l.bottom)]


def coatoms(l: FiniteLattice) -> List[int]:
    return [i for i in range(l.size) if i != l.top and l.up[i] == (1 << i) | (1 << l.top)]


def complements(l: FiniteLattice, a: int) -> List[int]:
    return [b for b in range(l.size) if l.meet2(a, b) == l.bottom and l.join2(a, b) == l.top]


# ------------------------- Structural predicates -------------------------
def is_atomistic(l: FiniteLattice) -> bool:
    """Every element is the join of the atoms below it."""
    atom_mask = 0
    for a in atoms(l):
        atom_mask |= 1 << a
    return all(join(l, iter_bits(l.down[x] & atom_mask)) == x for x in range(l.size))


def is_distributive(l: FiniteLattice) -> bool:
    n = l.size
    for a in range(n):
        for b in range(n):
            for c in range(b + 1, n):
                lhs = l.meet2(a, l.join2(b, c))
                rhs = l.join2(l.meet2(a, b), l.meet2(a, c))
                if lhs != rhs:
                    return False
    return True


def is_boolean(l: FiniteLattice) -> bool:
    """Distributive and every element has a complement."""
    if not all(complements(l, a) for a in range(l.size)):
        return False
    return is_distributive(l)


# ------------------------- Orthocomplementation -------------------------
def verify_ortho(l: FiniteLattice, m: OrthoMap) -> OrthoVerdict:
    """
    Check totality, involution, order reversal, a ∧ a' = 0 and a ∨ a' = 1,
    reporting the first witness of each failure.
    """
    n = l.size
    image = m.image
    if len(image) != n or any(not (0 <= b < n) for b in image):
        bad = next((i for i, b in enumerate(image) if not (0 <= b < n)), len(image))
        return OrthoVerdict((OrthoCheck("total", False, (bad,)),))

    checks = [OrthoCheck("total", True)]

    witness = next(((a,) for a in range(n) if image[image[a]] != a), None)
    checks.append(OrthoCheck("involution", witness is None, witness))

    witness = None
    for b in range(n):
        for a in iter_bits(l.down[b]):
            if not l.leq(image[b], image[a]):
                witness = (a, b)
                break
        if witness:
            break
    checks.append(OrthoCheck("order_reversing", witness is None, witness))

    witness = next(((a,) for a in range(n) if l.meet2(a, image[a]) != l.bottom), None)
    checks.append(OrthoCheck("meet_zero", witness is None, witness))

    witness = next(((a,) for a in range(n) if l.join2(a, image[a]) != l.top), None)
    checks.append(OrthoCheck("join_one", witness is None, witness))

    return OrthoVerdict(tuple(checks))


def require_ortho(l: FiniteLattice, m: OrthoMap) -> None:
    verdict = verify_ortho(l, m)
    if not verdict.passed:
        first = verdict.failures()[0]
        raise InvalidOrtho(f"Map is not an orthocomplementation: {first.axiom} fails at {first.witness}.",
                           witness=first)


def enumerate_orthos(l: FiniteLattice, cap: Optional[int] = None) -> List[OrthoMap]:
    """
    All orthocomplementations of l, in lexicographic order of their image tuples.
    An empty list certifies that l admits none.

    Backtracking pairs the smallest unassigned element with a complement whose
    down/up sizes are swapped (a dual automorphism exchanges them, so atoms only
    meet coatoms) and that keeps order reversal with every pair chosen so far.
    """
    cap = get_size_cap(cap)
    n = l.size
    if n > cap:
        raise SizeCapExceeded(n, cap)

    shape = [(popcount(l.down[a]), popcount(l.up[a])) for a in range(n)]
    candidates = []
    for a in range(n):
        row = []
        for b in range(n):
            if shape[b] != (shape[a][1], shape[a][0]):
                continue
            if l.meet2(a, b) == l.bottom and l.join2(a, b) == l.top:
                row.append(b)
        candidates.append(row)

    image = [-1] * n
    found: List[OrthoMap] = []

    def consistent(a: int, b: int) -> bool:
        for x in range(n):
            xb = image[x]
            if xb < 0:
                continue
            if l.leq(a, x) and not l.leq(xb, b):
                return False
            if l.leq(x, a) and not l.leq(b, xb):
                return False
            if l.leq(b, x) and not l.leq(xb, a):
                return False
            if l.leq(x, b) and not l.leq(a, xb):
                return False
        return True

    def search(start: int) -> None:
        a = start
        while a < n and image[a] >= 0:
            a += 1
        if a == n:
            found.append(OrthoMap(tuple(image)))
            return
        for b in candidates[a]:
            if image[b] >= 0 or (b == a and n > 1):
                continue
            if not consistent(a, b):
                continue
            image[a], image[b] = b, a
            search(a + 1)
            image[a] = image[b] = -1

    search(0)
    found.sort(key=lambda om: om.image)
    return found


def central_elements(l: FiniteLattice, m: OrthoMap) -> FrozenSet[int]:
    """Elements a with b = (b ∧ a) ∨ (b ∧ a') for every b."""
    require_ortho(l, m)
    centre = set()
    for a in range(l.size):
        ac = m(a)
        if all(l.join2(l.meet2(b, a), l.meet2(b, ac)) == b for b in range(l.size)):
            centre.add(a)
    return frozenset(centre)
