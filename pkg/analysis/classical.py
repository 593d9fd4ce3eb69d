"""
Classical and operationally classical properties, classical states, the
classical subsystem (Ω, 𝒞, ξ_c), the decomposition into totally non-classical
summands and the classical = topological = central comparison.
"""
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

from core.errors import InvariantViolation, PartitionFailure, UnknownProperty
from core.lattice import OrthoMap, central_elements, is_atomistic, require_ortho
from core.sps import (
    FiniteSps,
    SpsIsomorphism,
    TestPair,
    compress,
    direct_sum,
    expand,
    interval_subsystem,
    is_isomorphic,
    verify_axioms,
)
from core.utils import intersection_closure, iter_bits


@dataclass(frozen=True)
class ClassicalAnalysis:
    classical_set: FrozenSet[int]
    classical_state_of: Tuple[int, ...]
    omega: Tuple[int, ...]
    partition: Tuple[int, ...]


@dataclass(frozen=True)
class OperationalClassicalAnalysis:
    cop_set: FrozenSet[int]
    omega_op_of: Tuple[int, ...]


# ------------------------- Classical properties (needs an ortho) -------------------------
def classical_properties(s: FiniteSps, m: OrthoMap) -> FrozenSet[int]:
    """Properties a with κ(a) ∪ κ(a') = Σ."""
    require_ortho(s.lattice, m)
    return frozenset(a for a in range(s.size) if s.images[a] | s.images[m(a)] == s.full)


def _classical_meet(s: FiniteSps, classical: FrozenSet[int], p: int) -> int:
    mask = s.full
    for a in classical:
        if (s.images[a] >> p) & 1:
            mask &= s.images[a]
    omega = s.property_index(mask)
    if omega not in classical:
        raise InvariantViolation(
            f"ω({s.states[p]}) = {s.property_name(omega)} is not classical although it is a meet of classical properties.",
            witness=(p, omega),
        )
    return omega


def classical_state(s: FiniteSps, m: OrthoMap, p: int) -> int:
    """ω(p): the meet of the classical properties actual in p."""
    return _classical_meet(s, classical_properties(s, m), p)


def analyze_classical(s: FiniteSps, m: OrthoMap) -> ClassicalAnalysis:
    classical = classical_properties(s, m)
    omega_of = tuple(_classical_meet(s, classical, p) for p in range(len(s.states)))
    omega = tuple(sorted(set(omega_of)))
    return ClassicalAnalysis(
        classical_set=classical,
        classical_state_of=omega_of,
        omega=omega,
        partition=tuple(s.images[w] for w in omega),
    )


def classical_subsystem(s: FiniteSps, m: OrthoMap) -> FiniteSps:
    """
    (Ω, 𝒞, ξ_c): states are the classical states, properties the classical
    properties, and ω makes a actual iff ω ≤ a.
    """
    analysis = analyze_classical(s, m)
    names = [s.property_name(w) for w in analysis.omega]
    images = []
    for a in sorted(analysis.classical_set):
        mask = 0
        for k, w in enumerate(analysis.omega):
            if s.images[w] & ~s.images[a] == 0:
                mask |= 1 << k
        images.append(mask)
    sub = FiniteSps.from_images(names, images)
    verdict = verify_axioms(sub)
    if not verdict.passed:
        raise InvariantViolation("The classical subsystem is not a State Property System.", witness=verdict.failures())
    return sub


def is_totally_nonclassical(s: FiniteSps, m: OrthoMap) -> bool:
    """Only 0 and 1 are classical."""
    return classical_properties(s, m) == frozenset({s.bottom, s.top})


# ------------------------- Decomposition -------------------------
@dataclass(frozen=True)
class Summand:
    omega: int
    states: int
    sps: FiniteSps
    ortho: OrthoMap


@dataclass(frozen=True)
class Decomposition:
    summands: Tuple[Summand, ...]
    witness: SpsIsomorphism


def _check_partition(s: FiniteSps, blocks: Sequence[int]) -> None:
    seen = 0
    for b in blocks:
        if seen & b:
            raise PartitionFailure("Classical state images overlap.", witness=b)
        seen |= b
    if seen != s.full:
        raise PartitionFailure("Classical state images do not cover Σ.", witness=s.full & ~seen)


def relative_ortho(s: FiniteSps, m: OrthoMap, omega: int, sub: FiniteSps) -> OrthoMap:
    """a ↦ a' ∧ ω on the interval [0, ω], expressed on the summand's property indices."""
    block = s.images[omega]
    image = []
    for local in sub.images:
        a = s.index_of[expand(local, block)]
        image.append(sub.index_of[compress(s.images[m(a)] & block, block)])
    return OrthoMap(tuple(image))


def decompose(s: FiniteSps, m: OrthoMap) -> Decomposition:
    """
    Split s into one summand per classical state ω: states κ(ω), properties the
    interval [0, ω], ξ restricted. The direct sum of the summands must be
    isomorphic to s and every summand must be totally non-classical.
    """
    analysis = analyze_classical(s, m)
    ordered = sorted(analysis.omega, key=lambda w: next(iter_bits(s.images[w])))
    _check_partition(s, [s.images[w] for w in ordered])

    summands = []
    for w in ordered:
        sub = interval_subsystem(s, w)
        sub_ortho = relative_ortho(s, m, w, sub)
        if not is_totally_nonclassical(sub, sub_ortho):
            raise InvariantViolation(f"Summand for ω = {s.property_name(w)} has non-trivial classical properties.",
                                     witness=w)
        summands.append(Summand(omega=w, states=s.images[w], sps=sub, ortho=sub_ortho))

    witness = is_isomorphic(direct_sum([x.sps for x in summands]), s)
    if witness is None:
        raise InvariantViolation("The direct sum of the summands is not isomorphic to the system.")
    return Decomposition(tuple(summands), witness)


# ------------------------- Operational classicality (no ortho) -------------------------
def _check_tests(s: FiniteSps, tests: Sequence[TestPair]) -> None:
    for t in tests:
        for a in (t.yes_property, t.no_property):
            if not 0 <= a < s.size:
                raise UnknownProperty(f"Test refers to unknown property index {a}.", witness=t)


def operational_classical_properties(s: FiniteSps, tests: Sequence[TestPair]) -> FrozenSet[int]:
    """
    Meet-closure of the eigen-properties of the classical tests (those where the
    test or its inverse is certain in every state), together with 1.
    """
    _check_tests(s, tests)
    seeds = []
    for t in tests:
        yes, no = s.images[t.yes_property], s.images[t.no_property]
        if yes | no == s.full:
            seeds += [yes, no]
    return frozenset(s.property_index(mask) for mask in intersection_closure(seeds, s.full))


def _operational_meet(s: FiniteSps, cop: FrozenSet[int], p: int) -> int:
    mask = s.full
    for a in cop:
        if (s.images[a] >> p) & 1:
            mask &= s.images[a]
    return s.property_index(mask)


def operational_classical_state(s: FiniteSps, tests: Sequence[TestPair], p: int) -> int:
    """ω_op(p): the meet of the operationally classical properties actual in p."""
    return _operational_meet(s, operational_classical_properties(s, tests), p)


def analyze_operational(s: FiniteSps, tests: Sequence[TestPair]) -> OperationalClassicalAnalysis:
    cop = operational_classical_properties(s, tests)
    return OperationalClassicalAnalysis(
        cop_set=cop,
        omega_op_of=tuple(_operational_meet(s, cop, p) for p in range(len(s.states))),
    )


def complement_tests(s: FiniteSps, m: OrthoMap) -> List[TestPair]:
    """One test per property, its inverse testing the orthocomplement."""
    return [TestPair(a, m(a)) for a in range(s.size)]


# ------------------------- Classical vs topological vs central -------------------------
@dataclass(frozen=True)
class Thm3Report:
    classical: FrozenSet[int]
    topological: FrozenSet[int]
    centre: FrozenSet[int]
    atomistic: bool
    classical_equals_topological: bool
    classical_in_centre: bool
    centre_matches: Optional[bool]
    witness: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.classical_equals_topological and self.classical_in_centre and self.centre_matches is not False


def check_thm3(s: FiniteSps, m: OrthoMap) -> Thm3Report:
    """
    Compare 𝒞, 𝒯 and the centre. 𝒞 = 𝒯 and 𝒞 ⊆ centre must hold for every
    orthocomplementation; on atomistic lattices all three coincide.
    """
    from analysis.topological import topological_properties

    classical = classical_properties(s, m)
    topological = topological_properties(s)
    centre = central_elements(s.lattice, m)
    atomistic = is_atomistic(s.lattice)
    centre_matches = (classical == centre) if atomistic else None

    diff = (classical ^ topological) or (classical - centre) or ((classical ^ centre) if atomistic else frozenset())
    return Thm3Report(
        classical=classical,
        topological=topological,
        centre=centre,
        atomistic=atomistic,
        classical_equals_topological=classical == topological,
        classical_in_centre=classical <= centre,
        centre_matches=centre_matches,
        witness=min(diff) if diff else None,
    )
