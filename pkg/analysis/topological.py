"""
Topological properties and states, the topological Cartan map, the
T-classical subsystem (T, 𝒯, ξ_t) with its ⋁̃ join, and the coverage
diagnostics comparing τ with ω_op.

A property a is topological when κ(a ∨ b) = κ(a) ∪ κ(b) for every b, i.e. when
κ(a) ∪ κ(b) is itself a Cartan image. Every image is an intersection of
meet-irreducible images and union distributes over intersection, so scanning
the meet-irreducibles is enough to decide it.
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from analysis.classical import analyze_operational
from core.closure import is_additive
from core.errors import InvariantViolation, NotTopological, UnknownProperty
from core.sps import FiniteSps, TestPair, to_closure, verify_axioms
from core.utils import canonical_order, is_subset, iter_bits


@dataclass(frozen=True)
class TopologicalAnalysis:
    top_set: FrozenSet[int]
    tau_of: Tuple[int, ...]
    t_states: Tuple[int, ...]
    coverage: Tuple[int, ...]
    t_classical: bool


def _require_property(s: FiniteSps, a: int) -> None:
    if not 0 <= a < s.size:
        raise UnknownProperty(f"Property index {a} is outside 0..{s.size - 1}.", witness=a)


def topological_witness(s: FiniteSps, a: int) -> Optional[int]:
    """First b (in canonical order) with κ(a ∨ b) ≠ κ(a) ∪ κ(b), or None."""
    _require_property(s, a)
    image = s.images[a]
    for b, other in enumerate(s.images):
        if image | other not in s.index_of:
            return b
    return None


def is_topological(s: FiniteSps, a: int) -> bool:
    return topological_witness(s, a) is None


def topological_properties(s: FiniteSps) -> FrozenSet[int]:
    """𝒯, decided against the meet-irreducible images only."""
    irreducibles = s.closure.irreducibles
    members = s.index_of
    return frozenset(
        a for a, image in enumerate(s.images)
        if all(image | m in members for m in irreducibles)
    )


def _tau(s: FiniteSps, top_set: FrozenSet[int], p: int) -> int:
    mask = s.full
    for a in top_set:
        if (s.images[a] >> p) & 1:
            mask &= s.images[a]
    return s.property_index(mask)


def topological_state(s: FiniteSps, p: int) -> int:
    """τ(p): the meet of the topological properties actual in p."""
    return _tau(s, topological_properties(s), p)


def topological_state_space(s: FiniteSps) -> Tuple[int, ...]:
    """T = {τ(p) | p ∈ Σ}, as sorted property indices."""
    top_set = topological_properties(s)
    return tuple(sorted({_tau(s, top_set, p) for p in range(len(s.states))}))


def analyze_topological(s: FiniteSps) -> TopologicalAnalysis:
    top_set = topological_properties(s)
    tau_of = tuple(_tau(s, top_set, p) for p in range(len(s.states)))
    t_states = tuple(sorted(set(tau_of)))
    return TopologicalAnalysis(
        top_set=top_set,
        tau_of=tau_of,
        t_states=t_states,
        coverage=tuple(canonical_order(s.images[t] for t in t_states)),
        t_classical=is_t_classical(s),
    )


def topological_cartan(s: FiniteSps, a: int) -> FrozenSet[int]:
    """κ_t(a) = {τ(p) | p ∈ κ(a)} for a topological a."""
    _require_property(s, a)
    top_set = topological_properties(s)
    if a not in top_set:
        raise NotTopological(f"{s.property_name(a)} is not a topological property.",
                             witness=topological_witness(s, a))
    return frozenset(_tau(s, top_set, p) for p in iter_bits(s.images[a]))


def is_t_classical(s: FiniteSps) -> bool:
    """The associated closure operator is additive."""
    return is_additive(to_closure(s))


# ------------------------- T-classical subsystem -------------------------
def t_classical_system(s: FiniteSps) -> FiniteSps:
    """
    (T, 𝒯, ξ_t) with ξ_t(τ(p)) = ξ(p) ∩ 𝒯. States are named by the image of
    their topological state.
    """
    analysis = analyze_topological(s)
    top_list = sorted(analysis.top_set)

    actual_at: Dict[int, FrozenSet[int]] = {}
    for p, t in enumerate(analysis.tau_of):
        actual = frozenset(a for a in top_list if (s.images[a] >> p) & 1)
        seen = actual_at.setdefault(t, actual)
        if seen != actual:
            raise InvariantViolation(
                f"ξ_t is not well defined at τ = {s.property_name(t)}: states disagree on topological properties.",
                witness=(s.states[p], t),
            )

    states = analysis.t_states
    images = []
    for a in top_list:
        mask = 0
        for k, t in enumerate(states):
            if a in actual_at[t]:
                mask |= 1 << k
        images.append(mask)
    result = FiniteSps.from_images([s.property_name(t) for t in states], images)

    verdict = verify_axioms(result)
    if not verdict.passed:
        raise InvariantViolation("(T, 𝒯, ξ_t) is not a State Property System.", witness=verdict.failures())
    if not is_t_classical(result):
        raise InvariantViolation("(T, 𝒯, ξ_t) has a non-additive closure.")
    return result


def tilde_join(s: FiniteSps, props: Iterable[int]) -> int:
    """
    ⋁̃: the least topological property above every given one, the meet of the
    topological upper bounds. Equal to the join in L for finitely many inputs.
    """
    top_set = topological_properties(s)
    chosen = list(props)
    for a in chosen:
        _require_property(s, a)
        if a not in top_set:
            raise NotTopological(f"{s.property_name(a)} is not a topological property.", witness=a)

    union = 0
    for a in chosen:
        union |= s.images[a]
    mask = s.full
    for b in top_set:
        if is_subset(union, s.images[b]):
            mask &= s.images[b]
    result = s.property_index(mask)

    joined = s.join_of(chosen) if chosen else s.bottom
    if joined != result:
        raise InvariantViolation(
            f"⋁̃ gives {s.property_name(result)} but the lattice join is {s.property_name(joined)}.",
            witness=tuple(chosen),
        )
    return result


# ------------------------- τ versus ω_op -------------------------
@dataclass(frozen=True)
class Prop2Report:
    unconditional_holds: bool
    unconditional_witness: Optional[str]
    condition_holds: bool
    condition_witness: Optional[int]
    join_identity_holds: Optional[bool]
    union_identity_holds: Optional[bool]
    identity_witness: Optional[str] = None

    @property
    def holds(self) -> bool:
        return (self.unconditional_holds
                and self.join_identity_holds is not False
                and self.union_identity_holds is not False)


def check_prop2(s: FiniteSps, tests: Sequence[TestPair]) -> Prop2Report:
    """
    τ(p) = ⋁ {τ(q) | q ∈ κ(τ(p))} for every p. When 𝒯 ⊆ C_op also
    τ(p) = ⋁ {ω_op(q) | q ∈ κ(τ(p))} and κ(τ(p)) = ⋃ κ(ω_op(q)).
    """
    analysis = analyze_topological(s)
    tau_of = analysis.tau_of

    unconditional_witness = None
    for p, t in enumerate(tau_of):
        below = [tau_of[q] for q in iter_bits(s.images[t])]
        if any(not is_subset(s.images[u], s.images[t]) for u in below) or s.join_of(below) != t:
            unconditional_witness = s.states[p]
            break

    operational = analyze_operational(s, tests)
    missing = sorted(analysis.top_set - operational.cop_set)
    if missing:
        return Prop2Report(
            unconditional_holds=unconditional_witness is None,
            unconditional_witness=unconditional_witness,
            condition_holds=False,
            condition_witness=missing[0],
            join_identity_holds=None,
            union_identity_holds=None,
        )

    join_ok, union_ok, witness = True, True, None
    for p, t in enumerate(tau_of):
        classes = [operational.omega_op_of[q] for q in iter_bits(s.images[t])]
        union = 0
        for w in classes:
            union |= s.images[w]
        if s.join_of(classes) != t:
            join_ok = False
            witness = witness or s.states[p]
        if union != s.images[t]:
            union_ok = False
            witness = witness or s.states[p]

    return Prop2Report(
        unconditional_holds=unconditional_witness is None,
        unconditional_witness=unconditional_witness,
        condition_holds=True,
        condition_witness=None,
        join_identity_holds=join_ok,
        union_identity_holds=union_ok,
        identity_witness=witness,
    )


@dataclass(frozen=True)
class FamilyShape:
    members: Tuple[int, ...]
    covers: bool
    disjoint: bool
    overlap: Optional[Tuple[int, int]] = None

    @property
    def kind(self) -> str:
        if self.covers and self.disjoint:
            return "partition"
        if self.covers:
            return "overlapping cover"
        return "incomplete"


@dataclass(frozen=True)
class CoverageReport:
    topological: FamilyShape
    operational: FamilyShape

    @property
    def same_structure(self) -> bool:
        return self.topological.members == self.operational.members


def _shape(full: int, images: Iterable[int]) -> FamilyShape:
    members = tuple(canonical_order(images))
    covered = 0
    overlap = None
    for i, a in enumerate(members):
        covered |= a
        if overlap is None:
            overlap = next(((a, b) for b in members[i + 1:] if a & b), None)
    return FamilyShape(members=members, covers=covered == full, disjoint=overlap is None, overlap=overlap)


def coverage_structure(s: FiniteSps, tests: Sequence[TestPair]) -> CoverageReport:
    """Shape of {κ(τ(p))} and of {κ(ω_op(p))} as families of subsets of Σ."""
    analysis = analyze_topological(s)
    operational = analyze_operational(s, tests)
    return CoverageReport(
        topological=_shape(s.full, (s.images[t] for t in analysis.tau_of)),
        operational=_shape(s.full, (s.images[w] for w in operational.omega_op_of)),
    )
