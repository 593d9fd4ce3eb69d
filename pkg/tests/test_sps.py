import numpy as np
import pytest

from core.closure import is_intersection_closed
from core.errors import SizeCapExceeded, UnknownProperty
from core.fixtures import boolean_sps, fano, mo_sps, sierpinski, trivial_sps
from core.lattice import chain, meet, mo_lattice, require_ortho
from core.sps import (
    FiniteSps,
    cartan,
    compress,
    derived_preorder,
    direct_sum,
    direct_sum_ortho,
    from_closure,
    interval_subsystem,
    is_isomorphic,
    sps_invariant,
    to_closure,
    verify_actuality,
    verify_axioms,
)
from core.utils import iter_bits, popcount, render
from tests.conftest import random_family, random_sps


# ═══════════════════════════════════════════════════════════════════
# Axioms
# ═══════════════════════════════════════════════════════════════════


class TestAxioms:

    def test_two_point_passes(self, two_point):
        s, _ = two_point
        assert verify_axioms(s).passed

    def test_missing_top(self):
        s = FiniteSps.from_images(("p", "q"), (0b00, 0b01, 0b10))
        verdict = verify_axioms(s)
        check = verdict.check("axiom1")
        assert not check.passed
        assert check.witness in {("p",), ("q",)}

    def test_missing_bottom(self):
        s = FiniteSps.from_images(("p", "q"), (0b01, 0b11))
        check = verify_axioms(s).check("axiom1")
        assert not check.passed and check.witness == ("p",)

    def test_duplicate_images_break_axiom3(self):
        s = FiniteSps(("p",), (0, 1, 1))
        assert not verify_axioms(s).check("axiom3").passed

    def test_repeated_image_is_kept_and_reported(self):
        images = (0b11, 0b01, 0, 0b10, 0b11)
        assert FiniteSps.from_images(("p", "q"), images).size == 4
        s = FiniteSps.from_images(("p", "q"), images, keep_duplicates=True)
        assert s.images == (0, 0b01, 0b10, 0b11, 0b11)
        verdict = verify_axioms(s)
        assert verdict.check("lattice").passed
        first = verdict.failures()[0]
        assert first.axiom == "axiom3"
        assert first.witness == ("{p,q}",)

    def test_intersection_missing(self):
        s = FiniteSps.from_images(("p", "q", "r"), (0, 0b011, 0b110, 0b111))
        check = verify_axioms(s).check("axiom4")
        assert not check.passed
        assert set(check.witness) == {"{p,q}", "{q,r}"}

    def test_declared_order(self, sierpinski_sps):
        assert (1, 0) in derived_preorder(sierpinski_sps)
        good = FiniteSps.from_images(sierpinski_sps.states, sierpinski_sps.images, declared_order=[(1, 0)])
        bad = FiniteSps.from_images(sierpinski_sps.states, sierpinski_sps.images, declared_order=[(0, 1)])
        assert verify_axioms(good).passed
        check = verify_axioms(bad).check("axiom2")
        assert not check.passed
        assert check.witness in {("p", "q"), ("q", "p")}

    def test_random_families_pass(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            s = from_closure(random_family(rng, n, int(rng.integers(1, 6))))
            assert verify_axioms(s).passed

    def test_mutated_families_rejected(self):
        rng = np.random.default_rng(2)
        rejected = 0
        while rejected < 100:
            n = int(rng.integers(2, 9))
            family = set(random_family(rng, n, int(rng.integers(1, 6))).closed_family)
            full = (1 << n) - 1
            names = [f"s{i}" for i in range(n)]
            if rng.random() < 0.5:
                family.discard(full)
                s = FiniteSps.from_images(names, family)
                check = verify_axioms(s).check("axiom1")
                assert not check.passed
                p = names.index(check.witness[0])
                assert not (max(s.images, key=popcount) >> p) & 1
            else:
                extra = int(rng.integers(1, full))
                if extra in family or is_intersection_closed(family | {extra}):
                    continue
                family.add(extra)
                s = FiniteSps.from_images(names, family)
                check = verify_axioms(s).check("axiom4")
                assert not check.passed
                by_name = {render(m, names): m for m in family}
                a, b = (by_name[w] for w in check.witness)
                assert a & b not in family
            rejected += 1


class TestActuality:

    def test_mo2_presentation(self):
        l, _ = mo_lattice(2)
        states = ["a", "a*", "b", "b*"]
        actuality = [{1 + k, l.top} for k in range(4)]
        result = verify_actuality(states, l, actuality)
        assert result.verdict.passed
        assert result.sps.size == 6
        assert result.sps.images[result.property_of[l.top]] == 0b1111

    def test_indistinguishable_properties(self):
        """The middle of a 3-chain and its top are actual in the same states."""
        l = chain(3)
        result = verify_actuality(["x"], l, [{1, 2}])
        assert not result.verdict.check("axiom3").passed
        assert result.sps is None

    def test_bottom_actual(self):
        l = chain(2)
        result = verify_actuality(["x"], l, [{0, 1}])
        assert result.verdict.check("axiom1").witness == ("x",)


# ═══════════════════════════════════════════════════════════════════
# Cartan map and lattice operations
# ═══════════════════════════════════════════════════════════════════


class TestCartan:

    def test_cartan(self, mo):
        s, _ = mo
        a = s.property_named(["a"])
        assert cartan(s, a) == 0b0001
        with pytest.raises(UnknownProperty):
            cartan(s, s.size)

    def test_unknown_state(self, mo):
        s, _ = mo
        with pytest.raises(UnknownProperty):
            s.property_named(["z"])

    def test_join_of_atoms_is_top(self, mo):
        s, _ = mo
        a, b = s.property_named(["a"]), s.property_named(["b"])
        assert s.join_of([a, b]) == s.top
        assert s.meet_of([a, b]) == s.bottom

    def test_xi(self, sierpinski_sps):
        q = sierpinski_sps.state_index["q"]
        assert {sierpinski_sps.property_name(a) for a in sierpinski_sps.xi(q)} == {"{q}", "{p,q}"}

    def test_closure_round_trip(self):
        s = fano()
        assert from_closure(to_closure(s)) == s

    def test_canonical_indices(self):
        s = fano()
        assert s.bottom == 0
        assert s.top == s.size - 1


# ═══════════════════════════════════════════════════════════════════
# Direct sums, intervals, isomorphism
# ═══════════════════════════════════════════════════════════════════


class TestDirectSum:

    def test_sizes(self, mo):
        s, _ = mo
        summed = direct_sum([s, s])
        assert len(summed.states) == 8
        assert summed.size == 36
        assert summed.states[0] == "0:a"
        assert verify_axioms(summed).passed

    def test_componentwise_ortho(self, mo, two_point):
        s1, m1 = mo
        s2, m2 = two_point
        total = direct_sum([s1, s2])
        require_ortho(total.lattice, direct_sum_ortho([s1, s2], [m1, m2], total))

    def test_interval(self, mo):
        s, _ = mo
        summed = direct_sum([s, trivial_sps()[0]])
        left = summed.property_index(0b01111)
        assert is_isomorphic(interval_subsystem(summed, left), s) is not None


class TestIsomorphism:

    def test_relabelled_copy(self):
        s, _ = mo_sps(2)
        images = [sum(1 << (3 - p) for p in iter_bits(m)) for m in s.images]
        copy = FiniteSps.from_images(("w", "x", "y", "z"), images)
        witness = is_isomorphic(s, copy)
        assert witness is not None
        for a, m in enumerate(s.images):
            mapped = sum(1 << witness.state_map[p] for p in iter_bits(m))
            assert copy.images[witness.property_map[a]] == mapped

    def test_different_systems(self, two_point):
        s, _ = two_point
        assert is_isomorphic(s, sierpinski()) is None
        assert sps_invariant(s) != sps_invariant(sierpinski())

    def test_chains_on_permuted_states(self):
        a = FiniteSps.from_images(("x", "y", "z"), (0, 0b001, 0b011, 0b111))
        b = FiniteSps.from_images(("x", "y", "z"), (0, 0b100, 0b110, 0b111))
        assert is_isomorphic(a, b) is not None

    def test_cap(self):
        s, _ = boolean_sps(4)
        with pytest.raises(SizeCapExceeded):
            is_isomorphic(s, s, cap=10)


# ═══════════════════════════════════════════════════════════════════
# Cartan map laws and direct-sum restriction
# ═══════════════════════════════════════════════════════════════════


def _small_systems():
    systems = [trivial_sps()[0], boolean_sps(2)[0], boolean_sps(3)[0], mo_sps(2)[0], mo_sps(3)[0], sierpinski(), fano()]
    rng = np.random.default_rng(53)
    while len(systems) < 40:
        s = random_sps(rng, max_states=5)
        if s.size <= 10:
            systems.append(s)
    return systems


class TestCartanLaws:

    def test_meets_are_intersections(self):
        """κ(⋀S) is the intersection of κ(a) over S, for every subset S."""
        for s in _small_systems():
            for bits in range(1 << s.size):
                props = list(iter_bits(bits))
                expected = s.full
                for a in props:
                    expected &= cartan(s, a)
                m = s.meet_of(props)
                assert cartan(s, m) == expected
                assert m == meet(s.lattice, props)

    def test_cartan_is_injective(self):
        for s in _small_systems():
            images = [cartan(s, a) for a in range(s.size)]
            assert len(set(images)) == s.size

    def test_cartan_matches_actuality(self):
        for s in _small_systems():
            for a in range(s.size):
                actual_in = sum(1 << p for p in range(len(s.states)) if a in s.xi(p))
                assert cartan(s, a) == actual_in


class TestDirectSumRestriction:

    def test_blocks_reproduce_summands(self):
        rng = np.random.default_rng(59)
        for _ in range(60):
            summands = [random_sps(rng, max_states=3) for _ in range(int(rng.integers(1, 4)))]
            total = direct_sum(summands)
            assert total.size == int(np.prod([s.size for s in summands]))
            offset = 0
            for s in summands:
                block = ((1 << len(s.states)) - 1) << offset
                assert {compress(m, block) for m in total.images} == set(s.images)
                offset += len(s.states)

    def test_fixture_sum(self, mo, two_point):
        s1, s2 = mo[0], two_point[0]
        total = direct_sum([s1, s2])
        assert {compress(m, 0b001111) for m in total.images} == set(s1.images)
        assert {compress(m, 0b110000) for m in total.images} == set(s2.images)
