"""Group, coset space and CM type layer."""

import pytest

from cmtorsion.cm_core import (
    CMDatum,
    CMType,
    CosetSpace,
    FiniteGroup,
    UnsupportedInputError,
    automorphisms,
    enumerate_types,
    is_primitive,
    product,
    validate,
)


def trivial_type(group: FiniteGroup, phi) -> CMType:
    return CMType(CosetSpace(group, [0]), frozenset(phi))


def datum(group: FiniteGroup, conj: int, *phis) -> CMDatum:
    return CMDatum(group, conj, tuple(trivial_type(group, p) for p in phis))


class TestFiniteGroup:
    def test_abelian_constructor(self):
        g = FiniteGroup.abelian([2, 2])
        assert g.order == 4
        assert g.element_tuple(3) == (1, 1)
        assert g.index_of_tuple([1, 1]) == 3
        assert g.mul(1, 2) == 3
        assert g.inv(3) == 3

    def test_identity_must_be_element_zero(self):
        # swap the roles of 0 and 1 in Z/2 x Z/2 style table
        with pytest.raises(ValueError):
            FiniteGroup([[1, 0], [0, 1]])

    def test_associativity_checked(self):
        bad = [[0, 1, 2], [1, 2, 0], [2, 1, 0]]
        with pytest.raises(ValueError):
            FiniteGroup(bad)

    def test_dihedral(self):
        d4 = FiniteGroup.dihedral(4)
        assert d4.order == 8
        assert not d4.is_central(1)
        assert d4.central_involutions() == [2]
        assert d4.element_order(4) == 2

    def test_dicyclic(self):
        q8 = FiniteGroup.dicyclic(2)
        assert q8.order == 8
        assert q8.central_involutions() == [2]
        assert q8.element_order(4) == 4
        dic3 = FiniteGroup.dicyclic(3)
        assert dic3.order == 12
        assert dic3.central_involutions() == [3]

    def test_central_involutions_abelian(self):
        g = FiniteGroup.abelian([2, 2, 2])
        assert len(g.central_involutions()) == 7
        z12 = FiniteGroup.abelian([12])
        assert z12.central_involutions() == [6]


class TestCosetSpace:
    def test_trivial_subgroup(self):
        g = FiniteGroup.abelian([4])
        cs = CosetSpace(g, [0])
        assert cs.size == 4
        assert cs.act(1, 2) == 3

    def test_proper_subgroup(self):
        g = FiniteGroup.abelian([2, 2])
        cs = CosetSpace(g, [0, 1])
        assert cs.size == 2
        assert cs.cosets == ((0, 1), (2, 3))
        assert cs.act(2, 0) == 1
        assert cs.act(2, 1) == 0

    def test_subgroup_closure_enforced(self):
        g = FiniteGroup.abelian([4])
        with pytest.raises(ValueError):
            CosetSpace(g, [0, 1])


class TestValidate:
    def test_elliptic_ok(self):
        g = FiniteGroup.abelian([2])
        assert validate(datum(g, 1, [0])) == []

    def test_phi_not_partition(self):
        g = FiniteGroup.abelian([2])
        problems = validate(datum(g, 1, [0, 1]))
        assert any("partition" in p for p in problems)

    def test_conjugation_not_involution(self):
        g = FiniteGroup.abelian([4])
        problems = validate(datum(g, 1, [0, 1]))
        assert any("squared" in p for p in problems)

    def test_conjugation_not_central(self):
        d4 = FiniteGroup.dihedral(4)
        # the reflection s (index 4) is an involution but not central
        t = trivial_type(d4, [0, 1, 4, 5])
        problems = validate(CMDatum(d4, 4, (t,)))
        assert any("central" in p for p in problems)

    def test_no_factors(self):
        g = FiniteGroup.abelian([2])
        problems = validate(CMDatum(g, 1, ()))
        assert any("no factors" in p for p in problems)


class TestPrimitivity:
    def test_quartic_primitive(self):
        g = FiniteGroup.abelian([4])
        assert is_primitive(trivial_type(g, [0, 1]), 2)

    def test_biquadratic_imprimitive(self):
        g = FiniteGroup.abelian([2, 2])
        # translation by (1,0) = index 2 fixes this choice
        assert not is_primitive(trivial_type(g, [0, 2]), 3)

    def test_elliptic_primitive(self):
        g = FiniteGroup.abelian([2])
        assert is_primitive(trivial_type(g, [0]), 1)

    def test_nontrivial_subgroup_unsupported(self):
        g = FiniteGroup.abelian([2, 2])
        t = CMType(CosetSpace(g, [0, 2]), frozenset([0]))
        with pytest.raises(UnsupportedInputError):
            is_primitive(t, 1)


class TestEnumerate:
    def test_counts_single_groups(self):
        g2 = FiniteGroup.abelian([2])
        assert len(enumerate_types(g2, 1)) == 2
        assert len(enumerate_types(g2, 1, up_to_translation=True)) == 1
        g4 = FiniteGroup.abelian([4])
        assert len(enumerate_types(g4, 2)) == 4
        assert len(enumerate_types(g4, 2, up_to_translation=True)) == 1
        g22 = FiniteGroup.abelian([2, 2])
        assert len(enumerate_types(g22, 3)) == 4
        assert len(enumerate_types(g22, 3, up_to_translation=True)) == 2

    def test_raw_count_matches_power_of_two(self):
        groups = [FiniteGroup.abelian(inv) for inv in
                  ([2], [4], [2, 2], [6], [8], [4, 2], [2, 2, 2],
                   [10], [12], [6, 2], [16], [8, 2], [4, 4], [4, 2, 2],
                   [2, 2, 2, 2], [14])]
        groups += [FiniteGroup.dihedral(4), FiniteGroup.dihedral(6),
                   FiniteGroup.dihedral(8), FiniteGroup.dicyclic(2),
                   FiniteGroup.dicyclic(3), FiniteGroup.dicyclic(4)]
        for g in groups:
            for c in g.central_involutions():
                raw = enumerate_types(g, c)
                assert len(raw) == 2 ** (g.order // 2)
                assert len(set(t.phi for t in raw)) == len(raw)
                for t in raw[:8]:
                    image = {g.mul(c, x) for x in t.phi}
                    assert not (image & t.phi)
                    assert len(image | t.phi) == g.order

    def test_translation_classes_partition_raw(self):
        g = FiniteGroup.abelian([8])
        c = 4
        raw = enumerate_types(g, c)
        reps = enumerate_types(g, c, up_to_translation=True)
        covered = set()
        for r in reps:
            for t in range(g.order):
                covered.add(frozenset(g.mul(t, x) for x in r.phi))
        assert covered == {t.phi for t in raw}

    def test_invalid_conjugation(self):
        g = FiniteGroup.abelian([4])
        with pytest.raises(ValueError):
            enumerate_types(g, 1)
        with pytest.raises(ValueError):
            enumerate_types(g, 0)

    def test_automorphism_classes_merge(self):
        g = FiniteGroup.abelian([2, 2])
        reps = enumerate_types(g, 3, automorphism_classes=True)
        # the coordinate swap fixes (1,1) and merges the two classes
        assert len(reps) == 1


class TestAutomorphisms:
    def test_klein_group(self):
        g = FiniteGroup.abelian([2, 2])
        auts = automorphisms(g)
        assert len(auts) == 6
        for a in auts:
            assert a[0] == 0
            for x in range(4):
                for y in range(4):
                    assert a[g.mul(x, y)] == g.mul(a[x], a[y])

    def test_cyclic(self):
        g = FiniteGroup.abelian([8])
        auts = automorphisms(g)
        assert len(auts) == 4


class TestProduct:
    def test_concatenates(self):
        g = FiniteGroup.abelian([4])
        d1 = datum(g, 2, [0, 1])
        d2 = datum(g, 2, [0, 3])
        p = product([d1, d2])
        assert p.genus == 4
        assert validate(p) == []

    def test_group_mismatch(self):
        d1 = datum(FiniteGroup.abelian([2]), 1, [0])
        d2 = datum(FiniteGroup.abelian([4]), 2, [0, 1])
        with pytest.raises(ValueError):
            product([d1, d2])

    def test_conjugation_mismatch(self):
        g = FiniteGroup.abelian([2, 2])
        d1 = datum(g, 1, [0, 2])
        d2 = datum(g, 3, [0, 2])
        with pytest.raises(ValueError):
            product([d1, d2])
