"""Finite groups, subgroup enumeration, sections, and orbit categories.

Subgroup counts are checked against the classical lattices (C4 has 3
subgroups, C2xC2 has 5, Q8 has 6, D8 has 10, ...), and every reported
subgroup is re-verified to be closed under the group operations.
"""

import pytest

from ttperm.grp import (cyclic, direct_product, dihedral, quaternion8,
                        parse_group_name, make_group, subgroups,
                        conjugacy_classes_of_subgroups, sections_category,
                        orbit_category, Subgroup)


def is_genuine_subgroup(G, S):
    elems = set(S.elements)
    if 0 not in elems:  # identity is element 0 by construction
        return False
    return all(G.mul(a, G.inv(b)) in elems for a in elems for b in elems)


def test_cyclic_groups():
    for n in (1, 2, 3, 4, 6, 8):
        G = cyclic(n)
        assert G.order == n
        assert G.name == "C%d" % n
        if n > 1:
            assert G.element_order(1) == n


def test_parse_group_name():
    assert parse_group_name("C4").order == 4
    assert parse_group_name("C2xC2").order == 4
    assert parse_group_name("C2xC3").order == 6
    assert parse_group_name("D8").order == 8
    assert parse_group_name("Q8").order == 8
    with pytest.raises(ValueError):
        parse_group_name("S3!")


SUBGROUP_COUNTS = {
    "C2": 2, "C3": 2, "C4": 3, "C6": 4, "C8": 4, "C9": 3, "C12": 6,
    "C2xC2": 5, "Q8": 6, "D8": 10,
}


def test_subgroup_counts_match_classical_lattices():
    for name, count in SUBGROUP_COUNTS.items():
        G = parse_group_name(name)
        subs = subgroups(G)
        assert len(subs) == count, name
        keys = {S.elements for S in subs}
        assert len(keys) == count  # no duplicates
        for S in subs:
            assert is_genuine_subgroup(G, S), (name, S.elements)
            assert G.order % S.order == 0  # Lagrange


def test_conjugacy_classes_of_subgroups():
    # abelian: every class is a singleton
    G = parse_group_name("C2xC2")
    classes = conjugacy_classes_of_subgroups(G)
    assert len(classes) == 5
    # D8: the four non-central reflections fall into two classes of two
    D8 = parse_group_name("D8")
    classes = conjugacy_classes_of_subgroups(D8)
    assert len(classes) == 8
    sizes = sorted(len(c) for c in classes)
    assert sizes == [1, 1, 1, 1, 1, 1, 2, 2]


def test_subgroup_conjugation_and_normality():
    D8 = parse_group_name("D8")
    for S in subgroups(D8):
        full = D8.full_subgroup()
        if S.is_normal(full):
            for g in D8.elements():
                assert S.conjugate(g).elements == S.elements


def test_sections_category_c4():
    G = cyclic(4)
    cat = sections_category(G, 2)
    # sections (H, K) with H/K elementary abelian: C4/1 is excluded
    labels = sorted((o.H.order, o.K.order) for o in cat.objects)
    assert labels == [(1, 1), (2, 1), (2, 2), (4, 2), (4, 4)]
    # G abelian: every g in G carries each admissible pair of sections,
    # and (H,K) -> (H',K') needs K' <= K <= H <= H'
    expected_pairs = 0
    for src in cat.objects:
        for tgt in cat.objects:
            if tgt.K <= src.K and src.H <= tgt.H:
                expected_pairs += 1
    assert len(cat.morphisms) == 4 * expected_pairs


def test_sections_compose():
    G = cyclic(4)
    cat = sections_category(G, 2)
    for m1 in cat.morphisms[:20]:
        for m2 in cat.morphisms_between(m1.target, m1.target):
            m = cat.compose(m1, m2)
            assert m.source == m1.source
            assert m.target == m2.target
            assert m.g == G.mul(m1.g, m2.g)


def test_sections_trivial_flag():
    G = cyclic(2)
    cat = sections_category(G, 2)
    trivial = [o for o in cat.objects if o.is_trivial_section()]
    assert len(trivial) == 2  # (1,1) and (C2,C2)


def test_orbit_category_map_counts():
    G = parse_group_name("C2xC2")
    fam = subgroups(G)
    cat = orbit_category(G, fam)
    one = [S for S in fam if S.order == 1][0]
    full = [S for S in fam if S.order == 4][0]
    # Map(G/1, G/K) has |G:K| elements; Map(G/H, G/1) is empty for H != 1
    for K in fam:
        assert cat.morphism_count(one, K) == G.order // K.order
        if K.order > 1:
            assert cat.morphism_count(K, one) == 0
    assert cat.morphism_count(full, full) == 1
    # self-maps of G/H in an abelian group: |G/H|
    for K in fam:
        assert cat.morphism_count(K, K) == G.order // K.order


def test_orbit_category_maps_up_to_automorphism():
    G = cyclic(4)
    fam = subgroups(G)
    cat = orbit_category(G, fam)
    one = [S for S in fam if S.order == 1][0]
    two = [S for S in fam if S.order == 2][0]
    # Aut(G/1) = G acts freely and transitively on Map(G/1, G/1)
    assert len(cat.maps_up_to_automorphism(one, one)) == 1
    assert len(cat.maps_up_to_automorphism(one, two)) == 1


def test_make_group_from_descriptor():
    G = make_group({"kind": "product",
                    "factors": [{"kind": "cyclic", "n": 2},
                                {"kind": "cyclic", "n": 3}]})
    assert G.order == 6
    assert max(G.element_order(g) for g in G.elements()) == 6  # cyclic
    assert make_group({"kind": "quaternion"}).order == 8
