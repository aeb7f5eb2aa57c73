"""Twisted cohomology of cyclic/elementary abelian groups.

Closed-form oracles (written first, independent of the table code):

* C2 over F_2: the bigraded ring is k[a, b] with deg a = (0, 1) and
  deg b = (-1, 1); the (shift s, twist q) entry is one-dimensional
  exactly when -q <= s <= 0, spanned by a^(q+s) * b^(-s).
* C3 over F_3: k[a, b, c]/(c^2) with deg a = (0, 1), b = (-2, 1),
  c = (-1, 1); the entry is one-dimensional exactly when 0 <= -s <= 2q.
* C2 over Z: entry at (s, q) is 0 unless s is even and -q <= s <= 0;
  it is Z when s = -q (so q even) and Z/2 otherwise.
* C3 over Z: entry is 0 unless s is even and -2q <= s <= 0; it is Z
  when s = -2q and Z/3 otherwise.

The integral relation lists contain p * a-multiples only: the top
class b is torsion-free in every computed bidegree, so no relation
p * b = 0 is emitted; tests pin this down rather than hiding it.
"""

import pytest

from ttperm.grp import cyclic, parse_group_name, subgroups
from ttperm.rings import ZZ, QQ, GF
from ttperm.homotopy import check_homotopy, hom_group
from ttperm.twisted import (u_degree, u_complex, index_p_normal_subgroups,
                            Twist, canonical_u_power, twisted_table,
                            ring_presentation, relation_strings,
                            generator_maps, class_product, class_power,
                            unit_class, restriction_check,
                            base_change_class_check, nilpotence_check,
                            certified_null_homotopy, scaled_class,
                            localize_twist0, require_c_absent,
                            TheoryCheckFailure, is_elementary_abelian)


def dims_c2_f2(s, q):
    return 1 if -q <= s <= 0 else 0


def mono_c2_f2(s, q):
    i, j = q + s, -s
    out = []
    if i:
        out.append("a" if i == 1 else "a^%d" % i)
    if j:
        out.append("b" if j == 1 else "b^%d" % j)
    return "*".join(out) or "1"


def dims_c3_f3(s, q):
    return 1 if 0 <= -s <= 2 * q else 0


def label_c2_z(s, q):
    if s % 2 or not -q <= s <= 0:
        return "0"
    return "Z" if s == -q else "Z/2"


def label_c3_z(s, q):
    if s % 2 or not -2 * q <= s <= 0:
        return "0"
    return "Z" if s == -2 * q else "Z/3"


C2Z_RELATIONS = [
    "(-2): -2*a*b = 0", "(-2): -2*a^2*b = 0",
    "(0): -2*a = 0", "(0): -2*a^2 = 0",
    "(0): -2*a^3 = 0", "(0): -2*a^4 = 0",
]

C3Z_RELATIONS = [
    "(-2): -3*a*b = 0", "(-2): -3*a^2*b = 0", "(-2): -3*a^3*b = 0",
    "(-4): -3*a*b^2 = 0", "(-4): -3*a^2*b^2 = 0", "(-6): -3*a*b^3 = 0",
    "(0): -3*a = 0", "(0): -3*a^2 = 0", "(0): -3*a^3 = 0",
    "(0): -3*a^4 = 0",
]

C3F3_RELATIONS = [
    "(-2): a*c^2 = 0", "(-2): a^2*c^2 = 0", "(-2): c^2 = 0",
    "(-3): a*c^3 = 0", "(-3): c^3 = 0",
    "(-4): a*b*c^2 = 0", "(-4): b*c^2 = 0", "(-4): c^4 = 0",
    "(-5): b*c^3 = 0", "(-6): b^2*c^2 = 0",
]


def table_cells(table):
    for (s, qk), ent in sorted(table.entries.items()):
        yield s, sum(e for _, e in qk), ent


def test_u_degree():
    assert u_degree(2) == 1
    assert u_degree(3) == 2
    assert u_degree(5) == 2


def test_u_complex_shape():
    for p in (2, 3, 5):
        G = cyclic(p)
        N = index_p_normal_subgroups(G)[0]
        X = u_complex(G, N, ZZ)
        assert X.min_degree == 0
        assert X.max_degree == u_degree(p)
        assert X.term(0).rank == 1  # twisted objects are unit-like at 0


def test_twist_monoid():
    G = cyclic(4)
    N = index_p_normal_subgroups(G)[0]
    e = Twist.single(N)
    assert e.total() == 1
    assert Twist.single(N, 3).total() == 3
    assert (e + Twist.single(N, 2)).total() == 3
    assert Twist.zero().total() == 0
    assert e + Twist.zero() == e
    assert e + e == Twist.single(N, 2)  # commutative monoid on exponents
    assert e.exponent(N) == 1 and Twist.zero().exponent(N) == 0
    assert e.support()[0].elements == N.elements


def test_canonical_u_power_ranks_grow_with_twist():
    G = cyclic(2)
    r = []
    for q in range(0, 4):
        Y = canonical_u_power(G, Twist.single(
            index_p_normal_subgroups(G)[0], q), ZZ)
        r.append(Y.total_rank())
    assert r[0] == 1
    assert all(a <= b for a, b in zip(r, r[1:]))


def test_table_c2_f2_matches_polynomial_ring():
    tab = twisted_table(cyclic(2), GF(2), 4)
    assert tab.shift_window == (-4, 0)
    seen = 0
    for s, q, ent in table_cells(tab):
        dim = ent["free_rank"] + len(ent["torsion"])
        assert dim == dims_c2_f2(s, q), (s, q)
        monos = [m for m, _ in ent["monomials"]]
        if dim:
            assert len(monos) == 1
        seen += 1
    assert seen == 25
    rep = ring_presentation(tab)
    assert relation_strings(rep) == []  # polynomial ring: no relations
    assert sorted(g for g, _ in rep["generators"]) == ["a", "b"]


def test_table_c2_f2_monomials():
    from ttperm.twisted import mono_str
    tab = twisted_table(cyclic(2), GF(2), 4)
    for s, q, ent in table_cells(tab):
        if dims_c2_f2(s, q):
            assert [mono_str(m) for m, _ in ent["monomials"]] == \
                [mono_c2_f2(s, q)], (s, q)


def test_table_c3_f3_matches_truncated_ring():
    tab = twisted_table(cyclic(3), GF(3), 4, shift_window=(-8, 0))
    for s, q, ent in table_cells(tab):
        dim = ent["free_rank"] + len(ent["torsion"])
        assert dim == dims_c3_f3(s, q), (s, q)
    rels = sorted(relation_strings(ring_presentation(tab)))
    assert rels == C3F3_RELATIONS
    # every relation is a multiple of c^2 = 0
    assert all("c^" in r for r in rels)


def test_table_c2_z_labels_and_relations():
    tab = twisted_table(cyclic(2), ZZ, 4)
    for s, q, ent in table_cells(tab):
        assert ent["label"] == label_c2_z(s, q), (s, q)
    rels = sorted(relation_strings(ring_presentation(tab)))
    assert rels == sorted(C2Z_RELATIONS)


def test_table_c3_z_labels_and_relations():
    tab = twisted_table(cyclic(3), ZZ, 4, shift_window=(-8, 0))
    for s, q, ent in table_cells(tab):
        assert ent["label"] == label_c3_z(s, q), (s, q)
    rels = sorted(relation_strings(ring_presentation(tab)))
    assert rels == sorted(C3Z_RELATIONS)


def test_integral_tables_report_torsion_free_top_class():
    # no relation of the form p*b^k = 0 is emitted: the class b is
    # torsion-free wherever it generates, and the tests record that
    # instead of hiding it
    for p in (2, 3):
        ring_rels = C2Z_RELATIONS if p == 2 else C3Z_RELATIONS
        for r in ring_rels:
            assert "a" in r  # every torsion relation involves a
        tab = twisted_table(cyclic(p), ZZ, 4,
                            shift_window=(-2 * u_degree(p) * 4, 0))
        for s, q, ent in table_cells(tab):
            if ent["label"] == "Z":
                assert ent["torsion"] == ()


def test_table_json_round_trip_format():
    tab = twisted_table(cyclic(2), GF(2), 2)
    data = tab.to_json()
    assert data["s=0,q=()"] == {"group": "F_2", "free_rank": 1,
                                "torsion": [], "monomials": ["1"]}
    assert data["s=-1,q=(0:1)"]["monomials"] == ["b"]


def test_generator_maps_cases():
    C2, C3 = cyclic(2), cyclic(3)
    N2 = index_p_normal_subgroups(C2)[0]
    N3 = index_p_normal_subgroups(C3)[0]
    gm = generator_maps(C2, N2, GF(2))
    assert gm["case"] == "C1" and set(gm) >= {"a", "b"}
    assert "c" not in gm
    gm = generator_maps(C2, N2, ZZ)
    assert gm["case"] == "C2"
    assert gm["b"].twist.total() == 2  # b lives in twist 2 integrally
    gm = generator_maps(C3, N3, GF(3))
    assert gm["case"] == "C3" and "c" in gm
    assert gm["c"].shift == -1
    gm = generator_maps(C3, N3, ZZ)
    assert gm["case"] == "C4" and "c" not in gm


def test_require_c_absent():
    require_c_absent("C3")
    with pytest.raises(TheoryCheckFailure):
        require_c_absent("C1")


def test_class_product_adds_bidegrees():
    G = cyclic(3)
    N = index_p_normal_subgroups(G)[0]
    gm = generator_maps(G, N, GF(3))
    ab = class_product(gm["a"], gm["b"])
    assert ab.shift == gm["a"].shift + gm["b"].shift
    assert ab.twist.total() == 2
    b2 = class_power(gm["b"], 2)
    assert b2.shift == -4 and b2.twist.total() == 2
    one = unit_class(G, GF(3))
    assert class_product(one, gm["a"]).shift == gm["a"].shift


def test_nilpotence_of_c():
    G = cyclic(3)
    N = index_p_normal_subgroups(G)[0]
    report = nilpotence_check(G, N, GF(3))
    assert report["case"] == "C3"
    assert report["c_squared_null"] is True
    # no c over F_2
    G2 = cyclic(2)
    N2 = index_p_normal_subgroups(G2)[0]
    assert nilpotence_check(G2, N2, GF(2))["c"] == "absent"


def test_p_times_a_is_certified_null():
    for p in (2, 3):
        G = cyclic(p)
        N = index_p_normal_subgroups(G)[0]
        gm = generator_maps(G, N, ZZ)
        h = certified_null_homotopy(scaled_class(gm["a"], p))
        assert h is not None, p


def test_p_times_b_is_not_null():
    for p in (2, 3):
        G = cyclic(p)
        N = index_p_normal_subgroups(G)[0]
        gm = generator_maps(G, N, ZZ)
        assert certified_null_homotopy(scaled_class(gm["b"], p)) is None, p
        assert certified_null_homotopy(gm["a"]) is None  # a itself nonzero


def test_restriction_check_all_combinations():
    for gname in ("C4", "C2xC2"):
        G = parse_group_name(gname)
        for N in index_p_normal_subgroups(G):
            for H in subgroups(G):
                report = restriction_check(G, N, H)
                assert report["ok"], (gname, N.describe(), H.describe())


def test_restriction_check_shapes():
    G = cyclic(4)
    N = index_p_normal_subgroups(G)[0]
    inside = restriction_check(G, N, [S for S in subgroups(G)
                                      if S.order == 2][0])
    assert inside["u_shape"] == "unit shift"
    assert inside["a_to_zero"] and inside["b_to_id"]
    outside = restriction_check(G, N, G.full_subgroup())
    assert outside["u_shape"] == "u of the intersection"
    assert outside["a_to_a"] and outside["b_to_b"]


def test_base_change_class_check():
    C2 = cyclic(2)
    rep2 = base_change_class_check(C2, index_p_normal_subgroups(C2)[0])
    assert rep2["a_reduces_to_a"]
    assert rep2["b_reduces_to"] == "b^2"
    assert rep2["b_ok"] and rep2["ok"]
    C3 = cyclic(3)
    rep3 = base_change_class_check(C3, index_p_normal_subgroups(C3)[0])
    assert rep3["a_reduces_to_a"]
    assert rep3["b_reduces_to"] == "b"
    assert rep3["ok"]


def test_rational_tables_collapse():
    # over Q only the fundamental classes survive
    tab = twisted_table(cyclic(3), QQ, 3, shift_window=(-6, 0))
    for s, q, ent in table_cells(tab):
        expect = "Q" if s == -2 * q else "0"
        assert ent["label"] == expect, (s, q)


def test_localize_frozen_hilbert_functions():
    C2 = cyclic(2)
    tab = twisted_table(C2, ZZ, 8)
    rep = localize_twist0(tab, C2.trivial_subgroup())
    assert rep["inverted"] == "b"
    assert rep["hilbert"] == {-4: "0", -3: "0", -2: "0", -1: "0",
                              0: "Z", 1: "0", 2: "Z/2", 3: "0", 4: "Z/2"}
    rep = localize_twist0(tab, C2.full_subgroup())
    assert rep["inverted"] == "a"
    assert rep["hilbert"] == {-4: "Z/2", -3: "0", -2: "Z/2", -1: "0",
                              0: "Z/2", 1: "0", 2: "0", 3: "0", 4: "0"}


def test_localize_frozen_hilbert_functions_c3():
    C3 = cyclic(3)
    tab = twisted_table(C3, ZZ, 5, shift_window=(-10, 0))
    rep = localize_twist0(tab, C3.trivial_subgroup())
    assert rep["hilbert"] == {-4: "0", -3: "0", -2: "0", -1: "0",
                              0: "Z", 1: "0", 2: "Z/3", 3: "0", 4: "Z/3"}
    rep = localize_twist0(tab, C3.full_subgroup())
    assert rep["hilbert"] == {-4: "Z/3", -3: "0", -2: "Z/3", -1: "0",
                              0: "Z/3", 1: "0", 2: "0", 3: "0", 4: "0"}


def test_is_elementary_abelian():
    assert is_elementary_abelian(cyclic(2))
    assert is_elementary_abelian(parse_group_name("C2xC2"))
    assert is_elementary_abelian(cyclic(1))
    assert not is_elementary_abelian(cyclic(4))
    assert not is_elementary_abelian(parse_group_name("C6"))


def test_jobs_do_not_change_the_table():
    serial = twisted_table(cyclic(2), GF(2), 3).to_json()
    parallel = twisted_table(cyclic(2), GF(2), 3, jobs=3).to_json()
    assert serial == parallel
