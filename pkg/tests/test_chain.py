"""Bounded complexes of signed permutation modules.

Conventions under test: differentials lower degree by one; X[s]_n =
X_{n-s} with differential scaled by (-1)^s; cone(f)_j = Y_j + X_{j-1}
with the lower-right block negated; duality reindexes by -n and
transposes with the sign (-1)^n.  The constructor itself asserts
d o d = 0, so building a tensor product is already a sign-rule check.
"""

import pytest

from ttperm.grp import cyclic, parse_group_name, subgroups
from ttperm.rings import ZZ, QQ, GF
from ttperm.permod import (perm_module, trivial_module, EquivMap,
                           identity_map)
from ttperm.chain import (Complex, ChainMap, unit_complex, module_complex,
                          two_term_complex, shift_complex, tensor_complex,
                          dual_complex, cone, identity_chain_map,
                          base_change_complex, restrict_complex,
                          induce_complex, structurally_equal,
                          complex_to_json, complex_from_json,
                          tensor_chain_maps, shift_chain_map)
from ttperm.homotopy import homology_profile, underlying_homology
from ttperm.twisted import u_complex, index_p_normal_subgroups


def mult_by(G, c):
    """Multiplication by c on the trivial module, as a two-term complex."""
    M = trivial_module(G, ZZ)
    f = EquivMap(M, M, [[c]])
    return two_term_complex(f)


def test_unit_complex():
    G = cyclic(3)
    U = unit_complex(G, ZZ)
    assert U.degrees() == [0]
    assert U.term(0).rank == 1
    assert U.total_rank() == 1


def test_constructor_rejects_bad_differential():
    G = cyclic(1)
    M = trivial_module(G, ZZ)
    one = EquivMap(M, M, [[1]])
    with pytest.raises(AssertionError):
        Complex(G, ZZ, {0: M, 1: M, 2: M}, {1: one, 2: one})


def test_two_term_homology():
    G = cyclic(1)
    X = mult_by(G, 2)
    prof = homology_profile(X)
    assert prof == {0: (0, (2,))}  # Z/2 in degree 0, nothing else


def test_shift_reindexes_and_twists_sign():
    G = cyclic(2)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    Y = shift_complex(X, 3)
    assert Y.min_degree == X.min_degree + 3
    for n in X.degrees():
        assert Y.term(n + 3).rank == X.term(n).rank
    for n in X.diffs:
        assert [list(r) for r in Y.diff(n + 3).matrix] == [
            [-v for v in row] for row in X.diff(n).matrix]
    # double shift restores the sign
    Z = shift_complex(Y, -3)
    assert structurally_equal(Z, X)


def test_tensor_rank_vector_is_convolution():
    G = cyclic(2)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)   # builds fine => d o d = 0 checked
    T = tensor_complex(X, X)
    rv = T.rank_vector()
    xv = X.rank_vector()
    for n in rv:
        expect = sum(xv.get(i, 0) * xv.get(n - i, 0) for i in xv)
        assert rv[n] == expect


def test_tensor_with_unit_is_identity_shape():
    G = cyclic(3)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    U = unit_complex(G, ZZ)
    T = tensor_complex(U, X)
    assert T.rank_vector() == X.rank_vector()
    for n in X.diffs:
        assert T.diff(n).matrix == X.diff(n).matrix


def test_cone_block_shape():
    G = cyclic(2)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    f = identity_chain_map(X)
    C = cone(f)
    for j in C.degrees():
        assert C.term(j).rank == X.term(j).rank + X.term(j - 1).rank
    # cone of the identity is acyclic
    assert homology_profile(C) == {}


def test_double_dual_negates_differential():
    # d_n on the dual is (-1)^n (d_{1-n})^T, so applying it twice
    # yields the same terms with d negated: canonically isomorphic to
    # the original, but via the signed evaluation map
    from ttperm.homotopy import find_homotopy_equivalence, Equivalence
    G = cyclic(2)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    DD = dual_complex(dual_complex(X))
    assert DD.degrees() == X.degrees()
    for n in X.degrees():
        assert DD.term(n).action == X.term(n).action
    for n in X.diffs:
        assert [list(r) for r in DD.diff(n).matrix] == [
            [-v for v in row] for row in X.diff(n).matrix]
    assert isinstance(find_homotopy_equivalence(DD, X), Equivalence)


def test_dual_reverses_degrees():
    G = cyclic(3)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    D = dual_complex(X)
    assert sorted(D.degrees()) == sorted(-n for n in X.degrees())
    for n in X.degrees():
        assert D.term(-n).rank == X.term(n).rank


def test_base_change_complex():
    G = cyclic(1)
    X = mult_by(G, 2)
    F2 = GF(2)
    Xp = base_change_complex(X, F2)
    assert Xp.ring is F2
    prof = homology_profile(Xp)
    # over F_2 multiplication by 2 is zero: homology F_2 in both degrees
    assert prof == {0: (1, ()), 1: (1, ())}
    Xq = base_change_complex(X, QQ)
    assert homology_profile(Xq) == {}


def test_restrict_and_induce_complex():
    G = cyclic(4)
    C2 = [S for S in subgroups(G) if S.order == 2][0]
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    R = restrict_complex(X, C2)
    assert R.group.order == 2
    assert R.rank_vector() == X.rank_vector()
    I = induce_complex(R, C2)
    assert I.group is G
    index = G.order // C2.order
    assert I.rank_vector() == {n: index * r
                               for n, r in R.rank_vector().items()}


def test_tensor_chain_maps_identity():
    G = cyclic(2)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    f = identity_chain_map(X)
    T = tensor_chain_maps(f, f)
    TX = tensor_complex(X, X)
    for n in TX.degrees():
        comp = T.component(n)
        assert [list(r) for r in comp.matrix] == [
            [1 if i == j else 0 for j in range(TX.term(n).rank)]
            for i in range(TX.term(n).rank)]


def test_json_round_trip():
    G = cyclic(3)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    data = complex_to_json(X)
    Y = complex_from_json(data)
    assert structurally_equal(X, Y)


def test_json_round_trip_over_field():
    G = cyclic(2)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, GF(2))
    Y = complex_from_json(complex_to_json(X))
    assert structurally_equal(X, Y)


def test_underlying_homology_of_u_complex():
    # u sits in a triangle with the unit: its underlying homology is
    # that of the reduced chain complex of spheres glued from cosets;
    # concretely H_0 = Z and the top is torsion-free
    G = cyclic(2)
    N = index_p_normal_subgroups(G)[0]
    X = u_complex(G, N, ZZ)
    fg0, _ = underlying_homology(X, 0)
    assert fg0.label() in ("Z", "0")
