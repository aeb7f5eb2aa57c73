"""Signed permutation modules and their equivariant maps.

The load-bearing oracle: dim Hom_G(R[G/H], R[G/K]) equals the number
of double cosets H\\G/K, counted independently here by enumerating
orbits of the double action.
"""

import pytest

from ttperm.grp import cyclic, parse_group_name, subgroups
from ttperm.rings import ZZ, QQ, GF
from ttperm.permod import (perm_module, trivial_module, sign_module,
                           tensor_module, dual_module, direct_sum,
                           restrict, induce_from, base_change_module,
                           equivariant_hom_basis, invariant_basis,
                           identity_map, zero_map, subgroup_as_group,
                           is_induced_from, rebase_to_permutation)


def double_coset_count(G, H, K):
    """Number of H\\G/K double cosets, by brute enumeration."""
    seen = set()
    count = 0
    for g in G.elements():
        if g in seen:
            continue
        count += 1
        for h in H.elements:
            for k in K.elements:
                seen.add(G.mul(G.mul(h, g), k))
    return count


def test_perm_module_shape():
    G = cyclic(4)
    for S in subgroups(G):
        M = perm_module(G, S, ZZ)
        assert M.rank == G.order // S.order
        for g in G.elements():
            images = set()
            for i in range(M.rank):
                j, sign = M.act(g, i)
                assert sign == 1
                images.add(j)
            assert images == set(range(M.rank))


def test_trivial_module_fixed():
    G = cyclic(3)
    M = trivial_module(G, ZZ)
    assert M.rank == 1
    assert all(M.act(g, 0) == (0, 1) for g in G.elements())


def test_equivariant_hom_dimension_is_double_coset_count():
    for name in ("C4", "C2xC2", "C6", "D8"):
        G = parse_group_name(name)
        subs = subgroups(G)
        for H in subs:
            for K in subs:
                M = perm_module(G, H, ZZ)
                N = perm_module(G, K, ZZ)
                basis = equivariant_hom_basis(M, N)
                assert len(basis) == double_coset_count(G, H, K), \
                    (name, H.elements, K.elements)


def test_equivariant_hom_basis_maps_are_equivariant():
    G = parse_group_name("D8")
    H = [S for S in subgroups(G) if S.order == 2][0]
    M = perm_module(G, H, ZZ)
    N = perm_module(G, G.trivial_subgroup(), ZZ)
    for f in equivariant_hom_basis(M, N):
        f._check_equivariance()


def test_tensor_and_dual_ranks():
    G = cyclic(2)
    M = perm_module(G, G.trivial_subgroup(), ZZ)
    N = trivial_module(G, ZZ)
    T = tensor_module(M, M)
    assert T.rank == 4
    D = dual_module(M)
    assert D.rank == M.rank
    S = direct_sum(M, N)
    assert S.rank == 3


def test_invariant_basis_of_permutation_module():
    # invariants of R[G/H] are spanned by the single full orbit sum
    G = parse_group_name("C2xC2")
    for S in subgroups(G):
        M = perm_module(G, S, ZZ)
        inv = invariant_basis(M)
        assert len(inv) == 1


def test_restrict_and_induce_ranks():
    G = cyclic(4)
    C2 = [S for S in subgroups(G) if S.order == 2][0]
    M = perm_module(G, G.trivial_subgroup(), ZZ)
    resM = restrict(M, C2)
    assert resM.rank == M.rank
    assert resM.group.order == 2
    H, elems = subgroup_as_group(C2)
    N = trivial_module(H, ZZ)
    ind = induce_from(N, C2)
    assert ind.group is G
    assert ind.rank == G.order // C2.order


def test_frobenius_reciprocity_dimension():
    # dim Hom_G(ind M, N) = dim Hom_H(M, res N)
    G = parse_group_name("C2xC2")
    C2 = [S for S in subgroups(G) if S.order == 2][0]
    H, _ = subgroup_as_group(C2)
    M = trivial_module(H, ZZ)
    for K in subgroups(G):
        N = perm_module(G, K, ZZ)
        lhs = len(equivariant_hom_basis(induce_from(M, C2), N))
        rhs = len(equivariant_hom_basis(M, restrict(N, C2)))
        assert lhs == rhs


def test_is_induced_from():
    G = cyclic(4)
    C2 = [S for S in subgroups(G) if S.order == 2][0]
    M = perm_module(G, C2, ZZ)
    assert is_induced_from(M, C2)
    assert not is_induced_from(trivial_module(G, ZZ), C2)


def test_base_change_module():
    G = cyclic(3)
    M = perm_module(G, G.trivial_subgroup(), ZZ)
    F3 = GF(3)
    Mp = base_change_module(M, F3)
    assert Mp.ring is F3
    assert Mp.rank == M.rank
    assert Mp.act(1, 0) == M.act(1, 0)


def test_identity_and_zero_maps():
    G = cyclic(2)
    M = perm_module(G, G.trivial_subgroup(), ZZ)
    idm = identity_map(M)
    idm._check_equivariance()
    z = zero_map(M, M)
    assert z.is_zero()
    assert not idm.is_zero()


def test_map_composition_order():
    # f.compose(g) is "f after g": g maps first
    G = cyclic(2)
    M = perm_module(G, G.trivial_subgroup(), ZZ)
    N = trivial_module(G, ZZ)
    f = equivariant_hom_basis(M, N)[0]
    composite = identity_map(N).compose(f)
    composite._check_equivariance()
    assert composite.source is f.source
    assert composite.matrix == f.matrix


def test_rebase_to_permutation():
    G = cyclic(2)
    # the rank-one sign character has no permutation basis
    sgn = sign_module(G, G.trivial_subgroup(), ZZ)
    assert sgn.rank == 1
    assert rebase_to_permutation(sgn) is None
    # sign tensor sign is the trivial character: rebasable
    sq = tensor_module(sgn, sgn)
    out = rebase_to_permutation(sq)
    assert out is not None
    P, iso = out
    assert P.is_permutation()
    iso._check_equivariance()
    # sign tensor the regular module: free action, rebasable
    reg = perm_module(G, G.trivial_subgroup(), ZZ)
    out = rebase_to_permutation(tensor_module(sgn, reg))
    assert out is not None
    assert out[0].is_permutation()
