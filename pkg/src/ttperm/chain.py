"""Bounded complexes of signed permutation modules.

Grading and sign conventions, fixed once and used everywhere:

* differentials lower degree: d_n : X_n -> X_{n-1}, with d d = 0;
* shift: X[s]_n = X_{n-s} and d^{X[s]} = (-1)^s d^X;
* tensor: (X (x) Y)_n = (+)_{i+j=n} X_i (x) Y_j with
  d(x (x) y) = dx (x) y + (-1)^i x (x) dy for x in X_i;
* cone of f : X -> Y: cone(f)_n = Y_n (+) X_{n-1},
  d(y, x) = (dy + f(x), -dx);
* dual: dual(X)_n = (X_{-n})^* with d_n = (-1)^n (d^X_{1-n})^T on the
  dual bases (signed permutation modules are self-dual on basis).

Terms of rank zero are dropped; ``term(n)`` returns a zero module for
any absent degree and ``diff(n)`` a zero map.
"""

from .permod import (SignedPermModule, EquivMap, zero_module, zero_map,
                     trivial_module, tensor_module, dual_module,
                     base_change_module, restrict, inflate, subgroup_as_group)
from .rings import mat_zero


class Complex:
    def __init__(self, group, ring, terms, diffs, check=True):
        self.group = group
        self.ring = ring
        self.terms = {n: M for n, M in terms.items() if M.rank > 0}
        self.diffs = {}
        for n, f in diffs.items():
            if n in self.terms and (n - 1) in self.terms:
                self.diffs[n] = f
        for n, M in self.terms.items():
            assert M.group is group and M.ring is ring
        for n, f in self.diffs.items():
            assert f.source is self.terms[n] or \
                f.source.basis == self.terms[n].basis
            assert f.target is self.terms[n - 1] or \
                f.target.basis == self.terms[n - 1].basis
        if check:
            for n in list(self.diffs):
                if (n + 1) in self.diffs:
                    comp = self.diffs[n].compose(self.diffs[n + 1])
                    assert comp.is_zero(), "d o d != 0 at degree %d" % n

    def degrees(self):
        return sorted(self.terms)

    @property
    def min_degree(self):
        return min(self.terms) if self.terms else 0

    @property
    def max_degree(self):
        return max(self.terms) if self.terms else 0

    def term(self, n):
        if n in self.terms:
            return self.terms[n]
        return zero_module(self.group, self.ring)

    def diff(self, n):
        if n in self.diffs:
            return self.diffs[n]
        return zero_map(self.term(n), self.term(n - 1))

    def rank_vector(self):
        return {n: M.rank for n, M in sorted(self.terms.items())}

    def total_rank(self):
        return sum(M.rank for M in self.terms.values())

    def is_zero(self):
        return not self.terms

    def all_terms_permutation(self):
        return all(M.is_permutation() for M in self.terms.values())

    def __repr__(self):
        rv = self.rank_vector()
        return "Complex(%s over %s; ranks %s)" % (
            self.group.name, self.ring.name,
            " ".join("%d:%d" % kv for kv in rv.items()) or "0")


class ChainMap:
    """A degree-0 map of complexes; commuting squares checked."""

    def __init__(self, source, target, components):
        assert source.group is target.group and source.ring is target.ring
        self.source = source
        self.target = target
        comps = {}
        for n, f in components.items():
            if n in source.terms and n in target.terms:
                assert f.source.basis == source.terms[n].basis
                assert f.target.basis == target.terms[n].basis
                comps[n] = f
            else:
                assert all(v == 0 for row in f.matrix for v in row)
        self.components = comps
        for n in set(list(source.terms) + list(target.terms)):
            lhs = self.component(n - 1).compose(source.diff(n))
            rhs = target.diff(n).compose(self.component(n))
            assert lhs.matrix == rhs.matrix, \
                "square at degree %d does not commute" % n

    def component(self, n):
        if n in self.components:
            return self.components[n]
        return zero_map(self.source.term(n), self.target.term(n))

    def is_zero(self):
        return all(f.is_zero() for f in self.components.values())

    def compose(self, other):
        """self o other."""
        comps = {}
        for n in other.components:
            comps[n] = self.component(n).compose(other.components[n])
        return ChainMap(other.source, self.target, comps)

    def __repr__(self):
        return "ChainMap(%r -> %r)" % (self.source, self.target)


def identity_chain_map(X):
    from .permod import identity_map
    return ChainMap(X, X, {n: identity_map(M) for n, M in X.terms.items()})


def zero_chain_map(X, Y):
    return ChainMap(X, Y, {})


# ---------------------------------------------------------------------------
# constructors

def unit_complex(group, ring):
    return Complex(group, ring, {0: trivial_module(group, ring)}, {})


def module_complex(M, degree=0):
    return Complex(M.group, M.ring, {degree: M}, {})


def two_term_complex(f, top_degree=1):
    """The complex [source -> target] with source in ``top_degree``."""
    n = top_degree
    return Complex(f.source.group, f.source.ring,
                   {n: f.source, n - 1: f.target}, {n: f})


def shift_complex(X, s):
    if s == 0:
        return X
    terms = {n + s: M for n, M in X.terms.items()}
    sign = 1 if s % 2 == 0 else -1
    diffs = {}
    for n, f in X.diffs.items():
        if sign == 1:
            diffs[n + s] = f
        else:
            mat = [[X.ring.normalize(-v) for v in row] for row in f.matrix]
            diffs[n + s] = EquivMap(f.source, f.target, mat)
    return Complex(X.group, X.ring, terms, diffs, check=False)


def shift_chain_map(f, s):
    return ChainMap(shift_complex(f.source, s), shift_complex(f.target, s),
                    {n + s: g for n, g in f.components.items()})


class BlockModule:
    """A direct sum of named blocks, remembering offsets.

    ``blocks`` is a list of (key, SignedPermModule) with distinct keys;
    labels of the sum are (key, original label).
    """

    def __init__(self, group, ring, blocks):
        basis = []
        action_rows = [[] for _ in group.elements()]
        offsets = {}
        off = 0
        for key, M in blocks:
            assert key not in offsets
            offsets[key] = off
            basis.extend((key, l) for l in M.basis)
            for gi, row in enumerate(M.action):
                action_rows[gi].extend((j + off, s) for (j, s) in row)
            off += M.rank
        self.module = SignedPermModule(group, ring, tuple(basis),
                                       tuple(tuple(r) for r in action_rows))
        self.offsets = offsets
        self.blocks = dict(blocks)


def _place_block(ring, mat, r0, c0, block, sign=1):
    for r, row in enumerate(block):
        for c, v in enumerate(row):
            if v != 0:
                mat[r0 + r][c0 + c] = ring.normalize(sign * v)


def tensor_complex(X, Y):
    assert X.group is Y.group and X.ring is Y.ring
    if X.is_zero() or Y.is_zero():
        return Complex(X.group, X.ring, {}, {})
    ring = X.ring
    pieces = {}   # degree -> list of ((i, j), module)
    for i, Mi in sorted(X.terms.items()):
        for j, Nj in sorted(Y.terms.items()):
            pieces.setdefault(i + j, []).append(((i, j), tensor_module(Mi, Nj)))
    blocks = {n: BlockModule(X.group, ring, bl) for n, bl in pieces.items()}
    terms = {n: B.module for n, B in blocks.items()}
    diffs = {}
    for n, B in blocks.items():
        if (n - 1) not in blocks:
            continue
        C = blocks[n - 1]
        mat = mat_zero(ring, C.module.rank, B.module.rank)
        for (i, j), T in B.blocks.items():
            c0 = B.offsets[(i, j)]
            Mi, Nj = X.term(i), Y.term(j)
            if (i - 1, j) in C.offsets and i in X.diffs:
                r0 = C.offsets[(i - 1, j)]
                dX = X.diffs[i].matrix
                # (dX (x) id): block entry [(a,b),(a',b)] = dX[a][a']
                nN = Nj.rank
                for a in range(len(dX)):
                    for ap in range(len(dX[0])):
                        v = dX[a][ap]
                        if v != 0:
                            for b in range(nN):
                                mat[r0 + a * nN + b][c0 + ap * nN + b] = v
            if (i, j - 1) in C.offsets and j in Y.diffs:
                r0 = C.offsets[(i, j - 1)]
                dY = Y.diffs[j].matrix
                sgn = 1 if i % 2 == 0 else -1
                nN = Nj.rank
                nN1 = Y.term(j - 1).rank
                for b in range(nN1):
                    for bp in range(nN):
                        v = dY[b][bp]
                        if v != 0:
                            w = ring.normalize(sgn * v)
                            for a in range(Mi.rank):
                                mat[r0 + a * nN1 + b][c0 + a * nN + bp] = w
        diffs[n] = EquivMap(B.module, C.module, mat)
    return Complex(X.group, ring, terms, diffs)


def _tensor_offsets(X, Y, n):
    """Block offsets of (X (x) Y)_n, in the order tensor_complex uses."""
    out = {}
    off = 0
    for i in sorted(X.terms):
        j = n - i
        if j in Y.terms:
            out[(i, j)] = off
            off += X.terms[i].rank * Y.terms[j].rank
    return out


def tensor_chain_maps(f, g):
    """(f (x) g) : X (x) X' -> Y (x) Y' for degree-0 chain maps."""
    X, Y = f.source, f.target
    Xp, Yp = g.source, g.target
    S = tensor_complex(X, Xp)
    T = tensor_complex(Y, Yp)
    ring = X.ring
    comps = {}
    for n in S.terms:
        if n not in T.terms:
            continue
        SB = _tensor_offsets(X, Xp, n)
        TB = _tensor_offsets(Y, Yp, n)
        mat = mat_zero(ring, T.terms[n].rank, S.terms[n].rank)
        for (i, j), c0 in SB.items():
            if (i, j) not in TB:
                continue
            r0 = TB[(i, j)]
            fm = f.component(i).matrix
            gm = g.component(j).matrix
            grows = len(gm)
            gcols = len(gm[0]) if gm else 0
            for a in range(len(fm)):
                for ap in range(len(fm[0]) if fm else 0):
                    v = fm[a][ap]
                    if v == 0:
                        continue
                    for b in range(grows):
                        for bp in range(gcols):
                            w = gm[b][bp]
                            if w != 0:
                                mat[r0 + a * grows + b][c0 + ap * gcols + bp] \
                                    = ring.normalize(v * w)
        comps[n] = EquivMap(S.terms[n], T.terms[n], mat)
    return ChainMap(S, T, comps)


def cone(f):
    """Mapping cone of a chain map f : X -> Y."""
    X, Y = f.source, f.target
    ring = X.ring
    degs = set(Y.terms) | {n + 1 for n in X.terms}
    blocks = {}
    for n in sorted(degs):
        bl = []
        if n in Y.terms:
            bl.append((("cY",), Y.terms[n]))
        if (n - 1) in X.terms:
            bl.append((("cX",), X.terms[n - 1]))
        if bl:
            blocks[n] = BlockModule(X.group, ring, bl)
    terms = {n: B.module for n, B in blocks.items()}
    diffs = {}
    for n, B in blocks.items():
        if (n - 1) not in blocks:
            continue
        C = blocks[n - 1]
        mat = mat_zero(ring, C.module.rank, B.module.rank)
        if ("cY",) in B.offsets and ("cY",) in C.offsets and n in Y.diffs:
            _place_block(ring, mat, C.offsets[("cY",)], B.offsets[("cY",)],
                         Y.diffs[n].matrix)
        if ("cX",) in B.offsets:
            fn = f.component(n - 1)
            if ("cY",) in C.offsets and not fn.is_zero():
                _place_block(ring, mat, C.offsets[("cY",)],
                             B.offsets[("cX",)], fn.matrix)
            if ("cX",) in C.offsets and (n - 1) in X.diffs:
                _place_block(ring, mat, C.offsets[("cX",)], B.offsets[("cX",)],
                             X.diffs[n - 1].matrix, sign=-1)
        diffs[n] = EquivMap(B.module, C.module, mat)
    return Complex(X.group, ring, terms, diffs)


def dual_complex(X):
    ring = X.ring
    terms = {-n: dual_module(M) for n, M in X.terms.items()}
    diffs = {}
    for n in terms:
        if (n - 1) not in terms or (1 - n) not in X.diffs:
            continue
        # d_n : (X_{-n})^* -> (X_{1-n})^*, the (-1)^n transpose of d^X_{1-n}
        dX = X.diffs[1 - n].matrix
        sgn = 1 if n % 2 == 0 else -1
        mat = mat_zero(ring, len(dX[0]), len(dX))
        for r in range(len(dX)):
            for c in range(len(dX[0])):
                v = dX[r][c]
                if v != 0:
                    mat[c][r] = ring.normalize(sgn * v)
        diffs[n] = EquivMap(terms[n], terms[n - 1], mat)
    return Complex(X.group, ring, terms, diffs)


# ---------------------------------------------------------------------------
# change of group / coefficients

def restrict_complex(X, S):
    """Res_H X over the standalone group of the subgroup S."""
    H, elems = subgroup_as_group(S)
    terms = {n: restrict(M, S) for n, M in X.terms.items()}
    diffs = {n: EquivMap(terms[n], terms[n - 1], f.matrix)
             for n, f in X.diffs.items()}
    return Complex(H, X.ring, terms, diffs, check=False)


def induce_complex(X, S):
    """Ind_H^G X, for X over subgroup_as_group(S)[0]."""
    from .permod import induce_from
    G = S.parent
    reps = S.coset_reps()
    k = len(reps)
    terms = {n: induce_from(M, S) for n, M in X.terms.items()}
    diffs = {}
    for n, f in X.diffs.items():
        m_t, m_s = X.terms[n - 1].rank, X.terms[n].rank
        mat = mat_zero(X.ring, k * m_t, k * m_s)
        for blk in range(k):
            _place_block(X.ring, mat, blk * m_t, blk * m_s, f.matrix)
        diffs[n] = EquivMap(terms[n], terms[n - 1], mat)
    return Complex(G, X.ring, terms, diffs, check=False)


def inflate_complex(X, G, proj):
    terms = {n: inflate(M, G, proj) for n, M in X.terms.items()}
    diffs = {n: EquivMap(terms[n], terms[n - 1], f.matrix)
             for n, f in X.diffs.items()}
    return Complex(G, X.ring, terms, diffs, check=False)


def base_change_complex(X, ring2):
    """Extend coefficients Z -> ring2 (entrywise via from_int)."""
    assert X.ring.name == "Z"
    terms = {n: base_change_module(M, ring2) for n, M in X.terms.items()}
    diffs = {}
    for n, f in X.diffs.items():
        mat = [[ring2.from_int(v) for v in row] for row in f.matrix]
        new = EquivMap(terms[n], terms[n - 1], mat)
        diffs[n] = new
    return Complex(X.group, ring2, terms, diffs, check=False)


def transport_complex(X, G2):
    """Rebuild X over the group object G2 with the same multiplication
    table (identical element indexing); used to move complexes between
    a subgroup-as-group and an equal standalone group."""
    if X.group is G2:
        return X
    assert tuple(map(tuple, X.group.table)) == tuple(map(tuple, G2.table)), \
        "groups differ as tables, not just as objects"
    terms = {n: SignedPermModule(G2, X.ring, M.basis, M.action)
             for n, M in X.terms.items()}
    diffs = {n: EquivMap(terms[n], terms[n - 1], f.matrix)
             for n, f in X.diffs.items()}
    return Complex(G2, X.ring, terms, diffs, check=False)


# ---------------------------------------------------------------------------
# structural comparison and serialization

def structurally_equal(X, Y):
    """Same degrees, action tables, and differential matrices.

    Labels are ignored; this detects 'the same complex built twice'.
    """
    if X.group is not Y.group and X.group.table != Y.group.table:
        return False
    if X.ring is not Y.ring:
        return False
    if X.degrees() != Y.degrees():
        return False
    for n in X.degrees():
        if X.terms[n].action != Y.terms[n].action:
            return False
        if X.diff(n).matrix != Y.diff(n).matrix:
            return False
    return True


def _label_to_json(l):
    if isinstance(l, tuple):
        return [_label_to_json(x) for x in l]
    return l


def _label_from_json(l):
    if isinstance(l, list):
        return tuple(_label_from_json(x) for x in l)
    return l


def _value_to_json(ring, v):
    if ring.name == "Q":
        return [v.numerator, v.denominator]
    return int(v)


def _value_from_json(ring, v):
    if ring.name == "Q":
        from fractions import Fraction
        return Fraction(v[0], v[1])
    return ring.normalize(v)


def complex_to_json(X):
    data = {
        "ring": X.ring.name,
        "group": {
            "name": X.group.name,
            "table": [list(r) for r in X.group.table],
            "element_names": list(X.group.element_names),
        },
        "terms": {},
        "diffs": {},
    }
    for n, M in X.terms.items():
        data["terms"][str(n)] = {
            "basis": [_label_to_json(l) for l in M.basis],
            "action": [[[j, s] for (j, s) in row] for row in M.action],
        }
    for n, f in X.diffs.items():
        data["diffs"][str(n)] = [[_value_to_json(X.ring, v) for v in row]
                                 for row in f.matrix]
    return data


def complex_from_json(data):
    from .grp import Group
    from .rings import domain_from_name
    ring = domain_from_name(data["ring"])
    g = data["group"]
    G = Group([tuple(r) for r in g["table"]], g["name"],
              list(g["element_names"]))
    terms = {}
    for k, t in data["terms"].items():
        basis = tuple(_label_from_json(l) for l in t["basis"])
        action = tuple(tuple((j, s) for (j, s) in row) for row in t["action"])
        terms[int(k)] = SignedPermModule(G, ring, basis, action)
    diffs = {}
    for k, m in data["diffs"].items():
        n = int(k)
        mat = [[_value_from_json(ring, v) for v in row] for row in m]
        diffs[n] = EquivMap(terms[n], terms[n - 1], mat)
    return Complex(G, ring, terms, diffs)
