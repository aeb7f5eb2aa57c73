"""Exact homological linear algebra for complexes of permutation modules.

Everything here reduces to sparse linear algebra over Z, Q or GF(p):

* ``smith_normal_form`` returns (U, D, V) with A = U . D . V, U and V
  invertible over the ring, D diagonal with a divisibility chain; the
  factorization is re-multiplied and asserted before returning;
* ``solve_sparse`` / ``kernel_sparse`` work on sparse row dictionaries
  and track column operations only, which keeps big homotopy systems
  tractable (solutions pull back through the accumulated column ops);
* homotopy-theoretic routines (``is_contractible``, ``null_homotopy``,
  ``find_homotopy_equivalence``, ``hom_group``) search inside the
  lattice of equivariant maps: unknowns are coefficients of the orbit
  basis of Hom_G, never raw matrix entries, so certificates found over
  Z are honest equivariant certificates.

Homotopies h have degree +1 and certify d h + h d = f.
"""

import os
from fractions import Fraction

from .permod import equivariant_hom_basis, zero_map, EquivMap
from .rings import mat_zero, mat_identity, mat_mul


class SolverCapExceeded(Exception):
    """A solve was refused because the complex is larger than the cap
    set in the TTPERM_MAX_RANK environment variable."""


def _enforce_rank_cap(X):
    cap = os.environ.get("TTPERM_MAX_RANK")
    if cap and X.total_rank() > int(cap):
        raise SolverCapExceeded(
            "total rank %d exceeds TTPERM_MAX_RANK=%s"
            % (X.total_rank(), cap))


# ---------------------------------------------------------------------------
# sparse elimination with column tracking

def sparse_rows(matrix):
    """Row dictionaries {col: value} for the nonzero entries."""
    return [ {c: v for c, v in enumerate(row) if v != 0} for row in matrix ]


def _diagonalize(ring, rows, ncols, rhs=None):
    """Diagonalize a sparse row-dict matrix in place.

    Row operations are mirrored on ``rhs`` (list of {key: value} per
    row); column operations are accumulated in ``P`` so that solutions
    of the reduced system pull back as x = P y.  Returns
    (pivots, P, free_cols) with pivots a list of (row, col, value).

    Finished pivot rows stay zero outside their pivot column and
    finished pivot columns zero outside their pivot row, so the loop
    only ever works inside the active submatrix.
    """
    nrows = len(rows)
    if rhs is None:
        rhs = [dict() for _ in range(nrows)]
    col_rows = [set() for _ in range(ncols)]
    for r, row in enumerate(rows):
        for c in row:
            col_rows[c].add(r)
    P = {c: {c: ring.one} for c in range(ncols)}
    active_rows = set(range(nrows))
    active_cols = set(range(ncols))
    pivots = []
    exact = ring.is_field
    zero = ring.zero

    def row_op(r2, r1, q):
        # row r2 -= q * row r1 (and on rhs)
        row1, row2 = rows[r1], rows[r2]
        for c, v in row1.items():
            nv = ring.normalize(row2.get(c, zero) - q * v)
            if nv == 0:
                if c in row2:
                    del row2[c]
                    col_rows[c].discard(r2)
            else:
                if c not in row2:
                    col_rows[c].add(r2)
                row2[c] = nv
        rb1, rb2 = rhs[r1], rhs[r2]
        for k, v in rb1.items():
            nv = ring.normalize(rb2.get(k, zero) - q * v)
            if nv == 0:
                rb2.pop(k, None)
            else:
                rb2[k] = nv

    def col_op(c2, c1, q):
        # col c2 -= q * col c1 (and on P)
        for r in list(col_rows[c1]):
            v = rows[r][c1]
            nv = ring.normalize(rows[r].get(c2, zero) - q * v)
            if nv == 0:
                if c2 in rows[r]:
                    del rows[r][c2]
                    col_rows[c2].discard(r)
            else:
                if c2 not in rows[r]:
                    col_rows[c2].add(r)
                rows[r][c2] = nv
        P1, P2 = P[c1], P[c2]
        for k, v in P1.items():
            nv = ring.normalize(P2.get(k, zero) - q * v)
            if nv == 0:
                P2.pop(k, None)
            else:
                P2[k] = nv

    def pick_pivot():
        best = None
        for r in active_rows:
            row = rows[r]
            if not row:
                continue
            for c, v in row.items():
                if c not in active_cols:
                    continue
                if exact:
                    cost = (len(row), len(col_rows[c]))
                else:
                    cost = (abs(v), len(row), len(col_rows[c]))
                if best is None or cost < best[0]:
                    best = (cost, r, c)
                    if exact and cost[0] == 1:
                        return r, c
                    if not exact and cost[0] == 1 and cost[1] == 1:
                        return r, c
        return (best[1], best[2]) if best else None

    while True:
        pv = pick_pivot()
        if pv is None:
            break
        r, c = pv
        while True:
            v = rows[r][c]
            # clear the pivot column with row operations
            moved = False
            for r2 in sorted(col_rows[c]):
                if r2 == r:
                    continue
                w = rows[r2][c]
                if exact:
                    q = ring.normalize(w * ring.inv(v))
                else:
                    q = w // v
                if q != 0:
                    row_op(r2, r, q)
                if not exact and c in rows[r2]:
                    # nonzero remainder strictly smaller than |v|:
                    # it becomes the new, better pivot
                    r = r2
                    moved = True
                    break
            if moved:
                continue
            # column is clear; clear the pivot row with column ops
            v = rows[r][c]
            dirty = False
            for c2 in sorted(rows[r]):
                if c2 == c:
                    continue
                w = rows[r][c2]
                if exact:
                    q = ring.normalize(w * ring.inv(v))
                else:
                    q = w // v
                if q != 0:
                    col_op(c2, c, q)
                if not exact and c2 in rows[r]:
                    # remainder at (r, c2): smaller pivot, switch column
                    c = c2
                    dirty = True
                    break
            if dirty:
                continue
            break
        pivots.append((r, c, rows[r][c]))
        active_rows.discard(r)
        active_cols.discard(c)
    free_cols = sorted(active_cols)
    return pivots, P, free_cols, rhs


def solve_sparse(ring, rows, ncols, rhs_cols):
    """Solve A x = b for each column b of ``rhs_cols``.

    ``rows`` is a list of {col: value} dictionaries, ``rhs_cols`` a
    list of dense column vectors.  Returns a list of dense solution
    vectors, or None if any column is infeasible (over Z this includes
    divisibility failures, which certify integral insolvability).
    """
    work = [dict(r) for r in rows]
    rhs = [dict() for _ in range(len(rows))]
    for k, col in enumerate(rhs_cols):
        assert len(col) == len(rows)
        for r, v in enumerate(col):
            if v != 0:
                rhs[r][k] = ring.normalize(v)
    pivots, P, free_cols, rhs = _diagonalize(ring, work, ncols, rhs)
    pivot_rows = {r for (r, _, _) in pivots}
    nk = len(rhs_cols)
    ys = [dict() for _ in range(nk)]
    for (r, c, v) in pivots:
        for k, b in rhs[r].items():
            if ring.is_field:
                ys[k][c] = ring.normalize(b * ring.inv(v))
            else:
                if b % v != 0:
                    return None
                ys[k][c] = b // v
    for r in range(len(rows)):
        if r not in pivot_rows and rhs[r]:
            return None
    out = []
    for k in range(nk):
        x = [ring.zero] * ncols
        for c, yv in ys[k].items():
            for i, pv in P[c].items():
                x[i] = ring.normalize(x[i] + yv * pv)
        out.append(x)
    return out


def kernel_sparse(ring, rows, ncols):
    """A lattice/vector-space basis of ker A, as dense column vectors."""
    work = [dict(r) for r in rows]
    pivots, P, free_cols, _ = _diagonalize(ring, work, ncols)
    out = []
    for c in free_cols:
        x = [ring.zero] * ncols
        for i, pv in P[c].items():
            x[i] = pv
        out.append(x)
    return out


def rank_sparse(ring, rows, ncols):
    work = [dict(r) for r in rows]
    pivots, _, _, _ = _diagonalize(ring, work, ncols)
    return len(pivots)


# ---------------------------------------------------------------------------
# Smith normal form (dense, fully tracked, for small matrices)

def smith_normal_form(ring, A):
    """(U, D, V) with A = U . D . V over the ring.

    D is diagonal; over Z the diagonal entries are nonnegative and form
    a divisibility chain d1 | d2 | ...; U and V are invertible (over Z:
    determinant +-1).  The factorization is re-multiplied and asserted
    before returning, always.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [ [ring.normalize(v) for v in row] for row in A ]
    U = mat_identity(ring, m)
    V = mat_identity(ring, n)
    zero = ring.zero

    def row_op(r2, r1, q):
        # D: row r2 -= q row r1;  U: col r1 += q col r2
        for c in range(n):
            D[r2][c] = ring.normalize(D[r2][c] - q * D[r1][c])
        for i in range(m):
            U[i][r1] = ring.normalize(U[i][r1] + q * U[i][r2])

    def col_op(c2, c1, q):
        # D: col c2 -= q col c1;  V: row c1 += q row c2
        for r in range(m):
            D[r][c2] = ring.normalize(D[r][c2] - q * D[r][c1])
        for j in range(n):
            V[c1][j] = ring.normalize(V[c1][j] + q * V[c2][j])

    def row_swap(r1, r2):
        D[r1], D[r2] = D[r2], D[r1]
        for i in range(m):
            U[i][r1], U[i][r2] = U[i][r2], U[i][r1]

    def col_swap(c1, c2):
        for r in range(m):
            D[r][c1], D[r][c2] = D[r][c2], D[r][c1]
        V[c1], V[c2] = V[c2], V[c1]

    def row_negate(r):
        for c in range(n):
            D[r][c] = ring.normalize(-D[r][c])
        for i in range(m):
            U[i][r] = ring.normalize(-U[i][r])

    exact = ring.is_field

    def reduce_at(t):
        """Clear row and column t, pivot at (t, t)."""
        while True:
            # find a pivot in the trailing submatrix
            pr = pc = None
            best = None
            for r in range(t, m):
                for c in range(t, n):
                    v = D[r][c]
                    if v != 0:
                        key = 0 if exact else abs(v)
                        if best is None or key < best:
                            best, pr, pc = key, r, c
            if pr is None:
                return False
            if pr != t:
                row_swap(t, pr)
            if pc != t:
                col_swap(t, pc)
            while True:
                v = D[t][t]
                done = True
                for r in range(t + 1, m):
                    w = D[r][t]
                    if w == 0:
                        continue
                    q = ring.normalize(w * ring.inv(v)) if exact else w // v
                    if q != 0:
                        row_op(r, t, q)
                    if D[r][t] != 0:
                        row_swap(t, r)
                        done = False
                        break
                if not done:
                    continue
                v = D[t][t]
                for c in range(t + 1, n):
                    w = D[t][c]
                    if w == 0:
                        continue
                    q = ring.normalize(w * ring.inv(v)) if exact else w // v
                    if q != 0:
                        col_op(c, t, q)
                    if D[t][c] != 0:
                        col_swap(t, c)
                        done = False
                        break
                if done:
                    return True

    t = 0
    while t < min(m, n):
        if not reduce_at(t):
            break
        t += 1
    rank = t

    if not exact:
        # divisibility chain and sign normalization
        changed = True
        while changed:
            changed = False
            for i in range(rank - 1):
                a, b = D[i][i], D[i + 1][i + 1]
                if b % a != 0:
                    # fold the pair: col i += col i+1, then re-reduce
                    col_op(i, i + 1, ring.normalize(-ring.one))
                    tt = i
                    while tt < rank:
                        if not reduce_at(tt):
                            break
                        tt += 1
                    changed = True
                    break
        for i in range(rank):
            if D[i][i] < 0:
                row_negate(i)
    else:
        # over a field normalize pivots to 1, compensating in U
        for i in range(rank):
            v = D[i][i]
            if v != ring.one:
                D[i][i] = ring.one
                for r in range(m):
                    U[r][i] = ring.normalize(U[r][i] * v)

    prod = mat_mul(ring, mat_mul(ring, U, D), V)
    assert all(prod[r][c] == ring.normalize(A[r][c])
               for r in range(m) for c in range(n)), \
        "Smith factorization failed to re-multiply"
    return U, D, V


def matrix_inverse(ring, A):
    n = len(A)
    rows = sparse_rows(A)
    cols = [[ring.one if r == c else ring.zero for r in range(n)]
            for c in range(n)]
    sols = solve_sparse(ring, rows, n, cols)
    assert sols is not None, "matrix is not invertible over %s" % ring.name
    return [ [sols[c][r] for c in range(n)] for r in range(n) ]


# ---------------------------------------------------------------------------
# finitely generated modules presented by relations

class FgModule:
    """Z^t (or k^t) modulo the column span of a relations matrix.

    ``factors`` lists one invariant factor per retained summand: 0 for
    a free summand, d > 1 for torsion Z/d (over a field only 0 occurs).
    ``generators`` give each retained summand's generator in the
    ambient t-dimensional coordinates.
    """

    def __init__(self, ring, t, relations):
        self.ring = ring
        self.t = t
        if t == 0:
            self.factors = []
            self.generators = []
            self._Uinv = []
            self._all_factors = []
            return
        if not relations or len(relations[0]) == 0:
            # no relations: free of rank t on the standard basis
            self._Uinv = mat_identity(ring, t)
            self._all_factors = [ring.zero] * t
            self.factors = list(self._all_factors)
            self.generators = [
                [ring.one if r == i else ring.zero for r in range(t)]
                for i in range(t)]
            return
        U, D, V = smith_normal_form(ring, relations)
        self._Uinv = matrix_inverse(ring, U)
        s = len(relations[0])
        diag = [D[i][i] if i < s else ring.zero for i in range(t)]
        self._all_factors = diag
        self.factors = []
        self.generators = []
        for i, d in enumerate(diag):
            if d != 0 and ring.is_unit(d):
                continue
            self.factors.append(d)
            self.generators.append([U[r][i] for r in range(t)])

    def is_zero(self):
        return not self.factors

    def free_rank(self):
        return sum(1 for d in self.factors if d == 0)

    def torsion(self):
        return [d for d in self.factors if d != 0]

    def label(self):
        """Readable isomorphism label, e.g. 'Z/2 (+) Z' or 'F_3^2'."""
        if not self.factors:
            return "0"
        parts = []
        free = self.free_rank()
        for d in sorted(self.torsion()):
            parts.append("Z/%d" % d)
        if free:
            base = {"Z": "Z", "Q": "Q"}.get(self.ring.name,
                                            "F_%d" % self.ring.characteristic)
            parts.append(base if free == 1 else "%s^%d" % (base, free))
        return " (+) ".join(parts)

    def coords(self, v):
        """Reduced coordinates of an ambient vector, one per factor."""
        assert len(v) == self.t
        if self.t == 0:
            return ()
        y = [sum(self._Uinv[i][j] * v[j] for j in range(self.t))
             for i in range(self.t)]
        out = []
        for i, d in enumerate(self._all_factors):
            c = self.ring.normalize(y[i])
            if d == 0:
                out.append((i, c))
            elif self.ring.is_unit(d):
                continue
            else:
                out.append((i, self.ring.normalize(c % d)))
        # unit factors must absorb their coordinate exactly (they are
        # relations of the form e_i = 0 up to change of basis)
        return tuple(c for (_, c) in out)

    def iso_invariants(self):
        return (self.free_rank(), tuple(sorted(abs(d) for d in self.torsion())))

    def same_class(self, v, w):
        return self.coords(v) == self.coords(w)

    def class_is_zero(self, v):
        return all(c == 0 for c in self.coords(v))


def _units_of(ring, bound=None):
    if ring.name == "Z":
        return [1, -1]
    if ring.is_field and ring.characteristic:
        return [ring.normalize(u) for u in range(1, ring.characteristic)]
    return None   # Q: infinitely many; handled by ratio


def classes_equal_up_to_unit(fg, v, w):
    """Whether v = u . w in the presented module for some unit u.

    Scaling happens on the representative, so torsion coordinates are
    re-reduced modulo their invariant factor before comparing.
    """
    ring = fg.ring
    if fg.same_class(v, w):
        return True
    units = _units_of(ring)
    if units is not None:
        return any(fg.same_class(v, [ring.normalize(u * c) for c in w])
                   for u in units)
    # over Q scale by the ratio of the first nonzero coordinates
    cv, cw = fg.coords(v), fg.coords(w)
    for a, b in zip(cv, cw):
        if b != 0:
            u = a / b
            return u != 0 and fg.same_class(
                v, [ring.normalize(u * c) for c in w])
    return all(c == 0 for c in cv)


# ---------------------------------------------------------------------------
# homology of a (non-equivariant) complex of free modules

def homology_from_matrices(ring, d_out, d_in, dim):
    """H = ker(d_out) / im(d_in) with generator tracking.

    ``d_out``: matrix of X_n -> X_{n-1} (may be [] when absent);
    ``d_in``: matrix of X_{n+1} -> X_n; ``dim`` = rank of X_n.
    Returns (FgModule over cycle coordinates, cycle basis as ambient
    columns).  Generators in ambient coordinates are K . g.
    """
    if dim == 0:
        return FgModule(ring, 0, []), []
    if d_out:
        cycles = kernel_sparse(ring, sparse_rows(d_out), dim)
    else:
        cycles = [[ring.one if i == j else ring.zero for i in range(dim)]
                  for j in range(dim)]
    t = len(cycles)
    if t == 0:
        return FgModule(ring, 0, []), []
    K_rows = [[cycles[j][i] for j in range(t)] for i in range(dim)]
    bcols = []
    if d_in and len(d_in[0]) > 0:
        for c in range(len(d_in[0])):
            bcols.append([d_in[r][c] for r in range(dim)])
    if bcols:
        sols = solve_sparse(ring, sparse_rows(K_rows), t, bcols)
        assert sols is not None, "boundaries must be cycles"
        rel = [[sols[k][i] for k in range(len(bcols))] for i in range(t)]
    else:
        rel = [[] for _ in range(t)]
    fg = FgModule(ring, t, rel if bcols else [])
    return fg, cycles


def underlying_homology(X, n):
    """Homology of the underlying complex of free modules at degree n."""
    ring = X.ring
    d_out = X.diff(n).matrix if n in X.diffs else []
    d_in = X.diff(n + 1).matrix if (n + 1) in X.diffs else []
    fg, cycles = homology_from_matrices(ring, list(map(list, d_out)),
                                        list(map(list, d_in)),
                                        X.term(n).rank)
    return fg, cycles


def homology_profile(X):
    """{degree: iso invariants} over all degrees with nonzero homology."""
    out = {}
    lo = X.min_degree
    hi = X.max_degree + 1
    for n in range(lo, hi + 1):
        fg, _ = underlying_homology(X, n)
        if not fg.is_zero():
            out[n] = fg.iso_invariants()
    return out


# ---------------------------------------------------------------------------
# invariants and hom groups

def invariant_data(M):
    """(columns, roots): orbit-sum basis of M^G and one root index each."""
    from .permod import trivial_module
    maps = equivariant_hom_basis(trivial_module(M.group, M.ring), M)
    cols = []
    roots = []
    for f in maps:
        col = [row[0] for row in f.matrix]
        cols.append(col)
        roots.append(f.root_pair[1])
    return cols, roots


def _in_invariant_coords(ring, cols, roots, v):
    """Coordinates of an invariant vector in the orbit-sum basis."""
    coeff = [v[r] for r in roots]
    check = [ring.zero] * len(v)
    for k, col in enumerate(cols):
        if coeff[k] == 0:
            continue
        for i, x in enumerate(col):
            if x != 0:
                check[i] = ring.normalize(check[i] + coeff[k] * x)
    assert [ring.normalize(x) for x in v] == check, \
        "vector is not invariant"
    return coeff


class InvariantsComplex:
    """The complex of G-fixed points, in orbit-sum coordinates."""

    def __init__(self, X):
        self.X = X
        self.ring = X.ring
        self.cols = {}
        self.roots = {}
        self.dmat = {}
        for n, M in X.terms.items():
            cols, roots = invariant_data(M)
            self.cols[n] = cols
            self.roots[n] = roots
        for n in X.terms:
            if (n - 1) not in X.terms or n not in X.diffs:
                continue
            dn = X.diffs[n]
            mat = []
            for col in self.cols[n]:
                w = dn.apply(col)
                mat.append(_in_invariant_coords(
                    self.ring, self.cols[n - 1], self.roots[n - 1], w))
            # mat rows currently index source; transpose to target x source
            t = len(self.cols[n - 1])
            self.dmat[n] = [[mat[c][r] for c in range(len(mat))]
                            for r in range(t)]

    def dim(self, n):
        return len(self.cols.get(n, []))

    def matrix(self, n):
        if n in self.dmat:
            return self.dmat[n]
        return []

    def to_ambient(self, n, coeff):
        v = [self.ring.zero] * self.X.term(n).rank
        for k, c in enumerate(coeff):
            if c == 0:
                continue
            for i, x in enumerate(self.cols[n][k]):
                if x != 0:
                    v[i] = self.ring.normalize(v[i] + c * x)
        return v

    def from_ambient(self, n, v):
        return _in_invariant_coords(self.ring, self.cols.get(n, []),
                                    self.roots.get(n, []), v)


class HomGroup:
    """Hom_K(unit, Y[s]) = H_{-s} of the invariants complex of Y.

    ``generators`` lists (invariant factor, ambient cycle vector) for
    the retained summands; ambient vectors live in Y_{-s}.
    """

    def __init__(self, Y, s, inv=None):
        self.Y = Y
        self.s = s
        self.ring = Y.ring
        n0 = -s
        self.degree = n0
        self.inv = inv if inv is not None else InvariantsComplex(Y)
        I = self.inv
        fg, cycles = homology_from_matrices(
            self.ring, I.matrix(n0), I.matrix(n0 + 1), I.dim(n0))
        self.fg = fg
        self.cycles = cycles      # in invariant coordinates
        self.generators = []
        for d, g in zip(fg.factors, fg.generators):
            coeff = [self.ring.zero] * I.dim(n0)
            for k, gk in enumerate(g):
                if gk != 0:
                    for i, ck in enumerate(cycles[k]):
                        coeff[i] = self.ring.normalize(coeff[i] + gk * ck)
            self.generators.append((d, I.to_ambient(n0, coeff)))

    def label(self):
        return self.fg.label()

    def iso_invariants(self):
        return self.fg.iso_invariants()

    def is_zero(self):
        return self.fg.is_zero()

    def _cycle_coords(self, v_ambient):
        coeff = self.inv.from_ambient(self.degree, v_ambient)
        t = len(self.cycles)
        if t == 0:
            assert all(c == 0 for c in coeff)
            return []
        dim = self.inv.dim(self.degree)
        K_rows = [[self.cycles[j][i] for j in range(t)] for i in range(dim)]
        sols = solve_sparse(self.ring, sparse_rows(K_rows), t, [coeff])
        assert sols is not None, "vector is not a cycle"
        return sols[0]

    def coords(self, v_ambient):
        return self.fg.coords(self._cycle_coords(v_ambient))

    def class_is_zero(self, v_ambient):
        return all(c == 0 for c in self.coords(v_ambient))

    def classes_equal(self, v, w, up_to_unit=False):
        if up_to_unit:
            return classes_equal_up_to_unit(
                self.fg, self._cycle_coords(v), self._cycle_coords(w))
        return self.coords(v) == self.coords(w)


def hom_group(Y, s, inv=None):
    _enforce_rank_cap(Y)
    return HomGroup(Y, s, inv=inv)


def hom_group_bruteforce(Y, s):
    """Independent recomputation of hom_group from raw coordinates.

    Equivariance is imposed as explicit linear equations g.v = v, not
    through orbit sums; homotopies are quotiented out the same way.
    Intended as an oracle for complexes of total rank <= 40.
    """
    assert Y.total_rank() <= 40, "oracle is limited to total rank 40"
    ring = Y.ring
    G = Y.group
    n0 = -s
    M0 = Y.term(n0)
    dim = M0.rank
    if dim == 0:
        return FgModule(ring, 0, []), []
    rows = []
    # equivariance: for each g and basis row i, (g.v - v)_i = 0
    for g in G.elements():
        for i in range(dim):
            row = {}
            j, sg = M0.act(g, i)
            row[i] = ring.normalize(row.get(i, ring.zero) + sg)
            row[j] = ring.normalize(row.get(j, ring.zero) - ring.one)
            if any(v != 0 for v in row.values()):
                rows.append({c: v for c, v in row.items() if v != 0})
    # cycle condition d v = 0
    if n0 in Y.diffs:
        for r in Y.diffs[n0].matrix:
            row = {c: v for c, v in enumerate(r) if v != 0}
            if row:
                rows.append(row)
    cycles = kernel_sparse(ring, rows, dim)
    t = len(cycles)
    if t == 0:
        return FgModule(ring, 0, []), []
    # boundaries of equivariant vectors one degree up
    M1 = Y.term(n0 + 1)
    brows = []
    for g in G.elements():
        for i in range(M1.rank):
            row = {}
            j, sg = M1.act(g, i)
            row[i] = ring.normalize(row.get(i, ring.zero) + sg)
            row[j] = ring.normalize(row.get(j, ring.zero) - ring.one)
            if any(v != 0 for v in row.values()):
                brows.append({c: v for c, v in row.items() if v != 0})
    inv1 = kernel_sparse(ring, brows, M1.rank) if M1.rank else []
    bcols = []
    if (n0 + 1) in Y.diffs:
        d1 = Y.diffs[n0 + 1]
        for w in inv1:
            bcols.append(d1.apply(w))
    K_rows = [[cycles[j][i] for j in range(t)] for i in range(dim)]
    if bcols:
        sols = solve_sparse(ring, sparse_rows(K_rows), t, bcols)
        assert sols is not None
        rel = [[sols[k][i] for k in range(len(bcols))] for i in range(t)]
        fg = FgModule(ring, t, rel)
    else:
        fg = FgModule(ring, t, [])
    gens = []
    for d, g in zip(fg.factors, fg.generators):
        v = [ring.zero] * dim
        for k, gk in enumerate(g):
            if gk != 0:
                for i, ck in enumerate(cycles[k]):
                    v[i] = ring.normalize(v[i] + gk * ck)
        gens.append((d, v))
    return fg, gens


# ---------------------------------------------------------------------------
# equivariant linear systems for maps and homotopies

class _System:
    """A sparse linear system whose unknowns are coefficients of
    equivariant orbit-basis maps, grouped in named blocks."""

    def __init__(self, ring):
        self.ring = ring
        self.blocks = {}
        self.order = []
        self.ncols = 0
        self.rows = []
        self.rhs = []

    def add_block(self, tag, basis):
        assert tag not in self.blocks
        self.blocks[tag] = (self.ncols, basis)
        self.order.append(tag)
        self.ncols += len(basis)

    def col(self, tag, k):
        return self.blocks[tag][0] + k

    def add_rows(self, proj_basis, contributions, rhs_map=None):
        """One equation row per element of ``proj_basis``.

        ``contributions``: list of (tag, matrices) where matrices[k] is
        the composite matrix produced by unknown basis element k of the
        block; the row coefficient is its entry at the projection root.
        ``rhs_map``: matrix whose root entries give the right side.
        """
        ring = self.ring
        for e_idx, e in enumerate(proj_basis):
            i, j = e.root_pair
            row = {}
            for tag, mats in contributions:
                off = self.blocks[tag][0]
                for k, mat in enumerate(mats):
                    v = mat[j][i] if mat else ring.zero
                    if v != 0:
                        row[off + k] = ring.normalize(
                            row.get(off + k, ring.zero) + v)
            b = ring.zero
            if rhs_map is not None:
                b = ring.normalize(rhs_map[j][i])
            row = {c: v for c, v in row.items() if v != 0}
            if row or b != 0:
                self.rows.append(row)
                self.rhs.append(b)

    def solve(self):
        cols = [[self.rhs[r] for r in range(len(self.rows))]]
        sols = solve_sparse(self.ring, self.rows, self.ncols, cols)
        if sols is None:
            return None
        x = sols[0]
        out = {}
        for tag in self.order:
            off, basis = self.blocks[tag]
            out[tag] = x[off:off + len(basis)]
        return out

    def kernel(self):
        vecs = kernel_sparse(self.ring, self.rows, self.ncols)
        out = []
        for x in vecs:
            d = {}
            for tag in self.order:
                off, basis = self.blocks[tag]
                d[tag] = x[off:off + len(basis)]
            out.append(d)
        return out


def _combine(ring, basis, coeffs, source, target):
    mat = mat_zero(ring, target.rank, source.rank)
    for c, b in zip(coeffs, basis):
        if c == 0:
            continue
        for r, row in enumerate(b.matrix):
            for cc, v in enumerate(row):
                if v != 0:
                    mat[r][cc] = ring.normalize(mat[r][cc] + c * v)
    return EquivMap(source, target, mat)


_HOM_BASIS_CACHE = {}


def _hom_basis(M, N):
    key = (id(M), id(N))
    if key not in _HOM_BASIS_CACHE:
        _HOM_BASIS_CACHE[key] = equivariant_hom_basis(M, N)
    return _HOM_BASIS_CACHE[key]


def _compose_mats(ring, A, B):
    """Plain matrix product A . B as nested lists (no equivariance check)."""
    return mat_mul(ring, A, B)


def _homotopy_system(X, Y, sys, h_tag="h"):
    """Add homotopy unknown blocks h_n : X_n -> Y_{n+1} to ``sys``.

    Returns {n: basis} for later reconstruction.
    """
    bases = {}
    for n in sorted(X.terms):
        if (n + 1) in Y.terms:
            basis = _hom_basis(X.terms[n], Y.terms[n + 1])
            if basis:
                sys.add_block((h_tag, n), basis)
                bases[n] = basis
    return bases


def _add_homotopy_equations(X, Y, sys, h_bases, rhs_maps, h_tag="h",
                            extra=None):
    """Equations proj(d h + h d) (+ extra terms) = rhs, degree by degree.

    ``rhs_maps``: {n: matrix of the degree-n right-hand map X_n -> Y_n};
    ``extra``: {n: list of (tag, matrices)} additional linear terms.
    """
    ring = X.ring
    degrees = sorted(set(X.terms) | set(Y.terms))
    for n in degrees:
        if n not in X.terms or n not in Y.terms:
            # no room to project: rhs must vanish identically there
            if rhs_maps and n in rhs_maps:
                assert all(v == 0 for row in rhs_maps[n] for v in row)
            continue
        proj = _hom_basis(X.terms[n], Y.terms[n])
        contributions = []
        if n in h_bases:
            dY = Y.diffs.get(n + 1)
            if dY is not None:
                mats = [_compose_mats(ring, dY.matrix, b.matrix)
                        for b in sys.blocks[(h_tag, n)][1]]
                contributions.append(((h_tag, n), mats))
        if (n - 1) in h_bases:
            dX = X.diffs.get(n)
            if dX is not None:
                mats = [_compose_mats(ring, b.matrix, dX.matrix)
                        for b in sys.blocks[(h_tag, n - 1)][1]]
                contributions.append(((h_tag, n - 1), mats))
        if extra and n in extra:
            contributions.extend(extra[n])
        rhs = rhs_maps.get(n) if rhs_maps else None
        sys.add_rows(proj, contributions, rhs)


def null_homotopy(F):
    """Solve d h + h d = F for an equivariant degree +1 homotopy.

    F is a ChainMap.  Returns {n: EquivMap X_n -> Y_{n+1}} or None.
    """
    X, Y = F.source, F.target
    ring = X.ring
    sys = _System(ring)
    h_bases = _homotopy_system(X, Y, sys)
    rhs = {n: F.component(n).matrix for n in X.terms if n in Y.terms}
    for n in X.terms:
        if n not in Y.terms and not F.component(n).is_zero():
            return None
    _add_homotopy_equations(X, Y, sys, h_bases, rhs)
    sol = sys.solve()
    if sol is None:
        return None
    out = {}
    for n, basis in h_bases.items():
        f = _combine(ring, basis, sol[("h", n)], X.terms[n], Y.terms[n + 1])
        if not f.is_zero():
            out[n] = f
    return out


def check_homotopy(F, h):
    """Assert d h + h d = F exactly."""
    X, Y = F.source, F.target
    ring = X.ring
    for n in set(X.terms) | set(Y.terms):
        if n not in X.terms:
            continue
        lhs = mat_zero(ring, Y.term(n).rank, X.term(n).rank)
        if n in h and (n + 1) in Y.diffs:
            lhs = _compose_mats(ring, Y.diffs[n + 1].matrix, h[n].matrix)
        if (n - 1) in h and n in X.diffs:
            add = _compose_mats(ring, h[n - 1].matrix, X.diffs[n].matrix)
            lhs = [[ring.normalize(lhs[r][c] + add[r][c])
                    for c in range(len(add[0]))] for r in range(len(add))]
        rhs = F.component(n).matrix
        if Y.term(n).rank and X.term(n).rank:
            assert [list(r) for r in lhs] == [list(r) for r in rhs], \
                "homotopy identity fails at degree %d" % n
    return True


class ContractionCertificate:
    def __init__(self, X, h):
        self.X = X
        self.h = h

    def verify(self):
        from .chain import identity_chain_map
        return check_homotopy(identity_chain_map(self.X), self.h)

    def to_json(self):
        return {
            "kind": "contraction",
            "h": {str(n): [[_num_to_json(self.X.ring, v) for v in row]
                           for row in f.matrix]
                  for n, f in self.h.items()},
        }


class NonContractibleWitness:
    def __init__(self, reason, degree=None, invariants=None):
        self.reason = reason
        self.degree = degree
        self.invariants = invariants

    def to_json(self):
        return {"kind": "witness", "reason": self.reason,
                "degree": self.degree,
                "invariants": list(self.invariants or ())}

    def __repr__(self):
        return "NonContractibleWitness(%s at degree %s)" % (
            self.reason, self.degree)


def _num_to_json(ring, v):
    if ring.name == "Q":
        return [v.numerator, v.denominator]
    return int(v)


def _contract_raw(X):
    """A (not necessarily equivariant) contraction of the underlying
    complex, degree by degree from the bottom: solve
    d_{n+1} h_n = id - h_{n-1} d_n with one elimination of d_{n+1}
    carrying all right-hand columns.  Returns {n: matrix} or None.

    The greedy sweep is complete: if a contraction exists then
    h*_n composed with the current right-hand side solves step n
    (the right-hand side lands in cycles, and d splits off cycles when
    the complex is contractible), and a successful sweep is itself a
    contraction, the top identity holding by injectivity of the top
    differential.
    """
    ring = X.ring
    h = {}
    for n in sorted(X.terms):
        rk = X.terms[n].rank
        rhs = mat_identity(ring, rk)
        if (n - 1) in h and n in X.diffs:
            hd = _compose_mats(ring, h[n - 1], X.diffs[n].matrix)
            rhs = [[ring.normalize(rhs[r][c] - hd[r][c])
                    for c in range(rk)] for r in range(rk)]
        if (n + 1) not in X.terms:
            if any(v != 0 for row in rhs for v in row):
                return None
            continue
        d = X.diff(n + 1).matrix
        cols = [[rhs[r][c] for r in range(rk)] for c in range(rk)]
        sols = solve_sparse(ring, sparse_rows(d), X.terms[n + 1].rank, cols)
        if sols is None:
            return None
        h[n] = [[sols[c][r] for c in range(rk)]
                for r in range(X.terms[n + 1].rank)]
    return h


def _average_homotopy(X, raw):
    """G-average a raw contraction into an equivariant one.

    Needs |G| invertible in the ring: the average of the conjugates
    rho(g) h rho(g)^-1 still contracts the identity and commutes with
    the action.  Returns {n: EquivMap}.
    """
    ring, G = X.ring, X.group
    inv_ord = ring.inv(ring.from_int(G.order))
    out = {}
    for n, mat in raw.items():
        src, tgt = X.terms[n], X.terms[n + 1]
        acc = mat_zero(ring, tgt.rank, src.rank)
        for g in range(G.order):
            asrc = src.action[G.inv(g)]
            atgt = tgt.action[g]
            for b in range(src.rank):
                bp, sb = asrc[b]
                for a in range(tgt.rank):
                    v = mat[a][bp]
                    if v != 0:
                        ap, sa = atgt[a]
                        acc[ap][b] = ring.normalize(acc[ap][b] + sa * sb * v)
        avg = [[ring.normalize(v * inv_ord) for v in row] for row in acc]
        if any(v != 0 for row in avg for v in row):
            out[n] = EquivMap(src, tgt, avg)
    return out


def _contract_equivariant(X):
    """Equivariant greedy contraction, one orbit-basis solve per degree.

    Same sweep as _contract_raw but with unknowns the coefficients of
    the equivariant hom basis Hom_G(X_n, X_{n+1}) and equations the
    projections onto the root pairs of Hom_G(X_n, X_n).  Returns
    {n: EquivMap} or None.
    """
    ring = X.ring
    h = {}
    for n in sorted(X.terms):
        Xn = X.terms[n]
        rhs = mat_identity(ring, Xn.rank)
        if (n - 1) in h and n in X.diffs:
            hd = _compose_mats(ring, h[n - 1].matrix, X.diffs[n].matrix)
            rhs = [[ring.normalize(rhs[r][c] - hd[r][c])
                    for c in range(Xn.rank)] for r in range(Xn.rank)]
        basis = _hom_basis(Xn, X.terms[n + 1]) if (n + 1) in X.terms else []
        if not basis:
            if any(v != 0 for row in rhs for v in row):
                return None
            continue
        sys = _System(ring)
        sys.add_block("h", basis)
        dmat = X.diff(n + 1).matrix
        mats = [_compose_mats(ring, dmat, b.matrix) for b in basis]
        sys.add_rows(_hom_basis(Xn, Xn), [("h", mats)], rhs_map=rhs)
        sol = sys.solve()
        if sol is None:
            return None
        hm = _combine(ring, basis, sol["h"], Xn, X.terms[n + 1])
        if not hm.is_zero():
            h[n] = hm
    return h


def is_contractible(X):
    """(True, ContractionCertificate) or (False, witness).

    Contractibility means an equivariant contraction d h + h d = id
    exists over the coefficient ring; the certificate stores h and can
    be re-verified.  Over the trivial group the solve is columnwise;
    when the group order is invertible in a coefficient field a raw
    contraction is averaged into an equivariant one; otherwise the
    greedy sweep runs in the equivariant hom lattices.  Failure first
    looks for nonzero homology of the underlying complex, then reports
    the equivariant system as infeasible.
    """
    if X.is_zero():
        return True, ContractionCertificate(X, {})
    _enforce_rank_cap(X)
    ring, G = X.ring, X.group
    h = None
    if G.order == 1:
        raw = _contract_raw(X)
        if raw is not None:
            h = {n: EquivMap(X.terms[n], X.terms[n + 1], m)
                 for n, m in raw.items()
                 if any(v != 0 for row in m for v in row)}
    elif ring.is_field and (ring.characteristic == 0
                            or G.order % ring.characteristic != 0):
        raw = _contract_raw(X)
        if raw is not None:
            h = _average_homotopy(X, raw)
    else:
        h = _contract_equivariant(X)
    if h is not None:
        cert = ContractionCertificate(X, h)
        cert.verify()
        return True, cert
    for n in range(X.min_degree, X.max_degree + 2):
        fg, _ = underlying_homology(X, n)
        if not fg.is_zero():
            return False, NonContractibleWitness(
                "nonzero homology of the underlying complex",
                degree=n, invariants=fg.iso_invariants())
    return False, NonContractibleWitness(
        "underlying complex is exact but no equivariant contraction "
        "exists over %s" % X.ring.name)


def chain_map_space(X, Y):
    """A lattice basis of the space of chain maps X -> Y."""
    ring = X.ring
    sys = _System(ring)
    f_bases = {}
    for n in sorted(X.terms):
        if n in Y.terms:
            basis = _hom_basis(X.terms[n], Y.terms[n])
            if basis:
                sys.add_block(("f", n), basis)
                f_bases[n] = basis
    # commuting squares, projected onto Hom(X_n, Y_{n-1})
    for n in sorted(set(X.terms) | set(Y.terms)):
        if n not in X.terms or (n - 1) not in Y.terms:
            continue
        proj = _hom_basis(X.terms[n], Y.terms[n - 1])
        contributions = []
        if n in f_bases and n in Y.diffs:
            mats = [_compose_mats(ring, Y.diffs[n].matrix, b.matrix)
                    for b in f_bases[n]]
            contributions.append((("f", n), mats))
        if (n - 1) in f_bases and n in X.diffs:
            mats = [_compose_mats(ring, [
                [ring.normalize(-v) for v in row] for row in b.matrix],
                X.diffs[n].matrix) for b in f_bases[n - 1]]
            contributions.append((("f", n - 1), mats))
        if contributions:
            sys.add_rows(proj, contributions)
    out = []
    from .chain import ChainMap
    for sol in sys.kernel():
        comps = {}
        for n, basis in f_bases.items():
            f = _combine(ring, basis, sol[("f", n)], X.terms[n], Y.terms[n])
            if not f.is_zero():
                comps[n] = f
        if comps:
            out.append(ChainMap(X, Y, comps))
    return out


class Equivalence:
    """A verified homotopy equivalence f : X -> Y with quasi-inverse g."""

    def __init__(self, f, g, h, hp):
        self.f = f
        self.g = g
        self.h = h       # d h + h d = id_X - g f
        self.hp = hp     # d hp + hp d = id_Y - f g

    def verify(self):
        from .chain import identity_chain_map, ChainMap
        X, Y = self.f.source, self.f.target
        ring = X.ring
        gf = self.g.compose(self.f)
        comps = {}
        for n in X.terms:
            idm = mat_identity(ring, X.terms[n].rank)
            gfm = gf.component(n).matrix
            mat = [[ring.normalize(idm[r][c] - gfm[r][c])
                    for c in range(X.terms[n].rank)]
                   for r in range(X.terms[n].rank)]
            comps[n] = EquivMap(X.terms[n], X.terms[n], mat)
        check_homotopy(ChainMap(X, X, comps), self.h)
        fg = self.f.compose(self.g)
        comps = {}
        for n in Y.terms:
            idm = mat_identity(ring, Y.terms[n].rank)
            fgm = fg.component(n).matrix
            mat = [[ring.normalize(idm[r][c] - fgm[r][c])
                    for c in range(Y.terms[n].rank)]
                   for r in range(Y.terms[n].rank)]
            comps[n] = EquivMap(Y.terms[n], Y.terms[n], mat)
        check_homotopy(ChainMap(Y, Y, comps), self.hp)
        return True


class NotEquivalent:
    def __init__(self, reason, degree=None, left=None, right=None):
        self.reason = reason
        self.degree = degree
        self.left = left
        self.right = right

    def __repr__(self):
        return "NotEquivalent(%s at degree %s: %s vs %s)" % (
            self.reason, self.degree, self.left, self.right)


class Inconclusive:
    def __init__(self, reason):
        self.reason = reason

    def __repr__(self):
        return "Inconclusive(%s)" % self.reason


_EQUIV_CACHE = {}


def find_homotopy_equivalence(X, Y, cache_key=None):
    """Search for an equivariant homotopy equivalence X -> Y.

    Returns an Equivalence, a NotEquivalent witness (homology profiles
    differ), or Inconclusive.  Candidates for f are: the identity when
    the complexes are structurally equal, an integral combination of
    the chain-map lattice basis that induces a unit on homology when
    the homology is concentrated in one degree and free of rank one,
    then the individual basis maps.  Each candidate is promoted by
    contracting its mapping cone and reading off the quasi-inverse and
    both homotopies from the contraction blocks.
    """
    if cache_key is not None and cache_key in _EQUIV_CACHE:
        return _EQUIV_CACHE[cache_key]
    res = _find_homotopy_equivalence(X, Y)
    if cache_key is not None:
        _EQUIV_CACHE[cache_key] = res
    return res


def _find_homotopy_equivalence(X, Y):
    from .chain import identity_chain_map, ChainMap, structurally_equal
    ring = X.ring
    profX = homology_profile(X)
    profY = homology_profile(Y)
    if profX != profY:
        degs = sorted(set(profX) | set(profY))
        for n in degs:
            if profX.get(n) != profY.get(n):
                return NotEquivalent("homology profiles differ", degree=n,
                                     left=profX.get(n), right=profY.get(n))
    def candidates():
        if structurally_equal(X, Y):
            comps = {n: EquivMap(X.terms[n], Y.terms[n],
                                 mat_identity(ring, X.terms[n].rank))
                     for n in X.terms}
            yield ChainMap(X, Y, comps)
        space = chain_map_space(X, Y)
        # Bezout combination on concentrated rank-one free homology
        conc = [n for n, inv in profX.items() if inv != (0, ())]
        if len(conc) == 1 and profX[conc[0]] == (1, ()):
            n0 = conc[0]
            fgX, cycX = underlying_homology(X, n0)
            fgY, cycY = underlying_homology(Y, n0)
            zX = fgX.generators[0]
            # ambient generator cycle of H_{n0}(X)
            vX = [ring.zero] * X.term(n0).rank
            for k, gk in enumerate(zX):
                if gk != 0:
                    for i, ck in enumerate(cycX[k]):
                        vX[i] = ring.normalize(vX[i] + gk * ck)
            scalars = []
            t = len(cycY)
            K_rows = [[cycY[j][i] for j in range(t)]
                      for i in range(Y.term(n0).rank)]
            for f in space:
                w = f.component(n0).apply(vX)
                sol = solve_sparse(ring, sparse_rows(K_rows), t, [w])
                if sol is None:
                    scalars.append(None)
                    continue
                scalars.append(fgY.coords(sol[0])[0]
                               if fgY.factors else ring.zero)
            combo = _unit_combination(ring, scalars)
            if combo is not None:
                comps = {}
                for n in X.terms:
                    if n not in Y.terms:
                        continue
                    mat = mat_zero(ring, Y.terms[n].rank, X.terms[n].rank)
                    for c, f in zip(combo, space):
                        if c == 0:
                            continue
                        fm = f.component(n).matrix
                        for r in range(len(mat)):
                            for cc in range(len(mat[0])):
                                if fm[r][cc] != 0:
                                    mat[r][cc] = ring.normalize(
                                        mat[r][cc] + c * fm[r][cc])
                    comps[n] = EquivMap(X.terms[n], Y.terms[n], mat)
                yield ChainMap(X, Y, comps)
        for f in space:
            yield f

    tried = 0
    for f in candidates():
        tried += 1
        eq = _try_equivalence(f)
        if eq is not None:
            return eq
    return Inconclusive("no candidate among %d chain maps admits a "
                        "quasi-inverse over %s" % (tried, ring.name))


def _unit_combination(ring, scalars):
    """Integer coefficients c with sum c_i . s_i a unit, if possible."""
    vals = [(i, s) for i, s in enumerate(scalars) if s is not None and s != 0]
    if not vals:
        return None
    if ring.is_field:
        i, s = vals[0]
        out = [ring.zero] * len(scalars)
        out[i] = ring.inv(s)
        return out
    # extended gcd over Z
    g, coeff = vals[0][1], {vals[0][0]: 1}
    for i, s in vals[1:]:
        if abs(g) == 1:
            break
        a, b = g, s
        # extended Euclid for a, b
        old_r, r = a, b
        old_s, t_s = 1, 0
        old_t, t_t = 0, 1
        while r != 0:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, t_s = t_s, old_s - q * t_s
            old_t, t_t = t_t, old_t - q * t_t
        coeff = {k: v * old_s for k, v in coeff.items()}
        coeff[i] = coeff.get(i, 0) + old_t
        g = old_r
    if abs(g) != 1:
        return None
    out = [0] * len(scalars)
    for k, v in coeff.items():
        out[k] = v
    return out


def _try_equivalence(f):
    """Promote a candidate chain map to an equivalence, if possible.

    f is an equivalence exactly when cone(f) is contractible.  From a
    contraction s of the cone, written in blocks on
    cone_j = Y_j (+) X_{j-1} as s_j = [[a, b], [c, e]], the block
    g = c is a chain-map quasi-inverse, h = -e contracts id_X - g f
    and hp = a contracts id_Y - f g.
    """
    from .chain import ChainMap, cone
    X, Y = f.source, f.target
    ring = X.ring
    ok, cert = is_contractible(cone(f))
    if not ok:
        return None
    g_comps, h, hp = {}, {}, {}
    for j, sj in cert.h.items():
        ry, rx = Y.term(j).rank, X.term(j - 1).rank
        ry1, rx1 = Y.term(j + 1).rank, X.term(j).rank
        m = sj.matrix
        if ry and rx1:
            c = [[m[ry1 + r][cc] for cc in range(ry)] for r in range(rx1)]
            if any(v != 0 for row in c for v in row):
                g_comps[j] = EquivMap(Y.terms[j], X.terms[j], c)
        if rx and rx1:
            e = [[ring.normalize(-m[ry1 + r][ry + cc]) for cc in range(rx)]
                 for r in range(rx1)]
            if any(v != 0 for row in e for v in row):
                h[j - 1] = EquivMap(X.terms[j - 1], X.terms[j], e)
        if ry and ry1:
            a = [[m[r][cc] for cc in range(ry)] for r in range(ry1)]
            if any(v != 0 for row in a for v in row):
                hp[j] = EquivMap(Y.terms[j], Y.terms[j + 1], a)
    eq = Equivalence(f, ChainMap(Y, X, g_comps), h, hp)
    eq.verify()
    return eq
