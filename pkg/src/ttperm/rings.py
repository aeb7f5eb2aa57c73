"""Exact coefficient domains and bare-hands matrix arithmetic.

Three domains are supported: the integers, the rationals, and prime
fields.  Values are plain Python objects (``int`` for ZZ and GF(p),
``fractions.Fraction`` for QQ) so that all arithmetic is exact; no
floats appear anywhere in this package.

Matrices are lists of lists, row-major, with ``M[i][j]`` the entry in
row ``i`` and column ``j``.  The helpers below are deliberately small:
anything that needs pivoting or normal forms lives in ``homotopy``.
"""

from fractions import Fraction


class CoefficientDomain:
    """Base class; concrete domains are singletons (per prime for GF)."""

    is_field = False
    characteristic = 0

    def from_int(self, n):
        raise NotImplementedError

    def normalize(self, x):
        return x

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    def is_unit(self, x):
        raise NotImplementedError

    def inv(self, x):
        """Multiplicative inverse; only defined on units."""
        raise NotImplementedError

    def __repr__(self):
        return self.name


class _Integers(CoefficientDomain):
    name = "Z"

    def from_int(self, n):
        return int(n)

    def is_unit(self, x):
        return x == 1 or x == -1

    def inv(self, x):
        assert x in (1, -1)
        return x

    def units(self):
        return (1, -1)


class _Rationals(CoefficientDomain):
    name = "Q"
    is_field = True

    def from_int(self, n):
        return Fraction(n)

    def normalize(self, x):
        return Fraction(x)

    def is_unit(self, x):
        return x != 0

    def inv(self, x):
        return 1 / Fraction(x)


class PrimeField(CoefficientDomain):
    is_field = True

    _instances = {}

    def __new__(cls, p):
        if p not in cls._instances:
            if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
                raise ValueError("PrimeField needs a prime, got %r" % (p,))
            inst = super().__new__(cls)
            inst.p = p
            inst.name = "F%d" % p
            inst.characteristic = p
            cls._instances[p] = inst
        return cls._instances[p]

    def from_int(self, n):
        return int(n) % self.p

    def normalize(self, x):
        return int(x) % self.p

    def is_unit(self, x):
        return x % self.p != 0

    def inv(self, x):
        return pow(int(x), -1, self.p)


ZZ = _Integers()
QQ = _Rationals()


def GF(p):
    return PrimeField(p)


def domain_from_name(name):
    """Parse a ring name as used by the CLI: Z, Q, F2, F3, F5, ..."""
    name = name.strip()
    if name == "Z":
        return ZZ
    if name == "Q":
        return QQ
    if name.startswith("F") and name[1:].isdigit():
        return GF(int(name[1:]))
    raise ValueError("unknown coefficient ring %r" % (name,))


# ---------------------------------------------------------------------------
# matrix helpers (dense, exact)

def mat_zero(ring, rows, cols):
    z = ring.zero
    return [[z] * cols for _ in range(rows)]


def mat_identity(ring, n):
    M = mat_zero(ring, n, n)
    one = ring.one
    for i in range(n):
        M[i][i] = one
    return M


def mat_copy(M):
    return [row[:] for row in M]


def mat_shape(M):
    return (len(M), len(M[0]) if M else 0)


def mat_mul(ring, A, B):
    n, k = mat_shape(A)
    k2, m = mat_shape(B)
    assert k == k2, "shape mismatch %s * %s" % (mat_shape(A), mat_shape(B))
    norm = ring.normalize
    out = mat_zero(ring, n, m)
    for i in range(n):
        Ai = A[i]
        Oi = out[i]
        for t in range(k):
            a = Ai[t]
            if a == 0:
                continue
            Bt = B[t]
            for j in range(m):
                b = Bt[j]
                if b != 0:
                    Oi[j] = norm(Oi[j] + a * b)
    return out


def mat_add(ring, A, B):
    norm = ring.normalize
    return [[norm(a + b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(ring, A, B):
    norm = ring.normalize
    return [[norm(a - b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(ring, A):
    norm = ring.normalize
    return [[norm(-a) for a in row] for row in A]


def mat_scale(ring, c, A):
    norm = ring.normalize
    return [[norm(c * a) for a in row] for row in A]


def mat_transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def mat_eq(A, B):
    return mat_shape(A) == mat_shape(B) and all(
        a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_is_zero(A):
    return all(a == 0 for row in A for a in row)


def mat_apply(ring, A, v):
    """Matrix times column vector (a plain list)."""
    n, k = mat_shape(A)
    assert k == len(v), "shape mismatch"
    norm = ring.normalize
    out = []
    for i in range(n):
        acc = ring.zero
        Ai = A[i]
        for t in range(k):
            x = v[t]
            if x != 0 and Ai[t] != 0:
                acc = acc + Ai[t] * x
        out.append(norm(acc))
    return out
