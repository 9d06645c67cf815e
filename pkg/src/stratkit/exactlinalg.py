"""Exact linear algebra and univariate polynomials over F_p or Q.

Matrices are numpy arrays.  Over F_p they hold int64 canonical residues,
over Q they are object arrays of ``Fraction``.  Every routine goes through
a field object so callers never touch the representation directly.
"""
import os
import random
from fractions import Fraction

import numpy as np

try:
    from stratkit import _kernels
except ImportError:  # pragma: no cover - depends on the build
    _kernels = None

if os.environ.get("STRATKIT_PURE"):
    _kernels = None


class UnsupportedField(Exception):
    pass


class DimensionMismatch(ValueError):
    pass


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def rref_modp_python(a, p):
    """Vectorised numpy elimination; used when the compiled kernel is absent."""
    a = np.array(a, dtype=np.int64, copy=True)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rref_modp_compiled(a, p):
    a = np.array(a, dtype=np.int64, copy=True, order="C")
    if a.size == 0:
        return a, []
    pivots = _kernels.rref_inplace(a, p)
    return a, list(pivots)


def kernel_backend():
    return "cython" if _kernels is not None else "numpy"


class Field:
    """Common algorithms written against a handful of primitives."""

    kind = None

    # -- construction -------------------------------------------------
    def matrix(self, rows, ncols=None):
        rows = [list(r) for r in rows]
        if not rows:
            return self.zeros((0, ncols or 0))
        out = self.zeros((len(rows), len(rows[0])))
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                out[i, j] = self.elem(x)
        return out

    def vector(self, xs):
        out = self.zeros((len(xs),))
        for i, x in enumerate(xs):
            out[i] = self.elem(x)
        return out

    def eye(self, n):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def block_diag(self, blocks):
        r = sum(b.shape[0] for b in blocks)
        c = sum(b.shape[1] for b in blocks)
        out = self.zeros((r, c))
        i = j = 0
        for b in blocks:
            out[i:i + b.shape[0], j:j + b.shape[1]] = b
            i += b.shape[0]
            j += b.shape[1]
        return out

    # -- derived linear algebra ---------------------------------------
    def rank(self, a):
        if a.size == 0:
            return 0
        return len(self.rref(a)[1])

    def kernel_basis(self, a):
        """Columns spanning the null space of ``a``."""
        rows, cols = a.shape
        if rows == 0:
            return self.eye(cols)
        r, piv = self.rref(a)
        free = [c for c in range(cols) if c not in set(piv)]
        k = self.zeros((cols, len(free)))
        for t, f in enumerate(free):
            k[f, t] = self.one
            for i, pc in enumerate(piv):
                k[pc, t] = self.neg(r[i, f])
        return k

    def image_basis(self, a):
        """Columns of ``a`` at pivot positions: a basis of the column space."""
        if a.shape[1] == 0:
            return self.zeros((a.shape[0], 0))
        _, piv = self.rref(a)
        return a[:, piv].copy()

    def row_basis(self, a):
        r, piv = self.rref(a)
        return r[:len(piv)].copy()

    def solve(self, a, b):
        """A particular solution of a x = b, or None."""
        b = np.asarray(b)
        if a.shape[0] != b.shape[0]:
            raise DimensionMismatch("rows(m) != len(b)")
        aug = self.zeros((a.shape[0], a.shape[1] + 1))
        aug[:, :a.shape[1]] = a
        aug[:, a.shape[1]] = b
        r, piv = self.rref(aug)
        n = a.shape[1]
        if piv and piv[-1] == n:
            return None
        x = self.zeros((n,))
        for i, c in enumerate(piv):
            x[c] = r[i, n]
        assert self.is_zero(self.sub(self.matmul(a, x.reshape(-1, 1))[:, 0], b))
        return x

    def solve_matrix(self, a, b):
        """X with a X = b, or None.  Columns are solved independently."""
        cols = []
        for j in range(b.shape[1]):
            x = self.solve(a, b[:, j])
            if x is None:
                return None
            cols.append(x)
        out = self.zeros((a.shape[1], b.shape[1]))
        for j, x in enumerate(cols):
            out[:, j] = x
        return out

    def inverse(self, a):
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch("not square")
        aug = self.zeros((n, 2 * n))
        aug[:, :n] = a
        aug[:, n:] = self.eye(n)
        r, piv = self.rref(aug)
        if len([c for c in piv if c < n]) < n:
            raise ZeroDivisionError("singular matrix")
        return r[:, n:].copy()

    def det(self, a):
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch("not square")
        m = [[a[i, j] for j in range(n)] for i in range(n)]
        d = self.one
        for c in range(n):
            k = next((r for r in range(c, n) if m[r][c] != 0), None)
            if k is None:
                return self.zero
            if k != c:
                m[c], m[k] = m[k], m[c]
                d = self.neg(d)
            piv = m[c][c]
            d = self.mul_elem(d, piv)
            inv = self.inv_elem(piv)
            for r in range(c + 1, n):
                if m[r][c] != 0:
                    f = self.mul_elem(m[r][c], inv)
                    m[r] = [self.elem(x - f * y) for x, y in zip(m[r], m[c])]
        return d

    def in_span(self, basis_cols, v):
        if basis_cols.shape[1] == 0:
            return self.is_zero(v)
        return self.solve(basis_cols, v) is not None

    def minimal_polynomial(self, m):
        n = m.shape[0]
        if m.shape != (n, n):
            raise DimensionMismatch("minimal polynomial needs a square matrix")
        powers = [self.eye(n)]
        vecs = [powers[0].reshape(-1)]
        while True:
            nxt = self.matmul(powers[-1], m)
            stack = self.zeros((n * n, len(vecs)))
            for j, v in enumerate(vecs):
                stack[:, j] = v
            x = self.solve(stack, nxt.reshape(-1))
            if x is not None:
                coeffs = [self.neg(c) for c in x] + [self.one]
                return Polynomial(self, coeffs)
            powers.append(nxt)
            vecs.append(nxt.reshape(-1))

    def characteristic_polynomial(self, m):
        """det(xI - m) by interpolation at n+1 points."""
        n = m.shape[0]
        if self.kind == "Fp" and self.p <= n:
            raise UnsupportedField("interpolation needs p > n")
        xs = list(range(n + 1))
        ys = [self.det(self.sub(self.scale(x, self.eye(n)), m)) for x in xs]
        return Polynomial.interpolate(self, xs, ys)

    def evaluate_poly_at_matrix(self, f, m):
        n = m.shape[0]
        acc = self.zeros((n, n))
        for c in reversed(f.coeffs):
            acc = self.add(self.matmul(acc, m), self.scale(c, self.eye(n)))
        return acc


class PrimeField(Field):
    kind = "Fp"

    def __init__(self, p=32003):
        p = int(p)
        if not _is_prime(p) or p >= 2 ** 31:
            raise ValueError("p must be a prime below 2^31, got %d" % p)
        self.p = p
        self.zero = 0
        self.one = 1

    def __repr__(self):
        return "PrimeField(%d)" % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def describe(self):
        return {"kind": "Fp", "p": self.p}

    def elem(self, x):
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by p")
            return (x.numerator * pow(x.denominator, self.p - 2, self.p)) % self.p
        return int(x) % self.p

    def to_str(self, x):
        return str(int(x))

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.int64)

    def asarray(self, a):
        return np.asarray(a, dtype=np.int64) % self.p

    def inv_elem(self, x):
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, self.p - 2, self.p)

    def mul_elem(self, x, y):
        return (int(x) * int(y)) % self.p

    def neg(self, x):
        return (-np.asarray(x)) % self.p if isinstance(x, np.ndarray) else (-int(x)) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def scale(self, c, a):
        return (int(c) * a) % self.p

    def matmul(self, a, b):
        if a.shape[1] == 0:
            return self.zeros((a.shape[0], b.shape[1]) if b.ndim == 2 else (a.shape[0],))
        if a.shape[1] * (self.p - 1) ** 2 < 2 ** 62:
            return (a @ b) % self.p
        out = (a.astype(object) @ b.astype(object)) % self.p
        return out.astype(np.int64)

    def is_zero(self, a):
        return not np.any(np.asarray(a) % self.p)

    def rref(self, a):
        if a.size == 0:
            return np.array(a, dtype=np.int64, copy=True), []
        if _kernels is not None:
            return rref_modp_compiled(a, self.p)
        return rref_modp_python(a, self.p)

    def random_elements(self, rng, n, low=1):
        return [rng.randrange(low, self.p) for _ in range(n)]

    def enumerate_elements(self):
        return range(self.p)


class RationalField(Field):
    kind = "Q"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __repr__(self):
        return "RationalField()"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def describe(self):
        return {"kind": "Q"}

    def elem(self, x):
        if isinstance(x, str):
            return Fraction(x.strip())
        return Fraction(x)

    def to_str(self, x):
        return str(Fraction(x))

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def asarray(self, a):
        a = np.asarray(a, dtype=object)
        return np.vectorize(Fraction, otypes=[object])(a) if a.size else self.zeros(a.shape)

    def inv_elem(self, x):
        return 1 / Fraction(x)

    def mul_elem(self, x, y):
        return Fraction(x) * Fraction(y)

    def neg(self, x):
        return -x

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def scale(self, c, a):
        return Fraction(c) * a

    def matmul(self, a, b):
        if a.shape[1] == 0:
            return self.zeros((a.shape[0], b.shape[1]) if b.ndim == 2 else (a.shape[0],))
        return a.dot(b)

    def is_zero(self, a):
        a = np.asarray(a)
        return all(x == 0 for x in a.flat)

    def rref(self, a):
        m = [[Fraction(x) for x in row] for row in a]
        rows = len(m)
        cols = a.shape[1]
        pivots = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            k = next((i for i in range(r, rows) if m[i][c] != 0), None)
            if k is None:
                continue
            m[r], m[k] = m[k], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            pr = m[r]
            for i in range(rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], pr)]
            pivots.append(c)
            r += 1
        out = self.zeros(a.shape)
        for i in range(rows):
            for j in range(cols):
                out[i, j] = m[i][j]
        return out, pivots

    def random_elements(self, rng, n, low=1):
        return [Fraction(rng.randrange(low, 1000)) for _ in range(n)]

    def enumerate_elements(self):
        raise UnsupportedField("Q is infinite")


def make_field(kind="Fp", p=32003):
    if kind in ("Q", "q"):
        return RationalField()
    return PrimeField(p)


def parse_field_option(text):
    """'fp:32003' or 'q'."""
    text = text.strip().lower()
    if text == "q":
        return RationalField()
    if text.startswith("fp"):
        _, _, p = text.partition(":")
        return PrimeField(int(p) if p else 32003)
    raise ValueError("unknown field %r" % text)


# ---------------------------------------------------------------------
# polynomials


class Polynomial:
    """Dense univariate polynomial, coefficients lowest degree first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = [field.elem(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls, field):
        return cls(field, [0, 1])

    @classmethod
    def const(cls, field, c):
        return cls(field, [c])

    @classmethod
    def interpolate(cls, field, xs, ys):
        total = cls(field, [])
        for i, (xi, yi) in enumerate(zip(xs, ys)):
            term = cls(field, [yi])
            for j, xj in enumerate(xs):
                if j != i:
                    d = field.inv_elem(field.elem(xi) - field.elem(xj))
                    term = term * cls(field, [field.mul_elem(-field.elem(xj), d), d])
            total = total + term
        return total

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "Polynomial(%s)" % (list(self.coeffs),)

    def _wrap(self, cs):
        return Polynomial(self.field, cs)

    def _norm(self, v):
        return self.field.elem(v)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return self._wrap([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                           for i in range(n)])

    def __neg__(self):
        return self._wrap([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self._wrap([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return self._wrap([])
        out = [0] * (len(a) + len(b) - 1)
        if self.field.kind == "Fp":
            p = self.field.p
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] = (out[i + j] + x * y) % p
        else:
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._wrap(out)

    def monic(self):
        if not self.coeffs:
            return self
        inv = self.field.inv_elem(self.lead)
        return self._wrap([self.field.mul_elem(c, inv) for c in self.coeffs])

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return self._wrap([]), self
        q = [0] * (dq + 1)
        inv = f.inv_elem(other.lead)
        b = other.coeffs
        for k in range(dq, -1, -1):
            c = f.mul_elem(r[k + len(b) - 1], inv)
            q[k] = c
            if c:
                for j, y in enumerate(b):
                    r[k + j] = f.elem(r[k + j] - c * y)
        return self._wrap(q), self._wrap(r[:len(b) - 1])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def derivative(self):
        return self._wrap([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = self.field.elem(acc * x + c)
        return acc

    def powmod(self, e, mod):
        result = self._wrap([1])
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result


def poly_gcd(a, b):
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a, b):
    """(g, s, t) with s a + t b = g monic."""
    f = a.field
    r0, r1 = a, b
    s0, s1 = Polynomial(f, [1]), Polynomial(f, [])
    t0, t1 = Polynomial(f, []), Polynomial(f, [1])
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    inv = f.inv_elem(r0.lead)
    return r0 * inv, s0 * inv, t0 * inv


def squarefree_decomposition(f):
    """Pairs (g_i, i) with f = lead * prod g_i^i, g_i squarefree and coprime.

    Works in characteristic 0 and p (the p-th root case is handled).
    """
    field = f.field
    if f.is_zero():
        raise ValueError("zero polynomial")
    f = f.monic()
    if f.degree == 0:
        return []
    if field.kind == "Fp":
        return _sqf_fp(f)
    out = []
    i = 1
    g = poly_gcd(f, f.derivative())
    w = f // g
    while w.degree > 0:
        y = poly_gcd(w, g)
        z = w // y
        if z.degree > 0:
            out.append((z.monic(), i))
        i += 1
        w = y
        g = g // y
    return out


def _pth_root(f):
    p = f.field.p
    return Polynomial(f.field, [f.coeffs[i] for i in range(0, len(f.coeffs), p)])


def _sqf_fp(f):
    p = f.field.p
    out = {}
    d = f.derivative()
    if d.is_zero():
        for g, m in _sqf_fp(_pth_root(f)):
            out[g] = out.get(g, 0) + m * p
        return sorted(out.items(), key=lambda t: (t[1], t[0].coeffs))
    c = poly_gcd(f, d)
    w = f // c
    i = 1
    while w.degree > 0:
        y = poly_gcd(w, c)
        z = w // y
        if z.degree > 0:
            out[z.monic()] = out.get(z.monic(), 0) + i
        i += 1
        w = y
        c = c // y
    if c.degree > 0:
        for g, m in _sqf_fp(_pth_root(c)):
            out[g] = out.get(g, 0) + m * p
    return sorted(out.items(), key=lambda t: (t[1], t[0].coeffs))


def _distinct_degree(f):
    """Squarefree monic f over F_p -> list of (product of degree-d factors, d)."""
    field = f.field
    p = field.p
    x = Polynomial.x(field)
    out = []
    h = x % f
    d = 0
    rest = f
    while rest.degree >= 2 * (d + 1):
        d += 1
        h = h.powmod(p, rest)
        g = poly_gcd(rest, h - x)
        if g.degree > 0:
            out.append((g, d))
            rest = rest // g
            h = h % rest
    if rest.degree > 0:
        out.append((rest, rest.degree))
    return out


def _equal_degree(f, d, rng):
    field = f.field
    p = field.p
    if f.degree == d:
        return [f.monic()]
    while True:
        a = Polynomial(field, [rng.randrange(p) for _ in range(f.degree)])
        if a.degree < 1:
            continue
        if p == 2:
            t = a
            s = a
            for _ in range(d - 1):
                s = (s * s) % f
                t = t + s
            g = poly_gcd(f, t)
        else:
            g = poly_gcd(f, a.powmod((p ** d - 1) // 2, f) - Polynomial(field, [1]))
        if 0 < g.degree < f.degree:
            return _equal_degree(g, d, rng) + _equal_degree(f // g, d, rng)


def factor_over_Fp(f, seed=0):
    """Monic irreducible factors with multiplicities, sorted deterministically."""
    field = f.field
    if field.kind != "Fp":
        raise UnsupportedField("full factorization is only available over F_p; "
                               "use squarefree_decomposition or rational_roots over Q")
    if f.is_zero():
        raise ValueError("zero polynomial")
    rng = random.Random(seed)
    out = []
    for g, m in squarefree_decomposition(f):
        for part, d in _distinct_degree(g):
            for h in _equal_degree(part, d, rng):
                out.append((h.monic(), m))
    out.sort(key=lambda t: (t[0].degree, t[0].coeffs, t[1]))
    return out


def is_irreducible_Fp(f):
    fs = factor_over_Fp(f)
    return len(fs) == 1 and fs[0][1] == 1


def _divisors(n):
    n = abs(n)
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            out.append(n // i)
        i += 1
    return sorted(set(out))


def rational_roots(f):
    """Distinct rational roots of f over Q, ascending."""
    if f.field.kind != "Q":
        raise UnsupportedField("rational_roots expects a polynomial over Q")
    if f.is_zero():
        raise ValueError("zero polynomial")
    cs = list(f.coeffs)
    roots = set()
    while cs and cs[0] == 0:
        roots.add(Fraction(0))
        cs.pop(0)
    if len(cs) <= 1:
        return sorted(roots)
    den = 1
    for c in cs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    g = Polynomial(f.field, cs)
    for a in _divisors(ints[0]):
        for b in _divisors(ints[-1]):
            for s in (1, -1):
                r = Fraction(s * a, b)
                if g(r) == 0:
                    roots.add(r)
    return sorted(roots)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a
