"""Finite-dimensional algebras given by structure constants.

Basis elements b_0..b_{n-1}; ``struct[i, j]`` is the coordinate vector of
b_i * b_j.  A complete set of orthogonal idempotents e(0..t-1) carries the
vertex labels; modules are graded by these idempotents.
"""
import itertools
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from stratkit.exactlinalg import Polynomial, factor_over_Fp, poly_xgcd


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple  # (name, source label, target label)

    def arrow_counts(self):
        out = {}
        for _, s, t in self.arrows:
            out[(s, t)] = out.get((s, t), 0) + 1
        return out

    def reversed(self):
        return Quiver(self.vertices, tuple((n, t, s) for n, s, t in self.arrows))

    def same_shape(self, other):
        return (tuple(self.vertices) == tuple(other.vertices)
                and self.arrow_counts() == other.arrow_counts())


class AlgebraOrder:
    """A linear order on vertex indices 0..n-1, stored as the increasing list."""

    def __init__(self, increasing):
        increasing = [int(i) for i in increasing]
        n = len(increasing)
        if sorted(increasing) != list(range(n)):
            raise ValueError("order must be a permutation of 0..%d" % (n - 1))
        self.increasing = tuple(increasing)
        self.rank = [0] * n
        for pos, v in enumerate(increasing):
            self.rank[v] = pos

    @classmethod
    def natural(cls, n):
        return cls(range(n))

    def __len__(self):
        return len(self.increasing)

    def __eq__(self, other):
        return isinstance(other, AlgebraOrder) and other.increasing == self.increasing

    def __repr__(self):
        return "AlgebraOrder(%s)" % (list(self.increasing),)

    def lt(self, i, j):
        return self.rank[i] < self.rank[j]

    def le(self, i, j):
        return self.rank[i] <= self.rank[j]

    def above(self, i, strict=True):
        return [j for j in self.increasing if (self.rank[j] > self.rank[i] if strict
                                                 else self.rank[j] >= self.rank[i])]

    def below(self, i, strict=False):
        return [j for j in self.increasing if (self.rank[j] < self.rank[i] if strict
                                                 else self.rank[j] <= self.rank[i])]

    def reversed(self):
        return AlgebraOrder(reversed(self.increasing))

    def largest_first(self):
        return list(reversed(self.increasing))


class FiniteDimAlgebra:
    def __init__(self, field, struct, unit, idempotents, vertex_labels=None,
                 basis_labels=None, name=None):
        self.field = field
        self.struct = field.asarray(struct) if field.kind == "Fp" else struct
        self.dim = self.struct.shape[0]
        self.unit = unit
        self.idempotents = list(idempotents)
        self.nvert = len(self.idempotents)
        self.vertex_labels = [str(v) for v in (vertex_labels or range(1, self.nvert + 1))]
        self.basis_labels = list(basis_labels or ["b%d" % i for i in range(self.dim)])
        self.name = name
        self._opposite = None
        self._cache = {}

    def __repr__(self):
        return "FiniteDimAlgebra(dim=%d, vertices=%s)" % (self.dim, self.vertex_labels)

    # -- arithmetic ---------------------------------------------------
    def basis_vector(self, i):
        v = self.field.zeros((self.dim,))
        v[i] = self.field.one
        return v

    def mult(self, x, y):
        f = self.field
        n = self.dim
        t = f.matmul(x.reshape(1, -1), self.struct.reshape(n, n * n)).reshape(n, n)
        return f.matmul(y.reshape(1, -1), t)[0]

    def left_matrix(self, x):
        f = self.field
        n = self.dim
        t = f.matmul(x.reshape(1, -1), self.struct.reshape(n, n * n)).reshape(n, n)
        return t.T.copy()

    def right_matrix(self, y):
        f = self.field
        n = self.dim
        perm = self.struct.transpose(1, 0, 2).reshape(n, n * n)
        t = f.matmul(y.reshape(1, -1), perm).reshape(n, n)
        return t.T.copy()

    def left_regular(self):
        """Stack of left multiplication matrices L_i (action of b_i)."""
        if "L" not in self._cache:
            self._cache["L"] = np.stack([self.struct[i].T.copy() for i in range(self.dim)]) \
                if self.dim else self.field.zeros((0, 0, 0))
        return self._cache["L"]

    def vertex_index(self, label):
        return self.vertex_labels.index(str(label))

    # -- derived algebras ----------------------------------------------
    def opposite(self):
        if self._opposite is None:
            op = FiniteDimAlgebra(self.field, self.struct.transpose(1, 0, 2).copy(),
                                  self.unit, self.idempotents, self.vertex_labels,
                                  self.basis_labels, name=(self.name or "A") + "^op")
            op._opposite = self
            self._opposite = op
        return self._opposite

    # -- structure ----------------------------------------------------
    def radical(self):
        if "rad" not in self._cache:
            self._cache["rad"] = radical(self)
        return self._cache["rad"]

    def radical_power(self, k):
        key = ("radpow", k)
        if key not in self._cache:
            if k == 0:
                self._cache[key] = self.field.eye(self.dim)
            elif k == 1:
                self._cache[key] = self.radical()
            else:
                self._cache[key] = product_space(self, self.radical_power(k - 1), self.radical())
        return self._cache[key]

    def radical_power_dims(self):
        dims = []
        k = 0
        while True:
            d = self.radical_power(k).shape[1]
            dims.append(d)
            if d == 0 or k > self.dim:
                return dims
            k += 1

    def corner(self, j, i, space=None):
        """Basis of e_j * space * e_i (space defaults to the whole algebra)."""
        f = self.field
        ej = self.idempotents[j]
        ei = self.idempotents[i]
        m = f.matmul(self.left_matrix(ej), self.right_matrix(ei))
        if space is not None:
            m = f.matmul(m, space)
        return f.image_basis(m)

    def generators(self):
        """Homogeneous generators besides the idempotents: (source, target, vector).

        For each vertex pair a complement of e_j rad^2 e_i (plus k e_i on the
        diagonal) inside e_j A e_i.  These together with the idempotents
        generate the algebra.
        """
        if "gens" in self._cache:
            return self._cache["gens"]
        f = self.field
        rad2 = self.radical_power(2)
        out = []
        for i in range(self.nvert):
            for j in range(self.nvert):
                full = self.corner(j, i)
                if full.shape[1] == 0:
                    continue
                small = self.corner(j, i, rad2)
                if i == j:
                    small = np.concatenate([self.idempotents[i].reshape(-1, 1), small], axis=1)
                for v in extend_to_basis(f, small, full):
                    out.append((i, j, v))
        self._cache["gens"] = out
        return out

    def is_basic_split(self):
        return self.dim - self.radical().shape[1] == self.nvert


def product_space(a, x_cols, y_cols):
    """Span of products x*y for x, y from the given column bases."""
    f = a.field
    prods = []
    for s in range(x_cols.shape[1]):
        lx = a.left_matrix(x_cols[:, s])
        if y_cols.shape[1]:
            prods.append(f.matmul(lx, y_cols))
    if not prods:
        return f.zeros((a.dim, 0))
    return f.image_basis(np.concatenate(prods, axis=1))


def extend_to_basis(f, small, full):
    """Columns of ``full`` (in order) extending span(small) to span(full)."""
    picked = []
    cur = small.copy()
    r = f.rank(cur) if cur.shape[1] else 0
    for t in range(full.shape[1]):
        cand = np.concatenate([cur, full[:, t:t + 1]], axis=1)
        rr = f.rank(cand)
        if rr > r:
            picked.append(full[:, t].copy())
            cur = cand
            r = rr
    return picked


def _trace_form(a):
    f = a.field
    n = a.dim
    c = a.struct
    A = c.reshape(n, n * n)
    B = c.transpose(0, 2, 1).reshape(n, n * n)
    return f.matmul(A, B.T.copy())


def radical(a):
    """Basis (columns) of the Jacobson radical via the trace form kernel."""
    f = a.field
    if f.kind == "Fp" and f.p <= a.dim:
        raise PreconditionError("radical criterion requires p > dim (p=%d, dim=%d)"
                                % (f.p, a.dim))
    if a.dim == 0:
        return f.zeros((0, 0))
    g = _trace_form(a)
    return f.kernel_basis(g)


def center(a):
    f = a.field
    n = a.dim
    c = a.struct
    # rows indexed (i, m), columns k:  c[k, i, m] - c[i, k, m]
    m = f.sub(c.transpose(1, 2, 0).reshape(n * n, n), c.transpose(0, 2, 1).reshape(n * n, n))
    return f.kernel_basis(m)


def quotient_algebra(a, ideal_cols, vertex_labels=None):
    """A / I for a two-sided ideal I; also returns the projection matrix."""
    f = a.field
    n = a.dim
    if ideal_cols.shape[1]:
        r, piv = f.rref(ideal_cols.T.copy())
        r = r[:len(piv)]
    else:
        r, piv = f.zeros((0, n)), []
    free = [k for k in range(n) if k not in set(piv)]
    proj = f.zeros((len(free), n))
    for t, k in enumerate(free):
        proj[t, k] = f.one
    for i, pc in enumerate(piv):
        for t, k in enumerate(free):
            proj[t, pc] = f.neg(r[i, k])
    q = len(free)
    lift = f.zeros((n, q))
    for t, k in enumerate(free):
        lift[k, t] = f.one
    struct = f.zeros((q, q, q))
    for s in range(q):
        for t in range(q):
            struct[s, t] = f.matmul(proj, a.mult(lift[:, s], lift[:, t]).reshape(-1, 1))[:, 0]
    unit = f.matmul(proj, a.unit.reshape(-1, 1))[:, 0]
    idems = [f.matmul(proj, e.reshape(-1, 1))[:, 0] for e in a.idempotents]
    keep = [(e, lab) for e, lab in zip(idems, a.vertex_labels) if not f.is_zero(e)] \
        if q else []
    qa = FiniteDimAlgebra(f, struct, unit, [e for e, _ in keep] or [unit],
                          vertex_labels or [lab for _, lab in keep] or ["1"],
                          name=(a.name or "A") + "/I")
    return qa, proj, lift


@dataclass
class WedderburnResult:
    status: str  # "ok" or "inconclusive"
    blocks: list = dc_field(default_factory=list)  # (block dim, center dim)
    idempotents: list = dc_field(default_factory=list)

    def is_single_division_block(self):
        return self.status == "ok" and len(self.blocks) == 1 and \
            self.blocks[0][0] == self.blocks[0][1]


def element_minimal_polynomial(a, x):
    return a.field.minimal_polynomial(a.left_matrix(x))


def evaluate_poly_at_element(a, poly, x):
    f = a.field
    m = f.evaluate_poly_at_matrix(poly, a.left_matrix(x))
    return f.matmul(m, a.unit.reshape(-1, 1))[:, 0]


def crt_idempotent_polys(field, factors):
    """Polynomials g_i with g_i = 1 mod f_i and 0 mod f_j (j != i)."""
    total = Polynomial(field, [1])
    for h in factors:
        total = total * h
    out = []
    for h in factors:
        rest = total // h
        g, s, t = poly_xgcd(rest, h)
        out.append((s * rest) % total)
    return out


def wedderburn_blocks(a, max_tries=1000):
    f = a.field
    if f.kind != "Fp":
        raise PreconditionError("Wedderburn block analysis is only available over F_p")
    if a.radical().shape[1] != 0:
        raise PreconditionError("algebra is not semisimple")
    if a.dim == 0:
        return WedderburnResult("ok", [], [])
    z = center(a)
    zd = z.shape[1]
    if zd == 1:
        return WedderburnResult("ok", [(a.dim, 1)], [a.unit])
    tries = 0
    for coeffs in itertools.product(range(5), repeat=zd):
        if not any(coeffs):
            continue
        tries += 1
        if tries > max_tries:
            break
        w = f.matmul(z, f.vector(coeffs).reshape(-1, 1))[:, 0]
        mp = element_minimal_polynomial(a, w)
        if mp.degree != zd:
            continue
        facs = [g for g, _ in factor_over_Fp(mp)]
        polys = crt_idempotent_polys(f, facs)
        idems = [evaluate_poly_at_element(a, g, w) for g in polys]
        blocks = []
        for e, h in zip(idems, facs):
            blocks.append((f.rank(a.left_matrix(e)), h.degree))
        return WedderburnResult("ok", blocks, idems)
    return WedderburnResult("inconclusive")


def cartan_matrix(a):
    n = a.nvert
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            out[i][j] = a.corner(i, j).shape[1]
    return out


def gabriel_quiver(a):
    """Arrow count i -> j = dim e_j (rad/rad^2) e_i."""
    rad = a.radical()
    rad2 = a.radical_power(2)
    arrows = []
    for i in range(a.nvert):
        for j in range(a.nvert):
            d = a.corner(j, i, rad).shape[1] - a.corner(j, i, rad2).shape[1]
            for k in range(d):
                arrows.append(("%s->%s#%d" % (a.vertex_labels[i], a.vertex_labels[j], k),
                               a.vertex_labels[i], a.vertex_labels[j]))
    return Quiver(tuple(a.vertex_labels), tuple(arrows))


def opposite_algebra(a):
    return a.opposite()


def validate_algebra(a, check_primitive=True):
    """Itemised pass/fail of the algebra axioms, failing triples as witnesses."""
    f = a.field
    n = a.dim
    items = []
    warn = []
    if f.kind == "Fp" and f.p <= n:
        msg = "radical criterion requires p > dim"
        warn.append(msg)
        warnings.warn(msg)
    c = a.struct
    lhs = f.matmul(c.reshape(n * n, n), c.reshape(n, n * n)).reshape(n, n, n, n)
    # rhs[j, k, i, m] = sum_l c[j,k,l] c[i,l,m]
    rhs = f.matmul(c.reshape(n * n, n), c.transpose(1, 0, 2).reshape(n, n * n)).reshape(n, n, n, n)
    rhs = rhs.transpose(2, 0, 1, 3)
    diff = f.sub(lhs, rhs)
    bad = np.argwhere(diff != 0) if f.kind == "Fp" else \
        np.argwhere(np.vectorize(lambda x: x != 0, otypes=[bool])(diff)) if n else []
    if len(bad):
        i, j, k, _ = (int(t) for t in bad[0])
        items.append(("associativity", False, [a.basis_labels[i], a.basis_labels[j],
                                                a.basis_labels[k]]))
    else:
        items.append(("associativity", True, None))
    unit_ok = None
    for i in range(n):
        b = a.basis_vector(i)
        if not f.is_zero(f.sub(a.mult(a.unit, b), b)) or not f.is_zero(f.sub(a.mult(b, a.unit), b)):
            unit_ok = a.basis_labels[i]
            break
    items.append(("unit", unit_ok is None, unit_ok))
    idem_fail = None
    total = f.zeros((n,))
    for s, e in enumerate(a.idempotents):
        total = f.add(total, e)
        for t, g in enumerate(a.idempotents):
            want = e if s == t else f.zeros((n,))
            if not f.is_zero(f.sub(a.mult(e, g), want)):
                idem_fail = idem_fail or [a.vertex_labels[s], a.vertex_labels[t]]
    if idem_fail is None and not f.is_zero(f.sub(total, a.unit)):
        idem_fail = "sum of idempotents is not the unit"
    items.append(("orthogonal idempotents", idem_fail is None, idem_fail))
    ok_so_far = all(ok for _, ok, _ in items)
    if check_primitive and ok_so_far and not warn:
        from stratkit import modops
        bad_v = None
        for i in range(a.nvert):
            res = modops.is_indecomposable(modops.projective_module(a, i))
            if res.status != "yes":
                bad_v = a.vertex_labels[i]
                break
        items.append(("primitive idempotents", bad_v is None, bad_v))
    return ValidationReport(items, warn, n)


@dataclass
class ValidationReport:
    items: list
    warnings: list
    dim: int

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.items)

    def first_failure(self):
        for name, ok, wit in self.items:
            if not ok:
                return name, wit
        return None

    def to_json(self):
        return {"dim": self.dim, "ok": self.ok, "warnings": list(self.warnings),
                "items": [{"check": n, "status": "PASS" if ok else "FAIL", "witness": w}
                          for n, ok, w in self.items]}
