"""Module category engine: Hom, Ext, trace, radical layers, decomposition.

A module stores one action matrix per algebra basis element.  Its basis is
always graded: the vectors of vertex 0 come first, then vertex 1, and so
on, so idempotents act by 0/1 diagonal matrices and every module map is
block diagonal across vertices.
"""
import enum
import itertools
import random
from dataclasses import dataclass

import numpy as np

from stratkit.algcore import FiniteDimAlgebra, wedderburn_blocks, quotient_algebra
from stratkit.exactlinalg import (Polynomial, factor_over_Fp, poly_xgcd,
                                  squarefree_decomposition, rational_roots)

GRID_CAP = 10 ** 6
RANDOM_SAMPLES = 64


class AlgebraMismatch(ValueError):
    pass


class UndecidedError(RuntimeError):
    pass


class Decision(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDECIDED = "undecided"

    def __bool__(self):
        if self is Decision.UNDECIDED:
            raise UndecidedError("decision is undecided")
        return self is Decision.TRUE

    @classmethod
    def of(cls, flag):
        return cls.TRUE if flag else cls.FALSE


def _bmm(f, a, b):
    """Batched product for stacks of matrices."""
    if f.kind == "Fp":
        if a.shape[-1] * (f.p - 1) ** 2 < 2 ** 62:
            return np.matmul(a, b) % f.p
        return (np.matmul(a.astype(object), b.astype(object)) % f.p).astype(np.int64)
    return np.matmul(a, b)


def left_inverse(f, a):
    """A left inverse of a full column rank matrix."""
    n, k = a.shape
    if k == 0:
        return f.zeros((0, n))
    _, rows = f.rref(a.T.copy())
    sub = a[rows, :]
    inv = f.inverse(sub)
    out = f.zeros((k, n))
    out[:, rows] = inv
    return out


class Module:
    def __init__(self, alg, dims, act, meta=None):
        self.alg = alg
        self.field = alg.field
        self.dims = tuple(int(d) for d in dims)
        self.dim = sum(self.dims)
        self.act = act
        self.offsets = [0]
        for d in self.dims:
            self.offsets.append(self.offsets[-1] + d)
        self.meta = meta or {}
        self._hom_cache = {}
        self._cache = {}

    def __repr__(self):
        return "Module(dims=%s)" % (dict(zip(self.alg.vertex_labels, self.dims)),)

    @classmethod
    def from_actions(cls, alg, act, meta=None):
        """Build from arbitrary-basis actions, regrading by the idempotents."""
        f = alg.field
        d = act.shape[1] if act.ndim == 3 else 0
        cols = []
        dims = []
        for e in alg.idempotents:
            m = action_of(f, act, e)
            b = f.image_basis(m) if d else f.zeros((0, 0))
            cols.append(b)
            dims.append(b.shape[1])
        if d == 0:
            return cls(alg, [0] * alg.nvert, f.zeros((alg.dim, 0, 0)), meta)
        c = np.concatenate(cols, axis=1)
        cinv = f.inverse(c)
        new = _bmm(f, _bmm(f, np.broadcast_to(cinv, act.shape).copy(), act),
                   np.broadcast_to(c, act.shape).copy())
        mod = cls(alg, dims, new, meta)
        mod.meta.setdefault("change_of_basis", c)
        return mod

    def block(self, v):
        return slice(self.offsets[v], self.offsets[v + 1])

    def vertex_of(self, k):
        for v in range(len(self.dims)):
            if self.offsets[v] <= k < self.offsets[v + 1]:
                return v
        raise IndexError(k)

    def dimvec(self):
        return self.dims

    def action(self, x):
        return action_of(self.field, self.act, x)

    def gen_actions(self):
        if "gens" not in self._cache:
            out = []
            for i, j, x in self.alg.generators():
                m = self.action(x)
                out.append((i, j, m[self.block(j), self.block(i)].copy()))
            self._cache["gens"] = out
        return self._cache["gens"]

    def check_axioms(self):
        """Action respects structure constants and the unit acts as identity."""
        f = self.field
        a = self.alg
        n = a.dim
        if not f.is_zero(f.sub(self.action(a.unit), f.eye(self.dim))):
            return False
        prods = _bmm(f, self.act[:, None], self.act[None, :])
        for i in range(n):
            for j in range(n):
                want = self.action(a.struct[i, j])
                if not f.is_zero(f.sub(prods[i, j], want)):
                    return False
        return True

    def is_zero(self):
        return self.dim == 0


def action_of(f, act, x):
    n = act.shape[0]
    d = act.shape[1]
    if d == 0:
        return f.zeros((0, 0))
    return f.matmul(x.reshape(1, -1), act.reshape(n, d * d)).reshape(d, d)


@dataclass
class ModuleMap:
    source: Module
    target: Module
    matrix: np.ndarray

    def is_valid(self):
        return is_module_map(self.source, self.target, self.matrix)

    def compose(self, other):
        """self after other."""
        f = self.source.field
        return ModuleMap(other.source, self.target, f.matmul(self.matrix, other.matrix))

    def rank(self):
        return self.source.field.rank(self.matrix)

    def is_surjective(self):
        return self.rank() == self.target.dim

    def is_injective(self):
        return self.rank() == self.source.dim

    def is_zero(self):
        return self.source.field.is_zero(self.matrix)


def is_module_map(m, n, mat):
    f = m.field
    if mat.shape != (n.dim, m.dim):
        return False
    if m.dim == 0 or n.dim == 0:
        return True
    lhs = _bmm(f, np.broadcast_to(mat, (m.alg.dim,) + mat.shape).copy(), m.act)
    rhs = _bmm(f, n.act, np.broadcast_to(mat, (m.alg.dim,) + mat.shape).copy())
    return f.is_zero(f.sub(lhs, rhs))


def _same_alg(m, n):
    if m.alg is not n.alg:
        raise AlgebraMismatch("modules live over different algebras")


def zero_module(alg):
    return Module(alg, [0] * alg.nvert, alg.field.zeros((alg.dim, 0, 0)))


def identity_map(m):
    return ModuleMap(m, m, m.field.eye(m.dim))


# ---------------------------------------------------------------------
# sub, quotient, sums


def submodule(m, cols):
    """Submodule spanned by the columns of ``cols`` (assumed invariant)."""
    f = m.field
    blocks = []
    dims = []
    for v in range(len(m.dims)):
        part = f.zeros((m.dim, cols.shape[1]))
        sl = m.block(v)
        part[sl] = cols[sl]
        b = f.image_basis(part) if cols.shape[1] else f.zeros((m.dim, 0))
        blocks.append(b)
        dims.append(b.shape[1])
    incl = np.concatenate(blocks, axis=1) if blocks else f.zeros((m.dim, 0))
    if incl.shape[1] == 0:
        return zero_module(m.alg), incl
    linv = left_inverse(f, incl)
    nb = m.alg.dim
    act = _bmm(f, _bmm(f, np.broadcast_to(linv, (nb,) + linv.shape).copy(), m.act),
               np.broadcast_to(incl, (nb,) + incl.shape).copy())
    return Module(m.alg, dims, act), incl


def quotient_module(m, cols):
    """M / W for an invariant subspace W; returns (Q, projection, lift)."""
    f = m.field
    d = m.dim
    if cols.shape[1]:
        r, piv = f.rref(cols.T.copy())
    else:
        r, piv = f.zeros((0, d)), []
    pset = set(piv)
    free = [k for k in range(d) if k not in pset]
    proj = f.zeros((len(free), d))
    for t, k in enumerate(free):
        proj[t, k] = f.one
    for i, pc in enumerate(piv):
        for t, k in enumerate(free):
            proj[t, pc] = f.neg(r[i, k])
    lift = f.zeros((d, len(free)))
    for t, k in enumerate(free):
        lift[k, t] = f.one
    dims = [sum(1 for k in free if m.offsets[v] <= k < m.offsets[v + 1])
            for v in range(len(m.dims))]
    if not free:
        return zero_module(m.alg), proj, lift
    nb = m.alg.dim
    act = _bmm(f, _bmm(f, np.broadcast_to(proj, (nb,) + proj.shape).copy(), m.act),
               np.broadcast_to(lift, (nb,) + lift.shape).copy())
    return Module(m.alg, dims, act), proj, lift


@dataclass
class DirectSum:
    module: Module
    inclusions: list
    projections: list


def direct_sum(mods):
    if not mods:
        raise ValueError("empty direct sum")
    alg = mods[0].alg
    for m in mods:
        _same_alg(mods[0], m)
    f = alg.field
    nv = alg.nvert
    dims = [sum(m.dims[v] for m in mods) for v in range(nv)]
    total = sum(dims)
    pos = []  # pos[k][local index] = global index
    offs = [0]
    for d in dims:
        offs.append(offs[-1] + d)
    cursor = list(offs[:-1])
    for m in mods:
        mp = [0] * m.dim
        for v in range(nv):
            for t in range(m.dims[v]):
                mp[m.offsets[v] + t] = cursor[v]
                cursor[v] += 1
        pos.append(mp)
    act = f.zeros((alg.dim, total, total))
    incls, projs = [], []
    for m, mp in zip(mods, pos):
        idx = np.array(mp, dtype=int)
        if m.dim:
            act[np.ix_(range(alg.dim), idx, idx)] = m.act
        inc = f.zeros((total, m.dim))
        for t, g in enumerate(mp):
            inc[g, t] = f.one
        incls.append(inc)
        projs.append(inc.T.copy())
    return DirectSum(Module(alg, dims, act), incls, projs)


def direct_power(m, k):
    return direct_sum([m] * k) if k else DirectSum(zero_module(m.alg), [], [])


def kernel(fmap):
    f = fmap.source.field
    k = f.kernel_basis(fmap.matrix) if fmap.source.dim else f.zeros((0, 0))
    if fmap.target.dim == 0:
        k = f.eye(fmap.source.dim)
    sub, incl = submodule(fmap.source, k)
    return sub, ModuleMap(sub, fmap.source, incl)


def image(fmap):
    sub, incl = submodule(fmap.target, fmap.matrix)
    return sub, ModuleMap(sub, fmap.target, incl)


def cokernel(fmap):
    q, proj, lift = quotient_module(fmap.target, fmap.matrix)
    return q, ModuleMap(fmap.target, q, proj)


# ---------------------------------------------------------------------
# Hom


def hom_basis(m, n):
    """Basis of Hom(M, N) as ModuleMaps (solution space of the intertwiner system)."""
    _same_alg(m, n)
    key = id(n)
    hit = m._hom_cache.get(key)
    if hit is not None and hit[0] is n:
        return hit[1]
    mats = hom_matrices(m, n)
    out = [ModuleMap(m, n, x) for x in mats]
    m._hom_cache[key] = (n, out)
    return out


def hom_matrices(m, n):
    f = m.field
    nv = len(m.dims)
    var_off = [0]
    for v in range(nv):
        var_off.append(var_off[-1] + n.dims[v] * m.dims[v])
    nvar = var_off[-1]
    if nvar == 0:
        return []
    rows = []
    gm = m.gen_actions()
    gn = n.gen_actions()
    for (i, j, a), (_, _, b) in zip(gm, gn):
        # phi_j a - b phi_i = 0, unknowns row-major
        nj, mi, mj, ni = n.dims[j], m.dims[i], m.dims[j], n.dims[i]
        if nj * mi == 0:
            continue
        block = f.zeros((nj * mi, nvar))
        if nj * mj:
            block[:, var_off[j]:var_off[j + 1]] = np.kron(f.eye(nj), a.T.copy())
        if ni * mi:
            block[:, var_off[i]:var_off[i + 1]] = f.sub(
                block[:, var_off[i]:var_off[i + 1]], np.kron(b, f.eye(mi)))
        rows.append(block)
    if rows:
        system = np.concatenate(rows, axis=0)
        ker = f.kernel_basis(system)
    else:
        ker = f.eye(nvar)
    out = []
    for t in range(ker.shape[1]):
        x = f.zeros((n.dim, m.dim))
        for v in range(nv):
            blk = ker[var_off[v]:var_off[v + 1], t].reshape(n.dims[v], m.dims[v])
            x[n.block(v), m.block(v)] = blk
        out.append(x)
    return out


def hom_dim(m, n):
    return len(hom_basis(m, n))


def coords_in(f, basis_mats, target):
    """Coordinates of ``target`` in the span of ``basis_mats`` (None if absent)."""
    if not basis_mats:
        return f.zeros((0,)) if f.is_zero(target) else None
    a = np.stack([b.reshape(-1) for b in basis_mats], axis=1)
    return f.solve(a, target.reshape(-1))


def span_rank(f, mats):
    if not mats:
        return 0
    return f.rank(np.stack([x.reshape(-1) for x in mats], axis=1))


def generic_combination(f, mats, coeffs):
    out = f.zeros(mats[0].shape)
    for c, x in zip(coeffs, mats):
        out = f.add(out, f.scale(c, x))
    return out


# ---------------------------------------------------------------------
# radical layers, top, socle, trace


def radical_of_module(m):
    """(rad M, inclusion)."""
    f = m.field
    rad = m.alg.radical()
    if m.dim == 0 or rad.shape[1] == 0:
        return submodule(m, f.zeros((m.dim, 0)))
    ims = [m.action(rad[:, k]) for k in range(rad.shape[1])]
    cols = f.image_basis(np.concatenate(ims, axis=1))
    return submodule(m, cols)


def top(m):
    """(top M, projection M -> top M, lift)."""
    _, incl = radical_of_module(m)
    return quotient_module(m, incl)


def socle(m):
    f = m.field
    rad = m.alg.radical()
    if m.dim == 0:
        return submodule(m, f.zeros((0, 0)))
    if rad.shape[1] == 0:
        return submodule(m, f.eye(m.dim))
    stack = np.concatenate([m.action(rad[:, k]) for k in range(rad.shape[1])], axis=0)
    return submodule(m, f.kernel_basis(stack))


def is_semisimple(m):
    return radical_of_module(m)[0].dim == 0


def radical_layers(m):
    """Dimension vectors of rad^k M / rad^(k+1) M, top first."""
    layers = []
    cur = m
    while cur.dim:
        r, _ = radical_of_module(cur)
        layers.append(tuple(a - b for a, b in zip(cur.dims, r.dims)))
        if r.dim == cur.dim:
            break
        cur = r
    return layers


def loewy_length(m):
    return len(radical_layers(m))


def trace_submodule(m, n):
    """Tr_M(N) with its inclusion into N."""
    f = n.field
    hs = hom_basis(m, n)
    if not hs:
        return submodule(n, f.zeros((n.dim, 0)))
    cols = f.image_basis(np.concatenate([h.matrix for h in hs], axis=1))
    return submodule(n, cols)


def trace_from_family(mods, n):
    f = n.field
    parts = []
    for m in mods:
        for h in hom_basis(m, n):
            parts.append(h.matrix)
    if not parts:
        return submodule(n, f.zeros((n.dim, 0)))
    return submodule(n, f.image_basis(np.concatenate(parts, axis=1)))


# ---------------------------------------------------------------------
# projectives, simples, injectives, duality


def projective_module(alg, i):
    key = ("proj", i)
    if key in alg._cache:
        return alg._cache[key]
    f = alg.field
    cols = []
    dims = []
    for v in range(alg.nvert):
        b = alg.corner(v, i)
        cols.append(b)
        dims.append(b.shape[1])
    elems = np.concatenate(cols, axis=1)
    linv = left_inverse(f, elems)
    L = alg.left_regular()
    nb = alg.dim
    act = _bmm(f, _bmm(f, np.broadcast_to(linv, (nb,) + linv.shape).copy(), L),
               np.broadcast_to(elems, (nb,) + elems.shape).copy())
    p = Module(alg, dims, act, meta={"projective": i, "elements": elems})
    alg._cache[key] = p
    return p


def projective_generator(alg, i):
    """Coordinates of e_i inside P(i)."""
    p = projective_module(alg, i)
    return alg.field.solve(p.meta["elements"], alg.idempotents[i])


def map_from_projective(alg, i, m, vec):
    """The map P(i) -> M sending e_i to ``vec`` (which must lie in M_i)."""
    f = alg.field
    p = projective_module(alg, i)
    elems = p.meta["elements"]
    cols = [f.matmul(m.action(elems[:, k]), vec.reshape(-1, 1))[:, 0] for k in range(p.dim)]
    mat = np.stack(cols, axis=1) if cols else f.zeros((m.dim, 0))
    return ModuleMap(p, m, mat)


def simple_module(alg, i):
    key = ("simple", i)
    if key not in alg._cache:
        alg._cache[key] = top(projective_module(alg, i))[0]
    return alg._cache[key]


def duality(m):
    """D(M) over the opposite algebra: transposed actions."""
    op = m.alg.opposite()
    act = m.act.transpose(0, 2, 1).copy()
    return Module(op, m.dims, act)


def injective_module(alg, i):
    key = ("inj", i)
    if key not in alg._cache:
        alg._cache[key] = duality(projective_module(alg.opposite(), i))
    return alg._cache[key]


def dual_map(fmap, dsource, dtarget):
    """D(f): D(N) -> D(M) for f: M -> N."""
    return ModuleMap(dtarget, dsource, fmap.matrix.T.copy())


def regular_module(alg):
    return direct_sum([projective_module(alg, i) for i in range(alg.nvert)]).module


# ---------------------------------------------------------------------
# projective covers and Ext


@dataclass
class ProjectiveCover:
    cover: Module
    epi: ModuleMap
    syzygy: Module
    incl: ModuleMap
    tops: list  # vertex of each indecomposable summand


def projective_cover(m):
    key = "cover"
    if key in m._cache:
        return m._cache[key]
    f = m.field
    alg = m.alg
    if m.dim == 0:
        z = zero_module(alg)
        res = ProjectiveCover(z, ModuleMap(z, m, f.zeros((0, 0))), z,
                              ModuleMap(z, z, f.zeros((0, 0))), [])
        m._cache[key] = res
        return res
    t, proj, lift = top(m)
    tops = []
    maps = []
    for k in range(t.dim):
        v = t.vertex_of(k)
        tops.append(v)
        maps.append(map_from_projective(alg, v, m, lift[:, k]))
    ds = direct_sum([mp.source for mp in maps])
    mat = f.zeros((m.dim, ds.module.dim))
    for mp, pr in zip(maps, ds.projections):
        mat = f.add(mat, f.matmul(mp.matrix, pr))
    epi = ModuleMap(ds.module, m, mat)
    syz, incl = kernel(epi)
    res = ProjectiveCover(ds.module, epi, syz, incl, tops)
    m._cache[key] = res
    return res


def syzygy(m, n=1):
    cur = m
    for _ in range(n):
        cur = projective_cover(cur).syzygy
    return cur


def is_projective(m):
    return projective_cover(m).syzygy.dim == 0


def _restriction_rank(f, maps, along):
    """Rank of {h o along : h in maps}."""
    return span_rank(f, [f.matmul(h.matrix, along.matrix) for h in maps])


def ext1_dim(m, n):
    """dim Ext^1(M, N) = dim coker(Hom(P0, N) -> Hom(Omega, N))."""
    _same_alg(m, n)
    f = m.field
    pc = projective_cover(m)
    if pc.syzygy.dim == 0:
        return 0
    h_omega = hom_basis(pc.syzygy, n)
    h_p0 = hom_basis(pc.cover, n)
    return len(h_omega) - _restriction_rank(f, h_p0, pc.incl)


def ext1_dim_presentation(m, n):
    """Same number from P1 -> P0 -> M: cocycles in Hom(P1, N) modulo coboundaries."""
    _same_alg(m, n)
    f = m.field
    pc0 = projective_cover(m)
    if pc0.syzygy.dim == 0:
        return 0
    pc1 = projective_cover(pc0.syzygy)
    d1 = pc0.incl.compose(pc1.epi)  # P1 -> P0
    h_p1 = hom_basis(pc1.cover, n)
    if pc1.syzygy.dim:
        r = _restriction_rank(f, h_p1, pc1.incl)
    else:
        r = 0
    cocycles = len(h_p1) - r
    coboundaries = _restriction_rank(f, hom_basis(pc0.cover, n), d1)
    return cocycles - coboundaries


def ext_n_dim(m, n, k):
    if k < 0:
        raise ValueError("n must be >= 0")
    if k == 0:
        return hom_dim(m, n)
    return ext1_dim(syzygy(m, k - 1), n)


def ext1_basis(m, n):
    """Cocycles h: Omega(M) -> N whose classes form a basis of Ext^1(M, N)."""
    f = m.field
    pc = projective_cover(m)
    if pc.syzygy.dim == 0:
        return pc, []
    h_omega = hom_basis(pc.syzygy, n)
    bound = [f.matmul(h.matrix, pc.incl.matrix) for h in hom_basis(pc.cover, n)]
    picked = []
    cur = list(bound)
    r = span_rank(f, cur)
    for h in h_omega:
        rr = span_rank(f, cur + [h.matrix])
        if rr > r:
            picked.append(h)
            cur.append(h.matrix)
            r = rr
    return pc, picked


@dataclass
class Extension:
    middle: Module
    sub_map: ModuleMap   # N -> E
    quot_map: ModuleMap  # E -> M


def pushout_extension(p0, iota, n, h, m_quot=None):
    """Middle term of 0 -> N -> E -> M -> 0 from Omega -iota-> P0 and h: Omega -> N.

    E = (P0 + N) / {(iota w, -h w)}.  Returns the extension, with the
    quotient map onto P0 / Omega when ``m_quot`` (the map P0 -> M) is given.
    """
    f = p0.field
    ds = direct_sum([p0, n])
    s = ds.module
    emb = f.sub(f.matmul(ds.inclusions[0], iota.matrix), f.matmul(ds.inclusions[1], h))
    e, proj, lift = quotient_module(s, f.image_basis(emb) if emb.shape[1] else emb)
    sub_map = ModuleMap(n, e, f.matmul(proj, ds.inclusions[1]))
    quot = None
    if m_quot is not None:
        # E -> M: (x, y) -> m_quot(x); evaluate on the lift basis
        mat = f.matmul(f.matmul(m_quot.matrix, ds.projections[0]), lift)
        quot = ModuleMap(e, m_quot.target, mat)
    return Extension(e, sub_map, quot)


def extension_from_cocycle(m, n, h):
    pc = projective_cover(m)
    return pushout_extension(pc.cover, pc.incl, n, h.matrix if isinstance(h, ModuleMap) else h,
                             pc.epi)


def ext1_middle_terms(m, n):
    pc, cocycles = ext1_basis(m, n)
    return [extension_from_cocycle(m, n, h) for h in cocycles]


def universal_extension(a, b):
    """0 -> B^d -> E -> A -> 0 classified by a basis of Ext^1(A, B)."""
    f = a.field
    pc, cocycles = ext1_basis(a, b)
    d = len(cocycles)
    if d == 0:
        return Extension(a, ModuleMap(zero_module(a.alg), a, f.zeros((a.dim, 0))),
                         identity_map(a))
    bd = direct_power(b, d)
    h = f.zeros((bd.module.dim, pc.syzygy.dim))
    for inc, c in zip(bd.inclusions, cocycles):
        h = f.add(h, f.matmul(inc, c.matrix))
    return pushout_extension(pc.cover, pc.incl, bd.module, h, pc.epi)


def universal_coextension(a, b):
    """0 -> B -> E -> A^d -> 0 with d = dim Ext^1(A, B), killing Ext^1(A, -)."""
    f = a.field
    pc, cocycles = ext1_basis(a, b)
    d = len(cocycles)
    if d == 0:
        return Extension(b, identity_map(b), ModuleMap(b, zero_module(b.alg),
                                                        f.zeros((0, b.dim))))
    ps = direct_power(pc.cover, d)
    om = direct_power(pc.syzygy, d)
    ad = direct_power(a, d)
    iota = f.zeros((ps.module.dim, om.module.dim))
    h = f.zeros((b.dim, om.module.dim))
    epi = f.zeros((ad.module.dim, ps.module.dim))
    for k in range(d):
        iota = f.add(iota, f.matmul(f.matmul(ps.inclusions[k], pc.incl.matrix), om.projections[k]))
        h = f.add(h, f.matmul(cocycles[k].matrix, om.projections[k]))
        epi = f.add(epi, f.matmul(f.matmul(ad.inclusions[k], pc.epi.matrix), ps.projections[k]))
    return pushout_extension(ps.module, ModuleMap(om.module, ps.module, iota), b, h,
                             ModuleMap(ps.module, ad.module, epi))


# ---------------------------------------------------------------------
# endomorphism rings, indecomposability, isomorphism


def _structure_from_maps(f, mats, compose):
    """Structure constants for the span of ``mats`` under ``compose``."""
    k = len(mats)
    basis = np.stack([x.reshape(-1) for x in mats], axis=1)
    _, rows = f.rref(basis.T.copy())
    sub_inv = f.inverse(basis[rows, :])
    struct = f.zeros((k, k, k))
    for s in range(k):
        for t in range(k):
            prod = compose(mats[s], mats[t]).reshape(-1)
            struct[s, t] = f.matmul(sub_inv, prod[rows].reshape(-1, 1))[:, 0]
    return struct, (rows, sub_inv)


def endomorphism_ring(m):
    """End(M) with composition as product; basis = hom basis matrices."""
    if "end" in m._cache:
        return m._cache["end"]
    f = m.field
    mats = [h.matrix for h in hom_basis(m, m)]
    if not mats:
        m._cache["end"] = (None, [])
        return m._cache["end"]
    struct, _ = _structure_from_maps(f, mats, lambda x, y: f.matmul(x, y))
    unit = coords_in(f, mats, f.eye(m.dim))
    alg = FiniteDimAlgebra(f, struct, unit, [unit], ["1"], name="End")
    m._cache["end"] = (alg, mats)
    return m._cache["end"]


def _mat_of(f, mats, coeffs):
    return generic_combination(f, mats, list(coeffs))


def endomorphism_radical_mats(m):
    f = m.field
    alg, mats = endomorphism_ring(m)
    if alg is None:
        return []
    rad = alg.radical()
    return [_mat_of(f, mats, rad[:, k]) for k in range(rad.shape[1])]


@dataclass
class IndecResult:
    status: str  # "yes", "no", "undecided"
    idempotent: object = None
    reason: str = ""

    def __bool__(self):
        if self.status == "undecided":
            raise UndecidedError("indecomposability undecided: " + self.reason)
        return self.status == "yes"


def _lift_idempotent(f, e):
    for _ in range(64):
        e2 = f.matmul(e, e)
        if f.is_zero(f.sub(e2, e)):
            return e
        e3 = f.matmul(e2, e)
        e = f.sub(f.scale(3, e2), f.scale(2, e3))
    raise RuntimeError("idempotent lifting did not converge")


def _fitting_idempotent(f, x):
    """A nontrivial idempotent polynomial in x when its minimal polynomial splits."""
    mp = f.minimal_polynomial(x)
    if f.kind == "Fp":
        facs = factor_over_Fp(mp)
        if len(facs) < 2:
            return None
        g = Polynomial(f, [1])
        for _ in range(facs[0][1]):
            g = g * facs[0][0]
    else:
        parts = squarefree_decomposition(mp)
        g = None
        if len(parts) >= 2:
            g = Polynomial(f, [1])
            for _ in range(parts[0][1]):
                g = g * parts[0][0]
        else:
            sqf, mult = parts[0]
            if sqf.degree >= 2:
                roots = rational_roots(sqf)
                if roots:
                    lin = Polynomial(f, [-roots[0], 1])
                    g = Polynomial(f, [1])
                    for _ in range(mult):
                        g = g * lin
        if g is None:
            return None
    h = mp // g
    if g.degree == 0 or h.degree == 0:
        return None
    _, s, t = poly_xgcd(g, h)
    e = f.evaluate_poly_at_matrix((s * g) % mp, x)
    return e


def _enumerated_elements(f, mats, limit=1000):
    k = len(mats)
    yield from (mats[i] for i in range(k))
    count = 0
    for coeffs in itertools.product(range(5), repeat=k):
        if sum(1 for c in coeffs if c) < 2:
            continue
        count += 1
        if count > limit:
            return
        yield _mat_of(f, mats, coeffs)


def is_indecomposable(m):
    """Local endomorphism ring test; 'no' carries an explicit idempotent."""
    f = m.field
    if "indec" in m._cache:
        return m._cache["indec"]
    if m.dim == 0:
        res = IndecResult("no", None, "zero module")
        m._cache["indec"] = res
        return res
    alg, mats = endomorphism_ring(m)
    if len(mats) == 1:
        res = IndecResult("yes")
        m._cache["indec"] = res
        return res
    rad = alg.radical()
    top_dim = alg.dim - rad.shape[1]
    if top_dim == 1:
        res = IndecResult("yes")
        m._cache["indec"] = res
        return res
    res = None
    if f.kind == "Fp":
        s, proj, lift = quotient_algebra(alg, rad)
        wb = wedderburn_blocks(s)
        if wb.status == "ok":
            if wb.is_single_division_block():
                res = IndecResult("yes")
            elif len(wb.blocks) > 1:
                ev = f.matmul(lift, wb.idempotents[0].reshape(-1, 1))[:, 0]
                e = _lift_idempotent(f, _mat_of(f, mats, ev))
                res = IndecResult("no", e, "central idempotent of End/rad")
    if res is None:
        for x in _enumerated_elements(f, mats):
            e = _fitting_idempotent(f, x)
            if e is not None:
                res = IndecResult("no", e, "minimal polynomial splitting")
                break
    if res is None:
        res = IndecResult("undecided", None, "no splitting element found")
    m._cache["indec"] = res
    return res


@dataclass
class Summand:
    module: Module
    incl: ModuleMap  # summand -> M
    proj: ModuleMap  # M -> summand


@dataclass
class Decomposition:
    summands: list
    complete: bool

    def modules(self):
        return [s.module for s in self.summands]


def decompose(m):
    f = m.field
    if "decomp" in m._cache:
        return m._cache["decomp"]
    if m.dim == 0:
        out = Decomposition([], True)
        m._cache["decomp"] = out
        return out
    res = is_indecomposable(m)
    if res.status == "yes":
        out = Decomposition([Summand(m, identity_map(m), identity_map(m))], True)
    elif res.status == "undecided":
        out = Decomposition([Summand(m, identity_map(m), identity_map(m))], False)
    else:
        e = res.idempotent
        one_minus = f.sub(f.eye(m.dim), e)
        parts = []
        complete = True
        for idem in (e, one_minus):
            sub, incl = submodule(m, f.image_basis(idem))
            linv = left_inverse(f, incl)
            proj = f.matmul(linv, idem)
            inner = decompose(sub)
            complete = complete and inner.complete
            for s in inner.summands:
                parts.append(Summand(s.module, ModuleMap(s.module, m, f.matmul(incl, s.incl.matrix)),
                                     ModuleMap(m, s.module, f.matmul(s.proj.matrix, proj))))
        out = Decomposition(_sorted_summands(parts), complete)
    m._cache["decomp"] = out
    return out


def _sorted_summands(parts):
    return sorted(parts, key=lambda s: (-s.module.dim, [-d for d in s.module.dims]))


def _iso_indecomposables(m, n):
    """Exact test for indecomposable M and N: some g o f lies outside rad End(M)."""
    f = m.field
    if m.dims != n.dims:
        return False
    hs = hom_basis(m, n)
    gs = hom_basis(n, m)
    if not hs or not gs:
        return False
    rad = endomorphism_radical_mats(m)
    r = span_rank(f, rad)
    for h in hs:
        for g in gs:
            comp = f.matmul(g.matrix, h.matrix)
            if span_rank(f, rad + [comp]) > r:
                return True
    return False


def _random_full_rank(f, mats, rng, samples, need_rank):
    for _ in range(samples):
        cs = f.random_elements(rng, len(mats))
        x = generic_combination(f, mats, cs)
        if f.rank(x) == need_rank:
            return x
    return None


def _grid_nonzero_det(f, mats, d, cap):
    m = len(mats)
    if (d + 1) ** m > cap:
        return None
    for coeffs in itertools.product(range(d + 1), repeat=m):
        x = generic_combination(f, mats, coeffs)
        if f.rank(x) == d:
            return x
    return False


def find_isomorphism(m, n, seed=0):
    """(Decision, matrix or None)."""
    _same_alg(m, n)
    f = m.field
    if m.dims != n.dims:
        return Decision.FALSE, None
    if m.dim == 0:
        return Decision.TRUE, f.zeros((0, 0))
    mats = [h.matrix for h in hom_basis(m, n)]
    if not mats:
        return Decision.FALSE, None
    rng = random.Random(seed)
    x = _random_full_rank(f, mats, rng, 8, m.dim)
    if x is not None:
        return Decision.TRUE, x
    dm = decompose(m)
    dn = decompose(n)
    if dm.complete and dn.complete:
        left = list(dn.modules())
        for s in dm.modules():
            hit = next((k for k, t in enumerate(left) if _iso_indecomposables(s, t)), None)
            if hit is None:
                return Decision.FALSE, None
            left.pop(hit)
        if left:
            return Decision.FALSE, None
        # isomorphic: a generic map is invertible, keep sampling to exhibit one
        x = _random_full_rank(f, mats, rng, RANDOM_SAMPLES, m.dim)
        return Decision.TRUE, x
    g = _grid_nonzero_det(f, mats, m.dim, GRID_CAP)
    if g is None:
        x = _random_full_rank(f, mats, rng, RANDOM_SAMPLES, m.dim)
        return (Decision.TRUE, x) if x is not None else (Decision.UNDECIDED, None)
    if g is False:
        return Decision.FALSE, None
    return Decision.TRUE, g


def is_isomorphic(m, n, seed=0):
    return find_isomorphism(m, n, seed)[0]


def isomorphism_classes(mods):
    """Group modules into isomorphism classes: list of (representative, count, indices)."""
    classes = []
    for k, m in enumerate(mods):
        for c in classes:
            if is_isomorphic(c[0], m):
                c[1] += 1
                c[2].append(k)
                break
        else:
            classes.append([m, 1, [k]])
    return [tuple(c) for c in classes]


def in_add(x, mods):
    """Is X a direct sum of copies of modules from ``mods``?"""
    d = decompose(x)
    if not d.complete:
        return Decision.UNDECIDED
    for s in d.modules():
        if not any(is_isomorphic(s, q) == Decision.TRUE for q in mods):
            return Decision.FALSE
    return Decision.TRUE


def end_algebra_of_summands(summands, labels=None):
    """End(Q)^op for Q = sum of the given modules, vertex i = identity of summand i.

    Basis: hom bases of Hom(Q(a), Q(b)).  For g: Q(a)->Q(b) and h: Q(c)->Q(d)
    the product g*h is h o g when b == c and zero otherwise.
    """
    f = summands[0].field
    t = len(summands)
    basis = []  # (a, b, matrix)
    for a in range(t):
        for b in range(t):
            for h in hom_basis(summands[a], summands[b]):
                basis.append((a, b, h.matrix))
    k = len(basis)
    index = {}
    for pos, (a, b, _) in enumerate(basis):
        index.setdefault((a, b), []).append(pos)
    solvers = {}
    for (a, b), poss in index.items():
        mats = [basis[q][2] for q in poss]
        stack = np.stack([x.reshape(-1) for x in mats], axis=1)
        _, rows = f.rref(stack.T.copy())
        solvers[(a, b)] = (rows, f.inverse(stack[rows, :]), poss)
    struct = f.zeros((k, k, k))
    for s, (a, b, g) in enumerate(basis):
        for u, (c, d, h) in enumerate(basis):
            if b != c:
                continue
            comp = f.matmul(h, g).reshape(-1)  # Q(a) -> Q(d)
            if (a, d) not in solvers:
                continue  # Hom(Q(a), Q(d)) = 0
            rows, inv, poss = solvers[(a, d)]
            coeff = f.matmul(inv, comp[rows].reshape(-1, 1))[:, 0]
            for q, cval in zip(poss, coeff):
                struct[s, u, q] = cval
    idems = []
    unit = f.zeros((k,))
    for a in range(t):
        e = f.zeros((k,))
        rows, inv, poss = solvers[(a, a)]
        coeff = f.matmul(inv, f.eye(summands[a].dim).reshape(-1)[rows].reshape(-1, 1))[:, 0]
        for q, cval in zip(poss, coeff):
            e[q] = cval
        idems.append(e)
        unit = f.add(unit, e)
    alg = FiniteDimAlgebra(f, struct, unit, idems, labels or [str(i + 1) for i in range(t)],
                           basis_labels=["h%d:%d->%d" % (s, a + 1, b + 1)
                                         for s, (a, b, _) in enumerate(basis)],
                           name="End^op")
    alg.meta = {"hom_basis": basis, "summands": list(summands)}
    return alg


def end_algebra(m):
    """End(M)^op built from a decomposition of M into indecomposable summands."""
    d = decompose(m)
    if not d.complete:
        raise UndecidedError("decomposition undecided")
    return end_algebra_of_summands(d.modules())
