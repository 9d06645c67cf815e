"""Independent reference computations built on sympy.

None of these call into the solvers under test beyond reading the raw
action matrices of modules.
"""
import itertools

import numpy as np

from sympy import GF, QQ
from sympy.polys.matrices import DomainMatrix


def _domain(field):
    return GF(field.p) if field.kind == "Fp" else QQ


def _to_int(field, x):
    if field.kind == "Fp":
        return int(x) % field.p
    return x


def rank(field, rows):
    """Rank of a list-of-rows matrix over the field via sympy."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    dom = _domain(field)
    dm = DomainMatrix([[dom(_to_int(field, x)) for x in r] for r in rows],
                      (len(rows), len(rows[0])), dom)
    return dm.rank()


def hom_dim(m, n):
    """dim Hom(M, N) from the intertwiner equations for every basis element."""
    f = m.field
    dm, dn = m.dim, n.dim
    if dm == 0 or dn == 0:
        return 0
    rows = []
    for b in range(m.alg.dim):
        am, an = m.act[b], n.act[b]
        # phi am - an phi = 0 with phi[r, c] stored at r*dm + c
        for r in range(dn):
            for c in range(dm):
                row = [0] * (dn * dm)
                for k in range(dm):
                    row[r * dm + k] += am[k, c]
                for k in range(dn):
                    row[k * dm + c] -= an[r, k]
                rows.append(row)
    return dn * dm - rank(f, rows)


def ext1_dim(m, cover, syz, n):
    """Long exact sequence count: Ext^1 = Hom(Omega,N) - Hom(P0,N) + Hom(M,N)."""
    return hom_dim(syz, n) - hom_dim(cover, n) + hom_dim(m, n)


def path_algebra_dim(pres):
    """Brute-force count of paths of length < N modulo the ideal spanned by u r v."""
    arrows = {a[0]: (a[1], a[2]) for a in pres.quiver.arrows}
    n = pres.nilpotency_bound
    paths = [("@" + v,) for v in pres.quiver.vertices]
    frontier = [(a,) for a in arrows]
    length = 1
    while frontier and length < n:
        paths.extend(frontier)
        frontier = [p + (b,) for p in frontier for b in arrows
                    if arrows[b][0] == arrows[p[-1]][1]]
        length += 1
    nontriv = [p for p in paths if not p[0].startswith("@")]
    index = {p: k for k, p in enumerate(nontriv)}

    def src(p):
        return arrows[p[0]][0]

    def tgt(p):
        return arrows[p[-1]][1]

    rows = []
    for rel in pres.relations:
        s, t = src(rel[0][1]), tgt(rel[0][1])
        before = [()] + [p for p in nontriv if tgt(p) == s]
        after = [()] + [p for p in nontriv if src(p) == t]
        for u, v in itertools.product(before, after):
            row = [0] * len(nontriv)
            live = False
            for coeff, path in rel:
                full = u + path + v
                if len(full) < n:
                    row[index[full]] += int(coeff)
                    live = True
            if live:
                rows.append(row)

    class _F:
        kind = "Q"

    return len(paths) - (rank(_F, rows) if rows else 0)


def arrow_radical_layers(m, arrow_mats):
    """Dimension vectors of rad^k M / rad^(k+1) M, with rad M = sum of arrow images."""
    f = m.field
    layers = []
    space = f.eye(m.dim)
    while space.shape[1]:
        imgs = [f.matmul(a, space) for a in arrow_mats]
        nxt = np.concatenate(imgs, axis=1) if imgs else f.zeros((m.dim, 0))
        nxt = f.image_basis(nxt) if nxt.shape[1] else nxt
        # layer dims per vertex = rank of projections
        dv = []
        for v in range(m.alg.nvert):
            blk = m.block(v)
            r_all = rank(f, space[blk, :].tolist()) if space.shape[1] else 0
            r_nxt = rank(f, nxt[blk, :].tolist()) if nxt.shape[1] else 0
            dv.append(r_all - r_nxt)
        layers.append(tuple(dv))
        space = nxt
    return layers
