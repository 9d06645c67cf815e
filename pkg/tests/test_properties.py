"""Invariant suites. Each suite counts its assertions and requires at least 100."""
import functools
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stratkit import equivlab as eq, modops, strat
from stratkit.modops import (Decision, direct_sum, duality, ext1_dim, hom_basis, hom_dim,
                             injective_module, is_isomorphic, projective_module, simple_module)

import oracles
from helpers import ALL_FIXTURES, Counter, context, load, system

MIN = 100
SYSTEMS = ["a3-twisted", "loop-chain", "canonical-a3"]


def random_module(alg, data):
    """Cokernel of a random cyclic map P(v) -> P(a) + P(b)."""
    f = alg.field
    tops = data.draw(st.lists(st.integers(0, alg.nvert - 1), min_size=1, max_size=2))
    p = direct_sum([projective_module(alg, i) for i in tops]).module
    v = data.draw(st.integers(0, alg.nvert - 1))
    blk = p.block(v)
    size = blk.stop - blk.start
    if size == 0:
        return p
    coeffs = data.draw(st.lists(st.integers(0, 3), min_size=size, max_size=size))
    vec = f.zeros((p.dim,))
    vec[blk] = [f.elem(c) for c in coeffs]
    return modops.cokernel(modops.map_from_projective(alg, v, p, vec))[0]


@functools.lru_cache(maxsize=None)
def pool(name):
    """Named modules, projectives, simples, injectives and a few sums."""
    fx = load(name)
    a = fx.alg
    mods = list(fx.mods.values())
    for i in range(a.nvert):
        mods += [projective_module(a, i), simple_module(a, i), injective_module(a, i)]
    mods.append(direct_sum([simple_module(a, 0), injective_module(a, a.nvert - 1)]).module)
    return tuple(m for m in mods if m.dim)


def fpsi_pool(name, limit):
    _, psi, q = system(name)
    return eq.fpsi_candidates(psi, q, limit=limit)


def fixtures():
    return st.sampled_from(ALL_FIXTURES)


def run(inner, c):
    inner()
    return c.n


# (i) dim Hom(P(i), M) = dim M_i
def suite_hom_from_projective():
    c = Counter()
    for name in ALL_FIXTURES:
        a = load(name).alg
        for m in pool(name):
            for i in range(a.nvert):
                c.check(hom_dim(projective_module(a, i), m) == m.dims[i])

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(fixtures(), st.data())
    def inner(name, data):
        a = load(name).alg
        m = random_module(a, data)
        for i in range(a.nvert):
            d = hom_dim(projective_module(a, i), m)
            c.check(d == m.dims[i])
        c.check(oracles.hom_dim(projective_module(a, 0), m) == m.dims[0])
    return run(inner, c)


# (ii) Ext^1(P, -) = 0
def suite_ext_projective_vanishes():
    c = Counter()
    for name in ALL_FIXTURES:
        a = load(name).alg
        for m in pool(name):
            for i in range(a.nvert):
                c.check(ext1_dim(projective_module(a, i), m) == 0)

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(fixtures(), st.data())
    def inner(name, data):
        a = load(name).alg
        m = random_module(a, data)
        for i in range(a.nvert):
            c.check(ext1_dim(projective_module(a, i), m) == 0)
    return run(inner, c)


# (iii) D is an involution up to isomorphism
def suite_duality_involution():
    c = Counter()
    for name in ALL_FIXTURES:
        for m in pool(name):
            dd = duality(duality(m))
            c.check(dd.alg is m.alg or dd.alg.dim == m.alg.dim)
            c.check(dd.dims == m.dims)
            c.check(is_isomorphic(dd, m) is Decision.TRUE)

    @settings(max_examples=20, deadline=None, derandomize=True)
    @given(fixtures(), st.data())
    def inner(name, data):
        m = random_module(load(name).alg, data)
        c.check(is_isomorphic(duality(duality(m)), m) is Decision.TRUE)
    return run(inner, c)


# (iv) Ext^1 over Lambda equals Ext^1 over Gamma on F(Psi) pairs
def suite_ext_comparison():
    c = Counter()
    for name in ["a3-twisted", "loop-chain"]:
        ctx = context(name)
        _, psi, _ = system(name)
        cands = fpsi_pool(name, 9)
        pairs = list(itertools.product(cands, repeat=2))
        assert len(pairs) >= 20
        for x, y in pairs:
            a, b = eq.ext_comparison(ctx, x, y, psi)
            c.check(a == b, (name, x.dims, y.dims, a, b))
    return c.n


# (v) counit is an isomorphism exactly on C^Q_1
def suite_counit_on_cq1():
    c = Counter()
    for name in SYSTEMS:
        ctx = context(name)
        qsum = ctx.q_module.module
        base = "a3" if name == "canonical-a3" else name
        for x in list(pool(base)) + fpsi_pool(name, 24):
            member = bool(strat.cm_n_membership(x, qsum, 1))
            iso = eq.counit_check(ctx, x)
            c.check(iso == member, (name, x.dims))
            if member:
                c.check(iso)
    return c.n


# (vi) multiplicities do not depend on the search order
def suite_multiplicity_invariance():
    c = Counter()
    for name in SYSTEMS:
        _, psi, _ = system(name)
        for k, x in enumerate(fpsi_pool(name, 24)):
            c1 = strat.filtration_search(x, psi)
            order = list(reversed(psi.order.largest_first()))
            c2 = strat.filtration_search(x, psi, try_order=order)
            c.check(bool(c1) and bool(c2))
            c.check(c1.multiplicities == c2.multiplicities)
            c.check(strat.verify_certificate(c1) and strat.verify_certificate(c2))
    return c.n


# (vii) lengths add along short exact sequences
def suite_length_additivity():
    c = Counter()
    for name in SYSTEMS:
        _, psi, _ = system(name)
        cands = fpsi_pool(name, 12)
        seqs = 0
        for x, y in itertools.product(cands, repeat=2):
            for ext in modops.ext1_middle_terms(x, y)[:2]:
                lx, ly = strat.multiplicity(x, psi), strat.multiplicity(y, psi)
                lm = strat.multiplicity(ext.middle, psi)
                c.check(sum(lm) == sum(lx) + sum(ly))
                for i in range(len(psi)):
                    c.check(lm[i] == lx[i] + ly[i])
                seqs += 1
                if seqs >= 20:
                    break
            if seqs >= 20:
                break
        # split sequences fill up the quota
        for x, y in itertools.product(cands[:5], repeat=2):
            s = direct_sum([x, y]).module
            c.check(strat.psi_length(s, psi) == strat.psi_length(x, psi) + strat.psi_length(y, psi))
    return c.n


# (viii) nonzero maps from F(Psi(<= i)) into Psi(i) are onto with filtered kernel
def suite_maps_into_psi_are_onto():
    c = Counter()
    rng = np.random.default_rng(0)
    for name in SYSTEMS:
        _, psi, _ = system(name)
        for x in fpsi_pool(name, 24):
            cert = strat.filtration_search(x, psi)
            top = max(cert.factors, key=lambda j: psi.order.rank[j])
            for i in range(len(psi)):
                if psi.order.lt(i, top):
                    continue
                below = psi.order.below(i)
                hs = hom_basis(x, psi[i])
                if not hs:
                    continue
                for _ in range(3):
                    coeffs = [x.field.elem(int(r)) for r in rng.integers(0, 5, len(hs))]
                    if all(k == 0 for k in coeffs):
                        coeffs[0] = x.field.one
                    f = modops.generic_combination(x.field, [h.matrix for h in hs], coeffs)
                    fmap = modops.ModuleMap(x, psi[i], f)
                    if fmap.rank() == 0:
                        continue
                    c.check(fmap.is_surjective())
                    z, _ = modops.kernel(fmap)
                    c.check(z.dim == 0 or bool(strat.filtration_search(z, psi, allowed=below)))
    return c.n


# (ix) C^M_{n+1} is contained in C^M_n
def suite_cmn_chain():
    c = Counter()
    for name in SYSTEMS:
        qsum = context(name).q_module.module
        base = "a3" if name == "canonical-a3" else name
        for x in pool(base):
            prev = True
            for n in range(4):
                cur = bool(strat.cm_n_membership(x, qsum, n))
                c.check(prev or not cur)
                prev = cur
    return c.n


# (x) Tor_1(Q, F(X)) = 0 on C^Q_2 members, two ways
def suite_tor_vanishes_on_cq2():
    c = Counter()
    for name in SYSTEMS:
        ctx = context(name)
        qsum = ctx.q_module.module
        base = "a3" if name == "canonical-a3" else name
        for x in list(pool(base)) + fpsi_pool(name, 24):
            if not strat.cm_n_membership(x, qsum, 2):
                continue
            fx = ctx.apply_F(x)
            c.check(eq.tor1_dim(ctx, fx) == 0)
            c.check(eq.tor1_dim_via_G(ctx, fx) == 0)
    return c.n


def suite_yoneda_and_round_trips():
    c = Counter()
    for name in SYSTEMS:
        ctx = context(name)
        _, psi, _ = system(name)
        for x in fpsi_pool(name, 16):
            fx = ctx.apply_F(x)
            c.check(fx.dim == sum(hom_dim(qi, x) for qi in ctx.q))
            c.check(is_isomorphic(ctx.apply_G(fx), x) is Decision.TRUE)
            c.check(is_isomorphic(ctx.apply_F(ctx.apply_G(fx)), fx) is Decision.TRUE)
            for qi in ctx.q:
                c.check(hom_dim(qi, x) == hom_dim(ctx.apply_F(qi), fx))
    return c.n


SUITES = {
    "i": suite_hom_from_projective,
    "ii": suite_ext_projective_vanishes,
    "iii": suite_duality_involution,
    "iv": suite_ext_comparison,
    "v": suite_counit_on_cq1,
    "vi": suite_multiplicity_invariance,
    "vii": suite_length_additivity,
    "viii": suite_maps_into_psi_are_onto,
    "ix": suite_cmn_chain,
    "x": suite_tor_vanishes_on_cq2,
    "round-trips": suite_yoneda_and_round_trips,
}


@pytest.mark.parametrize("key", sorted(SUITES))
def test_suite(key):
    n = SUITES[key]()
    assert n >= MIN, n
