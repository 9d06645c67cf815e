"""Stratification layer: standard families, filtrations, axiom verifiers."""
import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from stratkit.algcore import AlgebraOrder, PreconditionError
from stratkit.exactlinalg import RationalField
from stratkit import modops
from stratkit.modops import (Decision, ModuleMap, hom_basis, kernel, quotient_module,
                             trace_from_family, radical_of_module, projective_module,
                             ext1_dim, duality, generic_combination, coords_in, top,
                             direct_power, left_inverse)

DEFAULT_BUDGET = 10 ** 5


class NotFiltered(ValueError):
    pass


class ModuleFamily:
    def __init__(self, modules, order=None, kind="family", labels=None):
        if not modules:
            raise ValueError("a family needs at least one module")
        alg = modules[0].alg
        for m in modules:
            if m.alg is not alg:
                raise modops.AlgebraMismatch("family members over different algebras")
        self.modules = list(modules)
        self.order = order or AlgebraOrder.natural(len(modules))
        if len(self.order) != len(modules):
            raise ValueError("order size does not match the family")
        self.kind = kind
        self.labels = list(labels or [str(i + 1) for i in range(len(modules))])

    def __len__(self):
        return len(self.modules)

    def __getitem__(self, i):
        return self.modules[i]

    def __iter__(self):
        return iter(self.modules)

    @property
    def alg(self):
        return self.modules[0].alg

    def dimvecs(self):
        return [m.dims for m in self.modules]

    def below(self, i, strict=False):
        return self.order.below(i, strict)

    def above(self, i, strict=True):
        return self.order.above(i, strict)

    def with_order(self, order):
        return ModuleFamily(self.modules, order, self.kind, self.labels)


# ---------------------------------------------------------------------
# the four families


def standard_modules(a, order=None):
    order = order or AlgebraOrder.natural(a.nvert)
    mods = []
    for i in range(a.nvert):
        p = projective_module(a, i)
        others = [projective_module(a, j) for j in order.above(i)]
        sub, incl = trace_from_family(others, p) if others else modops.submodule(
            p, a.field.zeros((p.dim, 0)))
        d, _, _ = quotient_module(p, incl)
        for j in order.above(i):
            if d.dims[j]:
                raise AssertionError("standard module has a factor above its index")
        mods.append(d)
    return ModuleFamily(mods, order, "standard", a.vertex_labels)


def proper_standard_modules(a, order=None):
    order = order or AlgebraOrder.natural(a.nvert)
    f = a.field
    mods = []
    for i in range(a.nvert):
        p = projective_module(a, i)
        rad, rincl = radical_of_module(p)
        others = [projective_module(a, j) for j in order.above(i, strict=False)]
        sub, incl = trace_from_family(others, rad)
        cols = f.matmul(rincl, incl) if incl.shape[1] else f.zeros((p.dim, 0))
        d, _, _ = quotient_module(p, cols)
        if d.dims[i] != 1:
            raise AssertionError("multiplicity condition fails for a proper standard module")
        mods.append(d)
    return ModuleFamily(mods, order, "proper-standard", a.vertex_labels)


def costandard_modules(a, order=None):
    op = standard_modules(a.opposite(), order)
    return ModuleFamily([duality(m) for m in op], op.order, "costandard", a.vertex_labels)


def proper_costandard_modules(a, order=None):
    op = proper_standard_modules(a.opposite(), order)
    return ModuleFamily([duality(m) for m in op], op.order, "proper-costandard",
                        a.vertex_labels)


def quotient_map_exists(src, dst):
    """Is ``dst`` a quotient of ``src``?  Returns (Decision, map)."""
    return find_surjection(src, dst)


# ---------------------------------------------------------------------
# surjections


def find_surjection(k, x, seed=0, samples=64):
    """Decide whether some map K -> X is onto; returns (Decision, ModuleMap or None).

    A map is onto iff its composite with X -> top X is onto, and that can
    be tested vertex by vertex.  The stacked top components give an exact
    negative test; a random combination of full rank gives a positive one.
    """
    f = k.field
    if x.dim == 0:
        return Decision.TRUE, ModuleMap(k, x, f.zeros((0, k.dim)))
    if any(a < b for a, b in zip(k.dims, x.dims)):
        return Decision.FALSE, None
    hs = hom_basis(k, x)
    if not hs:
        return Decision.FALSE, None
    t, proj, _ = top(x)
    comps = [f.matmul(proj, h.matrix) for h in hs]
    for v in range(len(t.dims)):
        if t.dims[v] == 0:
            continue
        rows = t.block(v)
        stack = np.concatenate([c[rows, k.block(v)] for c in comps], axis=1)
        if f.rank(stack) < t.dims[v]:
            return Decision.FALSE, None
    mats = [h.matrix for h in hs]
    if len(mats) == 1:
        return Decision.TRUE, hs[0]
    rng = random.Random(seed)
    for _ in range(samples):
        cs = f.random_elements(rng, len(mats))
        m = generic_combination(f, mats, cs)
        if f.rank(m) == x.dim:
            return Decision.TRUE, ModuleMap(k, x, m)
    if (x.dim + 1) ** len(mats) <= modops.GRID_CAP:
        for cs in itertools.product(range(x.dim + 1), repeat=len(mats)):
            m = generic_combination(f, mats, cs)
            if f.rank(m) == x.dim:
                return Decision.TRUE, ModuleMap(k, x, m)
        return Decision.FALSE, None
    return Decision.UNDECIDED, None


# ---------------------------------------------------------------------
# certificates


@dataclass
class FilterStep:
    source: object
    epi: ModuleMap  # source -> family[index]
    index: int
    kernel: object
    incl: ModuleMap  # kernel -> source


@dataclass
class FiltrationCertificate:
    module: object
    family: ModuleFamily
    steps: list

    @property
    def factors(self):
        """Factor indices, top factor first."""
        return [s.index for s in self.steps]

    def bottom_up(self):
        return list(reversed(self.factors))

    @property
    def multiplicities(self):
        out = [0] * len(self.family)
        for s in self.steps:
            out[s.index] += 1
        return out

    def labels_top_first(self):
        return [self.family.labels[i] for i in self.factors]

    def to_json(self):
        f = self.module.field
        return [{"factor_index": self.family.labels[s.index],
                 "epi_matrix": [[f.to_str(x) for x in row] for row in s.epi.matrix],
                 "kernel_dims": list(s.kernel.dims)} for s in self.steps]

    def __bool__(self):
        return True


@dataclass
class NotFound:
    reason: str = "no filtration found"
    budget_exceeded: bool = False
    undecided: bool = False

    def __bool__(self):
        return False


class _Budget(Exception):
    pass


def _feasible(target, vecs, allowed, memo):
    """Nonnegative integer combination of ``vecs[allowed]`` equal to target?"""
    target = tuple(target)
    if all(t == 0 for t in target):
        return True
    if any(t < 0 for t in target):
        return False
    if target in memo:
        return memo[target]
    memo[target] = False
    ok = False
    for j in allowed:
        v = vecs[j]
        if sum(v) == 0:
            continue
        if all(a >= b for a, b in zip(target, v)):
            if _feasible(tuple(a - b for a, b in zip(target, v)), vecs, allowed, memo):
                ok = True
                break
    memo[target] = ok
    return ok


def _invariant_key(m):
    return (m.dims, tuple(modops.radical_layers(m)), modops.socle(m)[0].dims)


def filtration_search(m, family, allowed=None, budget=DEFAULT_BUDGET, seed=0, try_order=None):
    """Certificate of an F(family) filtration of M, or a falsy NotFound."""
    if allowed is None:
        allowed = list(range(len(family)))
    allowed = list(allowed)
    if try_order is None:
        try_order = [j for j in family.order.largest_first() if j in allowed]
    vecs = family.dimvecs()
    feas = {}
    if not _feasible(m.dims, vecs, allowed, feas):
        return NotFound("dimension vector is not a sum of family dimension vectors")
    failed = {}  # invariant key -> modules already shown to have no filtration
    state = {"nodes": 0, "undecided": False}

    def search(k):
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise _Budget()
        if k.dim == 0:
            return []
        key = _invariant_key(k)
        if any(modops.is_isomorphic(k, y) is Decision.TRUE for y in failed.get(key, ())):
            return None
        for j in try_order:
            x = family[j]
            if x.dim == 0:
                continue
            rest = tuple(a - b for a, b in zip(k.dims, x.dims))
            if any(r < 0 for r in rest) or not _feasible(rest, vecs, allowed, feas):
                continue
            dec, fmap = find_surjection(k, x, seed)
            if dec is Decision.UNDECIDED:
                state["undecided"] = True
                continue
            if dec is Decision.FALSE:
                continue
            ker, incl = kernel(fmap)
            tail = search(ker)
            if tail is not None:
                return [FilterStep(k, fmap, j, ker, incl)] + tail
        failed.setdefault(key, []).append(k)
        return None

    try:
        steps = search(m)
    except _Budget:
        return NotFound("search budget exceeded", budget_exceeded=True)
    if steps is None:
        return NotFound("no filtration found", undecided=state["undecided"])
    return FiltrationCertificate(m, family, steps)


def verify_certificate(cert):
    """Independent re-check of every step of a certificate."""
    if not isinstance(cert, FiltrationCertificate):
        return False
    f = cert.module.field
    cur = cert.module
    for s in cert.steps:
        if s.source is not cur:
            return False
        if not 0 <= s.index < len(cert.family):
            return False
        x = cert.family[s.index]
        if s.epi.source is not cur or s.epi.target is not x:
            return False
        if not s.epi.is_valid() or not s.epi.is_surjective():
            return False
        if s.incl.source is not s.kernel or s.incl.target is not cur:
            return False
        if not s.incl.is_valid() or not s.incl.is_injective():
            return False
        if not f.is_zero(f.matmul(s.epi.matrix, s.incl.matrix)):
            return False
        if s.kernel.dim + x.dim != cur.dim:
            return False
        cur = s.kernel
    return cur.dim == 0


def check_ext_condition(family):
    """First pair (i, j) with i < j and Ext^1(X(i), X(j)) != 0, else None."""
    for i in range(len(family)):
        for j in range(len(family)):
            if family.order.lt(i, j) and ext1_dim(family[i], family[j]):
                return (i, j)
    return None


def _exchange(cert, k):
    """Swap steps k and k+1 (top first); needs Ext^1(A, B) = 0."""
    f = cert.module.field
    s1, s2 = cert.steps[k], cert.steps[k + 1]
    kk = s1.source
    b = cert.family[s2.index]
    hs = hom_basis(kk, b)
    restricted = [f.matmul(h.matrix, s1.incl.matrix) for h in hs]
    c = coords_in(f, restricted, s2.epi.matrix)
    if c is None:
        raise PreconditionError("exchange step found no splitting")
    rho = ModuleMap(kk, b, generic_combination(f, [h.matrix for h in hs], list(c)))
    w, wincl = kernel(rho)
    epi_a = ModuleMap(w, s1.epi.target, f.matmul(s1.epi.matrix, wincl.matrix))
    inner = f.matmul(s1.incl.matrix, s2.incl.matrix)
    new_incl = ModuleMap(s2.kernel, w, f.matmul(left_inverse(f, wincl.matrix), inner))
    steps = list(cert.steps)
    steps[k] = FilterStep(kk, rho, s2.index, w, wincl)
    steps[k + 1] = FilterStep(w, epi_a, s1.index, s2.kernel, new_incl)
    return FiltrationCertificate(cert.module, cert.family, steps)


def reorder_certificate(cert):
    """Rearrange so that bottom-up factor indices are nondecreasing in the order."""
    fam = cert.family
    bad = check_ext_condition(fam)
    if bad is not None:
        i, j = bad
        raise PreconditionError("Ext^1(X(%s), X(%s)) != 0" % (fam.labels[i], fam.labels[j]))
    out = cert
    n = len(out.steps)
    changed = True
    while changed:
        changed = False
        for k in range(n - 1):
            a, b = out.steps[k].index, out.steps[k + 1].index
            if fam.order.lt(a, b):
                out = _exchange(out, k)
                changed = True
    return out


def multiplicity(m, family, cert=None, allowed=None):
    cert = cert or filtration_search(m, family, allowed)
    if not cert:
        raise NotFiltered(cert.reason)
    mult = cert.multiplicities
    sol = dimvector_solution(m, family)
    if sol is not None and sol != mult:
        raise AssertionError("multiplicities disagree with the dimension vector system")
    return mult


def psi_length(m, family, cert=None):
    return sum(multiplicity(m, family, cert))


def dimvector_solution(m, family):
    """Unique solution of sum_i x_i dim X(i) = dim M when the dim vectors are independent."""
    vecs = family.dimvecs()
    n, t = len(m.dims), len(vecs)
    a = [[Fraction(vecs[j][v]) for j in range(t)] for v in range(n)]
    mat = np.array(a, dtype=object)
    q = RationalField()
    if q.rank(mat) < t:
        return None
    x = q.solve(mat, np.array([Fraction(d) for d in m.dims], dtype=object))
    if x is None:
        return None
    out = []
    for c in x:
        if c.denominator != 1:
            return None
        out.append(int(c))
    return out


# ---------------------------------------------------------------------
# C^M_n


@dataclass
class CMResult:
    member: bool
    chain: list  # (s_i, dims of K_i) per step

    def __bool__(self):
        return self.member


def universal_map(m, k):
    """M^s -> K built from a basis of Hom(M, K)."""
    f = k.field
    hs = hom_basis(m, k)
    ds = direct_power(m, len(hs))
    mat = f.zeros((k.dim, ds.module.dim))
    for h, pr in zip(hs, ds.projections):
        mat = f.add(mat, f.matmul(h.matrix, pr))
    return ModuleMap(ds.module, k, mat)


def add_approximation(parts, k):
    """Right add(M)-approximation of K from the indecomposable summands of M.

    Starts from all basis maps parts[j] -> K and greedily drops those whose
    removal keeps Hom(M, -) onto Hom(M, K).
    """
    f = k.field
    gens = [(j, h.matrix) for j, p in enumerate(parts) for h in hom_basis(p, k)]
    target = len(gens)
    inner = {}

    def hom_image(sel):
        total = 0
        for a in range(len(parts)):
            rows = []
            for j, g in sel:
                if (a, j) not in inner:
                    inner[(a, j)] = [h.matrix for h in hom_basis(parts[a], parts[j])]
                rows.extend(f.matmul(g, h).reshape(-1) for h in inner[(a, j)])
            total += f.rank(np.stack(rows)) if rows else 0
        return total

    keep = list(gens)
    for idx in range(len(gens) - 1, -1, -1):
        trial = [g for g in keep if g is not gens[idx]]
        if hom_image(trial) == target:
            keep = trial
    if not keep:
        return ModuleMap(modops.zero_module(k.alg), k, f.zeros((k.dim, 0))), 0
    ds = modops.direct_sum([parts[j] for j, _ in keep])
    mat = f.zeros((k.dim, ds.module.dim))
    for (_, g), pr in zip(keep, ds.projections):
        mat = f.add(mat, f.matmul(g, pr))
    return ModuleMap(ds.module, k, mat), len(keep)


def cm_n_membership(x, m, n):
    """X in C^M_n: right add(M)-approximations u_0..u_n of the successive kernels are onto.

    Any two right approximations have kernels agreeing up to add(M) summands,
    so the minimal one built here decides the same class as the full universal map.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    parts = [c[0] for c in modops.isomorphism_classes(modops.decompose(m).modules())]
    chain = []
    cur = x
    for i in range(n + 1):
        u, copies = add_approximation(parts, cur)
        onto = u.is_surjective()
        chain.append({"step": i, "copies": copies,
                      "target_dims": list(cur.dims), "surjective": onto})
        if not onto:
            return CMResult(False, chain)
        cur, _ = kernel(u)
    return CMResult(True, chain)


# ---------------------------------------------------------------------
# reports


@dataclass
class Item:
    id: str
    status: str
    witness: object = None

    def to_json(self):
        return {"id": self.id, "status": self.status, "witness": self.witness}


@dataclass
class Report:
    theorem: str
    items: list = dc_field(default_factory=list)

    def add(self, id, status, witness=None):
        if status is True:
            status = "PASS"
        elif status is False:
            status = "FAIL"
        self.items.append(Item(id, status, witness))

    def status_of(self, prefix):
        sts = [it.status for it in self.items if it.id == prefix or it.id.startswith(prefix + ".")
               or it.id.startswith(prefix + "[")]
        if not sts:
            return None
        if "FAIL" in sts:
            return "FAIL"
        if "UNDECIDED" in sts:
            return "UNDECIDED"
        if all(s == "INAPPLICABLE" for s in sts):
            return "INAPPLICABLE"
        return "PASS"

    @property
    def ok(self):
        return all(it.status in ("PASS", "INAPPLICABLE") for it in self.items)

    @property
    def status(self):
        sts = [it.status for it in self.items]
        if "FAIL" in sts:
            return "FAIL"
        if "UNDECIDED" in sts:
            return "UNDECIDED"
        if sts and all(s == "INAPPLICABLE" for s in sts):
            return "INAPPLICABLE"
        return "PASS"

    def to_json(self):
        return {"theorem": self.theorem, "status": self.status,
                "items": [it.to_json() for it in self.items]}


def _matrix_json(f, m):
    return [[f.to_str(x) for x in row] for row in m]


def is_division_endomorphism_ring(m):
    """End(M) is a division ring: local with zero radical."""
    alg, mats = modops.endomorphism_ring(m)
    if alg is None:
        return Decision.FALSE
    if alg.radical().shape[1]:
        return Decision.FALSE
    res = modops.is_indecomposable(m)
    if res.status == "undecided":
        return Decision.UNDECIDED
    return Decision.of(res.status == "yes")


def _indecomposable_status(m):
    st = modops.is_indecomposable(m).status
    return {"yes": "PASS", "no": "FAIL", "undecided": "UNDECIDED"}[st]


def _sizes_match(psi, q, rep):
    if len(psi) != len(q):
        rep.add("sizes", "FAIL", {"psi": len(psi), "q": len(q)})
        return False
    if psi.order != q.order:
        rep.add("sizes", "FAIL", "families carry different orders")
        return False
    return True


def verify_proper_costratifying_system(psi, q, budget=DEFAULT_BUDGET):
    rep = Report("proper costratifying system")
    if not _sizes_match(psi, q, rep):
        return rep
    f = psi.alg.field
    order = psi.order
    t = len(psi)
    lab = psi.labels
    for i in range(t):
        rep.add("Q-indecomposable[%s]" % lab[i], _indecomposable_status(q[i]))
    for i in range(t):
        d = is_division_endomorphism_ring(psi[i])
        st = {"true": "PASS", "false": "FAIL", "undecided": "UNDECIDED"}[d.value]
        rep.add("a[%s]" % lab[i], st, {"dim_End": modops.hom_dim(psi[i], psi[i])})
    for i in range(t):
        for j in range(t):
            if order.lt(i, j):
                hs = hom_basis(psi[i], psi[j])
                rep.add("b[%s,%s]" % (lab[i], lab[j]), not hs,
                        _matrix_json(f, hs[0].matrix) if hs else None)
    for i in range(t):
        hs = hom_basis(q[i], psi[i])
        if not hs:
            rep.add("c[%s]" % lab[i], "FAIL", "Hom(Q(i), Psi(i)) = 0")
            continue
        beta = hs[0]
        if not beta.is_surjective():
            rep.add("c[%s]" % lab[i], "FAIL", "chosen nonzero map is not onto")
            continue
        z, _ = kernel(beta)
        cert = filtration_search(z, psi, allowed=order.below(i), budget=budget)
        if cert and verify_certificate(cert):
            rep.add("c[%s]" % lab[i], "PASS", {"kernel_dims": list(z.dims),
                                                "factors": cert.labels_top_first()})
        elif not cert and (cert.budget_exceeded or cert.undecided):
            rep.add("c[%s]" % lab[i], "UNDECIDED", cert.reason)
        else:
            rep.add("c[%s]" % lab[i], "FAIL", {"kernel_dims": list(z.dims),
                                              "reason": getattr(cert, "reason", "bad certificate")})
    for i in range(t):
        for j in range(t):
            e = ext1_dim(q[i], psi[j])
            rep.add("d[%s,%s]" % (lab[i], lab[j]), e == 0, {"ext1": e} if e else None)
    return rep


def verify_ext_projective_ss(theta, q, budget=DEFAULT_BUDGET):
    rep = Report("Ext-projective stratifying system")
    if not _sizes_match(theta, q, rep):
        return rep
    f = theta.alg.field
    order = theta.order
    t = len(theta)
    lab = theta.labels
    for i in range(t):
        rep.add("Q-indecomposable[%s]" % lab[i], _indecomposable_status(q[i]))
    for i in range(t):
        for j in range(t):
            if order.lt(j, i):
                hs = hom_basis(theta[i], theta[j])
                rep.add("a[%s,%s]" % (lab[i], lab[j]), not hs,
                        _matrix_json(f, hs[0].matrix) if hs else None)
    for i in range(t):
        dec, beta = find_surjection(q[i], theta[i])
        if dec is not Decision.TRUE:
            rep.add("b[%s]" % lab[i], "FAIL" if dec is Decision.FALSE else "UNDECIDED",
                    "no epimorphism Q(i) -> Theta(i)")
            continue
        kk, _ = kernel(beta)
        cert = filtration_search(kk, theta, allowed=order.above(i), budget=budget)
        if cert and verify_certificate(cert):
            rep.add("b[%s]" % lab[i], "PASS", {"kernel_dims": list(kk.dims),
                                                "factors": cert.labels_top_first()})
        else:
            rep.add("b[%s]" % lab[i], "FAIL", {"kernel_dims": list(kk.dims)})
    for i in range(t):
        for j in range(t):
            e = ext1_dim(q[i], theta[j])
            rep.add("c[%s,%s]" % (lab[i], lab[j]), e == 0, {"ext1": e} if e else None)
    return rep


# ---------------------------------------------------------------------
# stratified algebras


@dataclass
class StratResult:
    value: bool
    certificates: list
    budget_exceeded: bool = False

    def __bool__(self):
        return self.value


def _all_projectives_filtered(a, fam, budget):
    certs = []
    flag = False
    for i in range(a.nvert):
        c = filtration_search(projective_module(a, i), fam, budget=budget)
        if not c:
            flag = flag or c.budget_exceeded
            return False, certs, flag
        certs.append(c)
    return True, certs, flag


def is_standardly_stratified(a, order=None, budget=DEFAULT_BUDGET):
    fam = standard_modules(a, order)
    ok, certs, flag = _all_projectives_filtered(a, fam, budget)
    return StratResult(ok, certs, flag)


def is_properly_stratified(a, order=None, budget=DEFAULT_BUDGET):
    first = is_standardly_stratified(a, order, budget)
    if not first:
        return first
    fam = proper_standard_modules(a, order)
    ok, certs, flag = _all_projectives_filtered(a, fam, budget)
    return StratResult(ok, first.certificates + certs, flag)
