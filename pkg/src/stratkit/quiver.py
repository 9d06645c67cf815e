"""Bound quiver presentations, path algebras and quiver-born modules.

Paths in input files are arrow-name lists applied right to left, so
["b", "a"] means "first a, then b".  Internally a path is a tuple of arrow
names in application order.
"""
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from stratkit.algcore import FiniteDimAlgebra, Quiver, AlgebraOrder
from stratkit.exactlinalg import make_field
from stratkit import modops


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = "line %d" % line + (", column %d" % column if column is not None else "") + ": "
        super().__init__(loc + message)


class SemanticError(ParseError):
    pass


class PresentationError(ValueError):
    pass


class InadmissibleError(PresentationError):
    def __init__(self, message, path=None):
        self.path = path
        super().__init__(message)


@dataclass
class BoundQuiverPresentation:
    quiver: Quiver
    relations: list  # list of [(coeff string, path tuple in application order)]
    nilpotency_bound: int
    field_entry: dict
    order: list = None
    modules: dict = dc_field(default_factory=dict)
    systems: dict = dc_field(default_factory=dict)
    raw: dict = dc_field(default_factory=dict)

    def arrow(self, name):
        for a in self.quiver.arrows:
            if a[0] == name:
                return a
        raise KeyError(name)

    def path_ends(self, path):
        """(source, target) labels of a nonempty path in application order."""
        src = self.arrow(path[0])[1]
        cur = src
        for name in path:
            _, s, t = self.arrow(name)
            if s != cur:
                raise PresentationError("arrows %s do not compose" % "*".join(reversed(path)))
            cur = t
        return src, cur


def _locate(text, needle):
    """Line and column of the first occurrence of ``needle`` in ``text``."""
    if text is None:
        return None, None
    pos = text.find(needle)
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _fail(text, msg, *needles):
    for n in needles:
        line, col = _locate(text, n)
        if line is not None:
            raise ParseError(msg, line, col)
    raise ParseError(msg)


def parse_presentation(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("malformed JSON: " + e.msg, e.lineno, e.colno)
    return presentation_from_dict(data, text)


def load_presentation(path):
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def presentation_from_dict(data, text=None):
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", 1, 1)
    for key in ("vertices", "arrows"):
        if key not in data:
            raise ParseError("missing key '%s'" % key)
    vertices = [str(v) for v in data["vertices"]]
    if len(set(vertices)) != len(vertices) or not vertices:
        _fail(text, "vertex labels must be nonempty and unique", '"vertices"')
    arrows = []
    names = set()
    for a in data["arrows"]:
        if not isinstance(a, dict) or not {"name", "from", "to"} <= set(a):
            _fail(text, "arrow entries need name, from and to", '"arrows"')
        name, s, t = str(a["name"]), str(a["from"]), str(a["to"])
        if name in names:
            _fail(text, "duplicate arrow name '%s'" % name, '"name": "%s"' % name, '"%s"' % name)
        for v in (s, t):
            if v not in vertices:
                _fail(text, "arrow '%s' uses unknown vertex '%s'" % (name, v),
                      '"from": "%s"' % v, '"to": "%s"' % v, '"%s"' % v)
        names.add(name)
        arrows.append((name, s, t))
    quiver = Quiver(tuple(vertices), tuple(arrows))
    fs = data.get("field", {"kind": "Fp", "p": 32003})
    if not isinstance(fs, dict) or fs.get("kind") not in ("Fp", "Q"):
        _fail(text, "field must be {kind: Fp, p} or {kind: Q}", '"field"')
    nb = data.get("nilpotency_bound")
    if not isinstance(nb, int) or nb < 1:
        _fail(text, "nilpotency_bound must be a positive integer", '"nilpotency_bound"')
    pres = BoundQuiverPresentation(quiver, [], nb, fs, raw=data)
    for k, rel in enumerate(data.get("relations", [])):
        if not isinstance(rel, list) or not rel:
            _fail(text, "relation %d must be a nonempty list of terms" % (k + 1), '"relations"')
        terms = []
        for term in rel:
            path = term.get("path") if isinstance(term, dict) else None
            if not isinstance(path, list) or not path:
                _fail(text, "relation %d: each term needs a nonempty path" % (k + 1), '"relations"')
            for name in path:
                if name not in names:
                    _fail(text, "relation %d: unknown arrow '%s'" % (k + 1, name),
                          '"%s"' % name)
            app = tuple(reversed([str(x) for x in path]))
            try:
                ends = pres.path_ends(app)
            except PresentationError as e:
                _fail(text, "relation %d: %s" % (k + 1, e), '"relations"')
            terms.append((str(term.get("coeff", "1")), app, ends))
        if len({t[2] for t in terms}) != 1:
            line, col = _locate(text, '"relations"')
            raise SemanticError("relation %d mixes non-parallel paths" % (k + 1), line, col)
        pres.relations.append([(c, p) for c, p, _ in terms])
    if "order" in data:
        order = [str(v) for v in data["order"]]
        if sorted(order) != sorted(vertices):
            _fail(text, "order must list every vertex once", '"order"')
        pres.order = order
    pres.modules = data.get("modules", {})
    pres.systems = data.get("systems", {})
    for mname, entry in pres.modules.items():
        if not isinstance(entry, dict) or "dims" not in entry:
            _fail(text, "module '%s' needs dims" % mname, '"%s"' % mname)
        for v in entry["dims"]:
            if str(v) not in vertices:
                _fail(text, "module '%s' uses unknown vertex '%s'" % (mname, v), '"%s"' % mname)
        for aname in entry.get("arrow_actions", {}):
            if aname not in names:
                _fail(text, "module '%s' acts by unknown arrow '%s'" % (mname, aname),
                      '"%s"' % mname)
    return pres


# ---------------------------------------------------------------------
# path algebra


def field_of(pres, override=None):
    if override is not None:
        return override
    fs = pres.field_entry
    return make_field(fs["kind"], int(fs.get("p", 32003)))


def enumerate_paths(pres, max_len):
    """All paths of length <= max_len: trivial ones as ('@v',), others in application order."""
    out = [("@" + v,) for v in pres.quiver.vertices]
    cur = [((a[0],), a[2]) for a in pres.quiver.arrows]
    length = 1
    while cur and length <= max_len:
        out.extend(p for p, _ in cur)
        nxt = []
        for p, t in cur:
            for name, s, tt in pres.quiver.arrows:
                if s == t:
                    nxt.append((p + (name,), tt))
        cur = nxt
        length += 1
    return out


def path_length(p):
    return 0 if p[0].startswith("@") else len(p)


def path_source(pres, p):
    return p[0][1:] if p[0].startswith("@") else pres.arrow(p[0])[1]


def path_target(pres, p):
    return p[0][1:] if p[0].startswith("@") else pres.arrow(p[-1])[2]


def concat(pres, first, then):
    """Path 'first, then then' or None when not composable."""
    if path_target(pres, first) != path_source(pres, then):
        return None
    if first[0].startswith("@"):
        return then
    if then[0].startswith("@"):
        return first
    return first + then


def path_label(p):
    if p[0].startswith("@"):
        return "e" + p[0][1:]
    names = list(reversed(p))
    sep = "" if all(len(n) == 1 for n in names) else "*"
    return sep.join(names)


def _ideal_vectors(pres, f, index, limit):
    """Vectors u*r*v of all relations, terms longer than ``limit`` dropped."""
    paths = enumerate_paths(pres, limit)
    vecs = []
    for rel in pres.relations:
        s = path_source(pres, rel[0][1])
        t = path_target(pres, rel[0][1])
        shortest = min(len(p) for _, p in rel)
        befores = [v for v in paths if path_target(pres, v) == s]
        afters = [u for u in paths if path_source(pres, u) == t]
        for v in befores:
            for u in afters:
                if path_length(v) + path_length(u) + shortest > limit:
                    continue
                vec = f.zeros((len(index),))
                for c, p in rel:
                    q = concat(pres, concat(pres, v, p), u)
                    if path_length(q) <= limit and q in index:
                        vec[index[q]] = f.add(vec[index[q]], f.elem(c))
                if not f.is_zero(vec):
                    vecs.append(vec)
    return vecs


def check_admissibility(pres, f=None):
    """Raise InadmissibleError unless relations lie in J^2 and all length-N paths vanish."""
    f = f or field_of(pres)
    for k, rel in enumerate(pres.relations):
        for _, p in rel:
            if len(p) < 2:
                raise InadmissibleError("relation %d has a term of length < 2 (%s)"
                                        % (k + 1, path_label(p)), path_label(p))
    n = pres.nilpotency_bound
    paths = enumerate_paths(pres, n)
    index = {p: i for i, p in enumerate(paths)}
    vecs = _ideal_vectors(pres, f, index, n)
    span = np.stack(vecs, axis=1) if vecs else f.zeros((len(paths), 0))
    for p in paths:
        if path_length(p) == n:
            target = f.zeros((len(paths),))
            target[index[p]] = f.one
            if not f.in_span(span, target):
                raise InadmissibleError("path %s of length %d is nonzero modulo the relations"
                                        % (path_label(p), n), path_label(p))


def build_algebra(pres, f=None, check=True):
    f = f or field_of(pres)
    if check:
        check_admissibility(pres, f)
    n = pres.nilpotency_bound
    paths = enumerate_paths(pres, n - 1)
    # long paths first so that pivots land on them and short paths survive
    cols = sorted(range(len(paths)), key=lambda i: (-path_length(paths[i]), i))
    index = {paths[i]: pos for pos, i in enumerate(cols)}
    ordered = [paths[i] for i in cols]
    vecs = _ideal_vectors(pres, f, index, n - 1)
    d = len(ordered)
    if vecs:
        r, piv = f.rref(np.stack(vecs, axis=0))
    else:
        r, piv = f.zeros((0, d)), []
    pset = set(piv)
    free = [k for k in range(d) if k not in pset]
    # basis ordered by length then enumeration order
    free.sort(key=lambda k: (path_length(ordered[k]), paths.index(ordered[k])))
    fpos = {k: t for t, k in enumerate(free)}
    normal = {}
    for k in free:
        v = f.zeros((len(free),))
        v[fpos[k]] = f.one
        normal[ordered[k]] = v
    for i, pc in enumerate(piv):
        v = f.zeros((len(free),))
        for k in free:
            v[fpos[k]] = f.neg(r[i, k])
        normal[ordered[pc]] = v
    basis = [ordered[k] for k in free]
    m = len(basis)
    struct = f.zeros((m, m, m))
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            q = concat(pres, bj, bi)
            if q is None or path_length(q) >= n:
                continue
            struct[i, j] = normal[q]
    verts = list(pres.quiver.vertices)
    idems = [normal[("@" + v,)] for v in verts]
    unit = f.zeros((m,))
    for e in idems:
        unit = f.add(unit, e)
    alg = FiniteDimAlgebra(f, struct, unit, idems, verts,
                           [path_label(b) for b in basis], name="kQ/I")
    alg.meta = {"presentation": pres, "paths": basis, "normal": normal,
                "arrows": {a[0]: normal[(a[0],)] for a in pres.quiver.arrows}}
    return alg


def algebra_order(pres, alg):
    labels = pres.order or list(pres.quiver.vertices)
    return AlgebraOrder([alg.vertex_index(v) for v in labels])


# ---------------------------------------------------------------------
# modules given by arrow matrices


def module_from_arrows(alg, dims, arrow_actions, name="module"):
    """Representation given by vertex dimensions and arrow matrices (target x source)."""
    pres = alg.meta["presentation"]
    f = alg.field
    verts = alg.vertex_labels
    dv = [int(dims.get(v, dims.get(int(v), 0)) if isinstance(dims, dict) else dims[k])
          for k, v in enumerate(verts)]
    offs = [0]
    for d in dv:
        offs.append(offs[-1] + d)
    total = offs[-1]

    def blk(v):
        k = verts.index(v)
        return slice(offs[k], offs[k + 1])

    arrow_mats = {}
    for aname, s, t in pres.quiver.arrows:
        want = (dv[verts.index(t)], dv[verts.index(s)])
        raw = arrow_actions.get(aname)
        if raw is None:
            mat = f.zeros(want)
        else:
            mat = f.matrix(raw, want[1]) if len(raw) else f.zeros(want)
            if mat.shape != want:
                raise PresentationError("module %s: arrow %s needs a %dx%d matrix, got %dx%d"
                                        % (name, aname, want[0], want[1],
                                           mat.shape[0], mat.shape[1]))
        full = f.zeros((total, total))
        full[blk(t), blk(s)] = mat
        arrow_mats[aname] = full

    def path_matrix(p):
        if p[0].startswith("@"):
            out = f.zeros((total, total))
            sl = blk(p[0][1:])
            out[sl, sl] = f.eye(sl.stop - sl.start)
            return out
        out = f.eye(total)
        for a in p:
            out = f.matmul(arrow_mats[a], out)
        return out

    for k, rel in enumerate(pres.relations):
        acc = f.zeros((total, total))
        for c, p in rel:
            acc = f.add(acc, f.scale(f.elem(c), path_matrix(p)))
        if not f.is_zero(acc):
            raise PresentationError("module %s violates relation %d" % (name, k + 1))
    for p in enumerate_paths(pres, pres.nilpotency_bound):
        if path_length(p) == pres.nilpotency_bound and not f.is_zero(path_matrix(p)):
            raise PresentationError("module %s: path %s of length N acts nonzero"
                                    % (name, path_label(p)))
    act = f.zeros((alg.dim, total, total))
    for i, p in enumerate(alg.meta["paths"]):
        act[i] = path_matrix(p)
    mod = modops.Module(alg, dv, act, meta={"name": name})
    return mod


def load_modules(pres, alg):
    out = {}
    for name, entry in pres.modules.items():
        out[name] = module_from_arrows(alg, {str(k): v for k, v in entry["dims"].items()},
                                       entry.get("arrow_actions", {}), name)
    return out


def arrow_actions_of(m):
    """Arrow matrices of a module over a path-algebra presentation."""
    alg = m.alg
    pres = alg.meta["presentation"]
    out = {}
    for aname, s, t in pres.quiver.arrows:
        a = m.action(alg.meta["arrows"][aname])
        si, ti = alg.vertex_index(s), alg.vertex_index(t)
        out[aname] = a[m.block(ti), m.block(si)]
    return out


def module_dump(m):
    f = m.field
    out = {"dims": {v: d for v, d in zip(m.alg.vertex_labels, m.dims)},
           "loewy": loewy_diagram(m)}
    meta = getattr(m.alg, "meta", None) or {}
    if "presentation" in meta:
        out["arrow_actions"] = {k: [[f.to_str(x) for x in row] for row in v]
                                for k, v in arrow_actions_of(m).items()}
    return out


# ---------------------------------------------------------------------
# standard modules and Loewy diagrams


def projective_module(alg, i):
    return modops.projective_module(alg, i)


def simple_module(alg, i):
    return modops.simple_module(alg, i)


def injective_module(alg, i):
    return modops.injective_module(alg, i)


def loewy_rows(m):
    rows = []
    labels = m.alg.vertex_labels
    for layer in modops.radical_layers(m):
        row = []
        for v, k in enumerate(layer):
            row.extend([labels[v]] * k)
        rows.append(" ".join(row))
    return rows


def loewy_diagram(m):
    if m.dim == 0:
        return "0"
    return " / ".join(loewy_rows(m))
