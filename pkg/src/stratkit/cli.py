"""stratkit command line."""
import argparse
import json
import sys
from dataclasses import dataclass

from stratkit import modops, quiver, strat, equivlab
from stratkit.algcore import gabriel_quiver, validate_algebra, cartan_matrix, PreconditionError
from stratkit.exactlinalg import parse_field_option

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_FAIL, EXIT_UNDECIDED = 0, 1, 2, 3, 4

FAMILY_ALIASES = {
    "delta": "standard", "Δ": "standard", "standard": "standard",
    "delta-bar": "proper-standard", "Δ̄": "proper-standard", "proper-standard": "proper-standard",
    "nabla": "costandard", "∇": "costandard", "costandard": "costandard",
    "nabla-bar": "proper-costandard", "∇̄": "proper-costandard",
    "proper-costandard": "proper-costandard",
    "psi": "psi", "Ψ": "psi", "theta": "psi", "Θ": "psi", "q": "q", "Q": "q",
}

FAMILY_BUILDERS = {
    "standard": strat.standard_modules,
    "proper-standard": strat.proper_standard_modules,
    "costandard": strat.costandard_modules,
    "proper-costandard": strat.proper_costandard_modules,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str
    command: str
    field: object = None
    budget: int = strat.DEFAULT_BUDGET
    format: str = "text"
    seed: int = 0
    system: str = None
    module: str = None
    family: str = None
    n: int = 1
    variant: str = "proper-costratifying"


class Workspace:
    """Parsed input with lazily built algebra, modules and systems."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.pres = quiver.load_presentation(cfg.input)
        self.field = quiver.field_of(self.pres, cfg.field)
        self.alg = quiver.build_algebra(self.pres, self.field)
        self.order = quiver.algebra_order(self.pres, self.alg)
        self.modules = quiver.load_modules(self.pres, self.alg)
        self._systems = {}

    def labels(self):
        return self.alg.vertex_labels

    def module(self, name):
        if name in self.modules:
            return self.modules[name]
        kind, label = name[:1], name[1:]
        builders = {"P": modops.projective_module, "S": modops.simple_module,
                    "I": modops.injective_module}
        if kind in builders and label in self.labels():
            return builders[kind](self.alg, self.alg.vertex_index(label))
        raise ConfigError("unknown module %r" % name)

    def family(self, name):
        key = FAMILY_ALIASES.get(name, FAMILY_ALIASES.get(name.lower()))
        if key is None:
            raise ConfigError("unknown family %r" % name)
        if key in FAMILY_BUILDERS:
            return FAMILY_BUILDERS[key](self.alg, self.order)
        psi, q = self.system(self.cfg.system)
        return psi if key == "psi" else q

    def _resolve(self, entry, kind):
        if isinstance(entry, str):
            if entry == "@characteristic-tilting":
                return equivlab.characteristic_tilting(self.alg, self.order).family
            if entry == "@projective":
                mods = [modops.projective_module(self.alg, i) for i in range(self.alg.nvert)]
                return strat.ModuleFamily(mods, self.order, kind, self.labels())
            if entry.startswith("@"):
                return self.family(entry[1:]).with_order(self.order)
            raise ConfigError("bad system entry %r" % entry)
        mods = [self.module(n) for n in entry]
        labels = self.labels() if len(mods) == self.alg.nvert else None
        return strat.ModuleFamily(mods, self.order, kind, labels)

    def system(self, name):
        systems = self.pres.systems
        if not systems:
            raise ConfigError("input defines no systems")
        if name is None:
            if len(systems) != 1:
                raise ConfigError("several systems defined; pass --system")
            name = next(iter(systems))
        if name not in systems:
            raise ConfigError("unknown system %r" % name)
        if name not in self._systems:
            entry = systems[name]
            first = entry.get("psi", entry.get("theta"))
            if first is None or "q" not in entry:
                raise ConfigError("system %r needs psi (or theta) and q" % name)
            psi = self._resolve(first, "psi")
            q = self._resolve(entry["q"], "q")
            self._systems[name] = (psi, q)
        return self._systems[name]

    def system_names(self):
        return list(self.pres.systems)


# ---------------------------------------------------------------------
# output


def _module_entry(label, m):
    return {"label": label, "dims": list(m.dims), "loewy": quiver.loewy_diagram(m)}


def _family_block(fam):
    return [_module_entry(lab, m) for lab, m in zip(fam.labels, fam)]


def _text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict) and "theorem" in obj and "items" in obj:
        lines.append("%s%s: %s" % (pad, obj["theorem"], obj["status"]))
        for it in obj["items"]:
            w = it["witness"]
            extra = "" if w is None else "  " + _scalar(w)
            lines.append("%s  %s: %s%s" % (pad, it["id"], it["status"], extra))
    elif isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict) and v or _dict_list(v):
                lines.append("%s%s:" % (pad, k))
                lines.extend(_text(v, indent + 1))
            else:
                lines.append("%s%s: %s" % (pad, k, _scalar(v)))
    elif _dict_list(obj):
        for v in obj:
            if "loewy" in v:
                lines.append("%s%s: %s" % (pad, v.get("label", "?"), v["loewy"]))
            else:
                sub = _text(v, indent + 1)
                lines.append(pad + "- " + sub[0].lstrip())
                lines.extend(sub[1:])
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _dict_list(v):
    return isinstance(v, list) and bool(v) and all(isinstance(x, dict) for x in v)


def _scalar(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, ensure_ascii=False)
    if v is None:
        return "-"
    return str(v)


def emit(cfg, payload, out):
    payload = dict(payload)
    payload["seed"] = cfg.seed
    if cfg.format == "json":
        out.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(_text(payload)) + "\n")


def _status_code(status):
    return {"PASS": EXIT_OK, "FAIL": EXIT_FAIL, "UNDECIDED": EXIT_UNDECIDED,
            "INAPPLICABLE": EXIT_OK}[status]


# ---------------------------------------------------------------------
# commands


def cmd_validate(cfg):
    pres = quiver.load_presentation(cfg.input)
    f = quiver.field_of(pres, cfg.field)
    try:
        quiver.check_admissibility(pres, f)
    except quiver.InadmissibleError as exc:
        return EXIT_VALIDATION, {"command": "validate", "status": "FAIL",
                                 "admissible": False, "error": str(exc), "path": exc.path}
    alg = quiver.build_algebra(pres, f, check=False)
    rep = validate_algebra(alg)
    body = {"command": "validate", "status": "PASS" if rep.ok else "FAIL",
            "admissible": True, "dim": alg.dim,
            "cartan": cartan_matrix(alg), "validation": rep.to_json()}
    return (EXIT_OK if rep.ok else EXIT_VALIDATION), body


def cmd_families(cfg):
    ws = Workspace(cfg)
    body = {"command": "families",
            "order": [ws.labels()[v] for v in ws.order.increasing]}
    for key, build in FAMILY_BUILDERS.items():
        body[key] = _family_block(build(ws.alg, ws.order))
    return EXIT_OK, body


def cmd_check_system(cfg):
    ws = Workspace(cfg)
    psi, q = ws.system(cfg.system)
    body = {"command": "check-system", "system": cfg.system or ws.system_names()[0]}
    if cfg.variant == "ext-projective":
        axioms = strat.verify_ext_projective_ss(psi, q, budget=cfg.budget)
        body["axioms"] = axioms.to_json()
        if axioms.ok:
            ctx = equivlab.make_context(ws.alg, q)
            body["equivalence"] = equivlab.verify_theta_equivalence(ctx, psi, q).to_json()
        body["status"] = axioms.status
        return _status_code(axioms.status), body
    axioms = strat.verify_proper_costratifying_system(psi, q, budget=cfg.budget)
    body["axioms"] = axioms.to_json()
    if axioms.ok:
        ctx = equivlab.make_context(ws.alg, q, psi)
        body["gamma_op"] = _gamma_block(ctx)
        body["equivalence"] = equivlab.verify_equivalence(ctx, psi, q).to_json()
        body["coresolving"] = equivlab.check_coresolving_conditions(ctx, psi, q).to_json()
        body["cotilting"] = equivlab.cotilting_check(ctx).to_json()
    body["status"] = axioms.status
    return _status_code(axioms.status), body


def _gamma_block(ctx):
    gop = ctx.gamma_op
    reg = modops.decompose(modops.regular_module(gop))
    return {"dim": gop.dim,
            "quiver": sorted("%s->%s" % (s, t) for _, s, t in gabriel_quiver(gop).arrows),
            "cartan": cartan_matrix(gop),
            "regular": sorted(quiver.loewy_diagram(m) for m in reg.modules()),
            "regular_complete": reg.complete}


def _certificate_block(cert):
    return {"factors_top_first": cert.labels_top_first(),
            "multiplicities": dict(zip(cert.family.labels, cert.multiplicities)),
            "steps": cert.to_json()}


def cmd_filtration(cfg):
    ws = Workspace(cfg)
    if not cfg.module or not cfg.family:
        raise ConfigError("filtration needs --module and --family")
    m = ws.module(cfg.module)
    fam = ws.family(cfg.family)
    cert = strat.filtration_search(m, fam, budget=cfg.budget, seed=cfg.seed)
    body = {"command": "filtration", "module": cfg.module, "family": cfg.family}
    if not cert:
        body.update({"status": "UNDECIDED" if cert.budget_exceeded or cert.undecided
                     else "NOT_FOUND", "reason": cert.reason})
        return (EXIT_UNDECIDED if body["status"] == "UNDECIDED" else EXIT_FAIL), body
    if not strat.verify_certificate(cert):
        raise AssertionError("certificate failed re-verification")
    body["status"] = "FOUND"
    body["certificate"] = _certificate_block(cert)
    return EXIT_OK, body


def cmd_cmn(cfg):
    ws = Workspace(cfg)
    if not cfg.module:
        raise ConfigError("cmn needs --module")
    x = ws.module(cfg.module)
    if cfg.family:
        gen = ws.family(cfg.family)
    else:
        gen = ws.system(cfg.system)[1]
    big = modops.direct_sum(list(gen)).module
    res = strat.cm_n_membership(x, big, cfg.n)
    body = {"command": "cmn", "module": cfg.module, "n": cfg.n,
            "status": "MEMBER" if res.member else "NOT_FOUND", "chain": res.chain}
    return (EXIT_OK if res.member else EXIT_FAIL), body


def cmd_endo(cfg):
    ws = Workspace(cfg)
    body = {"command": "endo"}
    if cfg.module:
        m = ws.module(cfg.module)
        res = modops.is_indecomposable(m)
        body.update({"module": cfg.module, "dim_End": modops.hom_dim(m, m),
                     "indecomposable": res.status,
                     "division": strat.is_division_endomorphism_ring(m) is modops.Decision.TRUE})
        body["status"] = "PASS"
        return EXIT_OK, body
    psi, q = ws.system(cfg.system)
    ctx = equivlab.make_context(ws.alg, q, psi)
    gorder = psi.order.reversed()
    body["system"] = cfg.system or ws.system_names()[0]
    body["gamma_op"] = _gamma_block(ctx)
    body["gamma_op"]["order"] = [ctx.gamma_op.vertex_labels[v] for v in gorder.increasing]
    body["gamma_op"]["standard"] = _family_block(strat.standard_modules(ctx.gamma_op, gorder))
    body["gamma_proper_standard"] = _family_block(
        strat.proper_standard_modules(ctx.gamma, gorder))
    summ, _ = equivlab.summands_of(ctx.q_over_gamma_op())
    body["q_over_gamma_op"] = sorted(quiver.loewy_diagram(m) for m in summ)
    try:
        tilt = equivlab.characteristic_tilting(ctx.gamma_op, gorder)
        body["gamma_op_tilting"] = {"ok": tilt.ok, "modules": _family_block(tilt.family)}
    except PreconditionError as exc:
        body["gamma_op_tilting"] = {"ok": False, "reason": str(exc)}
    body["status"] = "PASS"
    return EXIT_OK, body


def cmd_report(cfg):
    code, body = cmd_validate(cfg)
    out = {"command": "report", "validate": body}
    if code != EXIT_OK:
        out["status"] = body["status"]
        return code, out
    _, out["families"] = cmd_families(cfg)
    worst = EXIT_OK
    systems = {}
    ws = Workspace(cfg)
    for name in ws.system_names():
        sub = RunConfig(**{**cfg.__dict__, "system": name})
        c, b = cmd_check_system(sub)
        systems[name] = b
        worst = max(worst, c)
    out["systems"] = systems
    out["status"] = "PASS" if worst == EXIT_OK else ("UNDECIDED" if worst == EXIT_UNDECIDED
                                                     else "FAIL")
    return worst, out


COMMANDS = {"validate": cmd_validate, "families": cmd_families,
            "check-system": cmd_check_system, "filtration": cmd_filtration,
            "cmn": cmd_cmn, "endo": cmd_endo, "report": cmd_report}


def build_parser():
    p = argparse.ArgumentParser(prog="stratkit",
                                description="Stratifying systems over bound quiver algebras.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", required=True)
    p.add_argument("--system")
    p.add_argument("--module")
    p.add_argument("--family")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--field", help="fp:P or q")
    p.add_argument("--budget", type=int, default=strat.DEFAULT_BUDGET)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=["proper-costratifying", "ext-projective"],
                   default="proper-costratifying")
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        field = parse_field_option(args.field) if args.field else None
    except ValueError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_VALIDATION
    if args.budget <= 0:
        err.write("error: budget must be positive\n")
        return EXIT_VALIDATION
    cfg = RunConfig(input=args.input, command=args.command, field=field, budget=args.budget,
                    format=args.format, seed=args.seed, system=args.system,
                    module=args.module, family=args.family, n=args.n, variant=args.variant)
    try:
        code, body = COMMANDS[args.command](cfg)
    except quiver.ParseError as exc:
        err.write("parse error: %s\n" % exc)
        emit(cfg, {"command": args.command, "status": "PARSE_ERROR", "error": str(exc),
                   "line": exc.line, "column": exc.column}, out)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        err.write("error: %s\n" % exc)
        return EXIT_PARSE
    except quiver.InadmissibleError as exc:
        err.write("inadmissible: %s\n" % exc)
        emit(cfg, {"command": args.command, "status": "FAIL", "error": str(exc),
                   "path": exc.path}, out)
        return EXIT_VALIDATION
    except (ConfigError, quiver.PresentationError, PreconditionError) as exc:
        err.write("error: %s\n" % exc)
        return EXIT_VALIDATION
    except modops.UndecidedError as exc:
        err.write("undecided: %s\n" % exc)
        return EXIT_UNDECIDED
    emit(cfg, body, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
