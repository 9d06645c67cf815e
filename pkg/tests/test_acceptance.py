"""Acceptance criteria. Each test records a PASS/FAIL line shown in the terminal summary."""
import io
import itertools
import json
import time

import pytest

from stratkit import cli, equivlab as eq, modops, quiver, strat
from stratkit.algcore import gabriel_quiver
from stratkit.modops import Decision, decompose, is_isomorphic, regular_module

from conftest import record
from helpers import ALL_FIXTURES, SAMPLE_SYSTEMS, context, fixture_path, load, system
from test_properties import SUITES, MIN, pool


def timed(criterion, limit, fn, note=""):
    t0 = time.perf_counter()
    ok = False
    try:
        ok = bool(fn())
    finally:
        dt = time.perf_counter() - t0
        record(criterion, ok and dt < limit, dt, note)
    assert ok
    assert dt < limit, dt


def cli_json(*args):
    out = io.StringIO()
    code = cli.main(list(args) + ["--format", "json"], out, io.StringIO())
    return code, json.loads(out.getvalue())


def test_criterion_1_proper_costandard():
    def go():
        code, body = cli_json("families", "--input", fixture_path("a3"))
        return code == 0 and [e["loewy"] for e in body["proper-costandard"]] == \
            ["1", "1 / 2", "1 / 2 / 3"]
    timed(1, 1.0, go)


@pytest.mark.parametrize("name", SAMPLE_SYSTEMS)
def test_criterion_2_system_verification(name):
    def go():
        code, body = cli_json("check-system", "--input", fixture_path(name), "--system", name)
        axioms = body["axioms"]
        groups = {i["id"].split("[")[0] for i in axioms["items"]}
        return code == 0 and axioms["status"] == "PASS" and {"a", "b", "c", "d"} <= groups
    timed(2, 5.0, go)


def test_criterion_3_equivalence():
    def go():
        ok = True
        for name in SAMPLE_SYSTEMS:
            _, psi, q = system(name)
            rep = eq.verify_equivalence(context(name), psi, q)
            for i in psi.labels:
                ok &= rep.status_of("c[%s]" % i) == "PASS"
            ok &= rep.status_of("d") == "PASS"
            ok &= bool(strat.is_standardly_stratified(context(name).gamma_op,
                                                      psi.order.reversed()))
        gop = context("a3-twisted").gamma_op
        ok &= gop.dim == 5
        ok &= sorted((s, t) for _, s, t in gabriel_quiver(gop).arrows) == [("1", "3"), ("3", "2")]
        two, one = gop.vertex_index("2"), gop.vertex_index("1")
        ok &= gop.corner(two, one, gop.radical_power(2)).shape[1] == 0
        regs = sorted(quiver.loewy_diagram(m) for m in decompose(regular_module(gop)).modules())
        ok &= regs == ["1 / 3", "2", "3 / 2"]
        return ok
    timed(3, 10.0, go)


def test_criterion_4_negative_results():
    def go():
        ok = True
        for name in SAMPLE_SYSTEMS:
            fx, psi, q = system(name)
            nb = strat.proper_costandard_modules(fx.alg, fx.order)
            ok &= any(is_isomorphic(nb[i], psi[i]) is Decision.FALSE for i in range(3))
            ok &= eq.check_coresolving_conditions(context(name), psi, q).status == "FAIL"
        _, psi, q = system("canonical-a3")
        rep = eq.check_coresolving_conditions(context("canonical-a3"), psi, q)
        ok &= all(it.status in ("PASS", "UNDECIDED") for it in rep.items)
        return ok
    timed(4, 10.0, go)


@pytest.mark.xfail(strict=True, reason="the loop-chain algebra is standardly stratified "
                                       "for the natural order")
def test_criterion_4_loop_chain_not_standardly_stratified():
    fx = load("loop-chain")
    t0 = time.perf_counter()
    res = bool(strat.is_standardly_stratified(fx.alg, fx.order))
    record(4, not res, time.perf_counter() - t0,
           "loop-chain with the natural order is standardly stratified (every P(i) = Delta(i))")
    assert not res


def test_criterion_5_characteristic_tilting():
    def go():
        ctx = context("loop-chain")
        _, psi, _ = system("loop-chain")
        t5 = eq.characteristic_tilting(ctx.gamma_op, psi.order.reversed())
        ok = t5.ok and [m.dims for m in t5.modules] == [(2, 0, 2), (0, 1, 1), (0, 0, 1)]
        qimg = eq.summands_of(ctx.q_over_gamma_op())[0]
        ok &= not eq.iso_classes_match(t5.modules, qimg)
        tsum = modops.direct_sum(t5.modules).module
        ok &= is_isomorphic(tsum, modops.direct_sum(qimg).module) is Decision.FALSE
        ctx4 = context("a3-twisted")
        _, psi4, _ = system("a3-twisted")
        t4 = eq.characteristic_tilting(ctx4.gamma_op, psi4.order.reversed())
        q4 = eq.summands_of(ctx4.q_over_gamma_op())[0]
        ok &= t4.ok and len(q4) == len(t4.modules) and eq.iso_classes_match(t4.modules, q4)
        return ok
    timed(5, 10.0, go)


def test_criterion_6_property_suites():
    def go():
        counts = {k: f() for k, f in SUITES.items()}
        return all(counts[k] >= MIN for k in counts)
    timed(6, 60.0, go)


def test_criterion_7_oracle_equivalence():
    def go():
        ok = True
        for name in ALL_FIXTURES:
            mods = pool(name)
            for m, n in itertools.product(mods, repeat=2):
                ok &= modops.ext1_dim(m, n) == modops.ext1_dim_presentation(m, n)
        for name in ["a3-twisted", "loop-chain", "canonical-a3"]:
            _, psi, q = system(name)
            for x in eq.fpsi_candidates(psi, q, limit=24):
                sol = strat.dimvector_solution(x, psi)
                if sol is not None:
                    ok &= strat.multiplicity(x, psi) == sol
        return ok
    timed(7, 30.0, go)
