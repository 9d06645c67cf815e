import json

import pytest

from stratkit import modops, quiver
from stratkit.algcore import cartan_matrix
from stratkit.quiver import (parse_presentation, build_algebra, ParseError, SemanticError,
                             InadmissibleError, PresentationError, module_from_arrows,
                             loewy_diagram)

import oracles
from helpers import load, fixture_path, ALL_FIXTURES


def doc(**kw):
    base = {"field": {"kind": "Fp", "p": 32003}, "vertices": ["1"], "arrows": [],
            "relations": [], "nilpotency_bound": 2}
    base.update(kw)
    return json.dumps(base, indent=2)


class TestParse:
    def test_a3(self):
        p = load("a3").pres
        assert len(p.quiver.vertices) == 3 and len(p.quiver.arrows) == 2

    def test_loop_chain(self):
        p = load("loop-chain").pres
        assert len(p.relations) == 3 and p.nilpotency_bound == 4

    def test_non_parallel_relation(self):
        text = doc(vertices=["1", "2"], arrows=[{"name": "x", "from": "1", "to": "1"},
                                                 {"name": "y", "from": "1", "to": "2"}],
                   relations=[[{"path": ["x", "x"], "coeff": "1"},
                               {"path": ["y", "x"], "coeff": "1"}]], nilpotency_bound=3)
        with pytest.raises(SemanticError) as exc:
            parse_presentation(text)
        assert exc.value.line is not None

    def test_unknown_arrow_location(self):
        with open(fixture_path("broken-relation")) as fh:
            text = fh.read()
        with pytest.raises(ParseError) as exc:
            parse_presentation(text)
        assert exc.value.line == 9 and "z" in str(exc.value)

    def test_malformed_json(self):
        with pytest.raises(ParseError) as exc:
            parse_presentation('{"vertices": [1,\n')
        assert exc.value.line is not None

    def test_unknown_vertex(self):
        text = doc(arrows=[{"name": "x", "from": "1", "to": "9"}])
        with pytest.raises(ParseError):
            parse_presentation(text)

    def test_rational_coefficients(self):
        text = doc(field={"kind": "Q"}, arrows=[{"name": "x", "from": "1", "to": "1"}],
                   relations=[[{"path": ["x", "x"], "coeff": "1/2"}]])
        alg = build_algebra(parse_presentation(text))
        assert alg.dim == 2 and alg.field.kind == "Q"


class TestBuild:
    def test_a3(self):
        a = load("a3").alg
        assert a.dim == 6
        assert sorted(a.basis_labels) == sorted(["e1", "e2", "e3", "a", "b", "ba"])

    def test_loop_chain_dimension(self):
        fx = load("loop-chain")
        assert oracles.path_algebra_dim(fx.pres) == 7
        assert fx.alg.dim == 7

    def test_dual_numbers(self):
        assert load("dual-numbers").alg.dim == 2

    def test_inadmissible_names_path(self):
        pres = quiver.load_presentation(fixture_path("inadmissible"))
        with pytest.raises(InadmissibleError) as exc:
            build_algebra(pres)
        assert exc.value.path == "xx"

    def test_length_one_relation_rejected(self):
        text = doc(arrows=[{"name": "x", "from": "1", "to": "1"}],
                   relations=[[{"path": ["x"], "coeff": "1"}]])
        with pytest.raises(InadmissibleError):
            build_algebra(parse_presentation(text))

    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_dimension_oracle(self, name):
        fx = load(name)
        assert fx.alg.dim == oracles.path_algebra_dim(fx.pres)
        assert sum(map(sum, cartan_matrix(fx.alg))) == fx.alg.dim


class TestModules:
    def test_a3_projectives(self):
        a = load("a3").alg
        assert modops.projective_module(a, 0).dims == (1, 1, 1)
        p3 = modops.projective_module(a, 2)
        assert modops.is_isomorphic(p3, modops.simple_module(a, 2))

    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_injective_dims_are_cartan_rows(self, name):
        a = load(name).alg
        c = cartan_matrix(a)
        for i in range(a.nvert):
            assert list(modops.injective_module(a, i).dims) == c[i]
            t, _, _ = modops.top(modops.projective_module(a, i))
            assert modops.is_isomorphic(t, modops.simple_module(a, i))

    def test_relation_violation_rejected(self):
        a = load("loop-chain").alg
        with pytest.raises(PresentationError):
            module_from_arrows(a, {"2": 1, "1": 1}, {"a": [[1]], "b": [[1]]}, "bad")

    def test_shape_rejected(self):
        a = load("a3").alg
        with pytest.raises(PresentationError):
            module_from_arrows(a, {"1": 1, "2": 1}, {"a": [[1, 0]]}, "bad")

    def test_loewy(self):
        a = load("a3").alg
        assert loewy_diagram(modops.simple_module(a, 0)) == "1"
        assert loewy_diagram(modops.projective_module(a, 0)) == "1 / 2 / 3"
        assert loewy_diagram(load("loop-chain").mods["Q1"]) == "2 / 2"
        assert loewy_diagram(modops.zero_module(a)) == "0"

    def test_loop_chain_diagrams(self):
        fx = load("loop-chain")
        a = fx.alg
        ps = [loewy_diagram(modops.projective_module(a, i)) for i in range(3)]
        assert ps == ["1", "2 / 1 2", "3 / 2 / 1"]
        assert [loewy_diagram(fx.mods[n]) for n in ("Q1", "Q2", "Q3")] == \
            fx.pres.raw["expected"]["q_loewy"]

    @pytest.mark.parametrize("name", ["a3", "a3-twisted", "loop-chain"])
    def test_layers_match_arrow_oracle(self, name):
        fx = load(name)
        mods = list(fx.mods.values()) + [modops.projective_module(fx.alg, i)
                                          for i in range(fx.alg.nvert)]
        for m in mods:
            mats = [m.action(fx.alg.meta["arrows"][n]) for n, _, _ in fx.pres.quiver.arrows]
            want = oracles.arrow_radical_layers(m, mats)
            assert [tuple(x) for x in modops.radical_layers(m)] == want

    def test_module_dump_round_trip(self):
        fx = load("loop-chain")
        m = fx.mods["Q3"]
        d = quiver.module_dump(m)
        again = module_from_arrows(fx.alg, d["dims"], d["arrow_actions"], "again")
        assert modops.is_isomorphic(m, again)
        assert d["loewy"] == "2 / 1 2"
