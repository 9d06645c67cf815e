import functools
from dataclasses import dataclass
from importlib import resources

from stratkit import quiver, strat, equivlab

FIXTURES = resources.files("stratkit") / "fixtures"


def fixture_path(name):
    return str(FIXTURES / ("%s.json" % name))


@dataclass
class Fixture:
    name: str
    pres: object
    alg: object
    order: object
    mods: dict


@functools.lru_cache(maxsize=None)
def load(name):
    pres = quiver.load_presentation(fixture_path(name))
    alg = quiver.build_algebra(pres)
    order = quiver.algebra_order(pres, alg)
    return Fixture(name, pres, alg, order, quiver.load_modules(pres, alg))


@functools.lru_cache(maxsize=None)
def system(name):
    """(fixture, psi, q) for the sample systems and the canonical A3 system."""
    if name == "canonical-a3":
        fx = load("a3")
        psi = strat.proper_costandard_modules(fx.alg, fx.order)
        q = equivlab.characteristic_tilting(fx.alg, fx.order).family
        return fx, psi, q
    fx = load(name)
    entry = fx.pres.systems[name]
    labels = fx.alg.vertex_labels
    psi = strat.ModuleFamily([fx.mods[n] for n in entry["psi"]], fx.order, "psi", labels)
    q = strat.ModuleFamily([fx.mods[n] for n in entry["q"]], fx.order, "q", labels)
    return fx, psi, q


@functools.lru_cache(maxsize=None)
def context(name):
    fx, psi, q = system(name)
    return equivlab.make_context(fx.alg, q, psi)


SAMPLE_SYSTEMS = ["a3-twisted", "loop-chain"]
ALL_FIXTURES = ["a3", "a3-twisted", "loop-chain", "semisimple", "dual-numbers"]


class Counter:
    """Counts assertions made inside a property suite."""

    def __init__(self):
        self.n = 0

    def check(self, cond, msg=""):
        assert cond, msg
        self.n += 1
