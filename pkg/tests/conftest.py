import itertools
import random

import pytest

from delchk.logic import And, AtomRef, CommonKnow, Implies, Know, Not, Or
from delchk.model import SimplicialModel, input_atom
from delchk.tasks import build_input_model, builtin, make_task, output_model
from delchk.update import MP, ActionModel

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def eqneg():
    return output_model(builtin("eqneg"))


@pytest.fixture(scope="session")
def consensus2():
    return output_model(builtin("consensus2"))


@pytest.fixture
def single_edge():
    return build_input_model(make_task([0], [0], lambda i, j: [(0, 0)]))


@pytest.fixture
def two_edges():
    """Inputs B in {i=0, k=2}, W = j = 1: edges sigma=(0,1) and tau=(2,1) sharing W."""
    return build_input_model(make_task({"B": [0, 2], "W": [1]}, [0], lambda i, j: [(0, 0)]))


# -- oracles -----------------------------------------------------------------


def closure_connected(m, subset):
    """Connectivity by boolean transitive closure of the facet adjacency matrix."""
    fs = sorted(subset)
    if len(fs) <= 1:
        return True
    n = len(fs)
    reach = [[bool(m.facets[fs[i]] & m.facets[fs[j]]) or i == j for j in range(n)] for i in range(n)]
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return all(reach[0])


def kripke_eval(m, x, phi, _rel=None):
    """Evaluate through an explicit per-agent indistinguishability relation on facets."""
    if _rel is None:
        _rel = {}
        for a in m.agent_names:
            _rel[a] = [[any(m.vertices[v].color == a for v in (m.facets[i] & m.facets[j]))
                        for j in range(len(m.facets))] for i in range(len(m.facets))]
    if isinstance(phi, AtomRef):
        return any(phi.atom in m.vertices[v].label for v in m.facets[x])
    if isinstance(phi, Not):
        return not kripke_eval(m, x, phi.sub, _rel)
    if isinstance(phi, And):
        return all(kripke_eval(m, x, p, _rel) for p in phi.items)
    if isinstance(phi, Or):
        return any(kripke_eval(m, x, p, _rel) for p in phi.items)
    if isinstance(phi, Implies):
        return not kripke_eval(m, x, phi.lhs, _rel) or kripke_eval(m, x, phi.rhs, _rel)
    if isinstance(phi, Know):
        return all(kripke_eval(m, y, phi.sub, _rel) for y in range(len(m.facets)) if _rel[phi.agent][x][y])
    if isinstance(phi, CommonKnow):
        seen, stack = {x}, [x]
        while stack:
            z = stack.pop()
            for a in phi.agents:
                for y in range(len(m.facets)):
                    if _rel[a][z][y] and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return all(kripke_eval(m, y, phi.sub, _rel) for y in seen)
    raise TypeError(phi)


def kripke_relations(m):
    return {a: [[any(m.vertices[v].color == a for v in (m.facets[i] & m.facets[j]))
                 for j in range(len(m.facets))] for i in range(len(m.facets))]
            for a in m.agent_names}


# -- random structures ---------------------------------------------------------


def random_model(rng, agents=("B", "W"), max_per_agent=4, max_facets=12, values=3):
    """Random pure chromatic model; each vertex carries one input atom."""
    verts = []
    by_agent = {}
    for a in agents:
        k = rng.randint(1, max_per_agent)
        by_agent[a] = []
        for _ in range(k):
            by_agent[a].append(len(verts))
            verts.append((a, {input_atom(a, rng.randrange(values))}))
    facets = set()
    for _ in range(rng.randint(1, max_facets)):
        facets.add(frozenset(rng.choice(by_agent[a]) for a in agents))
    facets = sorted(facets, key=sorted)
    used = sorted(set().union(*facets))
    renum = {v: i for i, v in enumerate(used)}
    return SimplicialModel.build(agents, [verts[v] for v in used],
                                 [{renum[v] for v in f} for f in facets])


def random_action_model(rng, base, max_actions=4, classes=2):
    k = rng.randint(1, max_actions)
    payloads = [(f"t{i}", i) for i in range(k)]
    # distinct class tuples keep the action model proper
    combos = list(itertools.product(range(classes), repeat=len(base.agent_names)))
    picked = rng.sample(combos, min(k, len(combos)))
    payloads = payloads[:len(picked)]
    keys = {(a, p): picked[i][n] for i, p in enumerate(payloads) for n, a in enumerate(base.agent_names)}
    nf = len(base.facets)
    pre = [set(rng.sample(range(nf), rng.randint(1, nf))) for _ in payloads]
    return ActionModel.build(base, MP, payloads, lambda a, p: keys[a, p], pre)


def random_spec(rng):
    bvals = list(range(rng.randint(1, 3)))
    wvals = list(range(rng.randint(1, 3)))
    outs = list(range(rng.randint(1, 2) + 1))
    allpairs = [(i, j) for i in bvals for j in wvals]
    facets = rng.sample(allpairs, rng.randint(1, len(allpairs)))
    outpairs = [(a, b) for a in outs for b in outs]
    table = {f: rng.sample(outpairs, rng.randint(1, min(3, len(outpairs)))) for f in facets}
    return make_task({"B": bvals, "W": wvals}, outs, lambda i, j: table[i, j], input_facets=facets)


@pytest.fixture
def rng():
    return random.Random(12345)
