"""Solvability deciders and the structural results around them.

Two independent deciders answer whether a task is solvable after ``n``
layers of message passing:

* ``solve_by_map`` searches for a decision map from the protocol model to
  the output model I[T] that commutes with the projections onto I;
* ``solve_by_formula`` searches for a labeling of protocol vertices with one
  decision each under which the task formula holds in every world.

``cross_check`` runs both and insists they agree.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from .layered import AGENTS, protocol_model, solo_vertex
from .logic import (
    And, AtomRef, Formula, Implies, Or, POSITIVE, holds_in_labels,
    is_positive, random_formula, truth_set,
)
from .model import (
    INPUT, Morphism, SimplicialModel, check_morphism, components, decide_atom,
    input_atom, is_connected, neighbors_via, relabel,
)
from .tasks import TaskSpec, build_input_model, build_task_action_model, output_model
from .update import ActionModel, UpdateResult, product_update

MAP_SEARCH_EXHAUSTED = "MapSearchExhausted"
FORMULA_EXTENSION_EXHAUSTED = "FormulaExtensionExhausted"


class InvariantViolation(RuntimeError):
    """An internal consistency check failed; the implementation is wrong."""


@dataclass
class Verdict:
    solvable: bool
    method: str
    layers: int
    decision_map: Morphism | None = None
    # protocol vertex -> decided value, for solvable verdicts
    decisions: dict | None = None
    failing_facet: int | None = None
    # partial assignment at the deepest dead end, as (vertex, value) pairs
    trace: list = field(default_factory=list)
    nodes: int = 0

    @property
    def status(self) -> str:
        return "solvable" if self.solvable else "unsolvable"

    @property
    def exhaustion(self) -> str | None:
        if self.solvable:
            return None
        return MAP_SEARCH_EXHAUSTED if self.method == "map" else FORMULA_EXTENSION_EXHAUSTED

    def to_dict(self) -> dict:
        d = {"verdict": self.status, "method": self.method, "layers": self.layers, "nodes": self.nodes}
        if self.solvable:
            d["witness"] = [[v, x] for v, x in sorted(self.decisions.items())]
        else:
            d["exhausted"] = self.exhaustion
            d["failing_facet"] = self.failing_facet
            d["trace"] = [[v, x] for v, x in self.trace]
        return d


# -- shared search -------------------------------------------------------------


def search_order(m: SimplicialModel) -> list[list[int]]:
    """Vertices per connected component, in BFS order from the lowest facet."""
    out = []
    for comp in components(m):
        seen = []
        have = set()
        for f in comp:
            for v in sorted(m.facets[f], key=lambda v: m.agent_names.index(m.vertices[v].color)):
                if v not in have:
                    have.add(v)
                    seen.append(v)
        out.append(seen)
    return out


@dataclass
class _Stats:
    nodes: int = 0
    depth: int = -1
    facet: int | None = None
    trace: list = field(default_factory=list)


def _backtrack(order, domains, check, stats):
    """Chronological backtracking; ``check(u, assign)`` returns a violated facet or None."""
    assign = {}
    idx = [0] * len(order)
    k = 0
    while 0 <= k < len(order):
        u = order[k]
        if idx[k] < len(domains[u]):
            assign[u] = domains[u][idx[k]]
            idx[k] += 1
            stats.nodes += 1
            bad = check(u, assign)
            if bad is None:
                k += 1
                if k < len(order):
                    idx[k] = 0
            elif k > stats.depth:
                stats.depth = k
                stats.facet = bad
                stats.trace = [(v, assign[v]) for v in order[: k + 1]]
        else:
            assign.pop(u, None)
            if not domains[u] and k > stats.depth:
                stats.depth = k
                stats.facet = None
                stats.trace = [(v, assign[v]) for v in order[:k]]
            k -= 1
    return dict(assign) if k == len(order) else None


def _solve_components(m, domains, check, stats):
    full = {}
    for order in search_order(m):
        stats.depth, stats.facet, stats.trace = -1, None, []
        part = _backtrack(order, domains, check, stats)
        if part is None:
            return None
        full.update(part)
    return full


# -- decision map search ---------------------------------------------------------


def _decision_value(target: UpdateResult, w: int) -> object:
    """Decision carried by vertex ``w`` of I[T]."""
    am = target.action_model
    color = target.model.vertices[w].color
    t = target.vertex_key[w][1]
    return am.actions[t].payload[am.base.agent_names.index(color)]


def validate_decision_map(delta: Morphism, proto: UpdateResult, target: UpdateResult) -> str | None:
    """None if ``delta`` is a morphism with pi o delta = pi, else the problem."""
    ok, why = check_morphism(delta)
    if not ok:
        return why
    for v, w in enumerate(delta.mapping):
        if target.projection(w) != proto.projection(v):
            return f"vertex {v}: projection is not preserved"
    return None


def solve_by_map(input_model: SimplicialModel, task_actions: ActionModel, n: int) -> Verdict:
    """Exhaustive search for a decision map I[MP_n] -> I[T] commuting with pi.

    A protocol vertex may only go to output vertices over the same input
    vertex, so commutation holds by construction; every partial facet image
    must stay a face of some output facet.
    """
    proto = protocol_model(input_model, n)
    target = product_update(input_model, task_actions)
    P, T = proto.model, target.model
    over = defaultdict(list)
    for w in range(len(T.vertices)):
        over[target.projection(w)].append(w)
    domains = {
        u: sorted(
            (w for w in over[proto.projection(u)] if T.vertices[w].color == P.vertices[u].color),
            key=lambda w: (_decision_value(target, w), w),
        )
        for u in range(len(P.vertices))
    }
    faces = set()
    for f in T.facets:
        for r in range(1, len(f) + 1):
            faces.update(frozenset(c) for c in combinations(f, r))

    def check(u, assign):
        for f in P.incidence[u]:
            img = frozenset(assign[x] for x in P.facets[f] if x in assign)
            if img not in faces:
                return f
        return None

    stats = _Stats()
    sol = _solve_components(P, domains, check, stats)
    if sol is None:
        return Verdict(False, "map", n, failing_facet=stats.facet,
                       trace=[(v, _decision_value(target, w)) for v, w in stats.trace],
                       nodes=stats.nodes)
    delta = Morphism.from_dict(P, T, sol)
    problem = validate_decision_map(delta, proto, target)
    if problem:
        raise InvariantViolation(f"map search produced an invalid decision map: {problem}")
    decisions = {u: _decision_value(target, w) for u, w in sol.items()}
    return Verdict(True, "map", n, delta, decisions, nodes=stats.nodes)


# -- logical extension ---------------------------------------------------------


def task_formula(spec: TaskSpec) -> Formula:
    """Conjunction over admitted inputs of: inputs imply some allowed joint decision."""
    a, b = spec.agents
    clauses = []
    for i, j in spec.input_facets:
        lhs = And([AtomRef(input_atom(a, i)), AtomRef(input_atom(b, j))])
        rhs = Or([And([AtomRef(decide_atom(a, da)), AtomRef(decide_atom(b, db))])
                  for da, db in spec.delta[(i, j)]])
        clauses.append(Implies(lhs, rhs))
    return And(clauses)


def extend_with_decisions(m: SimplicialModel, decisions: dict) -> SimplicialModel:
    """Copy of ``m`` where vertex ``v`` also carries ``decide(color, decisions[v])``."""
    extra = [{decide_atom(v.color, decisions[v.id])} if v.id in decisions else set()
             for v in m.vertices]
    return relabel(m, extra, name=m.name + "^")


def find_failing_world(model: SimplicialModel, phi: Formula) -> int | None:
    """Lowest facet id where ``phi`` is false, or None."""
    good = truth_set(model, phi)
    for f in range(len(model.facets)):
        if f not in good:
            return f
    return None


def solve_by_formula(input_model: SimplicialModel, spec: TaskSpec, n: int) -> Verdict:
    """Search for one decision per protocol vertex making the task formula valid.

    A facet is checked as soon as all its vertices have decisions.  On
    success the decision map induced by the labeling is built and validated.
    """
    phi = task_formula(spec)
    proto = protocol_model(input_model, n)
    P = proto.model
    domains = {u: [decide_atom(P.vertices[u].color, d) for d in spec.outputs[P.vertices[u].color]]
               for u in range(len(P.vertices))}
    base_labels = [P.facet_label(f) for f in range(len(P.facets))]

    def check(u, assign):
        for f in P.incidence[u]:
            vs = P.facets[f]
            if all(x in assign for x in vs):
                if not holds_in_labels(phi, base_labels[f] | {assign[x] for x in vs}):
                    return f
        return None

    stats = _Stats()
    sol = _solve_components(P, domains, check, stats)
    if sol is None:
        return Verdict(False, "formula", n, failing_facet=stats.facet,
                       trace=[(v, a.value) for v, a in stats.trace], nodes=stats.nodes)
    decisions = {u: a.value for u, a in sol.items()}
    ext = extend_with_decisions(P, decisions)
    if find_failing_world(ext, phi) is not None:
        raise InvariantViolation("extension found by search does not validate the task formula")
    target = product_update(input_model, build_task_action_model(spec, input_model))
    delta = induced_decision_map(proto, target, decisions)
    problem = validate_decision_map(delta, proto, target)
    if problem:
        raise InvariantViolation(f"decision map induced by the extension is invalid: {problem}")
    return Verdict(True, "formula", n, delta, decisions, nodes=stats.nodes)


def induced_decision_map(proto: UpdateResult, target: UpdateResult, decisions: dict) -> Morphism:
    """Send protocol vertex u to the output vertex over pi(u) with u's decision."""
    T = target.model
    where = {}
    for w in range(len(T.vertices)):
        where[target.projection(w), _decision_value(target, w)] = w
    mapping = {}
    for u in range(len(proto.model.vertices)):
        key = (proto.projection(u), decisions[u])
        if key not in where:
            raise InvariantViolation(f"no output vertex over input vertex {key[0]} deciding {key[1]}")
        mapping[u] = where[key]
    return Morphism.from_dict(proto.model, T, mapping)


@dataclass
class CrossCheck:
    layers: int
    by_map: Verdict
    by_formula: Verdict

    @property
    def solvable(self):
        return self.by_map.solvable


def cross_check(input_model: SimplicialModel, spec: TaskSpec, n: int) -> CrossCheck:
    """Run both deciders; raise InvariantViolation if they disagree."""
    am = build_task_action_model(spec, input_model)
    vm = solve_by_map(input_model, am, n)
    vf = solve_by_formula(input_model, spec, n)
    if vm.solvable != vf.solvable:
        raise InvariantViolation(
            f"deciders disagree at n={n}: map says {vm.status}, formula says {vf.status}")
    return CrossCheck(n, vm, vf)


# -- bisimulation --------------------------------------------------------------


def _restricted_labels(m, kinds):
    return [frozenset(a for a in m.facet_label(f) if a.kind in kinds) for f in range(len(m.facets))]


def max_bisimulation(m1: SimplicialModel, m2: SimplicialModel, atom_kinds=(INPUT,)) -> frozenset:
    """Greatest bisimulation, labels compared on ``atom_kinds`` only."""
    l1, l2 = _restricted_labels(m1, atom_kinds), _restricted_labels(m2, atom_kinds)
    rel = {(x, y) for x in range(len(m1.facets)) for y in range(len(m2.facets)) if l1[x] == l2[y]}
    agents = m1.agent_names
    n1 = {(x, a): neighbors_via(m1, x, a) for x in range(len(m1.facets)) for a in agents}
    n2 = {(y, a): neighbors_via(m2, y, a) for y in range(len(m2.facets)) for a in agents}
    changed = True
    while changed:
        changed = False
        for x, y in sorted(rel):
            ok = all(
                all(any((z, w) in rel for w in n2[y, a]) for z in n1[x, a])
                and all(any((z, w) in rel for z in n1[x, a]) for w in n2[y, a])
                for a in agents
            )
            if not ok:
                rel.discard((x, y))
                changed = True
    return frozenset(rel)


@dataclass(frozen=True)
class BisimViolation:
    pair: tuple
    clause: str
    agent: str | None = None
    # the facet Y (forth) or Y' (back) that has no partner
    witness: int | None = None


def bisimulation_violations(rel, m1, m2, atom_kinds=(INPUT,)):
    """Yield every violation of the three bisimulation clauses, pair by pair."""
    rel = set(rel)
    l1, l2 = _restricted_labels(m1, atom_kinds), _restricted_labels(m2, atom_kinds)
    agents = m1.agent_names
    for x, y in sorted(rel):
        if l1[x] != l2[y]:
            yield BisimViolation((x, y), "i")
        for a in agents:
            for z in sorted(neighbors_via(m1, x, a)):
                if not any((z, w) in rel for w in neighbors_via(m2, y, a)):
                    yield BisimViolation((x, y), "ii", a, z)
        for a in agents:
            for w in sorted(neighbors_via(m2, y, a)):
                if not any((z, w) in rel for z in neighbors_via(m1, x, a)):
                    yield BisimViolation((x, y), "iii", a, w)


def check_bisimulation(rel, m1, m2, atom_kinds=(INPUT,)) -> BisimViolation | None:
    """First violated clause, or None when ``rel`` is a bisimulation."""
    return next(bisimulation_violations(rel, m1, m2, atom_kinds), None)


def projection_relation(out: UpdateResult) -> frozenset:
    """{(pi(X), X)} for the facets X of a product update."""
    return frozenset((x, f) for f, (x, _) in enumerate(out.provenance))


# -- no positive formula ---------------------------------------------------------


@dataclass
class NoFormulaReport:
    layers: int
    trials: int
    pairs_checked: int = 0
    violations: list = field(default_factory=list)


def demonstrate_no_positive_formula(n: int, trials: int, depth: int, seed=0,
                                    spec: TaskSpec | None = None) -> NoFormulaReport:
    """Check that no positive formula true at Y in O is false at X in I[MP_n] when pi(X) = pi(Y).

    Formulas use input atoms only; ``depth`` 0 restricts them to literals.
    """
    from .tasks import equality_negation

    spec = spec or equality_negation()
    tm = output_model(spec)
    proto = protocol_model(tm.input, n)
    out = tm.output
    universe = sorted(tm.input.atoms)
    rng = random.Random(seed)
    by_input = defaultdict(list)
    for f, (x, _) in enumerate(out.provenance):
        by_input[x].append(f)
    pairs = [(xp, yo) for xp, (x, _) in enumerate(proto.provenance) for yo in by_input[x]]
    report = NoFormulaReport(n, trials)
    for _ in range(trials):
        phi = random_formula(rng, max(depth, 1), universe, positive_only=True)
        if is_positive(phi) != POSITIVE:
            raise InvariantViolation(f"generator produced a non-positive formula {phi}")
        tp, to = truth_set(proto.model, phi), truth_set(out.model, phi)
        for xp, yo in pairs:
            report.pairs_checked += 1
            if yo in to and xp not in tp:
                report.violations.append((str(phi), xp, yo))
    return report


# -- connectivity certificate ----------------------------------------------------


@dataclass
class NotApplicable:
    reason: str


@dataclass
class ConnectivityCertificate:
    """Certificate that no decision map exists, by a connectivity argument.

    Distinct-input executions form a connected subcomplex whose allowed
    outputs all have equal decisions; equal-decision output edges fall apart
    into one component per value, so all of it decides one value d.  Then
    both solo vertices with input ``clash_input`` decide d, while the
    execution path joining them must stay among output edges with different
    decisions, where (B, d) and (W, d) are never connected.
    """

    layers: int
    distinct_input_facets: list
    protocol_facets: int
    distinct_input_connected: bool
    same_decision_components: list
    differing_decision_components: list
    clash_input: object
    solo_vertices: dict
    # for each forced value d: the solo decisions implied and why they clash
    clashes: list


def _output_components(pairs):
    """Components of the decision-only output graph on the given (d_B, d_W) edges."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for db, dw in pairs:
        parent[find(("B", db))] = find(("W", dw))
    comps = defaultdict(set)
    for x in list(parent):
        comps[find(x)].add(x)
    return sorted((sorted(c) for c in comps.values()), key=lambda c: str(c))


def connectivity_certificate(spec: TaskSpec, n: int):
    """Certificate of unsolvability after ``n`` layers, or NotApplicable."""
    a, b = spec.agents
    if (a, b) != AGENTS:
        return NotApplicable("needs agents B and W")
    distinct = [f for f in spec.input_facets if f[0] != f[1]]
    same = [f for f in spec.input_facets if f[0] == f[1]]
    if not distinct:
        return NotApplicable("no distinct-input facets")
    if any(db != dw for f in distinct for db, dw in spec.delta[f]):
        return NotApplicable("some distinct-input facet allows different decisions")
    all_out = {o for f in spec.input_facets for o in spec.delta[f]}
    same_pairs = sorted(o for o in all_out if o[0] == o[1])
    same_comps = _output_components(same_pairs)
    if len(same_comps) < 2:
        return NotApplicable("equal-decision output subgraph is connected")
    diff_pairs = sorted(o for o in all_out if o[0] != o[1])
    diff_comps = _output_components(diff_pairs)

    def linked(d):
        return any(("B", d) in c and ("W", d) in c for c in diff_comps)

    inp = build_input_model(spec)
    touched_b = {f[0] for f in distinct}
    touched_w = {f[1] for f in distinct}
    clash_input = None
    for i, j in same:
        if (i in touched_b and j in touched_w
                and all(db != dw for db, dw in spec.delta[(i, j)])
                and not any(linked(d) for d, _ in same_pairs)):
            clash_input = i
            break
    if clash_input is None:
        return NotApplicable("no equal-input facet forces the solo decisions apart")

    proto = protocol_model(inp, n)
    dist_ids = [spec.input_facets.index(f) for f in distinct]
    dist_set = set(dist_ids)
    block = [f for f, (x, _) in enumerate(proto.provenance) if x in dist_set]
    connected = is_connected(proto.model, block)
    if not connected:
        return NotApplicable("distinct-input protocol subcomplex is disconnected")

    solos = {}
    for ag, idx in ((a, 0), (b, 1)):
        vs = {solo_vertex(proto, x, ag) for x, f in enumerate(spec.input_facets) if f[idx] == clash_input}
        if len(vs) != 1:
            raise InvariantViolation(f"solo execution of {ag} with input {clash_input} is not unique")
        solos[ag] = vs.pop()
    same_id = spec.input_facets.index((clash_input, clash_input))
    if any(solo_vertex(proto, same_id, ag) != solos[ag] for ag in (a, b)):
        raise InvariantViolation("equal-input block does not end at the solo vertices")

    clashes = []
    for comp in same_comps:
        ds = sorted({d for _, d in comp})
        for d in ds:
            clashes.append({
                "forced": d,
                "solo": {a: [a, d], b: [b, d]},
                "reason": f"input ({clash_input},{clash_input}) needs different decisions "
                          f"but ({a},{d}) and ({b},{d}) lie in no common differing-decision component",
            })
    return ConnectivityCertificate(
        n, distinct, len(proto.model.facets), connected,
        same_comps, diff_comps, clash_input, solos, clashes,
    )
