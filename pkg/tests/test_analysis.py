import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from delchk.analysis import (
    FORMULA_EXTENSION_EXHAUSTED, MAP_SEARCH_EXHAUSTED, BisimViolation, ConnectivityCertificate,
    NotApplicable, bisimulation_violations, check_bisimulation, connectivity_certificate,
    cross_check, demonstrate_no_positive_formula, extend_with_decisions, find_failing_world,
    max_bisimulation, projection_relation, solve_by_formula, solve_by_map, task_formula,
    validate_decision_map,
)
from delchk.layered import protocol_model
from delchk.logic import (
    And, AtomRef, CommonKnow, Implies, Know, Not, Or, holds_in_labels, random_formula, truth_set,
)
from delchk.model import decide_atom, input_atom
from delchk.tasks import BUILTINS, builtin, output_model

from conftest import kripke_eval, kripke_relations, random_model, random_spec

EXPECTED = {"eqneg": False, "consensus2": False, "consensus3": False, "const0": True, "free": True}


def brute_solvable(spec, n):
    """Try every decision labeling of the protocol model's vertices."""
    tm = output_model(spec)
    proto = protocol_model(tm.input, n)
    P = proto.model
    doms = [spec.outputs[v.color] for v in P.vertices]
    inputs = [spec.input_facets[x] for x, _ in proto.provenance]
    for labels in product(*doms):
        if all((labels[P.vertex_of(f, "B")], labels[P.vertex_of(f, "W")]) in spec.delta[inputs[f]]
               for f in range(len(P.facets))):
            return True
    return False


def labeling_ok(spec, n, decisions):
    proto = protocol_model(output_model(spec).input, n)
    P = proto.model
    return all(
        (decisions[P.vertex_of(f, "B")], decisions[P.vertex_of(f, "W")])
        in spec.delta[spec.input_facets[x]]
        for f, (x, _) in enumerate(proto.provenance)
    )


@pytest.mark.parametrize("name", sorted(BUILTINS))
@pytest.mark.parametrize("n", [0, 1, 2])
def test_builtin_verdicts(name, n):
    spec = builtin(name)
    tm = output_model(spec)
    cc = cross_check(tm.input, spec, n)
    assert cc.solvable == EXPECTED[name]
    assert cc.by_formula.solvable == EXPECTED[name]
    for v in (cc.by_map, cc.by_formula):
        if v.solvable:
            assert labeling_ok(spec, n, v.decisions)
            assert v.exhaustion is None
        else:
            assert v.failing_facet is not None
    if not cc.solvable:
        assert cc.by_map.exhaustion == MAP_SEARCH_EXHAUSTED
        assert cc.by_formula.exhaustion == FORMULA_EXTENSION_EXHAUSTED


@pytest.mark.parametrize("name", ["eqneg", "consensus2", "const0"])
def test_brute_force_agrees_at_zero_layers(name):
    spec = builtin(name)
    tm = output_model(spec)
    assert solve_by_map(tm.input, tm.actions, 0).solvable == brute_solvable(spec, 0)


def test_const0_witness_is_all_zero():
    spec = builtin("const0")
    tm = output_model(spec)
    v = solve_by_map(tm.input, tm.actions, 0)
    assert set(v.decisions.values()) == {0}
    proto = protocol_model(tm.input, 0)
    assert validate_decision_map(v.decision_map, proto, tm.output) is None


def test_verdict_dict():
    spec = builtin("eqneg")
    tm = output_model(spec)
    d = solve_by_map(tm.input, tm.actions, 1).to_dict()
    assert d["verdict"] == "unsolvable" and d["exhausted"] == MAP_SEARCH_EXHAUSTED
    assert isinstance(d["failing_facet"], int)
    d = solve_by_formula(tm.input, builtin("free"), 0).to_dict()
    assert d["verdict"] == "solvable" and len(d["witness"]) == 6


def test_task_formula_matches_hand_written():
    spec = builtin("eqneg")
    same_inputs = Or([And([AtomRef(input_atom("B", i)), AtomRef(input_atom("W", i))]) for i in range(3)])
    differ = Or([And([AtomRef(decide_atom("B", 0)), AtomRef(decide_atom("W", 1))]),
                 And([AtomRef(decide_atom("B", 1)), AtomRef(decide_atom("W", 0))])])
    agree = Or([And([AtomRef(decide_atom("B", d)), AtomRef(decide_atom("W", d))]) for d in (0, 1)])
    hand = And([Implies(same_inputs, differ), Implies(Not(same_inputs), agree)])
    phi = task_formula(spec)
    count = 0
    for i, j, db, dw in product(range(3), range(3), range(2), range(2)):
        labels = {input_atom("B", i), input_atom("W", j), decide_atom("B", db), decide_atom("W", dw)}
        assert holds_in_labels(phi, labels) == holds_in_labels(hand, labels)
        assert holds_in_labels(phi, labels) == ((i == j) != (db == dw))
        count += 1
    assert count == 36


def test_find_failing_world_on_extension():
    spec = builtin("eqneg")
    tm = output_model(spec)
    P = protocol_model(tm.input, 0).model
    everyone_zero = extend_with_decisions(P, {v: 0 for v in range(len(P.vertices))})
    # facet 0 is input (0, 0), where equal decisions are wrong
    assert find_failing_world(everyone_zero, task_formula(spec)) == 0
    diag = {v.id: (1 if v.color == "W" else 0) for v in P.vertices}
    ext = extend_with_decisions(P, diag)
    assert find_failing_world(ext, task_formula(spec)) == 1


def test_eqneg_projection_is_bisimulation(eqneg):
    out = eqneg.output
    rel = projection_relation(out)
    assert len(rel) == 18
    assert check_bisimulation(rel, eqneg.input, out.model) is None
    assert max_bisimulation(eqneg.input, out.model) == rel


def test_consensus_projection_is_not_bisimulation(consensus2):
    out, inp = consensus2.output, consensus2.input
    rel = projection_relation(out)
    first = check_bisimulation(rel, inp, out.model)
    assert first is not None and first.clause == "ii"
    found = set(bisimulation_violations(rel, inp, out.model))
    # input {B:0, W:1} paired with output (1,1): B cannot match a move to input {B:0, W:0}
    assert BisimViolation((1, 3), "ii", "B", 0) in found
    assert inp.facets[1] == {inp.vertices[0].id, inp.vertices[3].id}
    assert out.provenance[3][0] == 1
    assert consensus2.actions.actions[out.provenance[3][1]].payload == (1, 1)
    assert max_bisimulation(inp, out.model) == frozenset()


def test_label_clause_violation(eqneg):
    bad = {(0, 17)}
    v = check_bisimulation(bad, eqneg.input, eqneg.output.model)
    assert v.clause == "i"


def test_no_positive_formula_eqneg():
    for n in (0, 1):
        rep = demonstrate_no_positive_formula(n, 200, 4, seed=n)
        assert rep.violations == []
        assert rep.pairs_checked == 200 * 2 * 9 * 3 ** n


def test_non_positive_formula_does_distinguish(eqneg):
    # B not knowing W's input holds in the output model but fails once the message arrives
    phi = Not(Know("B", AtomRef(input_atom("W", 0))))
    proto = protocol_model(eqneg.input, 1)
    out = eqneg.output
    tp, to = truth_set(proto.model, phi), truth_set(out.model, phi)
    hits = [(xp, yo) for xp, (x, _) in enumerate(proto.provenance)
            for yo, (y, _) in enumerate(out.provenance) if x == y and yo in to and xp not in tp]
    assert hits


@pytest.mark.parametrize("n", [0, 1, 2])
def test_certificate_eqneg(n):
    cert = connectivity_certificate(builtin("eqneg"), n)
    assert isinstance(cert, ConnectivityCertificate)
    assert cert.distinct_input_connected
    assert cert.protocol_facets == 9 * 3 ** n
    assert len(cert.distinct_input_facets) == 6
    assert [c["forced"] for c in cert.clashes] == [0, 1]
    assert cert.clash_input == 0


@pytest.mark.parametrize("name", ["consensus2", "consensus3", "const0", "free"])
def test_certificate_not_applicable(name):
    assert isinstance(connectivity_certificate(builtin(name), 1), NotApplicable)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 1))
def test_deciders_agree_on_random_specs(seed, n):
    spec = random_spec(random.Random(seed))
    tm = output_model(spec)
    cc = cross_check(tm.input, spec, n)
    if cc.solvable:
        assert labeling_ok(spec, n, cc.by_map.decisions)
        assert labeling_ok(spec, n, cc.by_formula.decisions)
    if n == 0 and len(tm.input.vertices) <= 6:
        assert cc.solvable == brute_solvable(spec, 0)
    cert = connectivity_certificate(spec, n)
    if isinstance(cert, ConnectivityCertificate):
        assert not cc.solvable


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_solvability_is_monotone(seed):
    spec = random_spec(random.Random(seed))
    tm = output_model(spec)
    if solve_by_map(tm.input, tm.actions, 0).solvable:
        assert solve_by_map(tm.input, tm.actions, 1).solvable


def _bisim_formulas(rng, universe, k):
    for _ in range(k):
        phi = random_formula(rng, 4, universe)
        yield CommonKnow({"B", "W"}, phi) if rng.random() < 0.1 else phi


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_truth_invariance_random_pairs(seed):
    rng = random.Random(seed)
    m1 = random_model(rng, values=2, max_per_agent=3)
    m2 = random_model(rng, values=2, max_per_agent=3)
    rel = max_bisimulation(m1, m2)
    assert check_bisimulation(rel, m1, m2) is None
    universe = sorted(m1.atoms | m2.atoms)
    r1, r2 = kripke_relations(m1), kripke_relations(m2)
    for phi in _bisim_formulas(rng, universe, 20):
        t1, t2 = truth_set(m1, phi), truth_set(m2, phi)
        for x, y in rel:
            assert (x in t1) == (y in t2)
            assert (x in t1) == kripke_eval(m1, x, phi, r1)
            assert (y in t2) == kripke_eval(m2, y, phi, r2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2))
def test_knowledge_gain_along_projection(seed, n):
    rng = random.Random(seed)
    m = random_model(rng, values=2, max_per_agent=3, max_facets=6)
    upd = protocol_model(m, n)
    universe = sorted(m.atoms)
    for _ in range(20):
        phi = random_formula(rng, 4, universe, positive_only=True)
        src, tgt = truth_set(upd.model, phi), truth_set(m, phi)
        for f in range(len(upd.model.facets)):
            if upd.projection.image_facet(f) in tgt:
                assert f in src
