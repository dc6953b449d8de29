import random

import pytest
from hypothesis import given, settings, strategies as st

from delchk.layered import build_mp
from delchk.model import CLASS, DECIDE, canonical_text, check_morphism, validate_model
from delchk.tasks import build_input_model, build_task_action_model, builtin
from delchk.update import (
    MP, TASK, ActionModel, EmptyUpdate, extended_product_update, is_proper, product_update,
)

from conftest import random_action_model, random_model


def test_eqneg_output_counts(eqneg):
    out = eqneg.output
    assert len(out.model.facets) == 18
    assert len(out.model.vertices) == 12
    assert validate_model(out.model) == []
    assert check_morphism(out.projection)[0]
    # every input facet admits exactly two output pairs
    per_base = {}
    for x, t in out.provenance:
        per_base.setdefault(x, []).append(t)
    spec = eqneg.spec
    for x, ts in per_base.items():
        i, j = spec.input_facets[x]
        pairs = {eqneg.actions.actions[t].payload for t in ts}
        assert pairs == ({(0, 1), (1, 0)} if i == j else {(0, 0), (1, 1)})


def test_task_action_model_preconditions():
    spec = builtin("eqneg")
    inp = build_input_model(spec)
    am = build_task_action_model(spec, inp)
    assert am.kind == TASK
    assert [t.payload for t in am.actions] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    for t in am.actions:
        db, dw = t.payload
        brute = {x for x, (i, j) in enumerate(spec.input_facets) if (i == j) != (db == dw)}
        assert am.pre[t.id] == brute
    assert is_proper(am)
    # B sees only its own decision
    assert am.classes("B") == [(0, 1), (2, 3)]


def test_extended_update_labels(eqneg):
    plain, ext = eqneg.output, eqneg.extended_output
    assert plain.provenance == ext.provenance
    assert plain.vertex_key == ext.vertex_key
    for v, w in zip(plain.model.vertices, ext.model.vertices):
        extra = w.label - v.label
        assert v.label <= w.label and len(extra) == 1
        assert next(iter(extra)).kind == DECIDE


def test_mp_class_atoms(single_edge):
    upd = extended_product_update(single_edge, build_mp(single_edge, 1))
    kinds = {a.kind for v in upd.model.vertices for a in v.label}
    assert kinds == {"input", CLASS}


def test_is_proper(single_edge):
    proper = ActionModel.build(single_edge, MP, [("a",), ("b",)], lambda ag, p: p[0] if ag == "B" else 0,
                               [{0}, {0}])
    assert is_proper(proper)
    improper = ActionModel.build(single_edge, MP, [("a",), ("b",)], lambda ag, p: 0, [{0}, {0}])
    assert not is_proper(improper)
    with pytest.raises(ValueError, match="improper"):
        product_update(single_edge, improper)
    assert is_proper(build_mp(single_edge, 2))


def test_empty_update(single_edge):
    empty = ActionModel.build(single_edge, MP, [], lambda ag, p: 0, [])
    with pytest.raises(EmptyUpdate):
        product_update(single_edge, empty)


def test_action_model_validation(single_edge, eqneg):
    with pytest.raises(ValueError, match="empty precondition"):
        ActionModel.build(single_edge, MP, [("a",)], lambda ag, p: 0, [set()])
    with pytest.raises(ValueError):
        ActionModel.build(single_edge, "other", [("a",)], lambda ag, p: 0, [{0}])
    with pytest.raises(ValueError):
        ActionModel.build(single_edge, MP, [("a",)], lambda ag, p: 0, [{0}, {0}])
    am = ActionModel.build(single_edge, MP, [("a",)], lambda ag, p: 0, [{0}])
    with pytest.raises(ValueError, match="different base"):
        product_update(eqneg.input, am)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_product_update_brute_force(seed):
    rng = random.Random(seed)
    m = random_model(rng, agents=rng.choice([("B", "W"), ("a", "b", "c")]))
    am = random_action_model(rng, m)
    upd = product_update(m, am)
    pm = upd.model
    # facets: exactly the admissible pairs, ordered by (action, base facet)
    expected = [(x, t.id) for t in am.actions for x in sorted(am.pre[t.id])]
    assert list(upd.provenance) == expected
    assert len(pm.facets) == sum(len(p) for p in am.pre)
    assert validate_model(pm) == []
    assert check_morphism(upd.projection)[0]
    # two product facets share their p-vertex iff base p-vertices agree and actions are p-equivalent
    for f, (x, t) in enumerate(upd.provenance):
        for g, (y, u) in enumerate(upd.provenance):
            for p in m.agent_names:
                share = pm.vertex_of(f, p) == pm.vertex_of(g, p)
                assert share == (m.vertex_of(x, p) == m.vertex_of(y, p) and am.equivalent(p, t, u))
    ext = extended_product_update(m, am)
    assert canonical_text(ext.model) != canonical_text(pm)
    assert [f for f in ext.model.facets] == [f for f in pm.facets]
