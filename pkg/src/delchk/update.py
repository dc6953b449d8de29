"""Action models and (extended) product update of simplicial models."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Hashable, Sequence

from .model import CLASS, Atom, Morphism, SimplicialModel, decide_atom

TASK = "task"
MP = "mp"


class EmptyUpdate(ValueError):
    """No facet of the base model satisfies any precondition."""


@dataclass(frozen=True)
class Action:
    """One action.

    For task action models the payload is the tuple of decisions, one per
    agent in agent order; for message-passing models it is ``(word, facet)``.
    """

    id: int
    payload: tuple


@dataclass(frozen=True, eq=False)
class ActionModel:
    base: SimplicialModel
    kind: str
    actions: tuple[Action, ...]
    # class_of[agent][t] is the smallest action id equivalent to t for agent
    class_of: dict
    pre: tuple[frozenset, ...]

    @classmethod
    def build(cls, base: SimplicialModel, kind: str, payloads: Sequence[tuple],
              class_key: Callable[[str, tuple], Hashable], pre: Sequence) -> "ActionModel":
        """Actions are equivalent for agent ``a`` iff their ``class_key(a, payload)`` agree.

        ``pre[t]`` lists the base facets where action ``t`` may fire.
        """
        if kind not in (TASK, MP):
            raise ValueError(f"unknown action model kind {kind!r}")
        actions = tuple(Action(i, tuple(p)) for i, p in enumerate(payloads))
        class_of = {}
        for a in base.agent_names:
            first = {}
            ids = []
            for t in actions:
                ids.append(first.setdefault(class_key(a, t.payload), t.id))
            class_of[a] = tuple(ids)
        pre = tuple(frozenset(p) for p in pre)
        if len(pre) != len(actions):
            raise ValueError("one precondition per action is required")
        for t, p in enumerate(pre):
            if not p:
                raise ValueError(f"action {t} has an empty precondition")
            for f in p:
                base._check_facet(f)
        return cls(base, kind, actions, class_of, pre)

    def equivalent(self, agent: str, t: int, u: int) -> bool:
        return self.class_of[agent][t] == self.class_of[agent][u]

    def classes(self, agent: str) -> list[tuple[int, ...]]:
        out = {}
        for t, c in enumerate(self.class_of[agent]):
            out.setdefault(c, []).append(t)
        return [tuple(v) for _, v in sorted(out.items())]

    def class_atom(self, agent: str, t: int) -> Atom:
        """Atom naming the ``agent``-class of action ``t``.

        Task classes are exactly the agent's decision values, so they render
        as decide atoms.
        """
        if self.kind == TASK:
            idx = self.base.agent_names.index(agent)
            return decide_atom(agent, self.actions[t].payload[idx])
        return Atom(CLASS, agent, self.class_of[agent][t])


def is_proper(a: ActionModel) -> bool:
    """True iff every two distinct actions are told apart by some agent."""
    agents = a.base.agent_names
    for t, u in combinations(range(len(a.actions)), 2):
        if all(a.equivalent(ag, t, u) for ag in agents):
            return False
    return True


@dataclass(frozen=True, eq=False)
class UpdateResult:
    model: SimplicialModel
    projection: Morphism
    # provenance[f] = (base facet, action id)
    provenance: tuple[tuple[int, int], ...]
    action_model: ActionModel
    # vertex_key[v] = (base vertex, class id)
    vertex_key: tuple[tuple[int, int], ...]


def product_update(m: SimplicialModel, a: ActionModel, extended: bool = False) -> UpdateResult:
    """Facets are pairs (X, t) with X in pre(t), ordered by (t, X).

    The p-vertex of (X, t) is (p-vertex of X, p-class of t), so two product
    facets share it iff their base facets share the p-vertex and the actions
    are p-equivalent.
    """
    if a.base is not m:
        raise ValueError("action model preconditions refer to a different base model")
    agents = m.agent_names
    keys = {}
    verts = []
    facets = []
    prov = []
    for t in a.actions:
        for x in sorted(a.pre[t.id]):
            f = set()
            for p in agents:
                v = m.vertex_of(x, p)
                key = (v, a.class_of[p][t.id])
                if key not in keys:
                    keys[key] = len(verts)
                    label = m.vertices[v].label
                    if extended:
                        label = label | {a.class_atom(p, t.id)}
                    verts.append((p, label))
                f.add(keys[key])
            facets.append(f)
            prov.append((x, t.id))
    if not facets:
        raise EmptyUpdate("no facet satisfies any precondition")
    seen = {}
    for i, f in enumerate(facets):
        j = seen.setdefault(frozenset(f), i)
        if j != i:
            raise ValueError(f"improper action model: actions {prov[j][1]} and {prov[i][1]} "
                             f"are indistinguishable to every agent on base facet {prov[i][0]}")
    vkey = tuple(sorted(keys, key=keys.get))
    suffix = "^" if extended else ""
    model = SimplicialModel.build(m.agents, verts, facets, name=f"{m.name}[A]{suffix}")
    proj = Morphism(model, m, tuple(k[0] for k in vkey))
    return UpdateResult(model, proj, tuple(prov), a, vkey)


def extended_product_update(m: SimplicialModel, a: ActionModel) -> UpdateResult:
    """Product update whose vertices also carry the atom of their action class."""
    return product_update(m, a, extended=True)
