"""Pure chromatic labeled simplicial models and morphisms between them.

Only facets are stored; faces are implicit.  Vertex and facet ids are dense
integers in construction order and every iteration follows id order, so all
results are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

INPUT = "input"
DECIDE = "decide"
CLASS = "class"
ATOM_KINDS = (INPUT, DECIDE, CLASS)


class EmptyComplex(ValueError):
    """Raised when an operation would produce a complex without facets."""


class UnknownFacet(LookupError):
    pass


@dataclass(frozen=True, order=True)
class Agent:
    id: int
    name: str


@dataclass(frozen=True, order=True)
class Atom:
    """Atomic proposition about one agent.

    ``value`` is an input or decision value, or for ``class`` atoms the id
    naming an action equivalence class.
    """

    kind: str
    agent: str
    value: object

    def __post_init__(self):
        if self.kind not in ATOM_KINDS:
            raise ValueError(f"unknown atom kind {self.kind!r}")

    def __str__(self):
        return f"{self.kind}({self.agent},{self.value})"


def input_atom(agent: str, value) -> Atom:
    return Atom(INPUT, agent, value)


def decide_atom(agent: str, value) -> Atom:
    return Atom(DECIDE, agent, value)


@dataclass(frozen=True)
class Vertex:
    id: int
    color: str
    label: frozenset = frozenset()


def make_agents(names: Iterable[str]) -> tuple[Agent, ...]:
    return tuple(Agent(i, n) for i, n in enumerate(names))


@dataclass(frozen=True, eq=False)
class SimplicialModel:
    agents: tuple[Agent, ...]
    vertices: tuple[Vertex, ...]
    facets: tuple[frozenset, ...]
    name: str = field(default="", compare=False)

    @classmethod
    def build(cls, agents, vertices, facets, name="", check=True) -> "SimplicialModel":
        """Build a model from agent names (or Agents), vertices and facets.

        ``vertices`` is a sequence of ``(color, label)`` pairs whose position
        is the vertex id; ``facets`` are iterables of vertex ids.
        """
        agents = tuple(a if isinstance(a, Agent) else Agent(i, a) for i, a in enumerate(agents))
        verts = tuple(
            v if isinstance(v, Vertex) else Vertex(i, v[0], frozenset(v[1]))
            for i, v in enumerate(vertices)
        )
        m = cls(agents, verts, tuple(frozenset(f) for f in facets), name)
        if check:
            problems = validate_model(m)
            if problems:
                raise ValueError("invalid simplicial model: " + "; ".join(problems))
        return m

    @property
    def agent_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.agents)

    @cached_property
    def facet_index(self) -> dict[frozenset, int]:
        return {f: i for i, f in enumerate(self.facets)}

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Facet ids containing each vertex, ascending."""
        inc = [[] for _ in self.vertices]
        for fid, f in enumerate(self.facets):
            for v in f:
                inc[v].append(fid)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def _colored(self) -> tuple[dict[str, int], ...]:
        return tuple({self.vertices[v].color: v for v in f} for f in self.facets)

    def vertex_of(self, facet: int, agent: str) -> int:
        """The vertex of color ``agent`` in ``facet``."""
        self._check_facet(facet)
        return self._colored[facet][agent]

    def facet_label(self, facet: int) -> frozenset:
        self._check_facet(facet)
        out = set()
        for v in self.facets[facet]:
            out |= self.vertices[v].label
        return frozenset(out)

    @cached_property
    def atom_kinds(self) -> frozenset:
        return frozenset(a.kind for v in self.vertices for a in v.label)

    @cached_property
    def atoms(self) -> frozenset:
        return frozenset(a for v in self.vertices for a in v.label)

    def _check_facet(self, facet):
        if not isinstance(facet, int) or not 0 <= facet < len(self.facets):
            raise UnknownFacet(f"no facet {facet!r} in model with {len(self.facets)} facets")

    def __repr__(self):
        nm = f" {self.name!r}" if self.name else ""
        return f"<SimplicialModel{nm} |V|={len(self.vertices)} |F|={len(self.facets)}>"


def validate_model(m: SimplicialModel) -> list[str]:
    """Diagnostics for every violated model invariant; empty when valid."""
    out = []
    names = [a.name for a in m.agents]
    if [a.id for a in m.agents] != list(range(len(m.agents))):
        out.append("agents: ids are not dense 0..n-1")
    if len(set(names)) != len(names):
        out.append("agents: duplicate display names")
    dim = len(m.agents)
    for i, v in enumerate(m.vertices):
        if v.id != i:
            out.append(f"vertex {i}: id field is {v.id}")
        if v.color not in names:
            out.append(f"vertex {i}: unknown color {v.color!r}")
        for a in v.label:
            if a.agent != v.color:
                out.append(f"vertex {i}: atom {a} does not concern agent {v.color}")
    seen = set()
    nv = len(m.vertices)
    for fid, f in enumerate(m.facets):
        if f in seen:
            out.append(f"facet {fid}: duplicate facet")
        seen.add(f)
        bad = [v for v in f if not (isinstance(v, int) and 0 <= v < nv)]
        if bad:
            out.append(f"facet {fid}: unknown vertices {sorted(bad)}")
            continue
        if len(f) != dim:
            out.append(f"facet {fid}: purity violation, {len(f)} vertices for {dim} agents")
        colors = [m.vertices[v].color for v in f]
        if len(set(colors)) != len(colors):
            out.append(f"facet {fid}: chromatic violation, colors {sorted(colors)}")
    used = set().union(*m.facets) if m.facets else set()
    for i in range(nv):
        if i not in used:
            out.append(f"vertex {i}: belongs to no facet")
    return out


def neighbors_via(m: SimplicialModel, facet: int, agent: str) -> set[int]:
    """Facets sharing the ``agent``-colored vertex of ``facet`` (``facet`` included)."""
    return set(m.incidence[m.vertex_of(facet, agent)])


def components(m: SimplicialModel, facet_subset: Iterable[int] | None = None) -> list[list[int]]:
    """Connected components of facets under shared-vertex adjacency.

    Components are listed by their smallest facet id and each is in BFS order.
    """
    keep = set(range(len(m.facets))) if facet_subset is None else set(facet_subset)
    for f in keep:
        m._check_facet(f)
    done = set()
    out = []
    for start in sorted(keep):
        if start in done:
            continue
        comp = [start]
        done.add(start)
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for v in sorted(m.facets[x]):
                for y in m.incidence[v]:
                    if y in keep and y not in done:
                        done.add(y)
                        comp.append(y)
                        queue.append(y)
        out.append(comp)
    return out


def is_connected(m: SimplicialModel, facet_subset: Iterable[int] | None = None) -> bool:
    """True iff the given facets form one shared-vertex component.

    The empty subset counts as connected.
    """
    return len(components(m, facet_subset)) <= 1


def induced_subcomplex(m: SimplicialModel, keep: Callable[[int], bool]) -> SimplicialModel:
    """Model made of the facets ``f`` with ``keep(f)`` and their vertices.

    Vertices are renumbered densely in their original order.
    """
    kept = [f for f in range(len(m.facets)) if keep(f)]
    if not kept:
        raise EmptyComplex("no facet satisfies the predicate")
    used = sorted(set().union(*(m.facets[f] for f in kept)))
    renum = {old: new for new, old in enumerate(used)}
    verts = [(m.vertices[v].color, m.vertices[v].label) for v in used]
    facets = [{renum[v] for v in m.facets[f]} for f in kept]
    return SimplicialModel.build(m.agents, verts, facets, name=m.name)


@dataclass(frozen=True, eq=False)
class Morphism:
    source: SimplicialModel
    target: SimplicialModel
    mapping: tuple[int, ...]

    @classmethod
    def from_dict(cls, source, target, mapping: Mapping[int, int]) -> "Morphism":
        return cls(source, target, tuple(mapping[v] for v in range(len(source.vertices))))

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    def facet_image(self, facet: int) -> frozenset:
        return frozenset(self.mapping[v] for v in self.source.facets[facet])

    def image_facet(self, facet: int) -> int | None:
        """Target facet id of the image of ``facet``, or None if not a facet."""
        return self.target.facet_index.get(self.facet_image(facet))


def identity(m: SimplicialModel) -> Morphism:
    return Morphism(m, m, tuple(range(len(m.vertices))))


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g`` after ``f``."""
    if f.target is not g.source:
        raise ValueError("morphisms are not composable")
    return Morphism(f.source, g.target, tuple(g.mapping[x] for x in f.mapping))


def check_morphism(f: Morphism) -> tuple[bool, str | None]:
    """Check color, label and facet preservation; report the first failure.

    Labels are compared on the atom kinds carried by both models.
    """
    src, tgt = f.source, f.target
    if len(f.mapping) != len(src.vertices):
        return False, "vertex map is not total"
    kinds = src.atom_kinds & tgt.atom_kinds
    nt = len(tgt.vertices)
    for v, w in enumerate(f.mapping):
        if not 0 <= w < nt:
            return False, f"vertex {v} maps to unknown vertex {w}"
        sv, tv = src.vertices[v], tgt.vertices[w]
        if sv.color != tv.color:
            return False, f"vertex {v}: color {sv.color} mapped to color {tv.color}"
        ls = {a for a in sv.label if a.kind in kinds}
        lt = {a for a in tv.label if a.kind in kinds}
        if ls != lt:
            return False, f"vertex {v}: label {sorted(map(str, ls))} mapped to {sorted(map(str, lt))}"
    for fid in range(len(src.facets)):
        if f.image_facet(fid) is None:
            return False, f"facet {fid}: image {sorted(f.facet_image(fid))} is not a facet"
    return True, None


def render_vertex(m: SimplicialModel, v: int) -> str:
    vx = m.vertices[v]
    return f"{vx.color}[{','.join(sorted(str(a) for a in vx.label))}]"


def canonical_text(m: SimplicialModel) -> str:
    """One line per facet, vertices ordered by agent, lines sorted.

    Two models with equal text have the same labeled facets up to vertex
    renaming, provided (color, label) identifies vertices.
    """
    order = {a.name: a.id for a in m.agents}
    lines = []
    for f in m.facets:
        vs = sorted(f, key=lambda v: order[m.vertices[v].color])
        lines.append(" ".join(render_vertex(m, v) for v in vs))
    return "\n".join(sorted(lines)) + "\n"


def relabel(m: SimplicialModel, extra: Sequence[Iterable[Atom]], name: str = "") -> SimplicialModel:
    """Same complex with ``extra[v]`` added to each vertex label."""
    verts = [Vertex(v.id, v.color, v.label | frozenset(extra[v.id])) for v in m.vertices]
    return SimplicialModel.build(m.agents, verts, m.facets, name=name or m.name)
