"""Two-process layered message-passing model.

A layer word is a string over ``_BW``: ``_`` means both messages arrived,
``B`` that B's message was lost, ``W`` that W's message was lost.  Only the
two agents ``B`` and ``W`` are supported here.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product

from .model import INPUT, Morphism, SimplicialModel
from .update import MP, ActionModel, UpdateResult, product_update

SYMBOLS = "_BW"
AGENTS = ("B", "W")


class _Box:
    """Marker for a message that was not received."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "#"

    def __reduce__(self):
        return (_Box, ())


BOX = _Box()


def layer_words(n: int) -> list[str]:
    """All words of length ``n`` ordered with ``_ < B < W``."""
    if n < 0:
        raise ValueError("layer count must be >= 0")
    return ["".join(w) for w in product(SYMBOLS, repeat=n)]


def render_word(word: str) -> str:
    return word if word else "()"


def _check_input_model(m: SimplicialModel):
    if m.agent_names != AGENTS:
        raise ValueError(f"layered model needs agents {AGENTS}, got {m.agent_names}")
    for v in m.vertices:
        if len(v.label) != 1 or next(iter(v.label)).kind != INPUT:
            raise ValueError(f"vertex {v.id}: label must be a single input atom")


def facet_inputs(m: SimplicialModel, facet: int) -> tuple:
    """Input values (B, W) of an input facet."""
    return tuple(next(iter(m.vertices[m.vertex_of(facet, a)].label)).value for a in AGENTS)


def _indist_key(agent, word, facet, inputs):
    """Equivalence-class key of action (word, facet) for ``agent``.

    Implements the inductive definition: a lost incoming message keeps the
    previous uncertainty, a received one pins both the history and the input
    facet, except for the last symbol.
    """
    if not word:
        return ("in", inputs[AGENTS.index(agent)])
    head, last = word[:-1], word[-1]
    other = "W" if agent == "B" else "B"
    if last == other:
        return ("lost", _indist_key(agent, head, facet, inputs))
    return ("got", head, facet)


def build_mp(input_model: SimplicialModel, n: int) -> ActionModel:
    """Action model MP_n: actions (word, facet) sorted by (facet, word)."""
    _check_input_model(input_model)
    words = layer_words(n)
    payloads = [(w, x) for x in range(len(input_model.facets)) for w in words]
    inputs = {x: facet_inputs(input_model, x) for x in range(len(input_model.facets))}

    def key(agent, payload):
        w, x = payload
        return _indist_key(agent, w, x, inputs[x])

    return ActionModel.build(input_model, MP, payloads, key, [{x} for _, x in payloads])


def protocol_model(input_model: SimplicialModel, n: int) -> UpdateResult:
    return product_update(input_model, build_mp(input_model, n))


def view_of(word: str, inputs: tuple, agent: str):
    """Full-information view of ``agent`` after ``word`` from inputs (B, W)."""
    vb, vw = inputs
    for x in word:
        if x == "B":
            vb, vw = (vb, vw), (BOX, vw)
        elif x == "W":
            vb, vw = (vb, BOX), (vb, vw)
        elif x == "_":
            vb, vw = (vb, vw), (vb, vw)
        else:
            raise ValueError(f"bad layer symbol {x!r}")
    return vb if agent == "B" else vw


def render_view(view) -> str:
    if view is BOX:
        return "#"
    if isinstance(view, tuple):
        return "(" + render_view(view[0]) + "," + render_view(view[1]) + ")"
    return str(view)


@dataclass(frozen=True, eq=False)
class ViewGraph:
    model: SimplicialModel
    # provenance[f] = (word, input facet)
    provenance: tuple
    # views[v] = (agent, view)
    views: tuple


def protocol_graph_from_views(input_model: SimplicialModel, n: int) -> ViewGraph:
    """Protocol graph whose vertices are (agent, view) pairs, one facet per (word, facet)."""
    _check_input_model(input_model)
    index = {}
    verts = []
    facets = []
    prov = []
    for x in range(len(input_model.facets)):
        inputs = facet_inputs(input_model, x)
        for w in layer_words(n):
            f = set()
            for a in AGENTS:
                key = (a, view_of(w, inputs, a))
                if key not in index:
                    index[key] = len(verts)
                    verts.append((a, input_model.vertices[input_model.vertex_of(x, a)].label))
                f.add(index[key])
            facets.append(f)
            prov.append((w, x))
    model = SimplicialModel.build(AGENTS, verts, facets, name=f"P_{n}")
    return ViewGraph(model, tuple(prov), tuple(sorted(index, key=index.get)))


@dataclass
class IsoCheck:
    morphism: Morphism | None
    failure: str | None = None

    @property
    def ok(self):
        return self.failure is None


def check_view_isomorphism(input_model: SimplicialModel, n: int) -> IsoCheck:
    """Match the product update I[MP_n] against the view-based protocol graph.

    Each product vertex is sent to (agent, view) of any execution in its
    class; the map must be well defined, bijective, color and label
    preserving, and carry facets onto facets in both directions.
    """
    upd = protocol_model(input_model, n)
    vg = protocol_graph_from_views(input_model, n)
    pm, vm = upd.model, vg.model
    view_index = {k: i for i, k in enumerate(vg.views)}
    mapping = {}
    for fid, (x, t) in enumerate(upd.provenance):
        word, sigma = upd.action_model.actions[t].payload
        inputs = facet_inputs(input_model, sigma)
        for a in AGENTS:
            v = pm.vertex_of(fid, a)
            target = view_index.get((a, view_of(word, inputs, a)))
            if target is None:
                return IsoCheck(None, f"vertex {v}: view of {word!r} on facet {sigma} missing")
            if mapping.setdefault(v, target) != target:
                return IsoCheck(None, f"vertex {v}: executions in its class give different views")
    if len(mapping) != len(pm.vertices):
        return IsoCheck(None, "some product vertices were not reached")
    if len(set(mapping.values())) != len(mapping):
        dup = Counter(mapping.values()).most_common(1)[0][0]
        return IsoCheck(None, f"view vertex {dup} has several preimages")
    if len(mapping) != len(vm.vertices):
        return IsoCheck(None, "view vertices without a preimage")
    iso = Morphism.from_dict(pm, vm, mapping)
    for v, w in enumerate(iso.mapping):
        if pm.vertices[v].color != vm.vertices[w].color or pm.vertices[v].label != vm.vertices[w].label:
            return IsoCheck(None, f"vertex {v}: color or label differs from view vertex {w}")
    images = set()
    for f in range(len(pm.facets)):
        img = iso.image_facet(f)
        if img is None:
            return IsoCheck(None, f"facet {f}: image is not a facet of the view graph")
        images.add(img)
    if len(images) != len(vm.facets):
        return IsoCheck(None, "view graph has facets outside the image")
    return IsoCheck(iso)


@dataclass
class BlockCensus:
    facet: int
    size: int
    is_path: bool
    endpoints: tuple


@dataclass
class Census:
    layers: int
    blocks: list = field(default_factory=list)
    problems: list = field(default_factory=list)

    @property
    def total(self):
        return sum(b.size for b in self.blocks)

    @property
    def ok(self):
        return not self.problems


def solo_vertex(upd: UpdateResult, sigma: int, agent: str) -> int:
    """Vertex of ``agent`` in the execution on ``sigma`` where it never hears from the other."""
    n = len(upd.action_model.actions[0].payload[0])
    word = ("W" if agent == "B" else "B") * n
    for fid, (x, t) in enumerate(upd.provenance):
        if x == sigma and upd.action_model.actions[t].payload[0] == word:
            return upd.model.vertex_of(fid, agent)
    raise LookupError(f"no execution {word!r} on facet {sigma}")


def block_facets(upd: UpdateResult, sigma: int) -> list[int]:
    return [f for f, (x, _) in enumerate(upd.provenance) if x == sigma]


def block_path(upd: UpdateResult, sigma: int) -> list[int]:
    """Facets of the block over ``sigma`` in path order, from B's solo vertex."""
    m = upd.model
    fs = set(block_facets(upd, sigma))
    v = solo_vertex(upd, sigma, "B")
    order = []
    prev = None
    while True:
        nxt = [f for f in m.incidence[v] if f in fs and f != prev]
        if not nxt:
            break
        if len(nxt) > 1:
            raise ValueError(f"block over facet {sigma} branches at vertex {v}")
        prev = nxt[0]
        order.append(prev)
        if len(order) > len(fs):
            raise ValueError(f"block over facet {sigma} is not a simple path")
        (v,) = m.facets[prev] - {v}
    return order


def subdivision_census(input_model: SimplicialModel, n: int) -> Census:
    """Check every input edge is subdivided into a path of 3**n edges.

    The path endpoints must be the two solo-execution vertices.
    """
    upd = protocol_model(input_model, n)
    m = upd.model
    census = Census(n)
    for sigma in range(len(input_model.facets)):
        fs = block_facets(upd, sigma)
        deg = Counter(v for f in fs for v in m.facets[f])
        ends = tuple(sorted(v for v, d in deg.items() if d == 1))
        solos = tuple(sorted((solo_vertex(upd, sigma, "B"), solo_vertex(upd, sigma, "W"))))
        path = (
            all(d in (1, 2) for d in deg.values())
            and ends == solos
            and len(deg) == len(fs) + 1
        )
        try:
            path = path and len(block_path(upd, sigma)) == len(fs)
        except ValueError:
            path = False
        census.blocks.append(BlockCensus(sigma, len(fs), path, ends))
        if len(fs) != 3 ** n:
            census.problems.append(f"facet {sigma}: block has {len(fs)} facets, expected {3 ** n}")
        if not path:
            census.problems.append(f"facet {sigma}: block is not a path between the solo vertices")
    return census
