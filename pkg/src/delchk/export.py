"""Graphviz export of simplicial models.

Agents become node fill colors; each facet is drawn as the edges between its
vertices, so a facet of three or more vertices shows up as a clique.
"""

from __future__ import annotations

from itertools import combinations

from .model import SimplicialModel

_FILL = {"B": ("black", "white"), "W": ("white", "black")}
_PALETTE = ["lightblue", "lightpink", "palegreen", "khaki", "plum"]


def _quote(s: str) -> str:
    s = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + s + '"'


def to_dot(m: SimplicialModel, title: str = "") -> str:
    lines = [f"graph {_quote(title or m.name or 'model')} {{"]
    lines.append("  node [shape=circle, style=filled, fontname=Helvetica, fontsize=10];")
    for i, agent in enumerate(m.agent_names):
        fill, font = _FILL.get(agent, (_PALETTE[i % len(_PALETTE)], "black"))
        for v in m.vertices:
            if v.color != agent:
                continue
            label = "\n".join([agent] + sorted(str(a) for a in v.label))
            lines.append(f"  v{v.id} [label={_quote(label)}, fillcolor={fill}, fontcolor={font}];")
    seen = set()
    for fid, f in enumerate(m.facets):
        for a, b in combinations(sorted(f), 2):
            if (a, b) in seen:
                continue
            seen.add((a, b))
            lines.append(f"  v{a} -- v{b} [tooltip=\"facet {fid}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"
