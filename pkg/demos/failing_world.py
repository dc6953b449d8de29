"""
A bad extension and the world where it fails
============================================

Label the one-layer protocol model for equality negation with decisions
and look for a world where the task formula breaks.  On distinct inputs
everyone decides 0.  That pins both ends of the path over inputs (2, 2),
and an odd path cannot alternate between equal end values.
"""

from delchk import builtin, output_model
from delchk.analysis import extend_with_decisions, find_failing_world, task_formula
from delchk.layered import block_path, protocol_model
from delchk.model import induced_subcomplex, render_vertex
from delchk.tasks import input_facet_id

spec = builtin("eqneg")
tm = output_model(spec)
phi = task_formula(spec)

ext = tm.extended_output.model
print(f"extended output model: {len(ext.vertices)} vertices, {len(ext.facets)} facets")
print("task formula valid there:", find_failing_world(ext, phi) is None)

proto = protocol_model(tm.input, 1)
P = proto.model
target = input_facet_id(spec, (2, 2))
path = block_path(proto, target)

decisions = {v: 0 for v in range(len(P.vertices))}
last_w = next(v for v in P.facets[path[-1]] if P.vertices[v].color == "W")
for f in path:
    for v in P.facets[f]:
        if P.vertices[v].color == "W" and v != last_w:
            decisions[v] = 1

bad = extend_with_decisions(P, decisions)
keep = {input_facet_id(spec, p) for p in spec.input_facets if p[0] != p[1]} | {target}
walk = induced_subcomplex(bad, lambda f: proto.provenance[f][0] in keep)
w = find_failing_world(walk, phi)
print("first failing world:", " ".join(render_vertex(walk, v) for v in sorted(walk.facets[w])))
