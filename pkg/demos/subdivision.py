"""
Layered message passing subdivides every input edge
====================================================

Two processes B and W exchange their full state for ``n`` rounds.  In each
round both messages may arrive, or exactly one of them is lost.  Each input
edge of the equality-negation task turns into a path of ``3**n`` edges.
"""

from delchk import build_input_model, builtin, make_task
from delchk.layered import block_path, protocol_model, render_view, subdivision_census, view_of

inp = build_input_model(builtin("eqneg"))
print(f"input model: {len(inp.vertices)} vertices, {len(inp.facets)} facets")

for n in range(4):
    c = subdivision_census(inp, n)
    print(f"  {n} layer(s): {c.total:4d} facets, every block a path: {c.ok}")

# %%
# One edge in detail.  Walking the path from the end where B hears
# nothing, the executions appear in a fixed order.  ``_`` means both
# messages arrived; ``B`` means B's message was lost.

edge = build_input_model(make_task([0], [0], lambda i, j: [(0, 0)]))
for n in (1, 2):
    upd = protocol_model(edge, n)
    words = [upd.action_model.actions[upd.provenance[f][1]].payload[0] for f in block_path(upd, 0)]
    print(f"n={n}:", " - ".join(words))

# %%
# What each process has seen after the execution "WB" on inputs (3, 4).
# ``#`` marks a message that never arrived.

for agent in "BW":
    print(agent, "sees", render_view(view_of("WB", (3, 4), agent)))
