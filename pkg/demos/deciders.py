"""
Deciding solvability two ways
=============================

A task is solvable after ``n`` layers when the protocol model maps into the
output model while keeping every vertex over its input vertex.  The same
question can be asked logically: label every protocol vertex with one
decision so that the task formula holds in every world.  Both searches are
exhaustive and must agree.
"""

from delchk import builtin, output_model
from delchk.analysis import cross_check, task_formula

for name in ("eqneg", "consensus2", "consensus3", "const0", "free"):
    spec = builtin(name)
    tm = output_model(spec)
    row = []
    for n in range(3):
        cc = cross_check(tm.input, spec, n)
        row.append(f"n={n}: {cc.by_map.status:10s}")
    print(f"{name:11s}", "  ".join(row))

# %%
# A solvable task comes with a witness.  Constant zero needs no
# communication at all: every vertex decides 0.

tm = output_model(builtin("const0"))
v = cross_check(tm.input, tm.spec, 0).by_map
print("const0 witness:", v.decisions)

# %%
# The task formula for equality negation, as searched by the logical decider.

print(task_formula(builtin("eqneg")))
