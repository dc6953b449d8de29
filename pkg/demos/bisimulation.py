"""
Input and output models through the lens of bisimulation
=========================================================

For equality negation the projection from the output model back to the
input model is a bisimulation when only input atoms are compared.  So no
formula about inputs can separate the two models, and the obstruction to
solving the task has to be topological.  For consensus the projection is
not a bisimulation.
"""

from delchk import builtin, output_model
from delchk.analysis import (
    bisimulation_violations, check_bisimulation, demonstrate_no_positive_formula,
    max_bisimulation, projection_relation,
)

for name in ("eqneg", "consensus2"):
    tm = output_model(builtin(name))
    rel = projection_relation(tm.output)
    bad = check_bisimulation(rel, tm.input, tm.output.model)
    print(f"{name}: {len(rel)} projection pairs, maximal bisimulation "
          f"{len(max_bisimulation(tm.input, tm.output.model))} pairs")
    if bad is None:
        print("  the projection is a bisimulation")
    else:
        print(f"  first failure: pair {bad.pair}, clause ({bad.clause}), agent {bad.agent}, "
              f"move to {bad.witness}")
        total = sum(1 for _ in bisimulation_violations(rel, tm.input, tm.output.model))
        print(f"  {total} clause failures in all")

# %%
# Positive formulas (negation only on atoms) that hold at an output world
# also hold at every protocol world over the same input.  We sample them.

for n in (0, 1):
    rep = demonstrate_no_positive_formula(n, 500, 4, seed=n)
    print(f"n={n}: {rep.trials} formulas, {rep.pairs_checked} world pairs, "
          f"{len(rep.violations)} violations")
