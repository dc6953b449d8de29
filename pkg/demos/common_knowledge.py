"""
Formulas, knowledge and common knowledge
========================================

Formulas are written in a small text syntax and evaluated at every world.
In the consensus output model the decided value is common knowledge, while
after any number of layers no input value ever is.
"""

from delchk import builtin, output_model, parse_formula, truth_set
from delchk.layered import protocol_model

tm = output_model(builtin("consensus2"))
ext = tm.extended_output.model

agreed = parse_formula("C[B,W] (decide(B,0) & decide(W,0))")
print(agreed, "holds at", sorted(truth_set(ext, agreed)), "of", len(ext.facets), "worlds")

for n in range(3):
    P = protocol_model(tm.input, n).model
    knows = parse_formula("K[W] input(B,0)")
    common = parse_formula("C[B,W] input(B,0)")
    print(f"n={n}: W knows B's input 0 in {len(truth_set(P, knows))}/{len(P.facets)} worlds, "
          f"common knowledge in {len(truth_set(P, common))}")
