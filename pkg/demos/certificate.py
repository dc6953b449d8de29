"""
Unsolvability by connectivity
=============================

The distinct-input executions of equality negation form one connected
piece, and there every edge must carry equal decisions.  So they all decide
the same value.  The two executions where a process hears nothing with
input 0 then inherit that value, but the path joining them must flip at
every step.  The certificate spells this out; for tasks where the argument
does not apply it says why.
"""

from delchk import builtin
from delchk.analysis import ConnectivityCertificate, connectivity_certificate

for n in (1, 2):
    cert = connectivity_certificate(builtin("eqneg"), n)
    assert isinstance(cert, ConnectivityCertificate)
    print(f"eqneg, {n} layer(s): {cert.protocol_facets} protocol facets, "
          f"distinct-input part connected: {cert.distinct_input_connected}")
    print("  equal-decision output components:", cert.same_decision_components)
    print(f"  solo vertices with input {cert.clash_input}: {cert.solo_vertices}")
    for c in cert.clashes:
        print("  forced", c["forced"], "->", c["reason"])

for name in ("const0", "consensus2"):
    print(f"{name}: not applicable ({connectivity_certificate(builtin(name), 1).reason})")
