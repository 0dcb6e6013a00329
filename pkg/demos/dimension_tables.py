"""New operators per order in the algebra of each family (takes about a minute)."""
import time

from mvop.algebra import operator_space
from mvop.eigensolver import generate_family
from mvop.families import default_bundle

for kind, r in (("one-step", 8), ("two-step", 6)):
    t0 = time.perf_counter()
    fam = generate_family(default_bundle(kind), "D1", 2 * r + 4)
    sp = operator_space(fam, r)
    row = ", ".join(str(c) for c in sp.new_dims().values())
    print(f"{kind}: orders 0..{r}: {row}   ({time.perf_counter() - t0:.1f}s)")
