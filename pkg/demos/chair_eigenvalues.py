"""Which frequencies are eigenvalues of the chair tiling?

Dyadic vectors pass the return-vector test exactly; a third does not, and the
report names the return vector whose phases never settle.  Shrinking the base
eigenvalues by the inverse transpose expansion gives eigenvalues accumulating at 0.
"""

from fractions import Fraction

from tilinglab.language import return_vectors
from tilinglab.spectra import discover_base, eigen_verify, shrinking_family
from tilinglab.subst import find_seed, grow, load_catalog

rule = load_catalog("chair")
approx = grow(rule, find_seed(rule), 5)
print(f"level {approx.level}: {len(approx)} tiles, coverage radius^2 {approx.coverage_radius2}")

zs = return_vectors(approx, 9)
print("short return vectors:", [tuple(str(e) for e in z) for z in zs])

for a in [(Fraction(1, 2), 0), (Fraction(1, 8), Fraction(1, 8)), (Fraction(1, 3), 0)]:
    rep = eigen_verify(approx, a, 64)
    shown = {k: (tuple(str(e) for e in v) if k == "witness" else v) for k, v in rep.verdict.items()}
    print(f"a = ({a[0]}, {a[1]}):", shown)

base = discover_base(approx, 64)
print("base eigenvalues:", [tuple(str(e) for e in b) for b in base])
for k, v, rep in shrinking_family(approx, base[0], 5):
    print(f"  k = {k}: a = ({v[0]}, {v[1]})  {rep.kind}")
