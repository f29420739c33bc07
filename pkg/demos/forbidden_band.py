"""A band-grid in which one chair patch never sees another.

Patches whose occurrences all share one phase of the character pin down an
anchor; shifting by half a period of the character gives a band that the
second patch provably avoids inside the approximant.  The picture is written
to demos/out/chair_band.svg.
"""

from fractions import Fraction
from pathlib import Path

from tilinglab.language import language_at
from tilinglab.render import RenderSpec, render_svg
from tilinglab.spectra import forbidden_band_overlay, forbidden_verify, phase_diameter
from tilinglab.subst import find_seed, grow, load_catalog

rule = load_catalog("chair")
approx = grow(rule, find_seed(rule), 7)
a = (Fraction(1, 2), 0)
entries = language_at(approx, 10, stabilized_check=False).entries
print(f"{len(entries)} windows of radius^2 10")
print("phase diameters:", sorted({str(phase_diameter(approx, a, e, 1024)) for e in entries}))

for i, j in [(0, 1), (3, 10), (7, 2)]:
    v = forbidden_verify(approx, a, entries[i], entries[j], Fraction(1, 64), 1024)
    anchors = [tuple(str(e) for e in x) for x in v.anchors]
    print(f"pair ({i}, {j}): {v.status}, {v.displacements} displacements, anchors {anchors}")

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
small = grow(rule, find_seed(rule), 3)
x1 = forbidden_verify(approx, a, entries[0], entries[1], Fraction(1, 64), 1024).anchors[0]
svg = render_svg(small.patch, RenderSpec(view=(-8, -8, 8, 8), overlays=[forbidden_band_overlay(a, Fraction(1, 64), x1)]))
(out / "chair_band.svg").write_text(svg)
print("wrote", out / "chair_band.svg")
