import xml.etree.ElementTree as ET
from fractions import Fraction

from tilinglab.render import RenderSpec, band_polygons, render_svg
from tilinglab.exactnum import NumberField, vec
from tilinglab.subst import load_catalog
from tilinglab.tiling import patch_build

NS = "{http://www.w3.org/2000/svg}"


def polygons(svg):
    root = ET.fromstring(svg)
    return root.findall(f".//{NS}polygon")


def test_empty_patch():
    r = load_catalog("chair")
    svg = render_svg(patch_build([], r.protos))
    assert polygons(svg) == []
    assert ET.fromstring(svg).tag == f"{NS}svg"


def test_chair_level_two(approx):
    a = approx("chair", 2)
    svg = render_svg(a.patch)
    polys = polygons(svg)
    assert len(polys) == 16
    assert {p.get("data-proto") for p in polys} <= {"0", "1", "2", "3"}
    # chairs are hexagons
    assert all(len(p.get("points").split()) == 6 for p in polys)


def test_render_deterministic(approx):
    a = approx("robinson_triangles", 2)
    spec = RenderSpec(overlays=[{"a": (Fraction(1, 2), 0), "r0_2": Fraction(1, 64), "anchor": (0, 0)}])
    one = render_svg(a.patch, spec)
    two = render_svg(a.patch.translate((a.rule.field.zero, a.rule.field.zero)), spec)
    assert one == two
    assert one.encode() == render_svg(a.patch, spec).encode()


def test_coordinates_round_half_even():
    Q = NumberField.rationals()
    from tilinglab.geometry import Polygon
    from tilinglab.tiling import PlacedTile, Prototiles
    sq = Polygon([vec(Q, p) for p in [(0, 0), (1, 0), (1, 1), (0, 1)]])
    P = Prototiles([sq], field=Q)
    # scale 1/4000 puts 1 unit at 0.00025, which rounds to 0.000; 3 units give 0.00075 -> 0.001
    patch = patch_build([PlacedTile(0, vec(Q, [0, 0])), PlacedTile(0, vec(Q, [2, 0]))], P)
    svg = render_svg(patch, RenderSpec(scale=Fraction(1, 4000)))
    pts = " ".join(p.get("points") for p in polygons(svg))
    assert "0.000,0.000" in pts and "0.001,0.000" in pts


def test_interval_tiles_become_bars(approx):
    a = approx("fibonacci", 3)
    polys = polygons(render_svg(a.patch))
    assert len(polys) == len(a.patch)
    assert all(len(p.get("points").split()) == 4 for p in polys)


def test_band_polygons_cover_stripes():
    view = (Fraction(0), Fraction(0), Fraction(4), Fraction(4))
    bands = band_polygons((Fraction(1, 2), 0), Fraction(1, 16), (0, 0), view)
    # stripes |x/2 - k| < 1/8 around x = 0, 2, 4 meet the view
    xs = sorted(round(sum(p[0] for p in poly) / len(poly), 6) for poly in bands)
    assert xs == [0.125, 2.0, 3.875]
