"""Regenerate the rule files in src/tilinglab/catalog/.

The symmetric rules are built from one base decomposition per shape and
closed under the rotation/reflection group; run from the repo root:

    python3 tools/gen_catalog.py
"""
from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from tilinglab.exactnum import NumberField, frac_str, vadd, vkey, vscale, vsub  # noqa: E402
from tilinglab.subst import rule_from_dict  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "tilinglab" / "catalog"


def coord(e):
    return [frac_str(c) for c in e.c]


def point(v):
    return [coord(e) for e in v]


def write(name, doc):
    rule = rule_from_dict(doc)
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"{name}: {len(rule.protos)} prototiles, digest {rule.digest()[:12]}")


def field_doc(f: NumberField):
    return f.to_json()


# rational rules

def square():
    Q = NumberField.rationals()
    h = Q(1) / 2
    verts = [(-h, -h), (h, -h), (h, h), (-h, h)]
    kids = [{"proto": "S", "shift": point((sx, sy))} for sy in (-h, h) for sx in (-h, h)]
    return {
        "name": "square", "dim": 2, "kind": "substitution", "field": field_doc(Q),
        "prototiles": [{"name": "S", "vertices": [point(v) for v in verts]}],
        "phi": [[["2"], ["0"]], [["0"], ["2"]]],
        "images": {"S": kids},
        "metadata": {"periodic": True},
    }


def _rot90(v, k):
    x, y = v
    for _ in range(k % 4):
        x, y = -y, x
    return (x, y)


def chair():
    Q = NumberField.rationals()
    h = Q(1) / 2
    # corner cell of the L at the origin, arms along +x and +y
    base = [(-h, -h), (3 * h, -h), (3 * h, h), (h, h), (h, 3 * h), (-h, 3 * h)]
    base_kids = [
        (0, (-h, -h)),            # corner child
        (0, (h, h)),              # centre child
        (3, (-h, 5 * h)),         # top arm
        (1, (5 * h, -h)),         # right arm
    ]
    protos, images = [], {}
    for k in range(4):
        protos.append({"name": f"L{k}", "vertices": [point(_rot90(v, k)) for v in base]})
        images[f"L{k}"] = [{"proto": f"L{(o + k) % 4}", "shift": point(_rot90(s, k))} for o, s in base_kids]
    return {
        "name": "chair", "dim": 2, "kind": "substitution", "field": field_doc(Q),
        "prototiles": protos,
        "phi": [[["2"], ["0"]], [["0"], ["2"]]],
        "images": images,
    }


# one-dimensional rules

def fibonacci():
    K = NumberField([-1, -1, 1], ["1", "2"])
    t = K.gen
    h = K(1) / 2
    return {
        "name": "fibonacci", "dim": 1, "kind": "substitution", "field": field_doc(K),
        "prototiles": [{"name": "a", "vertices": [point((-t * h,)), point((t * h,))]},
                       {"name": "b", "vertices": [point((-h,)), point((h,))]}],
        "phi": [[coord(t)]],
        "images": {"a": [{"proto": "a", "shift": point((-h,))}, {"proto": "b", "shift": point((t * h,))}],
                   "b": [{"proto": "a", "shift": point((K.zero,))}]},
    }


def non_pisot_1d():
    # a -> abbb, b -> a; the expansion is the larger root of x^2 - x - 3
    K = NumberField([-3, -1, 1], ["2", "3"])
    lam = K.gen
    h = K(1) / 2
    left = -lam * lam * h
    kids = []
    pos = left
    for name, length in (("a", lam), ("b", K.one), ("b", K.one), ("b", K.one)):
        kids.append({"proto": name, "shift": point((pos + length * h,))})
        pos = pos + length
    assert pos == lam * lam * h
    return {
        "name": "non_pisot_1d", "dim": 1, "kind": "substitution", "field": field_doc(K),
        "prototiles": [{"name": "a", "vertices": [point((-lam * h,)), point((lam * h,))]},
                       {"name": "b", "vertices": [point((-h,)), point((h,))]}],
        "phi": [[coord(lam)]],
        "images": {"a": kids, "b": [{"proto": "a", "shift": point((K.zero,))}]},
    }


def shear_non_flc():
    """Rectangles under diag(lam, 2) with lam the larger root of x^2 - x - 3.

    A B-supertile has two rows, B A A A below and A A A B above.  lam is not
    Pisot, so the cut points of different rows drift apart and the vertical
    edge offsets across rows take infinitely many values."""
    K = NumberField([-3, -1, 1], ["2", "3"])
    lam = K.gen
    h = K(1) / 2
    one, zero = K.one, K.zero
    rect = lambda w: [(-w * h, -h), (w * h, -h), (w * h, h), (-w * h, h)]  # noqa: E731

    def row(names, y):
        widths = {"A": one, "B": lam}
        pos = -lam * lam * h
        out = []
        for n in names:
            out.append({"proto": n, "shift": point((pos + widths[n] * h, y))})
            pos = pos + widths[n]
        assert pos == lam * lam * h
        return out

    return {
        "name": "shear_non_flc", "dim": 2, "kind": "substitution", "field": field_doc(K),
        "prototiles": [{"name": "A", "vertices": [point(v) for v in rect(one)]},
                       {"name": "B", "vertices": [point(v) for v in rect(lam)]}],
        "phi": [[coord(lam), coord(zero)], [coord(zero), coord(K(2))]],
        "images": {
            "A": [{"proto": "B", "shift": point((zero, -h))}, {"proto": "B", "shift": point((zero, h))}],
            "B": row("BAAA", -h) + row("AAAB", h),
        },
    }


# symmetric rules closed under a dihedral group

class Dihedral:
    """Rotations by 2 pi / order and the reflection y -> -y, acting on vectors."""

    def __init__(self, order, cos1, sin1):
        self.order = order
        self.rots = [(cos1 ** 0, cos1 * 0)]
        c, s = cos1, sin1
        cur = (c ** 0, c * 0)
        for _ in range(order - 1):
            cur = (cur[0] * c - cur[1] * s, cur[0] * s + cur[1] * c)
            self.rots.append(cur)
        self.elements = [(k, r) for r in (0, 1) for k in range(order)]

    def act(self, g, v):
        k, r = g
        x, y = v
        if r:
            y = -y
        c, s = self.rots[k]
        return (c * x - s * y, s * x + c * y)

    def compose(self, g1, g2):
        k1, r1 = g1
        k2, r2 = g2
        return ((k1 + (-k2 if r1 else k2)) % self.order, (r1 + r2) % 2)


def _vertex_set(vs):
    return frozenset(vkey(v) for v in vs)


def symmetric_rule(name, field, group, shapes, phi_scalar, ordered=False):
    """shapes: {name: (base vertices, children)}, children as (shape, vertex list)
    in the phi-scaled frame of the base.

    A child is matched to g(base) for a group element g: as vertex sets, or with
    ``ordered`` as vertex sequences, so the sequence order carries handedness.
    Group images with the same polygon and the same decomposition share a
    prototile; the others become distinct labelled prototiles.
    """
    zero = field.zero

    def centroid(vs):
        n = len(vs)
        return (sum((v[0] for v in vs), zero) / n, sum((v[1] for v in vs), zero) / n)

    base = {}
    for sname, (verts, kids) in shapes.items():
        c = centroid(verts)
        rel = [vsub(v, c) for v in verts]
        scaled_kids = []
        for kshape, kverts in kids:
            kc = centroid(kverts)
            scaled_kids.append((kshape, [vsub(v, kc) for v in kverts], vsub(kc, vscale(phi_scalar, c))))
        base[sname] = (rel, scaled_kids)

    def image(g, sname):
        return [group.act(g, v) for v in base[sname][0]]

    def match(kshape, kverts):
        for g in group.elements:
            img = image(g, kshape)
            strict = ordered is True or (ordered and kshape in ordered)
            if (strict and [vkey(v) for v in img] == [vkey(v) for v in kverts]) or \
                    (not strict and _vertex_set(img) == _vertex_set(kverts)):
                return g
        raise ValueError(f"child of shape {kshape} is not a group image of the base")

    decomp = {s: [(ks, match(ks, kv), shift) for ks, kv, shift in kids] for s, (_, kids) in base.items()}

    def seq(g, ks):
        strict = ordered is True or (ordered and ks in ordered)
        img = image(g, ks)
        return tuple(vkey(v) for v in img) if strict else _vertex_set(img)

    def class_key(sname, g):
        kids = frozenset((ks, seq(group.compose(g, h), ks), vkey(group.act(g, s)))
                         for ks, h, s in decomp[sname])
        return (sname, _vertex_set(image(g, sname)), kids)

    classes, labels = {}, {}
    for sname in base:
        count = 0
        for g in group.elements:
            key = class_key(sname, g)
            if key not in classes:
                classes[key] = f"{sname}{count}"
                count += 1
            labels[(sname, g)] = classes[key]

    protos, images = [], {}
    for sname in base:
        for g in group.elements:
            lab = labels[(sname, g)]
            if lab in images:
                continue
            protos.append({"name": lab, "vertices": [point(v) for v in image(g, sname)]})
            images[lab] = [{"proto": labels[(ks, group.compose(g, h))], "shift": point(group.act(g, s))}
                           for ks, h, s in decomp[sname]]
    return {
        "name": name, "dim": 2, "kind": "substitution", "field": field_doc(field),
        "prototiles": protos,
        "phi": [[coord(phi_scalar), coord(zero)], [coord(zero), coord(phi_scalar)]],
        "images": images,
    }


def robinson_triangles():
    # u = 2 sin(36 deg): cos 36 = tau / 2, sin 36 = u / 2, tau = 3 - u^2
    K = NumberField([5, 0, -5, 0, 1], ["11/10", "6/5"])
    u = K.gen
    tau = 3 - u * u
    c36, s36 = tau / 2, u / 2
    group = Dihedral(10, c36, s36)
    zero = K.zero
    # vertex sequences are (apex, p, q) with (apex, p, q) counter-clockwise for the bases;
    # a clockwise child sequence is a mirror image.  This handedness assignment is the
    # one (out of 32) whose supertiles are edge-to-edge away from their boundary.
    X, Y, Z = (zero, zero), (tau, zero), (tau * c36, tau * s36)      # acute: legs tau, base 1
    W, V1, V2 = (c36, s36), (zero, zero), (tau, zero)                 # obtuse: legs 1, base tau

    def split_obtuse(w, v1, v2):
        e = vadd(v1, vscale(1 / tau, vsub(v2, v1)))
        return [("A", [v1, w, e]), ("B", [e, v2, w])]

    def split_acute(x, y, z):
        d = vadd(x, vscale(1 / tau, vsub(z, x)))
        return [("A", [y, z, d])] + split_obtuse(d, x, y)

    sc = lambda vs: [vscale(tau, v) for v in vs]  # noqa: E731
    shapes = {
        "A": ([X, Y, Z], split_acute(*sc([X, Y, Z]))),
        "B": ([W, V1, V2], split_obtuse(*sc([W, V1, V2]))),
    }
    return symmetric_rule("robinson_triangles", K, group, shapes, tau, ordered=True)


def ammann_beenker():
    K = NumberField([-2, 0, 1], ["1", "2"])
    r = K.gen
    c = r / 2                     # cos 45 = sin 45
    group = Dihedral(8, c, c)
    d = 1 + r                     # inflation factor
    zero, one = K.zero, K.one
    e, f = (one, zero), (c, c)

    def rh(o, p, q):
        return [o, vadd(o, p), vadd(vadd(o, p), q), vadd(o, q)]

    # Edges carry an orientation: rhomb edges run from the obtuse to the acute
    # corner, triangle legs run tail -> right angle -> head.  An inflated edge is
    # cut into a unit piece at its head and a sqrt 2 piece at its tail.  Triangles
    # are listed as (tail, head, right angle), so both chiralities occur.
    tri = [(zero, zero), (r, zero), (c, c)]
    rho = rh((zero, zero), e, f)
    H = d * r                     # inflated hypotenuse, on the x axis
    apex = (H / 2, H / 2)
    m = (one + c, c)
    tri_kids = [
        ("T", [(one, one), (zero, zero), (one, zero)]),
        ("T", [(H - one, zero), (one, zero), m]),
        ("T", [(H - c, c), apex, m]),
        ("R", rh((H, zero), (-one, zero), (-c, c))),
        ("R", [(one, zero), m, apex, (one, one)]),
    ]
    # inflated rhomb P0 P1 P2 P3 with the 45 degree corner at P0
    P0, P1, P3 = (zero, zero), (d, zero), vscale(d, f)
    P2 = vadd(P1, P3)
    Q1 = vadd(e, f)
    Q4 = vsub(P2, vadd(e, f))
    S = vadd(P1, (one, one))
    rho_kids = [
        ("R", rh(P0, e, f)),
        ("R", rh(P2, vscale(-one, e), vscale(-one, f))),
        ("R", [P1, Q4, P3, Q1]),
        ("T", [e, P1, Q1]),
        ("T", [S, P1, Q4]),
        ("T", [vsub(P2, e), P3, Q4]),
        ("T", [f, P3, Q1]),
    ]
    return symmetric_rule("ammann_beenker", K, group, {"T": (tri, tri_kids), "R": (rho, rho_kids)}, d,
                          ordered={"T"})


def main():
    OUT.mkdir(exist_ok=True)
    for name, fn in (("square", square), ("chair", chair), ("fibonacci", fibonacci),
                     ("non_pisot_1d", non_pisot_1d), ("shear_non_flc", shear_non_flc),
                     ("robinson_triangles", robinson_triangles), ("ammann_beenker", ammann_beenker)):
        write(name, fn())
    words = {
        "fibonacci_word": ({"a": "ab", "b": "a"}, "Fibonacci word substitution"),
        "periodic_ab": ({"a": "ab", "b": "ab"}, "periodic control; fixed point abab..."),
    }
    for name, (images, note) in words.items():
        doc = {"kind": "word", "name": name, "alphabet": sorted(images), "images": images,
               "metadata": {"note": note}}
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        print(f"{name}: word rule")


if __name__ == "__main__":
    main()
