"""Brute-force reference implementations shared by the unit and acceptance tests.

None of these use the tile index, the relation cache or the numeric prefilters
of the library; they scan everything and compare exactly.
"""

import itertools
import math

from tilinglab.exactnum import norm2, sign, vkey, vsub
from tilinglab.tiling import CAP, Patch, restrict


def naive_language(approx, r2):
    """Anchored windows by brute force: no index, no dedupe shortcuts, raw translate sets."""
    tiles = list(approx.patch.tiles)
    pts = [tuple(e.approx() for e in t.shift) for t in tiles]
    reach = math.sqrt(float(r2)) + max(approx.rule.protos.fradius) + 1e-6
    out = set()
    for t, pt in zip(tiles, pts):
        if not approx.region.ball_inside(t.shift, r2, center_known_inside=True):
            continue
        near = [u for u, q in zip(tiles, pts) if math.dist(pt, q) < reach]
        sub = Patch(frozenset(near), approx.patch.protos, _trusted=True)
        win = restrict(sub, t.shift, r2, CAP)
        out.add(frozenset((u.proto, vkey(vsub(u.shift, t.shift))) for u in win.tiles))
    return out


def entry_set(lang):
    return {frozenset((u.proto, vkey(u.shift)) for u in e.patch.tiles) for e in lang.entries}


def naive_occurrences(approx, p, window2):
    """Shifts s with p + s a subset of the approximant and |s - center|^2 < window^2."""
    tiles = approx.patch.tiles
    keys = {t.key for t in tiles}
    p = p.patch if hasattr(p, "anchor_shift") else p
    ref = min(p.tiles, key=lambda t: t.key)
    out = set()
    for t in tiles:
        if t.proto != ref.proto:
            continue
        s = vsub(t.shift, ref.shift)
        if all(u.translate(s).key in keys for u in p.tiles):
            if window2 is None or sign(norm2(vsub(s, approx.center)) - window2) < 0:
                out.add(vkey(s))
    return out


def naive_displacements(approx, p1, p2, window2):
    """All s2 - s1 over pairs of occurrences in the window with |s2 - s1|^2 < window^2."""
    field = approx.rule.field
    occ1 = [field_vec(field, k) for k in naive_occurrences(approx, p1, window2)]
    occ2 = [field_vec(field, k) for k in naive_occurrences(approx, p2, window2)]
    out = set()
    for s1 in occ1:
        for s2 in occ2:
            d = vsub(s2, s1)
            if sign(norm2(d) - window2) < 0:
                out.add(vkey(d))
    return out


def field_vec(field, key):
    return tuple(field.element(list(c)) for c in key)


def bipartite_close(F, Fp, eps):
    """eps-closeness via the within-eps graph: it must be a perfect matching."""
    if len(F) != len(Fp):
        return False
    adj = [[sum((x - y) ** 2 for x, y in zip(a, b)) < eps * eps for b in Fp] for a in F]
    if sum(map(sum, adj)) != len(F):
        return False
    return any(all(adj[i][p[i]] for i in range(len(F))) for p in itertools.permutations(range(len(Fp))))


def band_distance2(a, v, c):
    """Squared distance from v - c to the hyperplanes <a, w> = k, k in Z (rational inputs)."""
    s = sum(x * (y - z) for x, y, z in zip(a, v, c))
    k = s.__floor__()
    return min((s - k) ** 2, (s - k - 1) ** 2) / sum(x * x for x in a)


def scan_hits(word, w1, w2, N):
    """Offsets n <= N with w1 at some i and w2 at i + n inside word."""
    out = set()
    for i in range(len(word)):
        if not word.startswith(w1, i):
            continue
        for n in range(N + 1):
            if word.startswith(w2, i + n):
                out.add(n)
    return out
