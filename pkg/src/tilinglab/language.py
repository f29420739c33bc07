"""Patch languages, occurrences, displacement sets, legality and return vectors.

Everything here reads a finite approximant.  Positive answers (a patch occurs,
a shift is legal) are certificates; negative answers only hold for the level
and window that were searched, and the reports say so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import InsufficientCoverage, ResourceLimit
from .exactnum import norm2, sign, vadd, vkey, vneg, vsub
from .geometry import INSIDE, OUTSIDE, ball_relation
from .tiling import CanonicalPatch, Patch, PlacedTile, canonicalize, patch_build, restrict

_TOL = 1e-9


def _coeffs(e, degree):
    c = e.c
    return c + (Fraction(0),) * (degree - len(c))


class TileIndex:
    """Spatial and exact lookup over a list of placed tiles.

    Shifts are stored twice: as floats (for the grid and the filters) and as
    integer tuples scaled by a common denominator (for exact keys).
    """

    def __init__(self, tiles, protos):
        self.tiles = list(tiles)
        self.protos = protos
        self.field = protos.field
        self.degree = self.field.degree
        self.dim = protos.dim
        den = 1
        for t in self.tiles:
            for e in t.shift:
                for c in e.c:
                    den = math.lcm(den, c.denominator)
        self.den = den
        self.ikeys = [self._ikey(t.shift) for t in self.tiles]
        self.lookup = {(t.proto, k): i for i, (t, k) in enumerate(zip(self.tiles, self.ikeys))}
        self.fpos = np.array([t.fshift() for t in self.tiles], dtype=float).reshape(len(self.tiles), self.dim)
        self.protoarr = np.array([t.proto for t in self.tiles], dtype=int)
        nv = max(len(p.vertices) for p in protos.polys)
        fv = np.zeros((len(protos), nv, self.dim))
        for k, p in enumerate(protos.polys):
            vs = [[e.approx() for e in v] for v in p.vertices]
            vs += [vs[-1]] * (nv - len(vs))
            fv[k] = vs
        self.fverts = fv
        self.maxrad = max(protos.fradius)
        self.cell = max(2.0 * self.maxrad, 1e-6)
        self._relcache: dict = {}
        self._returns: dict = {}
        self.grid: dict = {}
        for i, p in enumerate(self.fpos):
            self.grid.setdefault(self._cell(p), []).append(i)

    # keys

    def _ikey(self, v):
        out = []
        for e in v:
            for c in _coeffs(e, self.degree):
                q = c * self.den
                if q.denominator != 1:
                    return None
                out.append(q.numerator)
        return tuple(out)

    def ikey_of(self, v):
        """Integer key of an exact vector, or None if it is off this index's lattice."""
        return self._ikey(v)

    def key_to_vec(self, k):
        d, g = self.dim, self.degree
        return tuple(self.field.element([Fraction(k[i * g + j], self.den) for j in range(g)]) for i in range(d))

    def find(self, proto, v):
        k = self._ikey(v)
        if k is None:
            return None
        return self.lookup.get((proto, k))

    # spatial queries

    def _cell(self, p):
        return tuple(int(math.floor(x / self.cell)) for x in p)

    def near(self, fc, radius: float):
        """Indices whose reference point lies within radius (float, padded) of fc."""
        lo = [int(math.floor((x - radius) / self.cell)) for x in fc]
        hi = [int(math.floor((x + radius) / self.cell)) for x in fc]
        out = []
        if self.dim == 1:
            for a in range(lo[0], hi[0] + 1):
                out.extend(self.grid.get((a,), ()))
        else:
            for a in range(lo[0], hi[0] + 1):
                for b in range(lo[1], hi[1] + 1):
                    out.extend(self.grid.get((a, b), ()))
        return out

    def window(self, center, r2, sqcap: bool = False) -> list[int]:
        """Indices of tiles inside the open ball (cap) or meeting the closed ball (sqcap)."""
        fc = np.array([e.approx() for e in center])
        fr2 = r2.approx() if hasattr(r2, "approx") else float(r2)
        fr = math.sqrt(fr2)
        cand = self.near(fc, fr + self.maxrad + 1e-6)
        if not cand:
            return []
        cand = np.array(sorted(cand))
        verts = self.fverts[self.protoarr[cand]] + (self.fpos[cand] - fc)[:, None, :]
        d2 = (verts ** 2).sum(axis=2)
        dmax = d2.max(axis=1)
        tol = _TOL * (1.0 + fr2)
        # exact relations depend only on (proto, offset, r^2); memoise on integer keys
        ck = self._ikey(center)
        rk = tuple(r2.c) if hasattr(r2, "c") else r2
        out = []
        for pos, i in enumerate(cand.tolist()):
            if dmax[pos] < fr2 - tol:
                out.append(i)
                continue
            if not sqcap and dmax[pos] > fr2 + tol:
                continue
            key = None
            if ck is not None:
                key = (self.tiles[i].proto, tuple(a - b for a, b in zip(self.ikeys[i], ck)), rk, sqcap)
                rel = self._relcache.get(key)
            if key is None or rel is None:
                if sqcap and self._fdist2(i, fc) > fr2 + tol:
                    rel = OUTSIDE
                else:
                    rel = ball_relation(self.protos.polygon(self.tiles[i].proto, self.tiles[i].shift), center, r2)
                if key is not None:
                    self._relcache[key] = rel
            if rel == INSIDE or (sqcap and rel != OUTSIDE):
                out.append(i)
        return out

    def _fdist2(self, i, fc) -> float:
        t = self.tiles[i]
        vs = self.fverts[t.proto][: len(self.protos.polys[t.proto].vertices)] + (self.fpos[i] - fc)
        if self.dim == 1:
            lo, hi = min(vs[0][0], vs[1][0]), max(vs[0][0], vs[1][0])
            return 0.0 if lo <= 0 <= hi else min(lo * lo, hi * hi)
        inside = False
        best = float("inf")
        n = len(vs)
        for k in range(n):
            a, b = vs[k], vs[(k + 1) % n]
            if (a[1] > 0) != (b[1] > 0) and a[0] + (b[0] - a[0]) * (0 - a[1]) / (b[1] - a[1]) > 0:
                inside = not inside
            ab = b - a
            den = float(ab @ ab)
            s = 0.0 if den == 0 else min(1.0, max(0.0, float(-a @ ab) / den))
            q = a + s * ab
            best = min(best, float(q @ q))
        return 0.0 if inside else best

    def rel_key(self, members, anchor: int) -> tuple:
        """Translation-normalised key of a set of tiles relative to an anchor tile."""
        ak = self.ikeys[anchor]
        return tuple(sorted((self.tiles[j].proto,) + tuple(x - y for x, y in zip(self.ikeys[j], ak)) for j in members))

    def window_key(self, i: int, r2, sqcap: bool = False) -> tuple:
        """Key of the window around tile i's reference point, anchored at that point."""
        members = self.window(self.tiles[i].shift, r2, sqcap=sqcap)
        return (self.den,) + self.rel_key(members, i)

    def patch_from_rel(self, members, anchor: int) -> Patch:
        a = self.tiles[anchor].shift
        return Patch(frozenset(PlacedTile(self.tiles[j].proto, vsub(self.tiles[j].shift, a)) for j in members),
                     self.protos, _trusted=True)


def tile_index(approx) -> TileIndex:
    if approx._index is None:
        approx._index = TileIndex(approx.patch.sorted_tiles(), approx.rule.protos)
    return approx._index


# anchored windows

def patch_key(p) -> tuple:
    patch = p.patch if isinstance(p, CanonicalPatch) else p
    return patch.key()


@dataclass
class LanguageAtRadius:
    r2: object
    entries: list
    level: int
    stabilized: bool
    anchors: dict = dc_field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.entries)

    def keys(self) -> set:
        return {patch_key(e) for e in self.entries}


def _covered_anchor(approx, t: PlacedTile, r2, ft) -> bool:
    """B(t, R) inside the support of the approximant (t is known to be inside it)."""
    return approx.region.ball_inside(t.shift, r2, center_known_inside=True)


def _check_lang_coverage(approx, r2):
    if sign(approx.coverage_radius2 - 4 * r2) <= 0:
        raise InsufficientCoverage(
            f"coverage radius^2 {approx.coverage_radius2} must exceed 4 R^2 = {4 * r2} at level {approx.level}")


def language_at(approx, r2, stabilized_check: bool = True) -> LanguageAtRadius:
    """Distinct windows (T - t) cap B(0, R) over tile reference points t whose R-ball is covered."""
    field = approx.rule.field
    r2 = field.coerce(r2)
    _check_lang_coverage(approx, r2)
    idx = tile_index(approx)
    seen: dict = {}
    for i, t in enumerate(idx.tiles):
        if not _covered_anchor(approx, t, r2, idx.fpos[i]):
            continue
        members = idx.window(t.shift, r2)
        key = idx.rel_key(members, i)
        if key not in seen:
            seen[key] = (members, i)
    entries = []
    anchors = {}
    for members, i in seen.values():
        patch = idx.patch_from_rel(members, i)
        cp = CanonicalPatch(patch, idx.tiles[i].shift)
        entries.append(cp)
        anchors[patch.key()] = idx.tiles[i].shift
    entries.sort(key=patch_key)
    stab = False
    if stabilized_check and approx.level >= 1:
        from .subst import grow

        prev = grow(approx.rule, approx.seed, approx.level - 1)
        if sign(prev.coverage_radius2 - 4 * r2) > 0:
            stab = language_at(prev, r2, stabilized_check=False).keys() == {patch_key(e) for e in entries}
    return LanguageAtRadius(r2, entries, approx.level, stab, anchors)


def _patch_rad2(patch: Patch):
    """Squared radius about the origin of the support of patch (max vertex norm)."""
    best = None
    for t in patch.tiles:
        for v in patch.protos.polygon(t.proto, t.shift).vertices:
            n = norm2(v)
            if best is None or sign(n - best) > 0:
                best = n
    return best


def _fits(cov2, w2, r2) -> bool:
    """W + r <= C for squared quantities, decided exactly."""
    slack = cov2 - w2 - r2
    if sign(slack) < 0:
        return False
    return sign(slack * slack - 4 * w2 * r2) >= 0


def occurrences(approx, p, window2, check: bool = True) -> list:
    """Sorted shifts t with p + t inside the approximant and |t - center|^2 < window^2.

    With window2 = None every occurrence in the approximant is returned.
    """
    patch = p.patch if isinstance(p, CanonicalPatch) else p
    field = approx.rule.field
    if not patch.tiles:
        return []
    idx = tile_index(approx)
    if window2 is not None:
        window2 = field.coerce(window2)
        if check and not _fits(approx.coverage_radius2, window2, _patch_rad2(patch)):
            raise InsufficientCoverage(
                f"window^2 {window2} plus patch radius exceeds coverage radius^2 {approx.coverage_radius2} "
                f"at level {approx.level}")
    tiles = patch.sorted_tiles()
    pivot = tiles[0]
    rel = []
    for q in tiles[1:]:
        k = idx.ikey_of(vsub(q.shift, pivot.shift))
        if k is None:
            return []
        rel.append((q.proto, k))
    c = approx.center
    out = []
    fw = window2.approx() if window2 is not None else None
    fc = np.array([e.approx() for e in c])
    for i in np.nonzero(idx.protoarr == pivot.proto)[0].tolist():
        base = idx.ikeys[i]
        if fw is not None:
            ft = idx.fpos[i] - pivot.fshift() - fc
            fd = float(ft @ ft)
            if fd > fw * (1 + _TOL) + _TOL:
                continue
        if not all((pr, tuple(a + b for a, b in zip(base, k))) in idx.lookup for pr, k in rel):
            continue
        t = vsub(idx.tiles[i].shift, pivot.shift)
        if window2 is not None and sign(norm2(vsub(t, c)) - window2) >= 0:
            continue
        out.append(t)
    out.sort(key=lambda v: tuple(v))
    return out


@dataclass
class DisplacementSet:
    p1: object
    p2: object
    window2: object
    level: int
    shifts: list

    def __contains__(self, d):
        return vkey(d) in {vkey(s) for s in self.shifts}


def displacement_set(approx, p1, p2, window2, verify: bool = True) -> DisplacementSet:
    """Shifts d = t2 - t1 between occurrences of p1 and p2 inside the window, |d|^2 < window^2.

    Each distinct d is certified by building p1 + t1 together with p2 + t2 as
    one patch (overlap check plus membership in the approximant).
    """
    field = approx.rule.field
    window2 = field.coerce(window2)
    occ1 = occurrences(approx, p1, window2)
    occ2 = occurrences(approx, p2, window2)
    pa = p1.patch if isinstance(p1, CanonicalPatch) else p1
    pb = p2.patch if isinstance(p2, CanonicalPatch) else p2
    idx = tile_index(approx)
    f1 = np.array([[e.approx() for e in t] for t in occ1]).reshape(len(occ1), idx.dim)
    f2 = np.array([[e.approx() for e in t] for t in occ2]).reshape(len(occ2), idx.dim)
    fw = window2.approx()
    found: dict = {}
    for a, t1 in enumerate(occ1):
        if not len(occ2):
            break
        diff = f2 - f1[a]
        close = np.nonzero((diff ** 2).sum(axis=1) < fw * (1 + _TOL) + _TOL)[0]
        for b in close.tolist():
            d = vsub(occ2[b], t1)
            if sign(norm2(d) - window2) >= 0:
                continue
            k = vkey(d)
            if k not in found:
                found[k] = (d, t1, occ2[b])
    shifts = []
    for k in sorted(found):
        d, t1, t2 = found[k]
        if verify:
            combined = {u.key: u for u in pa.translate(t1).tiles}
            for u in pb.translate(t2).tiles:
                combined.setdefault(u.key, u)
            patch_build(list(combined.values()), approx.rule.protos)
            if any(idx.find(u.proto, u.shift) is None for u in combined.values()):
                raise InsufficientCoverage("displacement witness not contained in the approximant",
                                           displacement=d, level=approx.level)
        shifts.append(d)
    shifts.sort(key=lambda v: tuple(v))
    return DisplacementSet(p1, p2, window2, approx.level, shifts)


@dataclass
class LegalityVerdict:
    status: str                 # "legal" or "not_found"
    witness: tuple | None
    level: int
    searched_window2: object = None

    @property
    def legal(self) -> bool:
        return self.status == "legal"


def is_legal(rule, seed, p, max_level: int) -> LegalityVerdict:
    """Search levels 1..max_level for a translate of p inside the approximant."""
    from .subst import grow

    patch = p.patch if isinstance(p, CanonicalPatch) else p
    if not isinstance(patch, Patch):
        patch = patch_build(patch, rule.protos)
    last = None
    for m in range(1, max_level + 1):
        try:
            approx = grow(rule, seed, m)
        except ResourceLimit:
            if last is None:
                raise
            break
        last = approx
        occ = occurrences(approx, patch, None)
        if occ:
            return LegalityVerdict("legal", occ[0], m, None)
    return LegalityVerdict("not_found", None, max_level, last.coverage_radius2 if last else None)


def return_vectors(approx, max_norm2) -> list:
    """All z != 0 with |z|^2 < max_norm2 such that t and t + z are tiles of one type."""
    field = approx.rule.field
    max_norm2 = field.coerce(max_norm2)
    if sign(approx.coverage_radius2 - max_norm2) < 0:
        raise InsufficientCoverage(
            f"return vectors up to norm^2 {max_norm2} need coverage radius^2 >= that; have {approx.coverage_radius2}")
    idx = tile_index(approx)
    memo = idx._returns.get(max_norm2.c)
    if memo is not None:
        return list(memo)
    fr2 = max_norm2.approx()
    fr = math.sqrt(fr2)
    karr = np.array(idx.ikeys, dtype=object)
    found: dict = {}
    for i in range(len(idx.tiles)):
        js = np.array(idx.near(idx.fpos[i], fr + 1e-6), dtype=int)
        js = js[(idx.protoarr[js] == idx.protoarr[i]) & (js != i)]
        diff = idx.fpos[js] - idx.fpos[i]
        js = js[(diff * diff).sum(axis=1) <= fr2 * (1 + _TOL) + _TOL]
        for k in (karr[js] - karr[i]).tolist():
            found[tuple(k)] = None
    out = []
    for k in found:
        z = idx.key_to_vec(k)
        if sign(norm2(z) - max_norm2) < 0:
            out.append(z)
    out.sort(key=lambda v: tuple(v))
    idx._returns[max_norm2.c] = tuple(out)
    return out


def period_probe(approx, z, window2) -> bool:
    """z acts as a period on the part of the window that it maps into itself."""
    field = approx.rule.field
    window2 = field.coerce(window2)
    z = tuple(field.coerce(e) for e in z)
    if sign(norm2(z) - window2) >= 0:
        raise InsufficientCoverage("|z|^2 must be smaller than window^2")
    if sign(window2 - approx.coverage_radius2) > 0:
        raise InsufficientCoverage(f"window^2 {window2} exceeds coverage radius^2 {approx.coverage_radius2}")
    idx = tile_index(approx)
    c = approx.center
    fc = np.array([e.approx() for e in c])
    fw = window2.approx()
    fz = np.array([e.approx() for e in z])
    for i, t in enumerate(idx.tiles):
        d0 = idx.fpos[i] - fc
        if float(d0 @ d0) > fw * (1 + _TOL) + _TOL:
            continue
        if sign(norm2(vsub(t.shift, c)) - window2) >= 0:
            continue
        for s, fs in ((z, fz), (vneg(z), -fz)):
            d1 = d0 + fs
            if float(d1 @ d1) > fw * (1 + _TOL) + _TOL:
                continue
            target = vadd(t.shift, s)
            if sign(norm2(vsub(target, c)) - window2) >= 0:
                continue
            if idx.find(t.proto, target) is None:
                return False
    return True


def observed_max_gap(occ: list, approx) -> float:
    """Largest distance from a tile reference point in the window to the nearest occurrence (float, diagnostic)."""
    if not occ:
        return math.inf
    pts = np.array([[e.approx() for e in t] for t in occ])
    idx = tile_index(approx)
    far = 0.0
    for p in idx.fpos:
        d = ((pts - p) ** 2).sum(axis=1).min()
        far = max(far, float(d))
    return math.sqrt(far)


def restrict_entry(entry: CanonicalPatch, r2) -> Patch:
    """An anchored language entry cut down to a smaller radius about its anchor."""
    zero = tuple(entry.patch.protos.field.zero for _ in range(entry.patch.protos.dim))
    return restrict(entry.patch, zero, r2)


def canonical_form(p) -> CanonicalPatch:
    return canonicalize(p.patch if isinstance(p, CanonicalPatch) else p)
