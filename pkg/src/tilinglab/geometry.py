"""Exact polygon predicates over a real number field.

Polygons are simple and counterclockwise in the plane, or closed intervals on
the line.  Every predicate is decided with exact field arithmetic; float
evaluations are used only as a filter when their error bound settles the
answer.
"""
from __future__ import annotations

from functools import cmp_to_key
from typing import Iterable, Sequence

from .errors import DimensionError, InvalidUnion
from .exactnum import dot, norm2, sign, vadd, vkey, vsub

INSIDE, TOUCHES, OUTSIDE = "inside", "touches", "outside"


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def orient(a, b, c) -> int:
    """Sign of the turn a -> b -> c (positive for counterclockwise)."""
    return sign(cross(vsub(b, a), vsub(c, a)))


def _fcoords(v) -> tuple:
    return tuple(e.approx() for e in v)


class Polygon:
    """A simple polygon (d = 2, counterclockwise) or a closed interval (d = 1)."""

    __slots__ = ("vertices", "dim", "_tris", "_fbox", "_area")

    def __init__(self, vertices: Sequence, check: bool = True):
        verts = tuple(tuple(v) for v in vertices)
        if not verts:
            raise ValueError("polygon needs vertices")
        dim = len(verts[0])
        if dim not in (1, 2):
            raise DimensionError(f"dimension {dim} not supported (d must be 1 or 2)")
        self._tris = None
        self._fbox = None
        self._area = None
        self.dim = dim
        if dim == 1:
            if len(verts) != 2:
                raise ValueError("an interval tile needs exactly two endpoints")
            a, b = verts
            s = sign(b[0] - a[0])
            if s == 0:
                raise ValueError("interval tile has empty interior")
            self.vertices = verts if s > 0 else (b, a)
            return
        if len(verts) < 3:
            raise ValueError("polygon needs at least three vertices")
        area2 = _signed_area2(verts)
        s = sign(area2)
        if s == 0:
            raise ValueError("polygon has empty interior")
        if s < 0:
            verts = tuple(reversed(verts))
            area2 = -area2
        self.vertices = verts
        self._area = area2 / 2
        if check and not _is_simple(verts):
            raise ValueError("polygon is not simple")

    def translate(self, v) -> "Polygon":
        p = Polygon.__new__(Polygon)
        p.vertices = tuple(vadd(w, v) for w in self.vertices)
        p.dim = self.dim
        p._area = self._area
        p._fbox = None
        p._tris = None if self._tris is None else tuple(tuple(vadd(w, v) for w in t) for t in self._tris)
        return p

    def transform(self, m) -> "Polygon":
        from .exactnum import matvec

        return Polygon([matvec(m, w) for w in self.vertices], check=False)

    def area(self):
        if self.dim == 1:
            return self.vertices[1][0] - self.vertices[0][0]
        return self._area

    def edges(self):
        vs = self.vertices
        if self.dim == 1:
            return [(vs[0], vs[1])]
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def triangles(self):
        if self._tris is None:
            self._tris = _ear_clip(self.vertices)
        return self._tris

    def fbox(self):
        if self._fbox is None:
            fs = [_fcoords(v) for v in self.vertices]
            self._fbox = tuple((min(f[i] for f in fs), max(f[i] for f in fs)) for i in range(self.dim))
        return self._fbox

    def contains_point(self, p, closed: bool = True) -> bool:
        if self.dim == 1:
            lo, hi = self.vertices[0][0], self.vertices[1][0]
            s1, s2 = sign(p[0] - lo), sign(hi - p[0])
            return (s1 >= 0 and s2 >= 0) if closed else (s1 > 0 and s2 > 0)
        if closed:
            return any(_in_closed_triangle(t, p) for t in self.triangles())
        if not any(_in_closed_triangle(t, p) for t in self.triangles()):
            return False
        return all(seg_dist2(p, a, b) != 0 for a, b in self.edges())

    def key(self):
        return tuple(vkey(v) for v in self.vertices)

    def __eq__(self, other):
        return isinstance(other, Polygon) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Polygon({list(self.vertices)!r})"


def _signed_area2(verts):
    n = len(verts)
    acc = cross(verts[0], verts[1])
    for i in range(1, n):
        acc = acc + cross(verts[i], verts[(i + 1) % n])
    return acc


def _segments_intersect(a, b, c, d) -> bool:
    """Closed segments ab and cd share a point."""
    o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True

    def on_seg(p, q, r):
        return all(sign(min_(p[i], q[i]) - r[i]) <= 0 and sign(r[i] - max_(p[i], q[i])) <= 0 for i in range(2))

    return (o1 == 0 and on_seg(a, b, c)) or (o2 == 0 and on_seg(a, b, d)) or \
        (o3 == 0 and on_seg(c, d, a)) or (o4 == 0 and on_seg(c, d, b))


def min_(x, y):
    return x if sign(x - y) <= 0 else y


def max_(x, y):
    return y if sign(x - y) <= 0 else x


def _is_simple(verts) -> bool:
    n = len(verts)
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent edges may only share their common vertex
                a, b = edges[i]
                c, d = edges[j]
                shared = b if j == i + 1 else a
                other_i = a if j == i + 1 else b
                other_j = d if j == i + 1 else c
                if orient(other_i, shared, other_j) == 0 and sign(dot(vsub(other_i, shared), vsub(other_j, shared))) > 0:
                    return False
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def _in_closed_triangle(t, p) -> bool:
    a, b, c = t
    return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0


def _ear_clip(verts):
    pts = list(verts)
    # drop vertices lying on the segment between their neighbours
    changed = True
    while changed and len(pts) > 3:
        changed = False
        for i in range(len(pts)):
            if orient(pts[i - 1], pts[i], pts[(i + 1) % len(pts)]) == 0:
                pts.pop(i)
                changed = True
                break
    tris = []
    guard = 0
    while len(pts) > 3:
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if orient(a, b, c) <= 0:
                continue
            tri = (a, b, c)
            if any(_in_closed_triangle(tri, q) for q in pts if q is not a and q is not b and q is not c):
                continue
            tris.append(tri)
            pts.pop(i)
            break
        else:
            raise ValueError("triangulation failed; polygon not simple")
        guard += 1
        if guard > 10000:
            raise ValueError("triangulation did not terminate")
    tris.append(tuple(pts))
    return tuple(tris)


def _tri_separated(t1, t2) -> bool:
    for tri, other in ((t1, t2), (t2, t1)):
        for i in range(3):
            a, b = tri[i], tri[(i + 1) % 3]
            if all(orient(a, b, q) <= 0 for q in other):
                return True
    return False


def _fbox_disjoint(p: Polygon, q: Polygon, tol: float = 1e-9) -> bool:
    bp, bq = p.fbox(), q.fbox()
    return any(bp[i][1] < bq[i][0] - tol or bq[i][1] < bp[i][0] - tol for i in range(p.dim))


def interiors_overlap(p: Polygon, q: Polygon) -> bool:
    """True iff the open interiors intersect; contact along edges or vertices is not overlap."""
    if p.dim != q.dim:
        raise DimensionError("polygons of different dimension")
    if _fbox_disjoint(p, q):
        return False
    if p.dim == 1:
        lo = max_(p.vertices[0][0], q.vertices[0][0])
        hi = min_(p.vertices[1][0], q.vertices[1][0])
        return sign(hi - lo) > 0
    for t1 in p.triangles():
        for t2 in q.triangles():
            if not _tri_separated(t1, t2):
                return True
    return False


def seg_dist2(p, a, b):
    """Squared distance from point p to the closed segment ab."""
    ab = vsub(b, a)
    ap = vsub(p, a)
    den = norm2(ab)
    num = dot(ap, ab)
    if sign(num) <= 0:
        return norm2(ap)
    if sign(num - den) >= 0:
        return norm2(vsub(p, b))
    return norm2(ap) - num * num / den


def point_dist2(p, poly: Polygon):
    """Squared distance from p to the closed polygon (0 when p lies in it)."""
    if poly.contains_point(p, closed=True):
        return p[0] - p[0]
    return min_all(seg_dist2(p, a, b) for a, b in poly.edges())


def min_all(values: Iterable):
    it = iter(values)
    best = next(it)
    for v in it:
        if sign(v - best) < 0:
            best = v
    return best


def ball_relation(p: Polygon, center, r2) -> str:
    """inside: closure of p lies in the open ball; touches: closure meets the closed ball."""
    if sign(r2) <= 0:
        raise ValueError("R^2 must be positive")
    if all(sign(norm2(vsub(v, center)) - r2) < 0 for v in p.vertices):
        return INSIDE
    if sign(point_dist2(center, p) - r2) <= 0:
        return TOUCHES
    return OUTSIDE


# unions of polygons

def _line_param(u, a):
    return a[0] if not u[0].is_zero() else a[1]


def union_boundary(polys: Sequence[Polygon]):
    """Boundary of the union of interior-disjoint polygons as merged oriented segments.

    Edges shared (with opposite orientation) by two polygons cancel; what remains
    is merged along each supporting line.
    """
    if not polys:
        return []
    if polys[0].dim == 1:
        pts: dict = {}
        for poly in polys:
            for end, s in ((poly.vertices[0], -1), (poly.vertices[1], 1)):
                k = vkey(end)
                cur = pts.get(k, (end, 0))
                pts[k] = (end, cur[1] + s)
        return [(v, v) for v, s in pts.values() if s != 0]
    lines: dict = {}
    for poly in polys:
        for a, b in poly.edges():
            v = vsub(b, a)
            if not v[0].is_zero():
                u = (v[0].field.one, v[1] / v[0])
            else:
                u = (v[0].field.zero, v[0].field.one)
            off = cross(u, a)
            key = (vkey(u), off.c)
            ta, tb = _line_param(u, a), _line_param(u, b)
            s = 1 if sign(tb - ta) > 0 else -1
            lo, hi = (ta, tb) if s > 0 else (tb, ta)
            lines.setdefault(key, (u, off, []))[2].append((lo, hi, s))
    cmp = cmp_to_key(lambda x, y: sign(x - y))
    out = []
    for key in sorted(lines):
        u, off, segs = lines[key]
        pts = {}
        for lo, hi, _ in segs:
            pts[lo.c] = lo
            pts[hi.c] = hi
        ts = sorted(pts.values(), key=cmp)
        index = {t.c: i for i, t in enumerate(ts)}
        net = [0] * max(0, len(ts) - 1)
        for lo, hi, s in segs:
            for i in range(index[lo.c], index[hi.c]):
                net[i] += s
        i = 0
        while i < len(net):
            if net[i] == 0:
                i += 1
                continue
            j = i
            while j + 1 < len(net) and net[j + 1] == net[i]:
                j += 1
            t0, t1 = ts[i], ts[j + 1]
            p0, p1 = _line_point(u, off, t0), _line_point(u, off, t1)
            out.append((p0, p1) if net[i] > 0 else (p1, p0))
            i = j + 1
    return out


def _line_point(u, off, t):
    if not u[0].is_zero():
        # y = m x + off with u = (1, m)
        return (t, u[1] * t + off)
    return (-off, t)


def check_interior_disjoint(polys: Sequence[Polygon]):
    """Raise InvalidUnion naming the first overlapping pair (bounding-box prefiltered)."""
    order = sorted(range(len(polys)), key=lambda i: polys[i].fbox()[0][0])
    active: list[int] = []
    for i in order:
        lo = polys[i].fbox()[0][0]
        active = [j for j in active if polys[j].fbox()[0][1] >= lo - 1e-9]
        for j in active:
            if interiors_overlap(polys[i], polys[j]):
                a, b = sorted((i, j))
                raise InvalidUnion(f"polygons {a} and {b} overlap")
        active.append(i)


class Region:
    """Closed union of interior-disjoint polygons, described by its boundary."""

    def __init__(self, boundary, dim: int):
        self.boundary = list(boundary)
        self.dim = dim
        self._fseg = [(_fcoords(a), _fcoords(b)) for a, b in self.boundary]

    @classmethod
    def of(cls, polys: Sequence[Polygon], check: bool = True) -> "Region":
        if check:
            check_interior_disjoint(polys)
        return cls(union_boundary(polys), polys[0].dim if polys else 2)

    def boundary_dist2(self, p):
        if self.dim == 1:
            return min_all(((p[0] - a[0]) * (p[0] - a[0]) for a, _ in self.boundary))
        return min_all(seg_dist2(p, a, b) for a, b in self.boundary)

    def contains(self, p) -> bool:
        """Closed containment by ray crossing parity."""
        if not self.boundary:
            return False
        if sign(self.boundary_dist2(p)) == 0:
            return True
        if self.dim == 1:
            return sum(1 for a, _ in self.boundary if sign(a[0] - p[0]) > 0) % 2 == 1
        inside = False
        for a, b in self.boundary:
            ya, yb = sign(a[1] - p[1]) > 0, sign(b[1] - p[1]) > 0
            if ya != yb:
                # x coordinate of the crossing compared with p.x
                num = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])
                s = sign(num) * sign(b[1] - a[1])
                if s > 0:
                    inside = not inside
        return inside

    def ball_inside(self, center, r2, center_known_inside: bool = False) -> bool:
        """Open ball B(center, r) lies in the closed region."""
        if sign(r2) <= 0:
            raise ValueError("r^2 must be positive")
        fc = _fcoords(center)
        fr2 = r2.approx() if hasattr(r2, "approx") else float(r2)
        if self._fseg:
            fd = min(_fseg_dist2(fc, a, b) for a, b in self._fseg)
            tol = 1e-9 * (1.0 + fd + fr2)
            if fd < fr2 - tol:
                return False
            if fd > fr2 + tol and center_known_inside:
                return True
        if not center_known_inside and not self.contains(center):
            return False
        return sign(self.boundary_dist2(center) - r2) >= 0

    def inradius2(self, center):
        if not self.contains(center):
            return center[0] - center[0]
        return self.boundary_dist2(center)


def _fseg_dist2(p, a, b):
    if len(p) == 1:
        return (p[0] - a[0]) ** 2
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = p[0] - a[0], p[1] - a[1]
    den = abx * abx + aby * aby
    t = (apx * abx + apy * aby) / den if den else 0.0
    t = min(1.0, max(0.0, t))
    dx, dy = apx - t * abx, apy - t * aby
    return dx * dx + dy * dy


def contains_ball(polys: Sequence[Polygon], center, r2) -> bool:
    """True iff the ball of radius r about center lies in the closed union of polys."""
    if not polys:
        return False
    return Region.of(polys, check=True).ball_inside(center, r2)
