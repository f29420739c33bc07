"""Placed tiles, patches, translation classes and ball restrictions."""
from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyPatch, OverlapError
from .exactnum import NumberField, frac_str, is_zero_vec, vadd, vkey, vneg, vsub
from .geometry import INSIDE, OUTSIDE, Polygon, ball_relation, interiors_overlap

CAP, SQCAP = "cap", "sqcap"


class Prototiles:
    """The prototile table of a rule: polygons that contain the origin.

    Overlap decisions between two translated prototiles depend only on their
    relative position, so they are memoised on that key.
    """

    def __init__(self, polys: Sequence[Polygon], names: Sequence[str] | None = None, field: NumberField | None = None):
        self.polys = tuple(polys)
        self.names = tuple(names) if names is not None else tuple(f"P{i}" for i in range(len(polys)))
        self.dim = self.polys[0].dim if self.polys else 2
        self.field = field if field is not None else self.polys[0].vertices[0][0].field
        self._memo: dict = {}
        self.fboxes = tuple(p.fbox() for p in self.polys)
        self.fradius = tuple(max(sum(c * c for c in (e.approx() for e in v)) for v in p.vertices) ** 0.5 for p in self.polys)

    def __len__(self):
        return len(self.polys)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def polygon(self, proto: int, shift) -> Polygon:
        return self.polys[proto].translate(shift)

    def overlap(self, pa: int, sa, pb: int, sb) -> bool:
        rel = vsub(sb, sa)
        key = (pa, pb, vkey(rel))
        hit = self._memo.get(key)
        if hit is None:
            hit = interiors_overlap(self.polys[pa], self.polys[pb].translate(rel))
            self._memo[key] = hit
        return hit


class PlacedTile:
    """Prototile index plus an exact translation."""

    __slots__ = ("proto", "shift", "_key", "_f")

    def __init__(self, proto: int, shift):
        self.proto = proto
        self.shift = tuple(shift)
        self._key = (proto, vkey(self.shift))
        self._f = None

    @property
    def key(self):
        return self._key

    def fshift(self) -> tuple:
        if self._f is None:
            self._f = tuple(e.approx() for e in self.shift)
        return self._f

    def translate(self, v) -> "PlacedTile":
        return PlacedTile(self.proto, vadd(self.shift, v))

    def __eq__(self, other):
        return isinstance(other, PlacedTile) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"PlacedTile({self.proto}, {list(self.shift)!r})"


def tile_order_key(t: PlacedTile):
    """Deterministic total order: prototile index, then exact coordinates."""
    return (t.proto,) + t.shift


def _check_overlaps(tiles: Sequence[PlacedTile], protos: Prototiles):
    """Sweep over float bounding boxes; exact tests only for candidate pairs."""
    boxes = []
    for t in tiles:
        f = t.fshift()
        b = protos.fboxes[t.proto]
        boxes.append(tuple((b[i][0] + f[i], b[i][1] + f[i]) for i in range(len(f))))
    order = sorted(range(len(tiles)), key=lambda i: boxes[i][0][0])
    active: list[int] = []
    first = None
    for i in order:
        lo = boxes[i][0][0]
        active = [j for j in active if boxes[j][0][1] > lo - 1e-9]
        for j in active:
            if len(boxes[i]) > 1 and (boxes[j][1][1] < boxes[i][1][0] - 1e-9 or boxes[i][1][1] < boxes[j][1][0] - 1e-9):
                continue
            a, b = tiles[i], tiles[j]
            if protos.overlap(a.proto, a.shift, b.proto, b.shift):
                pair = tuple(sorted((i, j)))
                if first is None or pair < first:
                    first = pair
        active.append(i)
    if first is not None:
        a, b = tiles[first[0]], tiles[first[1]]
        raise OverlapError(f"tiles {a!r} and {b!r} overlap", pair=(a, b))


class Patch:
    """A finite set of interior-disjoint placed tiles over one prototile table."""

    __slots__ = ("tiles", "protos", "_sorted", "_hash")

    def __init__(self, tiles: Iterable[PlacedTile], protos: Prototiles, _trusted: bool = False):
        if _trusted:
            self.tiles = tiles if isinstance(tiles, frozenset) else frozenset(tiles)
        else:
            tl = list(tiles)
            seen = set()
            for t in tl:
                if not 0 <= t.proto < len(protos):
                    raise ValueError(f"prototile index {t.proto} out of range")
                if t.key in seen:
                    raise OverlapError(f"duplicate tile {t!r}", pair=(t, t))
                seen.add(t.key)
            _check_overlaps(tl, protos)
            self.tiles = frozenset(tl)
        self.protos = protos
        self._sorted = None
        self._hash = None

    def __len__(self):
        return len(self.tiles)

    def __iter__(self):
        return iter(self.sorted_tiles())

    def __contains__(self, t):
        return t in self.tiles

    def __eq__(self, other):
        return isinstance(other, Patch) and self.tiles == other.tiles

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.tiles)
        return self._hash

    def __repr__(self):
        return f"Patch({len(self)} tiles)"

    def sorted_tiles(self) -> list[PlacedTile]:
        if self._sorted is None:
            self._sorted = sorted(self.tiles, key=tile_order_key)
        return self._sorted

    def translate(self, v) -> "Patch":
        return Patch(frozenset(t.translate(v) for t in self.tiles), self.protos, _trusted=True)

    def issubset(self, other: "Patch") -> bool:
        return self.tiles <= other.tiles

    def polygons(self) -> list[Polygon]:
        return [self.protos.polygon(t.proto, t.shift) for t in self.sorted_tiles()]

    def key(self) -> tuple:
        return tuple(sorted(t.key for t in self.tiles))


def patch_build(tiles: Iterable[PlacedTile], protos: Prototiles) -> Patch:
    """Validated patch; raises OverlapError naming the first offending pair."""
    return Patch(tiles, protos)


def restrict(patch: Patch, center, r2, mode: str = CAP) -> Patch:
    """P cap B(center, R): tiles inside the open ball; P sqcap B: tiles whose closure meets it."""
    if mode not in (CAP, SQCAP):
        raise ValueError(f"unknown mode {mode!r}")
    keep = []
    for t in patch.tiles:
        rel = ball_relation(patch.protos.polygon(t.proto, t.shift), center, r2)
        if rel == INSIDE or (mode == SQCAP and rel != OUTSIDE):
            keep.append(t)
    return Patch(frozenset(keep), patch.protos, _trusted=True)


class CanonicalPatch:
    """A patch translated so that its anchor tile sits at the origin."""

    __slots__ = ("patch", "anchor_shift")

    def __init__(self, patch: Patch, anchor_shift):
        self.patch = patch
        self.anchor_shift = tuple(anchor_shift)

    def __eq__(self, other):
        return isinstance(other, CanonicalPatch) and self.patch == other.patch

    def __hash__(self):
        return hash(self.patch)

    def __repr__(self):
        return f"CanonicalPatch({len(self.patch)} tiles)"


def canonicalize(patch: Patch) -> CanonicalPatch:
    if not patch.tiles:
        raise EmptyPatch("cannot canonicalize an empty patch")
    anchor = min(patch.tiles, key=tile_order_key)
    if is_zero_vec(anchor.shift):
        return CanonicalPatch(patch, anchor.shift)
    return CanonicalPatch(patch.translate(vneg(anchor.shift)), anchor.shift)


# CSV serialisation

def _coord_str(e) -> str:
    return " ".join(frac_str(c) for c in e.c)


def patch_to_csv(patch: Patch) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    d = patch.protos.dim
    w.writerow(["proto_index"] + [f"shift_{i}" for i in range(d)])
    for t in patch.sorted_tiles():
        w.writerow([t.proto] + [_coord_str(e) for e in t.shift])
    return buf.getvalue()


def patch_from_csv(text: str, protos: Prototiles) -> Patch:
    rows = list(csv.reader(io.StringIO(text)))
    field = protos.field
    tiles = []
    for row in rows[1:]:
        if not row:
            continue
        shift = tuple(field.element([Fraction(c) for c in cell.split()]) for cell in row[1:])
        tiles.append(PlacedTile(int(row[0]), shift))
    return patch_build(tiles, protos)
