"""Substitution and pseudo-substitution rules on prototiles.

A rule is (prototiles, phi, omega): phi is an expanding linear map and
omega(P) a patch for every prototile P.  It is extended to translates by
omega(P + x) = omega(P) + phi(x) and to patches tile by tile.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources

from .errors import DimensionError, FieldError, NoSeedFound, OverlapError, ResourceLimit, SchemaError, TilingError
from .exactnum import (NumberField, frac_str, identity, is_scalar_matrix, matinv, matpow, matsub, matvec, norm2,
                       sign, to_fraction, vadd, vkey)
from .geometry import Polygon, Region, min_all, point_dist2, seg_dist2, _segments_intersect
from .tiling import Patch, PlacedTile, Prototiles, patch_build

DEFAULT_TILE_CAP = 5_000_000
KINDS = ("substitution", "pseudo")


def tile_cap() -> int:
    raw = os.environ.get("AL_TILE_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_TILE_CAP


@dataclass(frozen=True)
class Child:
    proto: int
    shift: tuple


class SubstitutionRule:
    """Validated rule.  ``images[p]`` is the ordered child list of omega(P_p)."""

    def __init__(self, field: NumberField, dim: int, protos: Prototiles, phi, images, kind: str = "substitution",
                 name: str = "", metadata: dict | None = None):
        self.field = field
        self.dim = dim
        self.protos = protos
        self.phi = tuple(tuple(r) for r in phi)
        self.images = tuple(tuple(c) for c in images)
        self.kind = kind
        self.name = name
        self.metadata = dict(metadata or {})
        self.scalar = self.phi[0][0] if is_scalar_matrix(self.phi) else None
        self.support_L = None  # rational upper bound for pseudo rules, 0 for substitutions
        self._levels: dict = {}
        self._digest = None

    # basic maps
    def apply_phi(self, v):
        if self.scalar is not None:
            s = self.scalar
            return tuple(s * e for e in v)
        return matvec(self.phi, v)

    def phi_power(self, n: int):
        return matpow(self.phi, n)

    @property
    def prototiles(self):
        return self.protos.polys

    def incidence_matrix(self) -> list[list[int]]:
        k = len(self.protos)
        m = [[0] * k for _ in range(k)]
        for p, kids in enumerate(self.images):
            for c in kids:
                m[c.proto][p] += 1
        return m

    def image_patch(self, proto: int) -> Patch:
        return Patch(frozenset(PlacedTile(c.proto, c.shift) for c in self.images[proto]), self.protos, _trusted=True)

    def to_json(self) -> dict:
        def coord(e):
            return [frac_str(c) for c in e.c]

        return {
            "name": self.name,
            "dim": self.dim,
            "field": self.field.to_json(),
            "kind": self.kind,
            "prototiles": [{"name": n, "vertices": [[coord(e) for e in v] for v in p.vertices]}
                           for n, p in zip(self.protos.names, self.protos.polys)],
            "phi": [[coord(e) for e in row] for row in self.phi],
            "images": {self.protos.names[p]: [{"proto": self.protos.names[c.proto], "shift": [coord(e) for e in c.shift]}
                                              for c in kids] for p, kids in enumerate(self.images)},
        }

    def digest(self) -> str:
        if self._digest is None:
            blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
            self._digest = hashlib.sha256(blob.encode()).hexdigest()
        return self._digest

    def __repr__(self):
        return f"SubstitutionRule({self.name or self.digest()[:12]}, {len(self.protos)} prototiles, {self.kind})"


# parsing

def _parse_coord(field: NumberField, raw):
    if isinstance(raw, (list, tuple)):
        if len(raw) > field.degree:
            raise FieldError(f"coordinate {raw!r} has more coefficients than the field degree {field.degree}")
        return field.element([to_fraction(c) for c in raw])
    return field.coerce(to_fraction(raw))


def _parse_point(field, dim, raw):
    if not isinstance(raw, (list, tuple)) or len(raw) != dim:
        raise SchemaError(f"expected a point with {dim} coordinates, got {raw!r}")
    return tuple(_parse_coord(field, c) for c in raw)


def _require(doc, key, where="rule"):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"missing key {key!r} in {where}")
    return doc[key]


def parse_field(raw) -> NumberField:
    mp = _require(raw, "min_poly", "field")
    ri = _require(raw, "root_interval", "field")
    if not isinstance(ri, (list, tuple)) or len(ri) != 2:
        raise SchemaError("root_interval must be a pair")
    return NumberField(mp, ri)


def rule_from_dict(doc: dict, validate: bool = True) -> SubstitutionRule:
    if not isinstance(doc, dict):
        raise SchemaError("rule document must be a mapping")
    kind = doc.get("kind", "substitution")
    if kind not in KINDS:
        raise SchemaError(f"unknown kind {kind!r}")
    dim = _require(doc, "dim")
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise SchemaError("dim must be an integer")
    if dim not in (1, 2):
        raise DimensionError(f"dimension {dim} not supported (d must be 1 or 2)")
    field = parse_field(_require(doc, "field"))
    raw_protos = _require(doc, "prototiles")
    if not isinstance(raw_protos, list) or not raw_protos:
        raise SchemaError("prototiles must be a nonempty list")
    names, polys = [], []
    for i, rp in enumerate(raw_protos):
        name = str(rp.get("name", f"P{i}")) if isinstance(rp, dict) else f"P{i}"
        verts = _require(rp, "vertices", f"prototile {name}")
        pts = [_parse_point(field, dim, v) for v in verts]
        try:
            poly = Polygon(pts)
        except ValueError as exc:
            raise SchemaError(f"prototile {name}: {exc}") from exc
        if not poly.contains_point(tuple(field.zero for _ in range(dim)), closed=False):
            raise SchemaError(f"prototile {name} must contain the origin in its interior")
        names.append(name)
        polys.append(poly)
    if len(set(names)) != len(names):
        raise SchemaError("prototile names must be distinct")
    protos = Prototiles(polys, names, field)
    raw_phi = _require(doc, "phi")
    if not isinstance(raw_phi, list) or len(raw_phi) != dim or any(not isinstance(r, list) or len(r) != dim for r in raw_phi):
        raise DimensionError(f"phi must be a {dim}x{dim} matrix")
    phi = tuple(tuple(_parse_coord(field, c) for c in row) for row in raw_phi)
    raw_images = _require(doc, "images")
    if isinstance(raw_images, dict):
        missing = [n for n in names if n not in raw_images]
        if missing:
            raise SchemaError(f"images missing for prototiles {missing}")
        seq = [raw_images[n] for n in names]
    elif isinstance(raw_images, list) and len(raw_images) == len(names):
        seq = raw_images
    else:
        raise SchemaError("images must map every prototile to a list of children")
    images = []
    for n, kids in zip(names, seq):
        if not isinstance(kids, list) or not kids:
            raise SchemaError(f"image of {n} must be a nonempty list")
        out = []
        for c in kids:
            pname = _require(c, "proto", f"image of {n}")
            if pname not in names:
                raise SchemaError(f"image of {n} refers to unknown prototile {pname!r}")
            out.append(Child(names.index(pname), _parse_point(field, dim, _require(c, "shift", f"image of {n}"))))
        images.append(out)
    rule = SubstitutionRule(field, dim, protos, phi, images, kind, str(doc.get("name", "")), doc.get("metadata"))
    if validate:
        validate_rule(rule)
    return rule


def rule_parse(text: str, validate: bool = True) -> SubstitutionRule:
    """Parse and validate a rule document (JSON text)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"rule file is not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and doc.get("kind") == "word":
        raise SchemaError("word substitutions are loaded with seqdyn.word_rule_parse")
    return rule_from_dict(doc, validate=validate)


def catalog_names() -> list[str]:
    root = resources.files("tilinglab") / "catalog"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def catalog_text(name: str) -> str:
    if name.startswith("catalog/"):
        name = name[len("catalog/"):]
    path = resources.files("tilinglab") / "catalog" / f"{name}.json"
    if not path.is_file():
        raise SchemaError(f"no catalog rule named {name!r}")
    return path.read_text()


_CATALOG_CACHE: dict = {}


def load_catalog(name: str):
    """Catalog rule by name; word rules come back as seqdyn.WordSubstitution."""
    key = name[len("catalog/"):] if name.startswith("catalog/") else name
    if key not in _CATALOG_CACHE:
        text = catalog_text(key)
        if json.loads(text).get("kind") == "word":
            from .seqdyn import word_rule_parse

            _CATALOG_CACHE[key] = word_rule_parse(text)
        else:
            _CATALOG_CACHE[key] = rule_parse(text)
    return _CATALOG_CACHE[key]


def load_rule(ref: str):
    """A catalog name (``chair`` or ``catalog/chair``) or a path to a rule file."""
    if os.path.exists(ref):
        with open(ref) as fh:
            text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"rule file is not valid JSON: {exc}") from None
        if isinstance(doc, dict) and doc.get("kind") == "word":
            from .seqdyn import word_rule_parse

            return word_rule_parse(text)
        return rule_parse(text)
    return load_catalog(ref)


# validation

def _det(m):
    if len(m) == 1:
        return m[0][0]
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def validate_rule(rule: SubstitutionRule) -> SubstitutionRule:
    det = _det(rule.phi)
    if sign(det) == 0:
        raise FieldError("phi is singular")
    absdet = det if sign(det) > 0 else -det
    for p, poly in enumerate(rule.protos.polys):
        img = patch_build([PlacedTile(c.proto, c.shift) for c in rule.images[p]], rule.protos)
        target = poly.transform(rule.phi)
        if rule.kind == "substitution":
            total = rule.field.zero
            for c in rule.images[p]:
                total = total + rule.protos.polys[c.proto].area()
            if total != absdet * poly.area():
                raise OverlapError(f"image of {rule.protos.names[p]} has area {total}, expected {absdet * poly.area()}")
            for t in img.tiles:
                for v in rule.protos.polygon(t.proto, t.shift).vertices:
                    if not target.contains_point(v, closed=True):
                        raise OverlapError(f"child of {rule.protos.names[p]} leaves phi(P)")
    if rule.kind == "substitution":
        rule.support_L = Fraction(0)
    else:
        rule.support_L = _support_bound(rule)
    return rule


def _sqrt_upper(x) -> Fraction:
    """A rational upper bound for the square root of a nonnegative field element."""
    if sign(x) <= 0:
        return Fraction(0)
    f = math.sqrt(max(x.approx(), 0.0))
    q = Fraction(math.ceil(f * 2 ** 20) + 1, 2 ** 20)
    while sign(x - q * q) > 0:
        q = q * 2
    return q


def _support_bound(rule: SubstitutionRule) -> Fraction:
    """Rational L with supp omega(P) inside phi(closure P) + B(0, L) for every prototile.

    Each child point lies within diam(child) of a child vertex, so
    max_vertex_distance + diam(child) bounds the distance of the whole child.
    """
    best = Fraction(0)
    for p, poly in enumerate(rule.protos.polys):
        target = poly.transform(rule.phi)
        for c in rule.images[p]:
            child = rule.protos.polygon(c.proto, c.shift)
            far = max((_sqrt_upper(point_dist2(v, target)) for v in child.vertices), default=Fraction(0))
            if far == 0:
                inside = True
                for a, b in target.edges():
                    for e0, e1 in child.edges():
                        if child.dim == 2 and _proper_cross(a, b, e0, e1):
                            inside = False
                if inside:
                    continue
            diam = max(_sqrt_upper(norm2(tuple(x - y for x, y in zip(v, w))))
                       for v in child.vertices for w in child.vertices)
            best = max(best, far + diam)
    return best


def _proper_cross(a, b, c, d) -> bool:
    from .geometry import orient

    return orient(a, b, c) * orient(a, b, d) < 0 and orient(c, d, a) * orient(c, d, b) < 0


# substitution

def substitute(patch: Patch, rule: SubstitutionRule, validate: bool = True) -> Patch:
    """omega(patch) = union over tiles of omega(P) + phi(x), with overlap validation."""
    tiles = _substitute_tiles(patch.sorted_tiles() if validate else list(patch.tiles), rule)
    if validate:
        return patch_build(tiles, rule.protos)
    return Patch(frozenset(tiles), rule.protos, _trusted=True)


def _substitute_tiles(tiles, rule: SubstitutionRule) -> list[PlacedTile]:
    out = []
    images = rule.images
    for t in tiles:
        base = rule.apply_phi(t.shift)
        for c in images[t.proto]:
            out.append(PlacedTile(c.proto, vadd(base, c.shift)))
    return out


def substitute_n(patch: Patch, rule: SubstitutionRule, n: int, validate: bool = True) -> Patch:
    for _ in range(n):
        patch = substitute(patch, rule, validate=validate)
    return patch


def _image_list(rule: SubstitutionRule, proto: int, n: int) -> list[PlacedTile]:
    """Ordered tiles of omega^n(P): children expanded in rule-file order."""
    zero = tuple(rule.field.zero for _ in range(rule.dim))
    tiles = [PlacedTile(proto, zero)]
    for _ in range(n):
        tiles = _substitute_tiles(tiles, rule)
    return tiles


# diagnostics

def primitivity_check(rule) -> tuple[bool, int | None]:
    """Least K <= (k-1)^2 + 1 with M^K entrywise positive, if any.

    Positivity of M^K only depends on the zero pattern, so powers are tracked
    as boolean rows packed into integers.
    """
    m = rule.incidence_matrix() if hasattr(rule, "incidence_matrix") else rule
    k = len(m)
    full = (1 << k) - 1
    rows = [sum(1 << j for j in range(k) if m[i][j] > 0) for i in range(k)]
    power = rows[:]
    seen = set()
    for K in range(1, (k - 1) ** 2 + 2):
        if all(r == full for r in power):
            return True, K
        key = tuple(power)
        if key in seen:
            break
        seen.add(key)
        nxt = []
        for r in power:
            acc = 0
            bits, l = r, 0
            while bits:
                if bits & 1:
                    acc |= rows[l]
                bits >>= 1
                l += 1
            nxt.append(acc)
        power = nxt
    return False, None


@dataclass(frozen=True)
class Seed:
    proto: int
    x: tuple
    n: int

    def tile(self) -> PlacedTile:
        return PlacedTile(self.proto, self.x)


def _seed_margin2(rule, seed: Seed, level: int):
    """Squared margin r^2 with (P + x) + B(0, r) inside supp omega^{n level}(P + x)."""
    poly = rule.protos.polygon(seed.proto, seed.x)
    if rule.kind == "substitution":
        # the support is phi^{nm}(P + x); no need to grow the patch
        supp = poly.transform(rule.phi_power(seed.n * level))
        boundary = supp.edges() if supp.dim == 2 else [(v, v) for v in supp.vertices]
    else:
        boundary = grow(rule, seed, level).region.boundary
    best = None
    for a, b in boundary:
        d = _seg_poly_dist2(a, b, poly)
        if best is None or sign(d - best) < 0:
            best = d
    return best


def _seg_poly_dist2(a, b, poly: Polygon):
    if poly.dim == 1:
        return min_all([(a[0] - v[0]) * (a[0] - v[0]) for v in poly.vertices]) if not poly.contains_point(a) else a[0] - a[0]
    for e0, e1 in poly.edges():
        if _segments_intersect(a, b, e0, e1):
            return a[0] - a[0]
    if poly.contains_point(a):
        return a[0] - a[0]
    cands = [seg_dist2(a, e0, e1) for e0, e1 in poly.edges()]
    cands += [seg_dist2(e0, a, b) for e0, _ in poly.edges()]
    return min_all(cands)


def find_seed(rule: SubstitutionRule, max_n: int = 4, interior: bool = False) -> Seed:
    """First verified fixed tile P + x in omega^n(P + x), ordered by n, prototile, child order.

    With ``interior`` the seed must also sit strictly inside its supertile, so
    the nested supertiles exhaust the whole space.
    """
    d = rule.dim
    for n in range(1, max_n + 1):
        phin = rule.phi_power(n)
        try:
            inv = matinv(matsub(identity(rule.field, d), phin))
        except TilingError:
            continue
        for p in range(len(rule.protos)):
            for child in _image_list(rule, p, n):
                if child.proto != p:
                    continue
                x = matvec(inv, child.shift)
                # verify: P + x is a tile of omega^n(P + x) = omega^n(P) + phi^n x
                if vadd(matvec(phin, x), child.shift) != x:
                    continue
                seed = Seed(p, x, n)
                if interior:
                    m2 = _seed_margin2(rule, seed, 1)
                    if sign(m2) <= 0:
                        continue
                return seed
    raise NoSeedFound(max_n)


@dataclass
class Approximant:
    """Level-m supertile omega^{nm}(P + x) with its covered region.

    ``center`` is phi^{nm}(x), the image of the seed's reference point; it lies
    in the interior of the support and ``coverage_radius2`` is its squared
    distance to the boundary of the support.
    """
    rule: SubstitutionRule
    seed: Seed
    level: int
    patch: Patch
    center: tuple
    region: Region
    coverage_radius2: object
    _index: object = dc_field(default=None, repr=False)

    def __len__(self):
        return len(self.patch)


def _grow_tiles(rule: SubstitutionRule, seed: Seed, steps: int) -> list[PlacedTile]:
    cache = rule._levels.setdefault((seed.proto, vkey(seed.x)), [[seed.tile()]])
    cap = tile_cap()
    while len(cache) <= steps:
        prev = cache[-1]
        predicted = sum(len(rule.images[t.proto]) for t in prev)
        if predicted > cap:
            raise ResourceLimit(f"approximant would hold {predicted} tiles (cap {cap}; set AL_TILE_CAP to raise)")
        nxt = _substitute_tiles(prev, rule)
        if rule.kind == "pseudo":
            patch_build(nxt, rule.protos)
        cache.append(nxt)
    return cache[steps]


def grow(rule: SubstitutionRule, seed: Seed, m: int) -> Approximant:
    """The level-m approximant; levels are cached on the rule."""
    if m < 0:
        raise ValueError("level must be >= 0")
    steps = seed.n * m
    key = ("approx", seed.proto, vkey(seed.x), m)
    hit = rule._levels.get(key)
    if hit is not None:
        return hit
    tiles = _grow_tiles(rule, seed, steps)
    patch = Patch(frozenset(tiles), rule.protos, _trusted=True)
    phinm = rule.phi_power(steps)
    center = matvec(phinm, seed.x)
    if rule.kind == "substitution":
        supp = rule.protos.polys[seed.proto].translate(seed.x).transform(phinm)
        region = Region(supp.edges() if supp.dim == 2 else [(supp.vertices[0], supp.vertices[0]), (supp.vertices[1], supp.vertices[1])], supp.dim)
    else:
        region = Region.of(patch.polygons(), check=False)
    cov = region.inradius2(center)
    appr = Approximant(rule, seed, m, patch, center, region, cov)
    rule._levels[key] = appr
    return appr


def expanding_check(rule: SubstitutionRule, seed: Seed, levels: int) -> dict:
    """Squared margins r_m^2 of the seed tile inside its level-m supertile, m = 1..levels."""
    r2 = [_seed_margin2(rule, seed, m) for m in range(1, levels + 1)]
    increasing = all(sign(b - a) > 0 for a, b in zip(r2, r2[1:])) and (not r2 or sign(r2[0]) > 0)
    return {"r2": r2, "increasing": increasing, "levels": levels}


def support_bound_holds(rule: SubstitutionRule, proto: int, n: int) -> bool:
    """supp omega^n(P) inside phi^n(closure P) + B(0, sum_{k<n} ||phi||^k L), checked exactly."""
    tiles = _image_list(rule, proto, n)
    target = rule.protos.polys[proto].transform(rule.phi_power(n))
    L = rule.support_L or Fraction(0)
    # certified upper bound for the operator norm: the Frobenius norm
    fro = _sqrt_upper(sum((e * e for row in rule.phi for e in row), rule.field.zero))
    radius = sum((fro ** k * L for k in range(n)), Fraction(0))
    for t in tiles:
        poly = rule.protos.polygon(t.proto, t.shift)
        for v in poly.vertices:
            d2 = point_dist2(v, target)
            if L == 0:
                if sign(d2) != 0:
                    return False
            elif sign(d2 - radius * radius) > 0:
                return False
    return True


def rule_flc_probe(rule: SubstitutionRule, r2_list, depth: int) -> dict:
    """Cumulative counts of translation classes of sqcap-windows in omega^n(P), n <= depth.

    Only windows whose ball lies in supp omega^n(P) are counted, so clipped
    windows at the image boundary do not inflate the counts.  A radius is
    reported stabilized at the first n whose nonzero count repeats.
    """
    from .language import TileIndex

    out = {}
    for r2 in r2_list:
        r2 = rule.field.coerce(r2)
        seen: set = set()
        counts = []
        for n in range(1, depth + 1):
            phin = rule.phi_power(n)
            for p in range(len(rule.protos)):
                tiles = _image_list(rule, p, n)
                if rule.kind == "substitution":
                    region = Region.of([rule.protos.polys[p].transform(phin)], check=False)
                else:
                    region = Region.of([rule.protos.polygon(t.proto, t.shift) for t in tiles], check=False)
                idx = TileIndex(tiles, rule.protos)
                for i, t in enumerate(tiles):
                    if region.ball_inside(t.shift, r2, center_known_inside=True):
                        seen.add(idx.window_key(i, r2, sqcap=True))
            counts.append(len(seen))
        stab = next((i + 1 for i in range(1, len(counts)) if counts[i] and counts[i] == counts[i - 1]), None)
        out[str(r2)] = {"counts": counts, "stabilized_at": stab}
    return out
