"""Expansion spectra, eigenvalue verification, phase coherence and forbidden band-grids."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import sympy

from .errors import (InsufficientCoverage, InsufficientOccurrences, NoBaseEigenvalues, NoMatch, PhaseTooSpread,
                     PreconditionFailed)
from .exactnum import (character, circle_dist, dot, matinv, matpow, matvec, norm2, sign, transpose, vkey,
                       vscale, vsub)
from .language import displacement_set, language_at, occurrences, patch_key, period_probe, return_vectors

DEFAULT_N = 40
DEFAULT_TOL = Fraction(1, 2 ** 20)
MODULUS_WIDTH = Fraction(1, 2 ** 20)

_x = sympy.Symbol("x")


# characteristic polynomials

def _mult_matrix(e):
    """Matrix of multiplication by e on the power basis of its field."""
    field = e.field
    g = field.degree
    cols = []
    for j in range(g):
        basis = field.element([0] * j + [1])
        cols.append(list((e * basis).c) + [Fraction(0)] * (g - len((e * basis).c)))
    return [[cols[j][i] for j in range(g)] for i in range(g)]


def rational_matrix(phi) -> sympy.Matrix:
    """phi as a Q-linear map of K^d = Q^(d g) (restriction of scalars)."""
    d = len(phi)
    g = phi[0][0].field.degree
    m = sympy.zeros(d * g, d * g)
    for i in range(d):
        for j in range(d):
            block = _mult_matrix(phi[i][j])
            for r in range(g):
                for c in range(g):
                    m[i * g + r, j * g + c] = sympy.Rational(block[r][c].numerator, block[r][c].denominator)
    return m


def _int_poly(expr) -> sympy.Poly:
    p = sympy.Poly(expr, _x, domain="QQ")
    _, p = p.clear_denoms()
    return sympy.Poly(p.as_expr(), _x, domain="ZZ")


def rational_minpoly(phi) -> sympy.Poly:
    """Minimal polynomial over Q of phi viewed as a rational matrix (monic)."""
    m = rational_matrix(phi)
    n = m.shape[0]
    powers = [sympy.eye(n)]
    for k in range(1, n + 1):
        powers.append(powers[-1] * m)
        mat = sympy.Matrix([list(p) for p in powers]).T
        null = mat.nullspace()
        if null:
            vec_ = null[0] / null[0][k]
            return sympy.Poly(sum(vec_[i] * _x ** i for i in range(k + 1)), _x, domain="QQ")
    raise AssertionError("Cayley-Hamilton bound exceeded")


# polynomials over the field, as coefficient lists (constant term first)

def _ktrim(p):
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def _kmod(a, b):
    a = _ktrim(a)
    b = _ktrim(b)
    while len(a) >= len(b):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - f * c
        a = _ktrim(a[:-1] + [a[-1]])
        a = _ktrim(a)
    return a


def _kgcd(a, b):
    a, b = _ktrim(a), _ktrim(b)
    while b:
        a, b = b, _kmod(a, b)
    lead = a[-1]
    return [c / lead for c in a]


def _kderiv(p):
    return [c * i for i, c in enumerate(p)][1:]


def field_charpoly(phi):
    """det(x I - phi) over K, constant term first."""
    field = phi[0][0].field
    if len(phi) == 1:
        return [-phi[0][0], field.one]
    tr = phi[0][0] + phi[1][1]
    det = phi[0][0] * phi[1][1] - phi[0][1] * phi[1][0]
    return [det, -tr, field.one]


def field_minpoly(phi):
    field = phi[0][0].field
    if len(phi) == 2 and phi[0][1].is_zero() and phi[1][0].is_zero() and phi[0][0] == phi[1][1]:
        return [-phi[0][0], field.one]
    return field_charpoly(phi)


def _lift(poly: sympy.Poly, field):
    return [field.coerce(Fraction(int(c.p), int(c.q))) for c in reversed(poly.all_coeffs())]


def _kpoly_roots(p, dps=60):
    """High-precision complex roots of a polynomial over K under the chosen real embedding."""
    with mpmath.workdps(dps):
        coeffs = []
        for c in reversed(p):
            lo, hi = _embed_interval(c, dps * 4)
            coeffs.append(mpmath.mpf(lo.numerator) / lo.denominator / 2 + mpmath.mpf(hi.numerator) / hi.denominator / 2)
        if len(coeffs) == 1:
            return []
        return [complex(r) for r in mpmath.polyroots(coeffs, maxsteps=200, extraprec=dps * 4)]


def _embed_interval(c, bits):
    from .exactnum import embed

    return embed(c, bits)


@dataclass
class RootInfo:
    re: tuple
    im: tuple
    modulus: tuple
    in_spectrum: bool
    factor: str

    def to_json(self):
        def s(q):
            return str(q)
        return {"re": [s(v) for v in self.re], "im": [s(v) for v in self.im],
                "modulus": [s(v) for v in self.modulus], "in_spectrum": self.in_spectrum, "factor": self.factor}


@dataclass
class SpectrumReport:
    char_poly: list
    factors: list
    roots: list
    squarefree: bool
    diagonalizable: bool
    pisot_family: bool
    same_multiplicity: bool
    algebraic_integers: bool
    inconclusive: list

    def to_json(self):
        return {
            "char_poly": [str(c) for c in self.char_poly],
            "factors": [{"poly": [str(c) for c in f], "multiplicity": m} for f, m in self.factors],
            "roots": [r.to_json() for r in self.roots],
            "squarefree": self.squarefree,
            "diagonalizable": self.diagonalizable,
            "pisot_family": self.pisot_family,
            "same_multiplicity": self.same_multiplicity,
            "algebraic_integers": self.algebraic_integers,
            "inconclusive": self.inconclusive,
        }


def _box_modulus(re, im):
    """Rational bounds for |z| squared over a box, then for |z| via rational square roots."""
    def sq_range(lo, hi):
        if lo <= 0 <= hi:
            return Fraction(0), max(lo * lo, hi * hi)
        return min(lo * lo, hi * hi), max(lo * lo, hi * hi)

    a, b = sq_range(*re)
    c, d = sq_range(*im)
    return _qsqrt(a + c, down=True), _qsqrt(b + d, down=False)


def _qsqrt(q: Fraction, down: bool, bits: int = 40) -> Fraction:
    if q == 0:
        return Fraction(0)
    from math import isqrt

    scale = 1 << (2 * bits)
    n = isqrt(q.numerator * scale // q.denominator)
    r = Fraction(n, 1 << bits)
    if down:
        while r * r > q:
            r -= Fraction(1, 1 << bits)
        return r
    while r * r < q:
        r += Fraction(1, 1 << bits)
    return r


def _isolate(poly: sympy.Poly, width: Fraction):
    """Certified isolating boxes for all complex roots, refined until the modulus interval is narrow."""
    eps = width / 8
    while True:
        real, cplx = poly.intervals(all=True, eps=sympy.Rational(eps.numerator, eps.denominator))
        boxes = []
        for (lo, hi), _mult in real:
            boxes.append(((Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))), (Fraction(0), Fraction(0))))
        for ((rlo, ilo), (rhi, ihi)), _mult in cplx:
            boxes.append(((Fraction(int(rlo.p), int(rlo.q)), Fraction(int(rhi.p), int(rhi.q))),
                          (Fraction(int(ilo.p), int(ilo.q)), Fraction(int(ihi.p), int(ihi.q)))))
        mods = [_box_modulus(*b) for b in boxes]
        if all(hi - lo <= width for lo, hi in mods):
            return boxes, mods
        eps /= 16


def spectrum_analyze(rule) -> SpectrumReport:
    phi = rule.phi
    field = rule.field
    M = rational_matrix(phi)
    cp = _int_poly(M.charpoly(_x).as_expr())
    pk = field_charpoly(phi)
    mk = field_minpoly(phi)
    squarefree = len(_kgcd(pk, _kderiv(pk))) == 1
    diagonalizable = len(_kgcd(mk, _kderiv(mk))) == 1
    _, flist = sympy.factor_list(cp.as_expr(), _x)
    factors = []
    roots = []
    inconclusive = []
    pisot = True
    algebraic_integers = True
    spectral_factors = []
    for fexpr, mult in sorted(flist, key=lambda fm: (sympy.Poly(fm[0], _x).degree(), str(fm[0]))):
        f = sympy.Poly(fexpr, _x, domain="ZZ")
        if f.LC() < 0:
            f = -f
        coeffs = [int(c) for c in reversed(f.all_coeffs())]
        factors.append((coeffs, mult))
        common = _kgcd(_lift(f, field), pk)
        k_in = len(common) - 1
        boxes, mods = _isolate(f, MODULUS_WIDTH)
        in_spec = [False] * len(boxes)
        if k_in > 0:
            spectral_factors.append((coeffs, k_in))
            if f.LC() != 1:
                algebraic_integers = False
            for z in _kpoly_roots(common):
                hits = [i for i, (re, im) in enumerate(boxes)
                        if float(re[0]) - 1e-12 <= z.real <= float(re[1]) + 1e-12
                        and float(im[0]) - 1e-12 <= z.imag <= float(im[1]) + 1e-12]
                if len(hits) != 1:
                    raise AssertionError("root matching failed")
                in_spec[hits[0]] = True
        for (re, im), (mlo, mhi), s in zip(boxes, mods, in_spec):
            roots.append(RootInfo(re, im, (mlo, mhi), s, str(fexpr)))
        if k_in > 0:
            for (re, im), (mlo, mhi), s in zip(boxes, mods, in_spec):
                if s:
                    continue
                if mhi < 1:
                    continue
                pisot = False
                if mlo <= 1:
                    inconclusive.append(f"conjugate modulus interval [{mlo}, {mhi}] of {fexpr} contains 1")
    same_mult = len(spectral_factors) == 1 and len({k for _, k in spectral_factors}) == 1
    if same_mult:
        # every eigenvalue of phi has the same multiplicity in det(x I - phi)
        sq = _kgcd(pk, _kderiv(pk))
        same_mult = len(sq) == 1 or len(_kmod(pk, sq)) == 0 and len(_ktrim(_kmod(_kpow_div(pk, sq), sq))) == 0
    pisot = pisot and algebraic_integers
    return SpectrumReport([int(c) for c in reversed(cp.all_coeffs())], factors, roots, squarefree, diagonalizable,
                          pisot, same_mult, algebraic_integers, inconclusive)


def _kpow_div(a, b):
    """Exact quotient a / b of polynomials over K (b divides a)."""
    a = _ktrim(a)
    b = _ktrim(b)
    q = [a[0].field.zero] * (len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - f * c
        a = _ktrim(a)
    return q


# eigenvalues

@dataclass
class EigenReport:
    a: tuple
    return_norm2: object
    level: int
    returns: list
    trace: dict
    verdict: dict

    @property
    def kind(self) -> str:
        return self.verdict["kind"]

    def positive(self) -> bool:
        return self.kind in ("exact", "verified")


def _recurrence_length(rule) -> int | None:
    """Degree of the monic integer recurrence satisfied by <phi^n z, a>, or None if phi is not integral."""
    key = "_recurrence"
    if key in rule.__dict__:
        return rule.__dict__[key]
    mp = rational_minpoly(rule.phi)
    ok = all(c.is_integer for c in mp.all_coeffs())
    rule.__dict__[key] = max(mp.degree(), 2) if ok else None
    return rule.__dict__[key]


def _as_vec(field, a):
    return tuple(field.coerce(e) for e in a)


def eigen_verify(approx, a, return_norm2, N: int = DEFAULT_N, tol=DEFAULT_TOL, period_window2=None) -> EigenReport:
    """Return-vector test: circle distances of <phi^n z, a> to 0 for n = 0..N."""
    rule = approx.rule
    field = rule.field
    a = _as_vec(field, a)
    if all(e.is_zero() for e in a):
        raise PreconditionFailed("a must be nonzero")
    return_norm2 = field.coerce(return_norm2)
    tol = Fraction(tol)
    zs = return_vectors(approx, return_norm2)
    need = _recurrence_length(rule)
    trace = {}
    exact_from = {}
    rejected = None
    phi = rule.phi
    for z in zs:
        seq = []
        v = z
        run = 0
        start = None
        seen = {}
        verdict_z = None
        for n in range(N + 1):
            s = dot(v, a)
            frac = s - s.floor()
            seq.append(circle_dist(frac, 0))
            if frac.is_zero():
                run += 1
                if start is None:
                    start = n
            else:
                run = 0
                start = None
            if need is not None and run >= need:
                verdict_z = ("exact", start)
                break
            if frac.is_rational():
                k = frac.to_fraction()
                if k in seen:
                    cyc = seq[seen[k]:n]
                    worst = max(range(len(cyc)), key=lambda i: (cyc[i], -i))
                    if not cyc[worst].is_zero():
                        verdict_z = ("cycle", seen[k] + worst)
                        break
                seen[k] = n
            v = matvec(phi, v)
        trace[vkey(z)] = seq
        if verdict_z and verdict_z[0] == "exact":
            exact_from[vkey(z)] = verdict_z[1]
        elif verdict_z and verdict_z[0] == "cycle":
            if rejected is None:
                rejected = {"kind": "rejected", "witness": z, "n": verdict_z[1],
                            "reason": "fractional parts enter a cycle that avoids 0", "exact": True}
        else:
            tail = seq[-1]
            if sign(tail - tol) >= 0 and rejected is None:
                rejected = {"kind": "rejected", "witness": z, "n": len(seq) - 1,
                            "reason": f"tail distance >= tol after N={N}", "exact": False}
    if rejected is None:
        w2 = period_window2 if period_window2 is not None else approx.coverage_radius2
        for z in zs:
            if character(a, z).is_identity():
                continue
            if sign(norm2(z) - w2) < 0 and period_probe(approx, z, w2):
                rejected = {"kind": "rejected", "witness": z, "n": 0,
                            "reason": "z acts as a period of the approximant but chi_a(z) != 1", "exact": True}
                break
    if rejected is not None:
        verdict = rejected
    elif zs and len(exact_from) == len(zs):
        verdict = {"kind": "exact", "n0": max(exact_from.values())}
    elif not zs:
        verdict = {"kind": "exact", "n0": 0}
    else:
        verdict = {"kind": "verified", "N": N, "tol": tol}
    return EigenReport(a, return_norm2, approx.level, zs, trace, verdict)


def _height_rationals(h: int):
    """Nonzero rationals p/q with |p|, q <= h, ordered by height then value."""
    out = {}
    for height in range(1, h + 1):
        for q in range(1, height + 1):
            for p in range(-height, height + 1):
                if p == 0 or max(abs(p), q) != height:
                    continue
                out.setdefault(Fraction(p, q), height)
    return sorted(out, key=lambda f: (out[f], abs(f), f < 0))


def dual_generators(approx, return_norm2):
    """Dual basis to d independent return vectors of smallest norm."""
    field = approx.rule.field
    d = approx.rule.dim
    zs = sorted(return_vectors(approx, return_norm2), key=lambda v: (norm2(v), tuple(v)))
    basis = []
    for z in zs:
        cand = basis + [z]
        if len(cand) == 1 or _det2(cand) != 0:
            basis = cand
        if len(basis) == d:
            break
    if len(basis) < d:
        raise NoBaseEigenvalues("return vectors do not span the space")
    inv = matinv(tuple(tuple(z) for z in basis))   # rows z_i; inv columns are the dual vectors
    return [tuple(inv[r][i] for r in range(d)) for i in range(d)], field


def _det2(vs):
    if len(vs[0]) == 1:
        return vs[0][0]
    return vs[0][0] * vs[1][1] - vs[0][1] * vs[1][0]


def discover_base(approx, return_norm2, height: int = 8):
    """First d independent verified eigenvalues among small rational combinations of the dual generators."""
    gens, field = dual_generators(approx, return_norm2)
    d = len(gens)
    coeffs = [Fraction(0)] + _height_rationals(height)
    cands = []
    for combo in itertools.product(coeffs, repeat=d):
        if all(c == 0 for c in combo):
            continue
        hgt = max(max(abs(c.numerator), c.denominator) for c in combo)
        cands.append((hgt, sum(1 for c in combo if c != 0), combo))
    cands.sort(key=lambda t: (t[0], t[1], [abs(c) for c in t[2]], t[2]))
    base = []
    for _, _, combo in cands:
        a = tuple(sum((field.coerce(c) * g[i] for c, g in zip(combo, gens)), field.zero) for i in range(d))
        if base and len(base) < d and _det2(base + [a]) == 0 if d == 2 else False:
            continue
        rep = eigen_verify(approx, a, return_norm2)
        if rep.positive():
            if d == 1 or not base or _det2(base + [a]) != 0:
                base.append(a)
        if len(base) == d:
            return base
    raise NoBaseEigenvalues(f"no {d} independent eigenvalues among height <= {height} combinations")


def eps_close(F, Fp, eps) -> bool:
    """Every x in F has exactly one y in F' within eps, and vice versa."""
    e2 = Fraction(eps) ** 2 if not hasattr(eps, "field") else eps * eps

    def close(x, y):
        return sign(norm2(vsub(x, y)) - e2) < 0

    for x in F:
        if sum(1 for y in Fp if close(x, y)) != 1:
            return False
    for y in Fp:
        if sum(1 for x in F if close(x, y)) != 1:
            return False
    return True


def _nearest_in_lattice(basis, x):
    """Exact nearest point of the Z-span of basis to x (search around the real coordinates)."""
    field = x[0].field
    d = len(x)
    inv = matinv(tuple(tuple(b[i] for b in basis) for i in range(d)))  # columns are basis vectors
    coords = matvec(inv, x)
    best = None
    ranges = [range(int(c.floor()) - 2, int(c.floor()) + 4) for c in coords]
    for ks in itertools.product(*ranges):
        y = tuple(sum((field.coerce(k) * b[i] for k, b in zip(ks, basis)), field.zero) for i in range(d))
        dist = norm2(vsub(x, y))
        if best is None or sign(dist - best[0]) < 0 or (sign(dist - best[0]) == 0 and tuple(y) < tuple(best[1])):
            best = (dist, y)
    return best


def eigen_candidates(approx, F, eps, k_max: int = 4, base=None, return_norm2=None, verify: bool = True) -> list:
    """Match each x in F to a candidate from (phi*)^{-k} Z-span(base), k <= k_max, within eps."""
    rule = approx.rule
    field = rule.field
    if return_norm2 is None:
        return_norm2 = min_cov(approx)
    if base is None:
        base = discover_base(approx, return_norm2)
    base = [_as_vec(field, b) for b in base]
    eps = field.coerce(eps)
    e2 = eps * eps
    phis = transpose(rule.phi)
    inv = matinv(phis)
    out = []
    chosen = []
    for x in F:
        x = _as_vec(field, x)
        best = None
        for k in range(k_max + 1):
            m = matpow(inv, k) if k else None
            scaled = [matvec(m, b) if m else b for b in base]
            dist, y = _nearest_in_lattice(scaled, x)
            if all(e.is_zero() for e in y):
                continue
            if best is None or sign(dist - best[0]) < 0:
                best = (dist, y, k)
        if best is None or sign(best[0] - e2) >= 0:
            raise NoMatch(f"no candidate within {eps} of {[str(e) for e in x]}", x=x, eps=eps)
        entry = {"a": best[1], "matched_to": x, "k": best[2], "dist2": best[0]}
        if verify:
            entry["verdict"] = eigen_verify(approx, best[1], return_norm2).verdict
        out.append(entry)
        chosen.append(best[1])
    Fx = [_as_vec(field, x) for x in F]
    uniq = {vkey(y): y for y in chosen}
    if not eps_close(Fx, list(uniq.values()), eps):
        raise NoMatch("matching is not unique in both directions", x=Fx[0], eps=eps)
    return out


def min_cov(approx):
    field = approx.rule.field
    c = approx.coverage_radius2
    cap = field.coerce(64)
    return c if sign(c - cap) < 0 else cap


def shrinking_family(approx, base_vec, k_max: int, return_norm2=None):
    """(phi*)^{-k} b for k = 1..k_max, each with its eigen_verify report."""
    rule = approx.rule
    inv = matinv(transpose(rule.phi))
    rn = return_norm2 if return_norm2 is not None else min_cov(approx)
    out = []
    v = _as_vec(rule.field, base_vec)
    for k in range(1, k_max + 1):
        v = matvec(inv, v)
        out.append((k, v, eigen_verify(approx, v, rn)))
    return out


# phases

def phases(approx, a, p, window2) -> list:
    a = _as_vec(approx.rule.field, a)
    return [character(a, t).theta for t in occurrences(approx, p, window2)]


def _arc(ths):
    """Shortest arc (start, length) containing all phases, from the largest gap."""
    ths = sorted(ths)
    n = len(ths)
    if n == 1:
        return ths[0], ths[0] - ths[0]
    best_gap, best_i = None, None
    for i in range(n):
        nxt = ths[(i + 1) % n] + (1 if i == n - 1 else 0)
        gap = nxt - ths[i]
        if best_gap is None or sign(gap - best_gap) > 0:
            best_gap, best_i = gap, i
    start = ths[(best_i + 1) % n]
    return start, 1 - best_gap


def phase_diameter(approx, a, p, window2):
    """Length of the shortest arc containing all occurrence phases <a, t> mod 1."""
    ths = phases(approx, a, p, window2)
    if len(ths) < 2:
        raise InsufficientOccurrences(f"{len(ths)} occurrences in window^2 {window2} at level {approx.level}")
    return _arc(ths)[1]


def phase_anchor(approx, a, p, window2):
    """x(p) = (theta*/|a|^2) a with theta* the midpoint of the shortest covering arc."""
    field = approx.rule.field
    a = _as_vec(field, a)
    ths = phases(approx, a, p, window2)
    if not ths:
        raise InsufficientOccurrences(f"no occurrences in window^2 {window2} at level {approx.level}")
    start, length = _arc(ths)
    if sign(length - Fraction(1, 4)) >= 0:
        raise PhaseTooSpread(f"phase diameter {length} >= 1/4")
    mid = start + length / 2
    mid = mid - mid.floor()
    return vscale(mid / norm2(a), a)


def band_membership(v, a, r0_2, anchor) -> bool:
    """v in anchor + B(0, R0) + Ker chi_a, via circle distance of <a, v - anchor> against R0 |a|."""
    field = v[0].field if hasattr(v[0], "field") else a[0].field
    a = _as_vec(field, a)
    v = _as_vec(field, v)
    anchor = _as_vec(field, anchor)
    r0_2 = field.coerce(r0_2)
    rho = circle_dist(character(a, vsub(v, anchor)), 0)
    return sign(rho * rho - r0_2 * norm2(a)) < 0


@dataclass
class ForbiddenVerdict:
    a: tuple
    r0_2: object
    p1: object
    p2: object
    anchors: tuple
    scale_m: int
    status: str
    witness: tuple | None = None
    reason: str = ""
    displacements: int = 0
    level: int = 0
    window2: object = None


def forbidden_verify(approx, a, p1, p2, r0_2, window2, scale_m: int = 0, eigen: EigenReport | None = None,
                     return_norm2=None) -> ForbiddenVerdict:
    """No displacement of p2 relative to p1 lies in x(p2) - x(p1) + phi^{-m}(a/(2|a|^2) + B(0,R0) + Ker chi_a)."""
    rule = approx.rule
    field = rule.field
    a = _as_vec(field, a)
    r0_2 = field.coerce(r0_2)
    window2 = field.coerce(window2)
    if eigen is None:
        eigen = eigen_verify(approx, a, return_norm2 if return_norm2 is not None else min_cov(approx))
    if not eigen.positive():
        raise PreconditionFailed(f"a is not a verified eigenvalue ({eigen.verdict['kind']})")
    if scale_m == 0 and sign(64 * r0_2 * norm2(a) - 1) >= 0:
        raise PreconditionFailed("band inequality 8 R0 < 1/|a| violated")
    base = dict(a=a, r0_2=r0_2, p1=p1, p2=p2, scale_m=scale_m, level=approx.level, window2=window2)
    try:
        x1 = phase_anchor(approx, a, p1, window2)
        x2 = phase_anchor(approx, a, p2, window2)
    except (PhaseTooSpread, InsufficientOccurrences) as exc:
        return ForbiddenVerdict(anchors=(None, None), status="insufficient", reason=str(exc), **base)
    except InsufficientCoverage as exc:
        return ForbiddenVerdict(anchors=(None, None), status="insufficient", reason=str(exc), **base)
    anchor0 = vsub(x2, x1)
    half = vscale(1 / (2 * norm2(a)), a)
    D = displacement_set(approx, p1, p2, window2)
    phim = matpow(rule.phi, scale_m) if scale_m else None
    for d in D.shifts:
        w = vsub(d, anchor0)
        if phim is not None:
            w = matvec(phim, w)
        if band_membership(w, a, r0_2, half):
            return ForbiddenVerdict(anchors=(x1, x2), status="violation", witness=d,
                                    displacements=len(D.shifts), **base)
    return ForbiddenVerdict(anchors=(x1, x2), status="pass", displacements=len(D.shifts), **base)


def forbidden_patch_search(approx, p, x, u_radius2, a, r2_lang, window2, eigen: EigenReport | None = None,
                           return_norm2=None, lang=None, cache: dict | None = None):
    """First language entry p' none of whose displacements from p lies in x + B(0, U) + Ker chi_a.

    ``lang`` reuses a computed language; ``cache`` keeps displacement sets
    between calls, keyed by the pair of patch keys.
    """
    rule = approx.rule
    field = rule.field
    a = _as_vec(field, a)
    x = _as_vec(field, x)
    u_radius2 = field.coerce(u_radius2)
    maxv = None
    for poly in rule.protos.polys:
        for v in poly.vertices:
            n = norm2(v)
            if maxv is None or sign(n - maxv) > 0:
                maxv = n
    if sign(u_radius2 - maxv) <= 0:
        raise PreconditionFailed(f"U radius^2 {u_radius2} must exceed the prototile vertex bound {maxv}")
    if eigen is None:
        eigen = eigen_verify(approx, a, return_norm2 if return_norm2 is not None else min_cov(approx))
    if not eigen.positive():
        raise PreconditionFailed(f"a is not a verified eigenvalue ({eigen.verdict['kind']})")
    if lang is None:
        lang = language_at(approx, r2_lang, stabilized_check=False)
    cache = {} if cache is None else cache
    pk = patch_key(p)
    for entry in lang.entries:
        key = (pk, patch_key(entry), str(window2))
        if key not in cache:
            cache[key] = displacement_set(approx, p, entry, window2, verify=False).shifts
        if not any(band_membership(d, a, u_radius2, x) for d in cache[key]):
            return entry
    return None


def forbidden_band_overlay(a, r0_2, anchor):
    """Descriptor of the band-grid anchor + B(0, R0) + Ker chi_a for rendering."""
    return {"a": a, "r0_2": r0_2, "anchor": anchor}


__all__ = [
    "SpectrumReport", "spectrum_analyze", "EigenReport", "eigen_verify", "eigen_candidates", "eps_close",
    "phase_diameter", "phase_anchor", "band_membership", "ForbiddenVerdict", "forbidden_verify",
    "forbidden_patch_search", "discover_base", "shrinking_family", "rational_minpoly",
]
