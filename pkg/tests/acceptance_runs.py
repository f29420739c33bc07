"""Desk-scale acceptance runs, one function per criterion.

Every run builds its own rules and approximants from the catalog text, so the
measured time includes growth and nothing is shared with the unit tests.  A
run returns a Result holding the verdict, a one-line summary and the artifacts
it wrote (file name -> text); the determinism criterion replays all runs in a
fresh interpreter and compares those artifacts byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from tilinglab.cli import csv_rows, dumps
from tilinglab.exactnum import NumberField, matvec, norm2, sign, vec, vkey
from tilinglab.language import displacement_set, language_at, occurrences, patch_key, period_probe
from tilinglab.render import RenderSpec, render_svg
from tilinglab.seqdyn import correlation_set, gap_density
from tilinglab.spectra import (band_membership, discover_base, eigen_candidates, eigen_verify, eps_close,
                               forbidden_band_overlay, forbidden_patch_search, forbidden_verify, min_cov,
                               phase_diameter, spectrum_analyze)
from tilinglab.subst import (catalog_names, catalog_text, find_seed, grow, load_catalog, rule_from_dict, rule_parse,
                             substitute, substitute_n, support_bound_holds)
from tilinglab.tiling import PlacedTile, patch_build, patch_to_csv

from oracles import (band_distance2, bipartite_close, entry_set, naive_displacements, naive_language,
                     naive_occurrences, scan_hits)

FIXTURES = Path(__file__).parent / "fixtures"
SEARCH_GOLDEN = FIXTURES / "forbidden_search_chair.json"
Q = NumberField.rationals()


@dataclass
class Result:
    ok: bool
    summary: str
    artifacts: dict = field(default_factory=dict)
    seconds: float = 0.0


def fresh(name):
    return rule_parse(catalog_text(name))


def approximant(name, level, interior=False):
    rule = fresh(name)
    return grow(rule, find_seed(rule, interior=interior), level)


def _vstr(v) -> str:
    return ",".join(str(e) for e in v)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# 1. square controls

def criterion_1() -> Result:
    t0 = time.perf_counter()
    ap = approximant("square", 6)
    counts = {r2: len(language_at(ap, r2)) for r2 in (4, 25, 100)}
    verdicts = {_vstr(a): eigen_verify(ap, a, 64).verdict for a in ((1, 0), (0, 1), (2, 3))}
    periodic = period_probe(ap, (1, 0), 100)
    secs = time.perf_counter() - t0
    ok = (all(c == 1 for c in counts.values()) and all(v["kind"] == "exact" for v in verdicts.values())
          and periodic and secs < 5)
    small = approximant("square", 2)
    arts = {
        "c1_square.json": dumps({"language_counts": counts, "eigen": verdicts, "period_1_0": periodic}),
        "c1_square_level2.csv": patch_to_csv(small.patch),
        "c1_square_level2.svg": render_svg(small.patch, RenderSpec()),
    }
    return Result(ok, f"language sizes {list(counts.values())}, eigen {[v['kind'] for v in verdicts.values()]}, "
                      f"period {periodic}, {secs:.1f}s", arts, secs)


# 2. chair eigenvalues

CHAIR_EIGEN = [(Fraction(1, 2), 0), (0, Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 4)), (Fraction(1, 16), 0)]
CHAIR_NON_EIGEN = [(Fraction(1, 3), 0), (Fraction(1, 5), Fraction(1, 5))]


def criterion_2() -> Result:
    t0 = time.perf_counter()
    ap = approximant("chair", 6)
    good = {_vstr(a): eigen_verify(ap, a, 64).verdict for a in CHAIR_EIGEN}
    bad = {_vstr(a): eigen_verify(ap, a, 64).verdict for a in CHAIR_NON_EIGEN}
    secs = time.perf_counter() - t0
    ok_good = all(v["kind"] == "exact" and v["n0"] <= 4 for v in good.values())
    ok_bad = all(v["kind"] == "rejected" and v["exact"] and v["witness"] is not None for v in bad.values())
    ok = ok_good and ok_bad and secs < 60
    arts = {"c2_chair_eigen.json": dumps({"level": ap.level, "return_norm2": 64, "eigen": good, "non_eigen": bad})}
    return Result(ok, f"n0 {[v.get('n0') for v in good.values()]}, rejections "
                      f"{[v['kind'] for v in bad.values()]}, {secs:.1f}s", arts, secs)


# 3. Pisot family

MODULUS_WIDTH = Fraction(1, 1 << 20)


def criterion_3() -> Result:
    t0 = time.perf_counter()
    reports = {name: spectrum_analyze(fresh(name)) for name in ("chair", "robinson_triangles", "non_pisot_1d")}
    secs = time.perf_counter() - t0
    narrow = all(r.modulus[1] - r.modulus[0] <= MODULUS_WIDTH for rep in reports.values() for r in rep.roots)
    outside = {name: [r.modulus for r in rep.roots if not r.in_spectrum] for name, rep in reports.items()}
    # chair: phi = 2I; robinson: phi = tau I, conjugate -1/tau; non_pisot_1d: x^2 - x - 3
    ok = (narrow and reports["chair"].pisot_family and reports["robinson_triangles"].pisot_family
          and all(hi < 1 for _, hi in outside["robinson_triangles"]) and outside["robinson_triangles"]
          and not reports["non_pisot_1d"].pisot_family and outside["non_pisot_1d"]
          and all(lo > 1 for lo, _ in outside["non_pisot_1d"]) and secs < 5)
    arts = {"c3_spectra.json": dumps({k: v.to_json() for k, v in reports.items()})}
    flags = {k: v.pisot_family for k, v in reports.items()}
    return Result(ok, f"pisot_family {flags}, widths <= 2^-20: {narrow}, {secs:.1f}s", arts, secs)


# 4. shrinking eigenvalues

def criterion_4() -> Result:
    t0 = time.perf_counter()
    ap = approximant("chair", 4)
    rn = min_cov(ap)
    base = discover_base(ap, rn)
    rows = []
    ok = True
    for k in range(1, 7):
        target = (Fraction(2, 3) / 2 ** k, 0)
        out = eigen_candidates(ap, [target], Fraction(1, 2 ** (k + 2)), k_max=k + 2, base=base, return_norm2=rn)
        a = out[0]["a"]
        small = sign(norm2(a) - Fraction(1, 4 ** k)) < 0
        exact = out[0]["verdict"]["kind"] == "exact"
        ok = ok and small and exact
        rows.append([k, a, out[0]["k"], norm2(a), out[0]["verdict"]["kind"]])
    secs = time.perf_counter() - t0
    ok = ok and secs < 120
    arts = {"c4_shrinking.csv": csv_rows(["k", "a", "power", "norm2", "verdict"], rows),
            "c4_base.json": dumps({"base": base, "return_norm2": rn})}
    return Result(ok, f"|a|^2 {[str(r[3]) for r in rows]}, {secs:.1f}s", arts, secs)


# 5. forbidden band-grid

C5_LEVEL, C5_A, C5_R0_2, C5_R2, C5_WINDOW2 = 7, (Fraction(1, 2), 0), Fraction(1, 64), 10, 1024


def criterion_5() -> Result:
    t0 = time.perf_counter()
    ap = approximant("chair", C5_LEVEL)
    a = vec(ap.rule.field, C5_A)
    ev = eigen_verify(ap, a, 64)
    E = language_at(ap, C5_R2, stabilized_check=False).entries
    diam = [phase_diameter(ap, a, e, C5_WINDOW2) for e in E]
    pairs = [(i, (3 * i + 1) % len(E)) for i in range(20)]
    verdicts = [forbidden_verify(ap, a, E[i], E[j], C5_R0_2, C5_WINDOW2, eigen=ev) for i, j in pairs]
    scaled = forbidden_verify(ap, a, E[0], E[1], C5_R0_2, C5_WINDOW2, scale_m=1, eigen=ev)
    secs = time.perf_counter() - t0
    statuses = [v.status for v in verdicts]
    ok = (ev.kind == "exact" and sign(64 * C5_R0_2 * norm2(a) - 1) < 0 and all(d < Fraction(1, 4) for d in diam)
          and statuses.count("pass") >= 20 and "violation" not in statuses and scaled.status != "violation"
          and secs < 600)
    doc = {"level": ap.level, "a": a, "R0_2": C5_R0_2, "R2": C5_R2, "window2": C5_WINDOW2, "entries": len(E),
           "max_phase_diameter": max(diam),
           "pairs": [{"i": i, "j": j, "status": v.status, "anchors": v.anchors, "displacements": v.displacements}
                     for (i, j), v in zip(pairs, verdicts)],
           "scaled_m1": scaled.status}
    small = approximant("chair", 3)
    x1 = verdicts[0].anchors[0]
    view = (-8, -8, 8, 8)
    svg = render_svg(small.patch, RenderSpec(view=view, overlays=[forbidden_band_overlay(a, C5_R0_2, x1)]))
    arts = {"c5_forbidden.json": dumps(doc), "c5_band.svg": svg}
    return Result(ok, f"{statuses.count('pass')}/20 pass, violations {statuses.count('violation')}, "
                      f"max phase diameter {max(diam)}, scaled {scaled.status}, {secs:.1f}s", arts, secs)


# 6. forbidden patch existence

C6_LEVEL, C6_A, C6_U2, C6_R2, C6_WINDOW2 = 7, (Fraction(1, 8), 0), 3, 64, 1024
C6_XS = [(0, 0), (Fraction(1, 2), 0), (3, 1), (Fraction(5, 4), 2), (8, 0)]


def search_record() -> tuple[dict, int, float]:
    t0 = time.perf_counter()
    ap = approximant("chair", C6_LEVEL)
    K = ap.rule.field
    a = vec(K, C6_A)
    ev = eigen_verify(ap, a, 64)
    lang = language_at(ap, C6_R2, stabilized_check=False)
    E = lang.entries
    index = {patch_key(e): i for i, e in enumerate(E)}
    cache: dict = {}
    witnessed: dict = {}
    found = {}
    misses = 0
    for x in C6_XS:
        xv = vec(K, x)
        picks = []
        for p in E:
            q = forbidden_patch_search(ap, p, xv, C6_U2, a, C6_R2, C6_WINDOW2, eigen=ev, lang=lang, cache=cache)
            if q is None:
                misses += 1
                picks.append(None)
                continue
            # recheck the returned entry with witnessed displacements
            pair = (patch_key(p), patch_key(q))
            if pair not in witnessed:
                witnessed[pair] = displacement_set(ap, p, q, C6_WINDOW2).shifts
            if any(band_membership(d, a, C6_U2, xv) for d in witnessed[pair]):
                misses += 1
            picks.append(index[patch_key(q)])
        found[_vstr(x)] = picks
    secs = time.perf_counter() - t0
    chosen = sorted({i for picks in found.values() for i in picks if i is not None})
    doc = {"level": ap.level, "a": a, "U2": C6_U2, "R2": C6_R2, "window2": C6_WINDOW2, "entries": len(E),
           "language_digest": _digest(dumps([patch_key(e) for e in E])),
           "returned": found,
           "returned_entries": {str(i): E[i] for i in chosen}}
    return doc, misses, secs


def criterion_6() -> Result:
    doc, misses, secs = search_record()
    text = dumps(doc)
    golden = SEARCH_GOLDEN.read_text() if SEARCH_GOLDEN.exists() else None
    ok = misses == 0 and golden == text and secs < 600
    note = "matches golden" if golden == text else ("golden missing" if golden is None else "differs from golden")
    return Result(ok, f"{doc['entries']} entries x {len(C6_XS)} x, misses {misses}, {note}, {secs:.1f}s",
                  {"c6_search.json": text}, secs)


# 7. naive oracle equivalence

def criterion_7() -> Result:
    t0 = time.perf_counter()
    cases = [("square", 4, False, 3, True, (1, 4, 9), (64, 256)),
             ("chair", 4, False, 3, True, (1, 4, 9), (64, 256)),
             ("fibonacci", 4, True, 4, True, (1, 4, 9, 25), (256, 1024))]
    rows = []
    ok = True
    for name, lang_level, lang_interior, occ_level, occ_interior, radii, windows in cases:
        rule = fresh(name)
        ap = grow(rule, find_seed(rule, interior=lang_interior), lang_level)
        big = grow(rule, find_seed(rule, interior=occ_interior), occ_level)
        K = rule.field
        entries = []
        for r2 in radii:
            lang = language_at(ap, r2, stabilized_check=False)
            same = entry_set(lang) == naive_language(ap, K.coerce(r2))
            ok = ok and same
            rows.append([name, "language", r2, len(lang), same])
            if r2 == 4:
                entries = lang.entries
        picks = entries[:4]
        for w2 in windows:
            w = K.coerce(w2)
            for p in picks:
                got = {vkey(s) for s in occurrences(big, p, w)}
                same = got == naive_occurrences(big, p, w)
                ok = ok and same
                rows.append([name, "occurrences", w2, len(got), same])
            for i, p in enumerate(picks):
                q = picks[(i + 1) % len(picks)]
                got = {vkey(s) for s in displacement_set(big, p, q, w).shifts}
                same = got == naive_displacements(big, p, q, w)
                ok = ok and same
                rows.append([name, "displacements", w2, len(got), same])
    secs = time.perf_counter() - t0
    agree = sum(1 for r in rows if r[4])
    arts = {"c7_oracles.csv": csv_rows(["rule", "operation", "radius2", "size", "agrees"], rows)}
    return Result(ok, f"{agree}/{len(rows)} comparisons agree, {secs:.1f}s", arts, secs)


# 8. eps-close and band membership

def _rand_q(rng, lo, hi, den):
    return Fraction(rng.randint(lo * den, hi * den), den)


def criterion_8() -> Result:
    t0 = time.perf_counter()
    rng = random.Random(8)
    eps_bad = 0
    eps_true = 0
    for _ in range(1000):
        F = list({(Fraction(rng.randint(-6, 6), 2), Fraction(rng.randint(-6, 6), 2)) for _ in range(rng.randint(0, 4))})
        if rng.random() < 0.5:
            # perturbed copy, so both outcomes are common
            Fp = [(x + Fraction(rng.randint(-2, 2), 8), y + Fraction(rng.randint(-2, 2), 8)) for x, y in F]
            rng.shuffle(Fp)
        else:
            Fp = list({(Fraction(rng.randint(-6, 6), 2), Fraction(rng.randint(-6, 6), 2))
                       for _ in range(rng.randint(0, 4))})
        eps = Fraction(rng.randint(1, 8), rng.randint(1, 4))
        want = bipartite_close(F, Fp, eps)
        got = eps_close([vec(Q, p) for p in F], [vec(Q, p) for p in Fp], eps)
        eps_bad += got != want
        eps_true += want
    band_bad = 0
    band_true = 0
    for _ in range(1000):
        a = (_rand_q(rng, -8, 8, 9), _rand_q(rng, -8, 8, 9))
        if a == (0, 0):
            a = (Fraction(1), Fraction(0))
        v = (_rand_q(rng, -8, 8, 9), _rand_q(rng, -8, 8, 9))
        c = (_rand_q(rng, -8, 8, 9), _rand_q(rng, -8, 8, 9))
        # R0 |a| uniform-ish in (0, 1/2], so both outcomes are common
        r0_2 = Fraction(rng.randint(1, 100), 400) / (a[0] ** 2 + a[1] ** 2)
        want = band_distance2(a, v, c) < r0_2
        got = band_membership(vec(Q, v), vec(Q, a), Q.coerce(r0_2), vec(Q, c))
        band_bad += got != want
        band_true += want
    secs = time.perf_counter() - t0
    ok = eps_bad == 0 and band_bad == 0
    doc = {"eps_close": {"cases": 1000, "true": eps_true, "mismatches": eps_bad},
           "band_membership": {"cases": 1000, "true": band_true, "mismatches": band_bad}}
    return Result(ok, f"eps_close mismatches {eps_bad} ({eps_true} true), band mismatches {band_bad} "
                      f"({band_true} inside), {secs:.1f}s", {"c8_properties.json": dumps(doc)}, secs)


# 9. sequence correlations

def criterion_9() -> Result:
    t0 = time.perf_counter()
    fib = load_catalog("fibonacci_word")
    per = load_catalog("periodic_ab")
    word = fib.iterate("a", 15)
    c = correlation_set(fib, "a", "a", 1000)
    scan = scan_hits(word, "a", "a", 1000)
    dens = {n: gap_density(correlation_set(fib, "a", "a", n)) for n in (500, 1000)}
    stable = abs(dens[1000] - dens[500]) <= Fraction(1, 50)
    ph = correlation_set(per, "a", "a", 1000).hits
    start = next(n for n in range(1001) if all((m in ph) == (m + 2 in ph) for m in range(n, 999)))
    period_two = any((m in ph) != (m + 1 in ph) for m in range(start, 1000))
    secs = time.perf_counter() - t0
    ok = len(word) > 1000 and c.hits == scan and stable and period_two and secs < 30
    doc = {"iterate_length": len(word), "hits": len(c.hits), "matches_scan": c.hits == scan,
           "gap_density": {str(k): v for k, v in dens.items()},
           "periodic": {"from": start, "first_hits": sorted(ph)[:12]}}
    return Result(ok, f"|zeta^15(a)| = {len(word)}, hit sets equal {c.hits == scan}, gap density "
                      f"{dens[500]} / {dens[1000]}, periodic from n = {start}, {secs:.1f}s",
                  {"c9_correlations.json": dumps(doc)}, secs)


# 10. substitution algebra

def shifted_block_pseudo():
    """Unit square, phi = 3I, image the 3x3 block moved right by 1/2: a pseudo rule with L > 0."""
    doc = json.loads(catalog_text("square"))
    doc.update(kind="pseudo", name="shifted_block")
    doc["phi"] = [[["3"], ["0"]], [["0"], ["3"]]]
    doc["images"] = {"S": [{"proto": "S", "shift": [[str(Fraction(1, 2) + i)], [str(j)]]}
                           for i in (-1, 0, 1) for j in (-1, 0, 1)]}
    return rule_from_dict(doc)


def _tile_rules():
    names = [n for n in catalog_names() if json.loads(catalog_text(n)).get("kind") != "word"]
    return [(n, fresh(n)) for n in names] + [("shifted_block", shifted_block_pseudo())]


def _random_patch(rule, rng):
    K = rule.field
    proto = rng.randrange(len(rule.protos))
    one = patch_build([PlacedTile(proto, tuple(K.zero for _ in range(rule.dim)))], rule.protos)
    tiles = substitute(one, rule).sorted_tiles()
    pick = rng.sample(tiles, rng.randint(1, min(3, len(tiles))))
    return patch_build(pick, rule.protos)


def _random_vector(rule, rng):
    K = rule.field
    return tuple(K.element([Fraction(rng.randint(-40, 40), rng.choice((1, 2, 3, 4, 8))) for _ in range(K.degree)])
                 for _ in range(rule.dim))


def criterion_10() -> Result:
    t0 = time.perf_counter()
    rows = []
    ok = True
    for idx, (name, rule) in enumerate(_tile_rules()):
        rng = random.Random(1000 + idx)
        fails = 0
        for _ in range(100):
            p = _random_patch(rule, rng)
            x = _random_vector(rule, rng)
            if substitute(p.translate(x), rule) != substitute(p, rule).translate(matvec(rule.phi, x)):
                fails += 1
            a, b = rng.randint(0, 2), rng.randint(0, 1)
            if substitute_n(p, rule, a + b) != substitute_n(substitute_n(p, rule, a), rule, b):
                fails += 1
        bound = all(support_bound_holds(rule, q, n) for q in range(len(rule.protos)) for n in (1, 2))
        ok = ok and fails == 0 and bound
        rows.append([name, rule.support_L, fails, bound])
    secs = time.perf_counter() - t0
    arts = {"c10_algebra.csv": csv_rows(["rule", "L", "failures", "support_bound"], rows)}
    return Result(ok, f"{len(rows)} rules x 100 patches, failures {sum(r[2] for r in rows)}, support bound "
                      f"{all(r[3] for r in rows)}, {secs:.1f}s", arts, secs)


REPORT: dict = {}
RUNS = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


def all_artifacts(results: dict | None = None) -> dict:
    """Artifacts of criteria 1-10, reusing results already computed in this process."""
    out = {}
    for n, run in RUNS.items():
        res = results[n] if results and n in results else run()
        out.update(res.artifacts)
    return out


if __name__ == "__main__":
    import sys

    json.dump(all_artifacts(), sys.stdout, sort_keys=True)
