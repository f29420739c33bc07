from fractions import Fraction

import pytest

from tilinglab.errors import InsufficientCoverage, OverlapError
from tilinglab.exactnum import norm2, sign, vec, vkey, vneg, vsub
from tilinglab.language import (displacement_set, is_legal, language_at, observed_max_gap, occurrences, period_probe,
                                restrict_entry, return_vectors)
from tilinglab.subst import find_seed, load_catalog
from tilinglab.tiling import CAP, PlacedTile, patch_build, restrict

from oracles import entry_set, naive_language, naive_occurrences


def test_square_language_single_entry(approx):
    a = approx("square", 4)
    for r2 in (1, 4, 9):
        assert len(language_at(a, r2)) == 1


def test_language_coverage_error(approx):
    with pytest.raises(InsufficientCoverage):
        language_at(approx("chair", 3), 4)


def test_chair_language_matches_naive(approx):
    a = approx("chair", 6)
    lang = language_at(a, 4)
    assert entry_set(lang) == naive_language(a, a.rule.field.coerce(4))


@pytest.mark.parametrize("name,level,r2", [("fibonacci", 6, 9), ("ammann_beenker", 3, 2), ("robinson_triangles", 3, 1)])
def test_language_matches_naive_irrational(approx, name, level, r2):
    a = approx(name, level)
    lang = language_at(a, r2)
    assert entry_set(lang) == naive_language(a, a.rule.field.coerce(r2))


def test_language_restriction_surjective(approx):
    a = approx("chair", 6)
    big = language_at(a, 9)
    small = language_at(a, 4)
    restricted = {restrict_entry(e, a.rule.field.coerce(4)).key() for e in big.entries}
    assert restricted == small.keys()


@pytest.mark.parametrize("name,levels,r2", [("chair", (4, 5, 6), 4), ("fibonacci", (4, 5, 6), 4),
                                             ("ammann_beenker", (3, 4), 2)])
def test_language_monotone_in_level(approx, name, levels, r2):
    keys = [language_at(approx(name, m), r2).keys() for m in levels]
    for a, b in zip(keys, keys[1:]):
        assert a <= b


def test_language_stabilizes(approx):
    lang = language_at(approx("chair", 6), 4)
    assert lang.stabilized


def test_square_occurrences_lattice(approx):
    a = approx("square", 4)
    single = patch_build([PlacedTile(0, vec(a.rule.field, [0, 0]))], a.rule.protos)
    w2 = 26
    occ = occurrences(a, single, w2)
    # tile centres are (i + 1/2, j + 1/2); count them inside the open window about the centre
    cx, cy = (e.c[0] for e in a.center)
    want = sum(1 for i in range(-20, 40) for j in range(-20, 40)
               if (i + Fraction(1, 2) - cx) ** 2 + (j + Fraction(1, 2) - cy) ** 2 < w2)
    assert len(occ) == want
    assert {vkey(t) for t in occ} == naive_occurrences(a, single, a.rule.field.coerce(w2))


def test_square_occurrences_block(approx):
    a = approx("square", 4)
    single = patch_build([PlacedTile(0, vec(a.rule.field, [0, 0]))], a.rule.protos)
    # the whole 16 x 16 supertile
    assert len(occurrences(a, single, None)) == 256


def test_occurrences_match_naive(approx):
    a = approx("chair", 6)
    for e in language_at(a, 9).entries[:6]:
        got = {vkey(t) for t in occurrences(a, e, 400)}
        assert got == naive_occurrences(a, e.patch, a.rule.field.coerce(400))


def test_occurrences_equivariant(approx):
    a = approx("chair", 5)
    e = language_at(a, 4).entries[0]
    v = vec(a.rule.field, [3, -7])
    base = occurrences(a, e, None)
    moved = occurrences(a, e.patch.translate(v), None)
    assert {vkey(t) for t in moved} == {vkey(vsub(t, v)) for t in base}


def test_occurrence_counts_match_incidence(approx):
    a = approx("chair", 6)
    M = a.rule.incidence_matrix()
    vecn = [0] * len(M)
    vecn[a.seed.proto] = 1
    for _ in range(6 * a.seed.n):
        vecn = [sum(M[q][p] * vecn[p] for p in range(len(M))) for q in range(len(M))]
    zero = vec(a.rule.field, [0, 0])
    for q in range(len(M)):
        single = patch_build([PlacedTile(q, zero)], a.rule.protos)
        assert len(occurrences(a, single, None)) == vecn[q]


def test_displacements_self_and_symmetry(approx):
    a = approx("chair", 6)
    entries = language_at(a, 9).entries
    p1, p2 = entries[0], entries[3]
    d11 = displacement_set(a, p1, p1, 16)
    assert vec(a.rule.field, [0, 0]) in d11
    d12 = displacement_set(a, p1, p2, 16)
    d21 = displacement_set(a, p2, p1, 16)
    assert {vkey(d) for d in d12.shifts} == {vkey(vneg(d)) for d in d21.shifts}


def test_square_displacements_lattice(approx):
    a = approx("square", 4)
    single = patch_build([PlacedTile(0, vec(a.rule.field, [0, 0]))], a.rule.protos)
    ds = displacement_set(a, single, single, 5)
    want = {(i, j) for i in range(-3, 4) for j in range(-3, 4) if i * i + j * j < 5}
    assert {(d[0].c[0], d[1].c[0]) for d in ds.shifts} == want


def test_displacements_are_legal(approx):
    a = approx("chair", 5)
    entries = language_at(a, 4).entries
    p1, p2 = entries[1], entries[2]
    ds = displacement_set(a, p1, p2, 64)
    assert ds.shifts
    for d in ds.shifts[:10]:
        union = {t.key: t for t in p1.patch.tiles}
        for t in p2.patch.translate(d).tiles:
            union.setdefault(t.key, t)
        verdict = is_legal(a.rule, a.seed, patch_build(list(union.values()), a.rule.protos), 5)
        assert verdict.legal


def test_is_legal_prototiles():
    r = load_catalog("chair")
    seed = find_seed(r)
    zero = vec(r.field, [0, 0])
    for q in range(4):
        v = is_legal(r, seed, patch_build([PlacedTile(q, zero)], r.protos), 3)
        assert v.legal and v.level <= 2


def test_is_legal_cut_patch(approx):
    a = approx("chair", 4)
    cut = restrict(a.patch, a.center, a.rule.field.coerce(9), CAP)
    moved = cut.translate(vec(a.rule.field, [Fraction(101), Fraction(-37)]))
    v = is_legal(a.rule, a.seed, moved, 4)
    assert v.legal and v.level <= 4
    assert v.witness is not None


def test_is_legal_overlap_and_not_found():
    r = load_catalog("square")
    seed = find_seed(r)
    F = r.field
    with pytest.raises(OverlapError):
        patch_build([PlacedTile(0, vec(F, [0, 0])), PlacedTile(0, vec(F, [Fraction(1, 2), 0]))], r.protos)
    # a half-step offset between rows never occurs in the square tiling
    odd = patch_build([PlacedTile(0, vec(F, [0, 0])), PlacedTile(0, vec(F, [Fraction(1, 2), 1]))], r.protos)
    v = is_legal(r, seed, odd, 4)
    assert not v.legal and v.level == 4


def test_square_return_vectors(approx):
    a = approx("square", 4)
    got = {(z[0].c[0], z[1].c[0]) for z in return_vectors(a, 10)}
    want = {(i, j) for i in range(-4, 5) for j in range(-4, 5) if 0 < i * i + j * j < 10}
    assert got == want


def test_chair_return_vectors(approx):
    a = approx("chair", 3)
    got = {(z[0].c[0], z[1].c[0]) for z in return_vectors(a, 9)}
    # same-orientation chairs sit on the checkerboard lattice spanned by (1, 1) and (1, -1);
    # (2, 0) is in that span but is never realised as a single return
    assert {(1, 1), (1, -1), (2, 2), (-2, 2)} <= got
    assert all((x + y) % 2 == 0 for x, y in got)
    assert (2, 0) not in got
    with pytest.raises(InsufficientCoverage):
        return_vectors(a, 100)


def test_fibonacci_return_vectors_in_module(approx):
    a = approx("fibonacci", 6)
    zs = return_vectors(a, 16)
    assert zs
    for (z,) in zs:
        assert all(c.denominator == 1 for c in z.c)


def test_period_probe(approx):
    sq = approx("square", 4)
    F = sq.rule.field
    assert period_probe(sq, vec(F, [1, 0]), 36)
    assert not period_probe(sq, vec(F, [Fraction(1, 2), 0]), 36)
    ch = approx("chair", 4)
    assert not period_probe(ch, vec(ch.rule.field, [1, 0]), 49)
    assert period_probe(ch, vec(ch.rule.field, [0, 0]), 49)


def test_repetitivity_gaps_bounded(approx):
    # the largest hole between occurrences of a fixed entry does not grow with the approximant
    gaps = []
    for m in (5, 6):
        a = approx("chair", m)
        e = language_at(approx("chair", 5), 4).entries[0]
        occ = occurrences(a, e, None)
        inner = [t for t in occ if sign(norm2(vsub(t, a.center)) - a.coverage_radius2 / 4) < 0]
        gaps.append(observed_max_gap(inner or occ, a))
    assert gaps[1] <= gaps[0] * 4
