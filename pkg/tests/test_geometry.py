from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tilinglab.errors import DimensionError, InvalidUnion
from tilinglab.exactnum import NumberField, vec
from tilinglab.geometry import (INSIDE, OUTSIDE, TOUCHES, Polygon, ball_relation, contains_ball,
                                interiors_overlap)

Q = NumberField.rationals()


def rect(x, y, w=1, h=1):
    return Polygon([vec(Q, p) for p in [(x, y), (x + w, y), (x + w, y + h), (x, y + h)]])


def test_overlap_examples():
    assert not interiors_overlap(rect(0, 0), rect(1, 0))
    assert interiors_overlap(rect(0, 0), rect(Fraction(1, 2), 0))
    assert not interiors_overlap(rect(0, 0), rect(2, 2))


def test_overlap_vertex_contact_and_self():
    assert not interiors_overlap(rect(0, 0), rect(1, 1))
    assert interiors_overlap(rect(0, 0), rect(0, 0))


def test_overlap_nonconvex():
    # an L-shape and a square sitting in its notch
    ell = Polygon([vec(Q, p) for p in [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]])
    assert not interiors_overlap(ell, rect(1, 1))
    assert interiors_overlap(ell, rect(Fraction(1, 2), Fraction(1, 2)))


def test_interval_overlap():
    a = Polygon([vec(Q, [0]), vec(Q, [1])])
    b = Polygon([vec(Q, [1]), vec(Q, [3])])
    c = Polygon([vec(Q, [Fraction(1, 2)]), vec(Q, [2])])
    assert not interiors_overlap(a, b)
    assert interiors_overlap(a, c)


def test_ball_relation_examples():
    o = vec(Q, [0, 0])
    assert ball_relation(rect(0, 0), o, Q.coerce(9)) == INSIDE
    # far vertex (1,1) at distance exactly sqrt 2
    assert ball_relation(rect(0, 0), o, Q.coerce(2)) == TOUCHES
    assert ball_relation(rect(10, 10), o, Q.coerce(1)) == OUTSIDE


def test_ball_relation_irrational_tie():
    K = NumberField([-2, 0, 1], [Fraction(1), Fraction(2)])
    r = K.gen
    sq = Polygon([vec(K, p) for p in [(0, 0), (r, 0), (r, r), (0, r)]])
    o = vec(K, [0, 0])
    assert ball_relation(sq, o, K.coerce(4)) == TOUCHES
    assert ball_relation(sq, o, K.coerce(4) + Fraction(1, 10**9)) == INSIDE


def test_ball_relation_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        ball_relation(rect(0, 0), vec(Q, [0, 0]), Q.coerce(0))


def test_contains_ball_examples():
    block = [rect(x, y) for x in range(2) for y in range(2)]
    c = vec(Q, [1, 1])
    assert contains_ball(block, c, Q.coerce(Fraction(1, 4)))
    assert not contains_ball(block, c, Q.coerce(4))
    assert not contains_ball([rect(0, 0)], vec(Q, [0, 0]), Q.coerce(Fraction(1, 10**6)))


def test_contains_ball_invalid_union():
    with pytest.raises(InvalidUnion):
        contains_ball([rect(0, 0), rect(Fraction(1, 2), 0)], vec(Q, [1, 1]), Q.coerce(1))


def test_dimension_three_rejected():
    with pytest.raises(DimensionError):
        Polygon([vec(Q, [0, 0, 0]), vec(Q, [1, 0, 0]), vec(Q, [0, 1, 0])])


# grid oracle for axis-aligned integer rectangles

small = st.integers(min_value=-3, max_value=3)
sizes = st.integers(min_value=1, max_value=3)


def _grid(x, y, w, h, step=Fraction(1, 4)):
    n, m = int(w / step), int(h / step)
    return [(x + i * step, y + j * step) for i in range(n + 1) for j in range(m + 1)]


@settings(max_examples=150, deadline=None)
@given(small, small, sizes, sizes, small, small, sizes, sizes)
def test_overlap_matches_grid(x1, y1, w1, h1, x2, y2, w2, h2):
    # interiors of integer rectangles meet iff some quarter-grid point lies strictly inside both
    pts = _grid(x1, y1, w1, h1)
    hit = any(x1 < px < x1 + w1 and y1 < py < y1 + h1 and x2 < px < x2 + w2 and y2 < py < y2 + h2
              for px, py in pts)
    a, b = rect(x1, y1, w1, h1), rect(x2, y2, w2, h2)
    assert interiors_overlap(a, b) == hit
    assert interiors_overlap(b, a) == hit


@settings(max_examples=150, deadline=None)
@given(small, small, sizes, sizes, small, small, st.integers(min_value=1, max_value=40))
def test_ball_relation_against_grid(x, y, w, h, cx, cy, r2):
    rel = ball_relation(rect(x, y, w, h), vec(Q, [cx, cy]), Q.coerce(r2))
    d2 = [(px - cx) ** 2 + (py - cy) ** 2 for px, py in _grid(x, y, w, h)]
    if rel == INSIDE:
        assert all(d < r2 for d in d2)
    elif rel == OUTSIDE:
        assert all(d > r2 for d in d2)
    else:
        assert any(d >= r2 for d in d2)
    # closure meets the ball iff the clamped centre does
    qx, qy = min(max(cx, x), x + w), min(max(cy, y), y + h)
    assert (rel != OUTSIDE) == ((qx - cx) ** 2 + (qy - cy) ** 2 <= r2)


@settings(max_examples=100, deadline=None)
@given(small, small, sizes, sizes, small, small, st.integers(min_value=1, max_value=30),
       st.integers(min_value=0, max_value=10))
def test_ball_relation_monotone(x, y, w, h, cx, cy, r2, extra):
    p, c = rect(x, y, w, h), vec(Q, [cx, cy])
    if ball_relation(p, c, Q.coerce(r2)) == INSIDE:
        assert ball_relation(p, c, Q.coerce(r2 + extra)) == INSIDE
    if ball_relation(p, c, Q.coerce(r2)) != OUTSIDE:
        assert ball_relation(p, c, Q.coerce(r2 + extra)) != OUTSIDE


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4),
       st.integers(min_value=0, max_value=8), st.integers(min_value=0, max_value=8),
       st.integers(min_value=1, max_value=16))
def test_contains_ball_in_block(n, m, cx4, cy4, r2_16):
    # n x m block of unit squares: the ball fits iff the centre is inside and
    # its distance to the block boundary is at least r
    cx, cy, r2 = Fraction(cx4, 2), Fraction(cy4, 2), Fraction(r2_16, 16)
    block = [rect(i, j) for i in range(n) for j in range(m)]
    inside = 0 <= cx <= n and 0 <= cy <= m
    d = min(cx, n - cx, cy, m - cy)
    want = inside and d * d >= r2
    assert contains_ball(block, vec(Q, [cx, cy]), Q.coerce(r2)) == want
