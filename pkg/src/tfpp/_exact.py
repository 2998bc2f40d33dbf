"""Exact predicates over the field Q[sqrt(3)].

Site embeddings are (x + y/2, y*sqrt(3)/2), i.e. rational + rational*sqrt(3)
componentwise, so segment/side intersection tests for crossing conventions
can be decided without floating-point rounding.  Angles that are multiples
of pi/6 rotate exactly inside the field; any other angle is handled by
converting its cos/sin floats to exact Fractions (deterministic, and exact
relative to those rounded constants).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

_F0 = Fraction(0)


class Q3(NamedTuple):
    """a + b*sqrt(3) with Fraction components."""

    a: Fraction
    b: Fraction

    def __add__(self, other):
        return Q3(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return Q3(self.a - other.a, self.b - other.b)

    def __mul__(self, other):
        return Q3(self.a * other.a + 3 * self.b * other.b,
                  self.a * other.b + self.b * other.a)

    def __neg__(self):
        return Q3(-self.a, -self.b)

    def sign(self) -> int:
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 against 3 b^2
        if a > 0:  # b < 0
            return 1 if a * a > 3 * b * b else (-1 if a * a < 3 * b * b else 0)
        return -1 if a * a > 3 * b * b else (1 if a * a < 3 * b * b else 0)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(3.0)


def q3(a=0, b=0) -> Q3:
    return Q3(Fraction(a), Fraction(b))


def q3_from_float(x: float) -> Q3:
    return Q3(Fraction(x), _F0)


class PointQ3(NamedTuple):
    x: Q3
    y: Q3


def embed_q3(v: tuple[int, int]) -> PointQ3:
    x, y = v
    return PointQ3(Q3(Fraction(2 * x + y, 2), _F0), Q3(_F0, Fraction(y, 2)))


_COS_TABLE = {
    0: q3(1), 1: q3(0, Fraction(1, 2)), 2: q3(Fraction(1, 2)), 3: q3(0),
    4: q3(Fraction(-1, 2)), 5: q3(0, Fraction(-1, 2)), 6: q3(-1),
    7: q3(0, Fraction(-1, 2)), 8: q3(Fraction(-1, 2)), 9: q3(0),
    10: q3(Fraction(1, 2)), 11: q3(0, Fraction(1, 2)),
}


def rotation_q3(theta: float) -> tuple[Q3, Q3]:
    """(cos theta, sin theta) as Q3; exact for multiples of pi/6."""
    k = theta / (math.pi / 6)
    kr = round(k)
    if abs(k - kr) < 1e-12:
        kr %= 12
        return _COS_TABLE[kr], _COS_TABLE[(kr - 3) % 12]
    return q3_from_float(math.cos(theta)), q3_from_float(math.sin(theta))


def to_frame(p: PointQ3, origin: PointQ3, cos_t: Q3, sin_t: Q3) -> PointQ3:
    """Coordinates of p in the frame rotated by theta about origin
    (i.e. e^{-i theta} (p - origin))."""
    dx = p.x - origin.x
    dy = p.y - origin.y
    return PointQ3(cos_t * dx + sin_t * dy, cos_t * dy - sin_t * dx)


def origin_q3(z: complex) -> PointQ3:
    return PointQ3(q3_from_float(z.real), q3_from_float(z.imag))


def _orient(p: PointQ3, q: PointQ3, r: PointQ3) -> int:
    return ((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)).sign()


def _on_segment(p: PointQ3, q: PointQ3, r: PointQ3) -> bool:
    """r collinear with pq: is r within the closed bounding box of pq?"""
    def between(a: Q3, b: Q3, c: Q3) -> bool:
        s1 = (c - a).sign()
        s2 = (b - c).sign()
        t1 = (c - b).sign()
        t2 = (a - c).sign()
        return (s1 >= 0 and s2 >= 0) or (t1 >= 0 and t2 >= 0)

    return between(p.x, q.x, r.x) and between(p.y, q.y, r.y)


def segments_intersect(p1: PointQ3, p2: PointQ3, q1: PointQ3, q2: PointQ3) -> bool:
    """Closed intersection test for segments p1p2 and q1q2 (exact)."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
       ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False
