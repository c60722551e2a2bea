"""Shared helpers: seeded grids and independent brute-force oracles.

The oracles deliberately avoid the library's ray enumeration and key
machinery so that round-trip tests check two genuinely different routes.
"""

import random
from fractions import Fraction

from lxray import GridFunction, enumerate_ball


def random_int_grid(d, r, seed, lo=-9, hi=9):
    """Integer-valued grid on the full ball; exact in double arithmetic."""
    rng = random.Random(seed)
    values = {z: float(rng.randint(lo, hi)) for z in enumerate_ball(d, r)}
    return GridFunction(d, r, values)


def on_line(z, ray):
    """Independent membership test: z - base parallel to the direction.

    All 2x2 minors of (z - base, dir) must vanish; with a primitive
    direction, parallel integer vectors are automatically integer multiples.
    """
    u = [a - b for a, b in zip(z, ray.base)]
    p = ray.dir
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            if u[i] * p[j] != u[j] * p[i]:
                return False
    return True


def brute_forward(f, ray):
    """Discrete transform by scanning the whole support (oracle)."""
    return float(sum(v for z, v in f.values.items() if on_line(z, ray)))


def brute_ball(d, r):
    """Ball enumeration by box scan with exact rational comparison (oracle)."""
    rf = Fraction(r)
    r2 = rf * rf
    m = 0
    while Fraction(m * m) <= r2:  # overshoot the box by one
        m += 1
    span = range(-m, m + 1)
    out = []

    def rec(prefix):
        if len(prefix) == d:
            if sum(c * c for c in prefix) <= r2:
                out.append(tuple(prefix))
            return
        for c in span:
            rec(prefix + [c])

    rec([])
    return out
