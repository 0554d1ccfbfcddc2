"""Seeded random elements of each representable family."""

import random
from collections import Counter

from twistperm.core_perm import FinitePermutation, Point
from twistperm.structured_perm import (
    StructuredPermutation,
    embed,
    product,
    ray_block,
    translation,
)


def random_finite(rng, n, points=8, max_pos=6):
    pool = [Point(r, p) for r in range(1, n + 1) for p in range(1, max_pos + 1)]
    pts = rng.sample(pool, min(points, len(pool)))
    img = pts[:]
    rng.shuffle(img)
    return FinitePermutation(n, dict(zip(pts, img)))


def random_even(rng, n, points=8, max_pos=6):
    f = random_finite(rng, n, points, max_pos)
    if not f.is_even:
        a, b = Point(1, max_pos + 1), Point(1, max_pos + 2)
        f = f * FinitePermutation(n, {a: b, b: a})
    return f


def random_shifts(rng, n, spread=3):
    shifts = [rng.randint(-spread, spread) for _ in range(n - 1)]
    return shifts + [-sum(shifts)]


def random_houghton(rng, n, spread=3, points=6):
    """Eventual translations with pi = id, times a finite permutation."""
    g = translation(n, random_shifts(rng, n, spread))
    return product(g, embed(random_finite(rng, n, points)))


def random_ray_permuting(rng, n, spread=2, points=4, zero_net=False):
    pi = list(range(1, n + 1))
    rng.shuffle(pi)
    if zero_net:
        shifts = _zero_net_shifts(rng, pi, spread)
    else:
        shifts = random_shifts(rng, n, spread)
    return product(translation(n, shifts, pi), embed(random_finite(rng, n, points)))


def _zero_net_shifts(rng, pi, spread):
    n = len(pi)
    shifts = [0] * n
    seen = set()
    for start in range(1, n + 1):
        if start in seen:
            continue
        cycle, i = [], start
        while i not in seen:
            seen.add(i)
            cycle.append(i)
            i = pi[i - 1]
        vals = [rng.randint(-spread, spread) for _ in cycle[:-1]]
        vals.append(-sum(vals))
        for i, v in zip(cycle, vals):
            shifts[i - 1] = v
    return shifts


def random_block(rng, period):
    block = list(range(period))
    while period > 1 and block == sorted(block):
        rng.shuffle(block)
    return block


def random_periodic(rng, n, max_period=4, points=4):
    """Block tails on a random set of rays, identity elsewhere, with a
    finite correction."""
    rays = rng.sample(range(1, n + 1), rng.randint(1, n))
    factors = [ray_block(n, r, random_block(rng, rng.randint(1, max_period)),
                         rng.randint(0, 3)) for r in rays]
    factors.append(embed(random_finite(rng, n, points)))
    return product(*factors)


def random_mixed(rng, n, max_period=3, spread=2, points=4):
    """Block tails on some rays, translations permuting the others."""
    k = rng.randint(1, n - 1)
    periodic = rng.sample(range(1, n + 1), k)
    others = [r for r in range(1, n + 1) if r not in periodic]
    perm = others[:]
    rng.shuffle(perm)
    pi = list(range(1, n + 1))
    for a, b in zip(others, perm):
        pi[a - 1] = b
    shifts = [0] * n
    vals = [rng.randint(-spread, spread) for _ in others[:-1]]
    vals.append(-sum(vals))
    for r, v in zip(others, vals):
        shifts[r - 1] = v
    factors = [ray_block(n, r, random_block(rng, rng.randint(2, max_period))) for r in periodic]
    factors.append(translation(n, shifts, pi))
    factors.append(embed(random_finite(rng, n, points)))
    return product(*factors)


FAMILIES = {
    "finite": lambda rng, n: embed(random_finite(rng, n)),
    "houghton": random_houghton,
    "ray_permuting": random_ray_permuting,
    "zero_net": lambda rng, n: random_ray_permuting(rng, n, zero_net=True),
    "periodic": random_periodic,
    "mixed": lambda rng, n: random_mixed(rng, max(n, 2)),
}


def random_element(rng, family=None, n=None):
    n = n or rng.randint(1, 4)
    if family is None:
        family = rng.choice([f for f in sorted(FAMILIES) if n > 1 or f != "mixed"])
    if family == "mixed":
        n = max(n, 2)
    return FAMILIES[family](rng, n)


def brute_census(g, box, cap=4000):
    """Cycle counts by plain iteration from every point with pos <= box.

    Returns (finite cycle counts, number of distinct non-closing orbits).
    A trajectory that has not closed after ``cap`` steps either way counts
    as infinite; trajectories meeting a common box point are merged.
    """
    counts = Counter()
    seen = set()
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ray in range(1, g.n + 1):
        for pos in range(1, box + 1):
            x = Point(ray, pos)
            if x in seen:
                continue
            path, y = [x], g(x)
            while y != x and len(path) < cap:
                path.append(y)
                y = g(y)
            if y == x:
                counts[len(path)] += 1
                seen.update(path)
                continue
            back, y = [], g.apply_inverse(x)
            while len(back) < cap:
                back.append(y)
                y = g.apply_inverse(y)
            inside = [p for p in path + back if p.pos <= box]
            for p in inside:
                parent.setdefault(p, p)
            root = find(x)
            for p in inside:
                parent[find(p)] = root
            seen.update(inside)
    roots = {find(x) for x in parent}
    return counts, len(roots)


def seeded(seed):
    return random.Random(seed)
