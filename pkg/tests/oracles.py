"""Slow, obviously-correct reference implementations used only by the tests."""

import itertools
import math

import numpy as np


def naive_permanent(a):
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i, j in enumerate(perm):
            prod *= a[i, j]
        total += prod
    return total


def haar_unitary(m, rng):
    z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def embed(m, i, j, block):
    """M x M identity with a 2x2 block on 0-based modes (i, j)."""
    u = np.eye(m, dtype=complex)
    u[np.ix_([i, j], [i, j])] = block
    return u


def brute_force_distribution(v, s, states):
    """Transition probabilities by explicit submatrix construction and naive permanents."""
    m = v.shape[0]
    cols = [c for c in range(m) for _ in range(s[c])]
    fs = math.prod(math.factorial(k) for k in s)
    out = []
    for q in states:
        rows = [r for r in range(m) for _ in range(q[r])]
        sub = v[np.ix_(rows, cols)]
        fq = math.prod(math.factorial(int(k)) for k in q)
        out.append(abs(naive_permanent(sub)) ** 2 / (fs * fq))
    return np.array(out)


def light_cone_wedge_counts(modes):
    """Per-layer wedge MZI counts, counted pair by pair from the light-cone rule."""
    c = modes // 2 - 1
    counts = {}
    layer = 2
    while True:
        lo, hi = c - (layer - 1), c + 3 + (layer - 1)
        first = 1 if layer % 2 else 2
        counts[layer] = sum(1 for i in range(first, modes, 2) if lo <= i and i + 1 <= hi)
        if lo <= 1 and hi >= modes:
            return counts
        layer += 1
