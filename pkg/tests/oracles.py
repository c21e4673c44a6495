"""Independent reference implementations used by the tests.

These are deliberately naive (textbook recursions, exhaustive scans) and
share no code with the library paths they check.
"""

import numpy as np


def naive_bspline(knots, degree, k, x):
    """Textbook two-term recursion for one basis function value.

    Base intervals are half-open; the last non-empty interval is closed at
    the global right boundary so that the basis sums to one there as well.
    """
    t = np.asarray(knots, dtype=float)

    def rec(p, i, x):
        if p == 0:
            if t[i] <= x < t[i + 1]:
                return 1.0
            if x == t[-1] and t[i] < t[i + 1] == t[-1]:
                return 1.0
            return 0.0
        total = 0.0
        if t[i + p] != t[i]:
            total += (x - t[i]) / (t[i + p] - t[i]) * rec(p - 1, i, x)
        if t[i + p + 1] != t[i + 1]:
            total += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * rec(p - 1, i + 1, x)
        return total

    return rec(degree, k, float(x))


def type1_quantile(data, p):
    """Sort-and-index inverse ECDF: x_(ceil(n*p)) with 1-based indexing."""
    s = sorted(float(v) for v in data)
    k = int(np.ceil(len(s) * p))
    return s[k - 1]


def lad_loss(values, weights, q):
    return float(np.sum(weights * np.abs(np.asarray(values) - q)))


def ls_loss(values, weights, q):
    return float(np.sum(weights * (np.asarray(values) - q) ** 2))


def lad_candidates(values):
    """Order statistics plus adjacent midpoints: the LAD minimizer set is covered."""
    s = np.sort(np.asarray(values, dtype=float))
    mids = 0.5 * (s[:-1] + s[1:]) if s.size > 1 else np.array([])
    return np.concatenate([s, mids])


def ecdf_sup_distance(x, y):
    """Brute-force sup distance of two ECDFs over all observed points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    best = 0.0
    for t in np.concatenate([x, y]):
        fx = np.mean(x <= t)
        fy = np.mean(y <= t)
        best = max(best, abs(fx - fy))
    return best
