"""Independent oracle routes used by unit and acceptance tests.

These deliberately avoid the implementation's code paths: chi-square via
expected contingency counts, Bayes posteriors via exact rational
arithmetic, and the rate-limit check via an exhaustive window scan.
"""

import math
from fractions import Fraction


def oracle_chi2(a: int, b: int, c: int, d: int) -> float:
    """sum((observed - expected)^2 / expected) over the 2x2 table."""
    n = a + b + c + d
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    if 0 in rows or 0 in cols:
        return 0.0
    total = 0.0
    observed = ((a, b), (c, d))
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / n
            total += (observed[i][j] - expected) ** 2 / expected
    return total


def oracle_log_posteriors(class_counts, class_docs, n_docs, alpha, vector):
    """Smoothed multinomial Bayes evaluated with Fractions, logs taken last.

    class_counts: {class: aggregate count per slot}; class_docs: {class: n_c}.
    """
    width = len(next(iter(class_counts.values())))
    alpha = Fraction(alpha)
    out = {}
    for cls, counts in class_counts.items():
        prior = Fraction(class_docs[cls], n_docs)
        denom = sum(Fraction(c) for c in counts) + alpha * width
        total = math.log(prior)
        for i, v in enumerate(vector):
            if v:
                p = (Fraction(counts[i]) + alpha) / denom
                total += v * math.log(p)
        out[cls] = total
    return out


def scan_max_in_window(grants, window: float = 60.0) -> int:
    """Densest half-open window [g, g + window) over the grant times."""
    grants = sorted(grants)
    best = 0
    for i, start in enumerate(grants):
        count = sum(1 for g in grants[i:] if g < start + window)
        best = max(best, count)
    return best
