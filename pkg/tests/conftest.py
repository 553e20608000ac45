"""Shared test helpers."""

import numpy as np
from scipy import stats


def two_sample_chi2(a, b, min_expected=5):
    """Chi-square homogeneity p-value with bins merged to a minimum count."""
    a = np.asarray(a)
    b = np.asarray(b)
    lo = int(min(a.min(), b.min()))
    hi = int(max(a.max(), b.max()))
    ca = np.bincount(a - lo, minlength=hi - lo + 1)
    cb = np.bincount(b - lo, minlength=hi - lo + 1)
    bins_a, bins_b = [], []
    acc_a = acc_b = 0
    for x, y in zip(ca, cb):
        acc_a += int(x)
        acc_b += int(y)
        if acc_a + acc_b >= 2 * min_expected:
            bins_a.append(acc_a)
            bins_b.append(acc_b)
            acc_a = acc_b = 0
    if acc_a + acc_b:
        if bins_a:
            bins_a[-1] += acc_a
            bins_b[-1] += acc_b
        else:
            return 1.0
    if len(bins_a) < 2:
        return 1.0
    _, p_value, _, _ = stats.chi2_contingency(np.array([bins_a, bins_b]))
    return p_value
