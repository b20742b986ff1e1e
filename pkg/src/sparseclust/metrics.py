"""Clustering-agreement and variable-selection metrics.

The Rand index here is the plain (unadjusted) one: the fraction of
observation pairs on which two labelings agree, a pair agreeing when both
labelings co-cluster it or both separate it.
"""

import numpy as np


def rand_index(a, b):
    """Plain Rand index between two labelings; in [0, 1], 1 iff same partition.

    Computed from the contingency table in O(n + K_a * K_b); label values are
    irrelevant, only the induced partitions matter.
    """
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise ValueError(f"labelings differ in length: {a.size} vs {b.size}")
    n = a.size
    if n < 2:
        raise ValueError("need at least 2 observations")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    ka = ai.max() + 1
    kb = bi.max() + 1
    table = np.zeros((ka, kb), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    same_both = (table * (table - 1) // 2).sum()
    same_a = (rows * (rows - 1) // 2).sum()
    same_b = (cols * (cols - 1) // 2).sum()
    total = n * (n - 1) // 2
    agreements = total + 2 * same_both - same_a - same_b
    return agreements / total


def fnr_fpr(selected, truth_informative, p):
    """False negative and false positive rates of a selected-feature set.

    FNR = |truth \\ selected| / |truth|;
    FPR = |selected \\ truth| / (p - |truth|).
    Feature indices are 1-based; truth must be non-empty and not all of 1..p.
    """
    selected = {int(j) for j in selected}
    truth = {int(j) for j in truth_informative}
    universe = set(range(1, p + 1))
    if not selected <= universe or not truth <= universe:
        raise ValueError("feature indices must lie in 1..p")
    if not truth or truth == universe:
        raise ValueError("truth set must be non-empty and not all features")
    fnr = len(truth - selected) / len(truth)
    fpr = len(selected - truth) / (p - len(truth))
    return fnr, fpr
