import numpy as np

from irtsmooth.data import ResponseMatrix


def make_matrix(selections, option_counts=None, missing_option=None):
    """ResponseMatrix from a plain nested list, options inferred if omitted."""
    sel = np.asarray(selections, dtype=np.int64)
    if option_counts is None:
        option_counts = np.maximum(sel.max(axis=0), 2)
    k = sel.shape[1]
    if missing_option is None:
        missing_option = np.zeros(k, dtype=bool)
    labels = tuple(str(j + 1) for j in range(k))
    return ResponseMatrix(selections=sel,
                          option_counts=np.asarray(option_counts),
                          missing_option=np.asarray(missing_option),
                          item_labels=labels)
