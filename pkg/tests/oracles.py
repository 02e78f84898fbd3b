"""Independent brute-force oracles used to freeze expected values.

Everything here is written as plain double/triple loops over scalars, on
purpose: these implementations must stay independent of the vectorized
production paths they check.
"""

import math

import numpy as np


def kernel_scalar(kind: str, u: float) -> float:
    if kind == "gaussian":
        return math.exp(-0.5 * u * u)
    if kind == "uniform":
        return 1.0 if -1.0 <= u <= 1.0 else 0.0
    if kind == "quadratic":
        return (1.0 - u * u) if -1.0 <= u <= 1.0 else 0.0
    raise ValueError(kind)


def nw_oracle(thetas, selections, m, point, h, kind):
    """Exact Nadaraya-Watson probabilities by explicit double loop."""
    weights = [kernel_scalar(kind, (point - t) / h) for t in thetas]
    total = sum(weights)
    if total == 0.0:
        raise ZeroDivisionError("empty neighborhood")
    probs = [0.0] * m
    for w, sel in zip(weights, selections):
        probs[sel - 1] += w / total
    return np.array(probs)


def cv_oracle(thetas, selections, m, h, kind):
    """Leave-one-out CV statistic by explicit triple loop."""
    n = len(thetas)
    total_err = 0.0
    for i in range(n):
        num = [0.0] * m
        den = 0.0
        for r in range(n):
            if r == i:
                continue
            kv = kernel_scalar(kind, (thetas[i] - thetas[r]) / h)
            num[selections[r] - 1] += kv
            den += kv
        if den == 0.0:
            return math.inf
        err = 0.0
        for l in range(m):
            y = 1.0 if selections[i] - 1 == l else 0.0
            err += (y - num[l] / den) ** 2
        total_err += err
    return total_err / n


def interp_scalar(x, xs, ys):
    """Piecewise-linear interpolation of (xs, ys) at one point, by hand."""
    if x <= xs[0]:
        return ys[0]
    if x >= xs[-1]:
        return ys[-1]
    for s in range(len(xs) - 1):
        if xs[s] <= x <= xs[s + 1]:
            frac = (x - xs[s]) / (xs[s + 1] - xs[s])
            return ys[s] + frac * (ys[s + 1] - ys[s])
    raise AssertionError("unreachable")


def occ_stderr_oracle(thetas, occ, points, h, kind):
    """Standard errors as an explicit sum of squared weights times p(1-p)."""
    q, m = occ.shape
    out = np.zeros((q, m))
    for s in range(q):
        raw = [kernel_scalar(kind, (points[s] - t) / h) for t in thetas]
        total = sum(raw)
        for l in range(m):
            acc = 0.0
            for i, t in enumerate(thetas):
                p = interp_scalar(t, points, occ[:, l])
                acc += (raw[i] / total) ** 2 * p * (1.0 - p)
            out[s, l] = math.sqrt(acc)
    return out


def eis_stderr_oracle(thetas, occ, weights, points, h, kind):
    """EIS standard errors with the variance bracket as explicit double sums."""
    q, m = occ.shape
    out = np.zeros(q)
    for s in range(q):
        raw = [kernel_scalar(kind, (points[s] - t) / h) for t in thetas]
        total = sum(raw)
        acc = 0.0
        for i, t in enumerate(thetas):
            p = [interp_scalar(t, points, occ[:, l]) for l in range(m)]
            bracket = 0.0
            for l in range(m):
                bracket += weights[l] ** 2 * p[l] * (1.0 - p[l])
            for l in range(m):
                for tt in range(m):
                    if tt != l:
                        bracket -= weights[l] * weights[tt] * p[l] * p[tt]
            acc += (raw[i] / total) ** 2 * bracket
        out[s] = math.sqrt(max(acc, 0.0))
    return out


def kde_oracle(scores, xs, h):
    """Gaussian KDE as a direct sum of normal densities."""
    n = len(scores)
    out = np.zeros(len(xs))
    for j, x in enumerate(xs):
        acc = 0.0
        for t in scores:
            acc += math.exp(-0.5 * ((x - t) / h) ** 2)
        out[j] = acc / (n * h * math.sqrt(2.0 * math.pi))
    return out


def perpendicular_distances(point, vertices):
    """Distance from a point to the face opposite each vertex.

    vertices is (3, 2) for the triangle or (4, 3) for the tetrahedron.
    """
    m = vertices.shape[0]
    out = np.zeros(m)
    for i in range(m):
        others = np.delete(vertices, i, axis=0)
        if vertices.shape[1] == 2:
            a, b = others
            direction = b - a
            normal = np.array([-direction[1], direction[0]])
            normal = normal / np.linalg.norm(normal)
            out[i] = abs(np.dot(point - a, normal))
        else:
            a, b, c = others
            normal = np.cross(b - a, c - a)
            normal = normal / np.linalg.norm(normal)
            out[i] = abs(np.dot(point - a, normal))
    return out


# Frozen reference values computed once with mpmath at 50 digits.
NORMAL_QUANTILE_025 = -0.6744897501960817
NORMAL_QUANTILE_0975 = 1.9599639845400542
ROT_379 = 0.3232793939538267
