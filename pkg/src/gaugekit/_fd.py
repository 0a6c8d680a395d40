"""Central finite differences shared by the geometry and gauge modules."""
import numpy as np


def fd_steps(x, step):
    """Per-coordinate step ``step * (1 + |x_i|)``."""
    return step * (1.0 + np.abs(np.asarray(x, dtype=float)))


def partials(f, x, step):
    """Stack of ``d f / d x_i`` for every coordinate ``i`` (axis 0)."""
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, step)
    out = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h[i]
        out.append((f(x + e) - f(x - e)) / (2.0 * h[i]))
    return np.stack(out)


def directional(f, x, v, step):
    """Derivative of ``f`` at ``x`` along ``v`` by a symmetric difference."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return 0.0 * f(x)
    h = step * (1.0 + np.max(np.abs(x))) / norm
    return (f(x + h * v) - f(x - h * v)) / (2.0 * h)
