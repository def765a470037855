"""Reference computations kept independent of the code under test."""

import numpy as np


def central_difference(f, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Gradient of scalar ``f`` at ``x`` by central differences, entry by entry."""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    flat = x.ravel()
    g = grad.ravel()
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + step
        hi = f(x)
        flat[i] = old - step
        lo = f(x)
        flat[i] = old
        g[i] = (hi - lo) / (2 * step)
    return grad


def relative_error(a, b) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-8))


def recount(tokens, terms):
    """Occurrences of each term, by plain list counting."""
    return [tokens.count(t) for t in terms]


def corpus_totals(docs, terms):
    return [sum(doc.count(t) for doc in docs) for t in terms]
