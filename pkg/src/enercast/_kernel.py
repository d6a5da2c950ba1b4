"""Compiled inner loop for per-sample gradient descent.

Mirrors ``network._backprop`` exactly; ``tests/test_network.py`` checks the
two against each other.
"""
import numpy as np
from numba import njit
from numba.typed import List

LINEAR, SIGMOID, TANH = 0, 1, 2
CODES = {"linear": LINEAR, "sigmoid": SIGMOID, "tanh": TANH}


@njit(cache=True)
def _act(z, code):
    if code == SIGMOID:
        return 1.0 / (1.0 + np.exp(-z))
    if code == TANH:
        return np.tanh(z)
    return z.copy()


@njit(cache=True)
def _dact(a, code):
    if code == SIGMOID:
        return a * (1.0 - a)
    if code == TANH:
        return 1.0 - a * a
    return np.ones_like(a)


@njit(cache=True)
def sgd_epoch(weights, biases, codes, x, y, order, lr):
    n_layers = len(weights)
    for j in order:
        acts = List()
        a = x[j].copy()
        acts.append(a)
        for i in range(n_layers):
            a = _act(weights[i] @ a + biases[i], codes[i])
            acts.append(a)
        delta = (-2.0 * (y[j] - a)) * _dact(a, codes[n_layers - 1])
        for i in range(n_layers - 1, -1, -1):
            w = weights[i]
            prev = acts[i]
            if i > 0:
                back = (w.T @ delta) * _dact(prev, codes[i - 1])
            else:
                back = delta
            for r in range(w.shape[0]):
                step = lr * delta[r]
                for c in range(w.shape[1]):
                    w[r, c] -= step * prev[c]
                biases[i][r] -= step
            delta = back


def prepare(weights, biases, names):
    """Typed views over the parameter arrays; updates land in the originals."""
    codes = np.array([CODES[n] for n in names], dtype=np.int64)
    return List(weights), List(biases), codes
