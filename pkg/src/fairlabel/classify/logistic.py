"""L2-penalized logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

import numpy as np


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log1pexp(z):
    return np.logaddexp(0.0, z)


def penalized_nll(w, b, X, y, l2):
    z = X @ w + b
    return float(np.mean(_log1pexp(z) - y * z) + 0.5 * l2 * np.dot(w, w))


def loss_and_grad(w, b, X, y, l2):
    """Mean negative log-likelihood plus ``l2/2 * |w|^2`` and its gradient.

    The intercept is not penalized. Returns ``(loss, grad_w, grad_b)``.
    """
    n = X.shape[0]
    z = X @ w + b
    loss = float(np.mean(_log1pexp(z) - y * z) + 0.5 * l2 * np.dot(w, w))
    r = sigmoid(z) - y
    grad_w = X.T @ r / n + l2 * w
    grad_b = float(np.sum(r) / n)
    return loss, grad_w, grad_b


def standardize_params(X):
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale


def gradient_descent(X, y, learning_rate=0.1, epochs=500, l2=1e-4):
    """Fit on already-standardized ``X``.

    A step that would raise the loss is retried at half the step size, so the
    recorded loss sequence never increases.
    """
    w = np.zeros(X.shape[1])
    b = 0.0
    lr = learning_rate
    loss, gw, gb = loss_and_grad(w, b, X, y, l2)
    history = [loss]
    for _ in range(epochs):
        while True:
            w_new = w - lr * gw
            b_new = b - lr * gb
            new_loss, new_gw, new_gb = loss_and_grad(w_new, b_new, X, y, l2)
            if new_loss <= loss or lr < 1e-12:
                break
            lr *= 0.5
        if new_loss > loss:
            break
        w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
        history.append(loss)
    return w, b, history


def fit_logistic(X, y, learning_rate=0.1, epochs=500, l2=1e-4):
    """Train on standardized features and map the weights back to raw units.

    Returns ``(coef, intercept, loss_history)`` such that the score of a raw
    row ``x`` is ``sigmoid(coef @ x + intercept)``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mean, scale = standardize_params(X)
    w, b, history = gradient_descent((X - mean) / scale, y, learning_rate, epochs, l2)
    coef = w / scale
    intercept = b - float(np.dot(coef, mean))
    return coef, intercept, history
