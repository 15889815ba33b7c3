"""Feedforward network with squared-error loss.

Two trainers: full-batch gradient descent and Levenberg-Marquardt. Parameters
are addressed as one flat vector, layer by layer, weight matrix (row-major,
shape ``(units_out, units_in)``) followed by the bias vector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateData, DimensionMismatch, NonFiniteLoss, NotPositiveDefinite
from ..numkernel import solve_spd
from ..preprocess import NEGATIVE, POSITIVE

log = logging.getLogger(__name__)

LM_MAX_LAMBDA = 1e10
GRAD_TOL = 1e-8
GD_LOSS_TOL = 1e-9


def sigmoid(z):
    # split by sign so large |z| never overflows exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


ACTIVATIONS = {
    "sigmoid": (sigmoid, lambda a: a * (1.0 - a)),
    "identity": (lambda z: z, lambda a: np.ones_like(a)),
}


@dataclass
class NnModel:
    weights: list          # per layer, (units_out, units_in)
    biases: list           # per layer, (units_out,)
    activations: list      # per layer, key of ACTIVATIONS
    converged: bool = True
    epochs: int = 0
    history: list = field(default_factory=list)

    family = "nn"

    def __post_init__(self):
        for W, b in zip(self.weights, self.biases):
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise NonFiniteLoss("network weights are not finite")

    @property
    def layer_sizes(self):
        return [self.weights[0].shape[1]] + [W.shape[0] for W in self.weights]

    @property
    def n_features(self):
        return self.weights[0].shape[1]

    @property
    def n_params(self):
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def flat(self):
        return np.concatenate([np.concatenate([W.ravel(), b]) for W, b in zip(self.weights, self.biases)])

    def with_flat(self, theta):
        weights, biases, pos = [], [], 0
        for W, b in zip(self.weights, self.biases):
            weights.append(theta[pos:pos + W.size].reshape(W.shape))
            pos += W.size
            biases.append(theta[pos:pos + b.size].copy())
            pos += b.size
        return NnModel(weights, biases, list(self.activations), self.converged, self.epochs,
                       list(self.history))

    def forward(self, X):
        """Layer outputs, input first: [X, a1, ..., output]."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        outs = [X]
        for W, b, act in zip(self.weights, self.biases, self.activations):
            outs.append(ACTIVATIONS[act][0](outs[-1] @ W.T + b))
        return outs

    def output(self, X):
        return self.forward(X)[-1][:, 0]

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return np.where(self.output(X) >= 0.5, POSITIVE, NEGATIVE).astype(np.int64)

    def to_dict(self):
        return {
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "activations": list(self.activations),
            "converged": self.converged,
            "epochs": self.epochs,
        }

    @classmethod
    def from_dict(cls, d):
        return cls([np.array(W, dtype=np.float64) for W in d["weights"]],
                   [np.array(b, dtype=np.float64) for b in d["biases"]],
                   list(d["activations"]), d["converged"], d["epochs"])


def init_network(layer_sizes, activations="sigmoid", seed=0, scale=0.5):
    """Weights and biases drawn uniformly from (-scale, scale)."""
    if isinstance(activations, str):
        activations = [activations] * (len(layer_sizes) - 1)
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(rng.uniform(-scale, scale, size=(n_out, n_in)))
        biases.append(rng.uniform(-scale, scale, size=n_out))
    return NnModel(weights, biases, list(activations))


def mse(model, X, t):
    r = model.output(X) - t
    return float(np.mean(r * r))


def _deltas(model, outs):
    """Per-sample d(output)/d(pre-activation) for every layer, last layer first."""
    deriv = ACTIVATIONS[model.activations[-1]][1]
    D = deriv(outs[-1])
    ds = [D]
    for layer in range(len(model.weights) - 1, 0, -1):
        deriv = ACTIVATIONS[model.activations[layer - 1]][1]
        D = (D @ model.weights[layer]) * deriv(outs[layer])
        ds.append(D)
    return ds[::-1]


def jacobian(model, X):
    """d output_i / d theta for every sample, shape (n, n_params)."""
    outs = model.forward(X)
    if outs[-1].shape[1] != 1:
        raise DimensionMismatch("jacobian supports a single output unit")
    n = outs[0].shape[0]
    blocks = []
    for D, a_prev in zip(_deltas(model, outs), outs[:-1]):
        blocks.append((D[:, :, None] * a_prev[:, None, :]).reshape(n, -1))
        blocks.append(D)
    return np.hstack(blocks)


def nn_gradient(model, X, t):
    """Gradient of the mean squared error over the batch w.r.t. the flat parameters."""
    t = np.asarray(t, dtype=np.float64)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] != t.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} samples but {t.shape[0]} targets")
    outs = model.forward(X)
    n = X.shape[0]
    err = 2.0 * (outs[-1][:, 0] - t) / n
    grads = []
    ds = _deltas(model, outs)
    for D, a_prev in zip(ds, outs[:-1]):
        E = D * err[:, None]
        grads.append((E.T @ a_prev).ravel())
        grads.append(E.sum(axis=0))
    return np.concatenate(grads)


def train_gd(model, X, t, learning_rate=0.05, max_epochs=2000):
    """Full-batch gradient descent; stops early when the loss change is below 1e-9."""
    t = np.asarray(t, dtype=np.float64)
    theta = model.flat()
    loss = mse(model, X, t)
    history = [loss]
    converged = False
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        theta = theta - learning_rate * nn_gradient(model, X, t)
        model = model.with_flat(theta)
        new_loss = mse(model, X, t)
        if not np.isfinite(new_loss):
            raise NonFiniteLoss(f"loss diverged at epoch {epoch}", epoch=epoch)
        history.append(new_loss)
        if abs(loss - new_loss) < GD_LOSS_TOL:
            converged = True
            loss = new_loss
            break
        loss = new_loss
    model.converged = converged
    model.epochs = epoch
    model.history = history
    return model


def lm_step(J, r, lam):
    """Damped Gauss-Newton step: -(J'J + lam I)^-1 J'r."""
    return -solve_spd(J.T @ J, J.T @ r, ridge=lam)


def train_lm(model, X, t, damping=1e-3, factor=10.0, max_epochs=200):
    """Levenberg-Marquardt on the residuals output - target.

    Each epoch ends with one accepted step; a rejected step multiplies the
    damping by ``factor`` and retries. ``model.history`` records
    ``(accepted, lambda, loss)`` for every attempt.
    """
    t = np.asarray(t, dtype=np.float64)
    theta = model.flat()
    r = model.output(X) - t
    loss = float(np.mean(r * r))
    lam = damping
    attempts = []
    converged = False
    epoch = 0
    stop = False
    while epoch < max_epochs and not stop:
        J = jacobian(model, X)
        g = J.T @ r
        if np.linalg.norm(g) < GRAD_TOL:
            converged = True
            break
        A = J.T @ J
        while True:
            try:
                step = -solve_spd(A, g, ridge=lam)
            except NotPositiveDefinite:
                lam *= factor
                if lam > LM_MAX_LAMBDA:
                    stop = True
                    break
                continue
            trial = model.with_flat(theta + step)
            r_new = trial.output(X) - t
            new_loss = float(np.mean(r_new * r_new))
            if np.isfinite(new_loss) and new_loss < loss:
                attempts.append((True, lam, new_loss))
                theta, model, r, loss = theta + step, trial, r_new, new_loss
                lam /= factor
                epoch += 1
                break
            attempts.append((False, lam, new_loss))
            lam *= factor
            if lam > LM_MAX_LAMBDA:
                # no further descent available at any damping: a stationary point
                converged = True
                stop = True
                break
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"loss is not finite after {epoch} epochs", epoch=epoch)
    model.converged = converged
    model.epochs = epoch
    model.history = attempts
    return model


def _targets(y):
    y = np.asarray(y)
    if not (np.any(y == POSITIVE) and np.any(y == NEGATIVE)):
        raise DegenerateData("network training needs both classes")
    return (y == POSITIVE).astype(np.float64)


def fit_nn_gd(X, y, hidden_units=10, learning_rate=0.05, max_epochs=2000, seed=0):
    X = np.asarray(X, dtype=np.float64)
    model = init_network([X.shape[1], hidden_units, 1], "sigmoid", seed)
    return train_gd(model, X, _targets(y), learning_rate, max_epochs)


def fit_nn_lm(X, y, hidden_units=10, damping=1e-3, factor=10.0, max_epochs=200, seed=0):
    X = np.asarray(X, dtype=np.float64)
    model = init_network([X.shape[1], hidden_units, 1], "sigmoid", seed)
    return train_lm(model, X, _targets(y), damping, factor, max_epochs)
