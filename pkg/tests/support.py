"""Shared test helpers: FD gradient checking oracles and random spec builders."""

import numpy as np

from fkb.activations import ActivationSpec
from fkb.layers import TRAINING
from fkb.model_format import BatchnormSpec, DenseSpec, DropoutSpec, ModelSpec

IDENTITY_FKBX = "FKBX 1\nlayers 1\ninput 2\ndense 2 linear 0\nb 0 0\nW 1 0\nW 0 1\n"


def numeric_gradient(f, x, h=1e-6):
    """Central-difference gradient of scalar f at vector x."""
    x = np.asarray(x, dtype=np.float64)
    g = np.empty_like(x)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def rel_err(a, b, floor=1e-4):
    # The floor makes components below ~1e-4 compare absolutely at 1e-10,
    # the resolution limit of central differences on O(1) losses.
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return np.max(np.abs(a - b) / scale)


def fd_check_network(net, x, y_true, rtol=1e-6, h=1e-6, max_per_array=None,
                     rng=None):
    """Compare every backprop gradient (parameters and input) against central
    finite differences of the bound loss. max_per_array caps the number of
    parameter components probed per array (deterministic sample via rng)."""
    net.set_mode(TRAINING)
    net.zero_grads()
    net.forward(x)
    net.backprop(y_true)
    analytic_params = [g.copy() for _, g in net.param_grad_pairs()]
    analytic_input = net.input_gradient.copy()

    def loss_at(xv):
        return net.loss.loss(y_true, net.forward(xv))

    def probe(vec, i, step):
        old = vec[i]
        vec[i] = old + step
        lp = loss_at(x)
        vec[i] = old - step
        lm = loss_at(x)
        vec[i] = old
        return (lp - lm) / (2.0 * step)

    def check_component(vec, i, analytic_value):
        # retry at neighboring steps when the base step fails: a kink
        # crossing or roundoff artifact moves with h, a wrong gradient stays
        err = rel_err(analytic_value, probe(vec, i, h))
        for step in (3.0 * h, h / 3.0, 10.0 * h):
            if err <= rtol:
                break
            err = min(err, rel_err(analytic_value, probe(vec, i, step)))
        return err

    worst = 0.0
    xbuf = x.astype(np.float64).copy()
    for i in range(len(xbuf)):
        def probe_x(step, i=i):
            old = xbuf[i]
            xbuf[i] = old + step
            lp = net.loss.loss(y_true, net.forward(xbuf))
            xbuf[i] = old - step
            lm = net.loss.loss(y_true, net.forward(xbuf))
            xbuf[i] = old
            return (lp - lm) / (2.0 * step)

        err = rel_err(analytic_input[i], probe_x(h))
        for step in (3.0 * h, h / 3.0, 10.0 * h):
            if err <= rtol:
                break
            err = min(err, rel_err(analytic_input[i], probe_x(step)))
        worst = max(worst, err)

    for (p, _), analytic in zip(net.param_grad_pairs(), analytic_params):
        flat = p.reshape(-1)
        aflat = analytic.reshape(-1)
        indices = np.arange(flat.size)
        if max_per_array is not None and flat.size > max_per_array:
            indices = rng.choice(flat.size, size=max_per_array, replace=False)
        for i in indices:
            worst = max(worst, check_component(flat, i, aflat[i]))
    assert worst <= rtol, f"worst gradient relative error {worst:.3e}"
    return worst


def random_dense(rng, in_dim, out_dim, activation="tanh", alpha=0.0, scale=None):
    if scale is None:
        scale = 1.0 / np.sqrt(in_dim)
    return DenseSpec(weights=rng.normal(0.0, scale, size=(out_dim, in_dim)),
                     biases=rng.normal(0.0, 0.1, size=out_dim),
                     activation=ActivationSpec(activation, alpha))


def random_batchnorm(rng, dim):
    return BatchnormSpec(epsilon=1e-3,
                         gamma=rng.uniform(0.5, 1.5, size=dim),
                         beta=rng.normal(0.0, 0.2, size=dim),
                         moving_mean=rng.normal(0.0, 0.3, size=dim),
                         moving_variance=rng.uniform(0.5, 2.0, size=dim))


def random_spec(rng, max_layers=4, max_dim=5, dropout_ok=True):
    """Small random valid ModelSpec for round-trip and property tests."""
    input_dim = int(rng.integers(1, max_dim + 1))
    n_layers = int(rng.integers(1, max_layers + 1))
    layers = []
    dim = input_dim
    for _ in range(n_layers):
        choices = ["dense", "batchnorm"] + (["dropout"] if dropout_ok else [])
        kind = rng.choice(choices)
        if kind == "dense":
            out = int(rng.integers(1, max_dim + 1))
            act = rng.choice(["linear", "relu", "leakyrelu", "sigmoid", "tanh"])
            alpha = float(rng.uniform(0.0, 0.4)) if act == "leakyrelu" else 0.0
            layers.append(random_dense(rng, dim, out, act, alpha,
                                       scale=rng.uniform(0.1, 2.0)))
            dim = out
        elif kind == "dropout":
            layers.append(DropoutSpec(rate=float(rng.uniform(0.0, 0.99))))
        else:
            layers.append(random_batchnorm(rng, dim))
    return ModelSpec(input_dim=input_dim, layers=layers)
