"""Compare the compiled kernel backend against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--width 512] [--layers 11]
"""

import argparse
import time

import numpy as np

from fkb.activations import ActivationSpec
from fkb.kernels import pure
from fkb.model_format import DenseSpec, ModelSpec
from fkb.network import Network

try:
    from fkb import _core as compiled
except ImportError:
    compiled = None


def bench(fn, *args, repeat=2000):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat * 1e6  # us/call


def bench_kernels(width):
    rng = np.random.default_rng(0)
    W = rng.normal(size=(width, width))
    b = rng.normal(size=width)
    x = rng.normal(size=width)
    delta = rng.normal(size=width)
    rows = [
        ("affine", (W, b, x)),
        ("affine_grads", (W, x, delta)),
        ("act_apply tanh", (pure.ACT_TANH, 0.0, x)),
        ("act_deriv tanh", (pure.ACT_TANH, 0.0, x)),
        ("softmax", (x,)),
    ]
    print(f"\nkernels at width {width} (us/call):")
    print(f"{'kernel':<16} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, args in rows:
        attr = name.split()[0]
        t_py = bench(getattr(pure, attr), *args)
        if compiled is None:
            print(f"{name:<16} {t_py:>10.2f} {'n/a':>10}")
            continue
        t_cy = bench(getattr(compiled, attr), *args)
        print(f"{name:<16} {t_py:>10.2f} {t_cy:>10.2f} {t_py / t_cy:>7.2f}x")


def bench_predict(width, n_layers):
    import os
    import subprocess
    import sys

    script = f"""
import time
import numpy as np
import fkb
from fkb.activations import ActivationSpec
from fkb.model_format import DenseSpec, ModelSpec
from fkb.network import Network

dims = [94] + [{width}] * ({n_layers} - 1) + [65]
rng = np.random.default_rng(0)
layers = [DenseSpec(weights=rng.normal(0, 0.05, (o, i)), biases=np.zeros(o),
                    activation=ActivationSpec("leakyrelu", 0.3))
          for i, o in zip(dims[:-1], dims[1:])]
net = Network.from_spec(ModelSpec(input_dim=94, layers=layers))
x = rng.normal(size=94)
net.predict(x)
t0 = time.perf_counter()
for _ in range(200):
    net.predict(x)
ms = (time.perf_counter() - t0) / 200 * 1000
print(f"{{fkb.KERNEL_BACKEND}}: {{ms:.3f}} ms/predict")
"""
    print(f"\nfull predict, {n_layers} layers x {width} nodes:", flush=True)
    for env_value in ("", "1"):
        env = dict(os.environ, FKB_PURE_PYTHON=env_value)
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--width", type=int, default=512)
    ap.add_argument("--layers", type=int, default=11)
    args = ap.parse_args()
    bench_kernels(args.width)
    bench_predict(args.width, args.layers)


if __name__ == "__main__":
    main()
