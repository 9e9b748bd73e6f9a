"""Shared configuration generators for the test-suite."""
import numpy as np

from szilard import DemonSpec, EngineConfig


def random_suite(count=200, seed=20261014):
    """Randomised engines: N <= 4, both statistics, T1 log-uniform on [0.01, 100], T2 in [0, T1).

    About a fifth use a zero-temperature sink with an error-free demon; the
    rest use demons whose error mass (1 - p0[0]) is up to 0.4.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        stats = "bose" if rng.random() < 0.5 else "fermi"
        t1 = float(10.0 ** rng.uniform(-2.0, 2.0))
        l = float(rng.uniform(0.05, 0.95))
        deltas = tuple([0.0] + sorted(float(x) for x in rng.uniform(0.1, 3.0, size=n)))
        if rng.random() < 0.2:
            demon = DemonSpec(deltas, (1.0,) + (0.0,) * n)
            t2 = 0.0
        else:
            err = float(rng.uniform(0.0, 0.4))
            rest = rng.dirichlet(np.ones(n)) * err
            pops = np.concatenate([[1.0 - err], rest])
            pops = pops / pops.sum()
            pops[0] = 1.0 - pops[1:].sum()
            demon = DemonSpec(deltas, tuple(float(p) for p in pops))
            t2 = float(rng.uniform(0.0, t1))
        out.append(EngineConfig(n, stats, t1, t2, l, demon))
    return out


def first_law_scale(report):
    return 1e-9 * max(1.0, abs(report.q1))
