#!/usr/bin/env python3
"""Reference palette metrics for tests/fixtures/metrics_oracle.json.

Equal-length matching uses scipy's Hungarian solver; unequal lengths use a
brute force over surjective maps. Entropy comes from scipy.stats.
"""

import itertools
import json
import random
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from scipy.stats import entropy
from skimage.color import rgb2lab

ROOT = Path(__file__).resolve().parent.parent


def lab(colors):
    return rgb2lab(np.array([colors], dtype=np.float64) / 255.0)[0]


def space_points(colors, space):
    return lab(colors) if space == "lab" else np.array(colors, dtype=np.float64)


def min_assignment(d):
    m, n = d.shape
    if m == n:
        r, c = linear_sum_assignment(d)
        return float(d[r, c].mean())
    best = np.inf
    for f in itertools.product(range(n), repeat=m):
        if len(set(f)) == n:
            best = min(best, float(np.mean([d[i, f[i]] for i in range(m)])))
    return best


def chamfer(d):
    return 0.5 * (float(d.min(axis=1).mean()) + float(d.min(axis=0).mean()))


def hexes(colors):
    return ["#%02x%02x%02x" % tuple(c) for c in colors]


def main():
    rng = random.Random(5)

    def palette(n):
        return [tuple(rng.randrange(256) for _ in range(3)) for _ in range(n)]

    pairs = []
    for i in range(150):
        p, q = palette(rng.randint(1, 5)), palette(rng.randint(1, 5))
        entry = {"p": hexes(p), "q": hexes(q)}
        for space in ("lab", "rgb"):
            a, b = space_points(p, space), space_points(q, space)
            if len(a) < len(b):
                a, b = b, a
            d = cdist(a, b)
            entry[f"min_assignment_{space}"] = round(min_assignment(d), 9)
            entry[f"chamfer_{space}"] = round(chamfer(d), 9)
        pairs.append(entry)

    diversity = []
    for i in range(50):
        p = palette(rng.randint(2, 5))
        entry = {"p": hexes(p)}
        for space in ("lab", "rgb"):
            x = space_points(p, space)
            entry[space] = round(float(np.mean([np.linalg.norm(x[i] - x[j]) for i, j in itertools.combinations(range(len(x)), 2)])), 9)
        diversity.append(entry)

    dist = []
    for i in range(50):
        # Draw from a few bins so repeats are common.
        centers = palette(rng.randint(1, 6))
        colors = [rng.choice(centers) for _ in range(rng.randint(1, 30))]
        _, counts = np.unique([tuple(v // 16 for v in c) for c in colors], axis=0, return_counts=True)
        dist.append({"colors": hexes(colors), "entropy": round(float(entropy(counts)), 12)})

    out = {"similarity": pairs, "diversity": diversity, "distribution": dist}
    path = ROOT / "tests" / "fixtures" / "metrics_oracle.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {len(pairs)} pairs, {len(diversity)} palettes, {len(dist)} histograms to {path}")


if __name__ == "__main__":
    main()
