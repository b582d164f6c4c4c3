#!/usr/bin/env python3
"""Reference sRGB -> CIELAB values from scikit-image for tests/fixtures/lab_oracle.json."""

import json
import random
from pathlib import Path

import numpy as np
from skimage.color import rgb2lab

ROOT = Path(__file__).resolve().parent.parent


def main():
    rng = random.Random(11)
    colors = [(0, 0, 0), (255, 255, 255), (255, 0, 0), (0, 255, 0), (0, 0, 255), (128, 128, 128)]
    colors += [tuple(rng.randrange(256) for _ in range(3)) for _ in range(44)]
    rgb = np.array([colors], dtype=np.float64) / 255.0
    lab = rgb2lab(rgb, illuminant="D65", observer="2")[0]
    out = [
        {"hex": "#%02x%02x%02x" % c, "lab": [round(float(v), 6) for v in row]}
        for c, row in zip(colors, lab)
    ]
    path = ROOT / "tests" / "fixtures" / "lab_oracle.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {len(out)} colors to {path}")


if __name__ == "__main__":
    main()
