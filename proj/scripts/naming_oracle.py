#!/usr/bin/env python3
"""Reference word -> color blends for out-of-dictionary words.

Re-derives the hashed 3-gram embedding and the reciprocal-distance blend
with numpy in float64 and writes tests/fixtures/blend_oracle.json.
"""

import json
import re
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
DIM = 256

QUERIES = [
    "ocean breeze", "sunset orange glow", "forest moss", "dusty rose pink", "midnight navy",
    "lemon zest", "stormy slate", "cherry blossom", "burnt caramel", "arctic ice",
    "sage leaf", "royal plum", "coral reef", "mustard seed", "charcoal smoke",
    "peach sorbet", "emerald isle", "lavender haze", "copper penny", "denim wash",
]


def fnv1a(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def normalize(word: str) -> str:
    return re.sub(r"\s+", " ", word.strip().lower())


def embed(text: str) -> np.ndarray:
    t = " " + re.sub(r"\s+", " ", text.lower()).strip() + " "
    v = np.zeros(DIM)
    for i in range(len(t) - 2):
        v[fnv1a(t[i : i + 3].encode()) % DIM] += 1
    n = np.linalg.norm(v)
    if n == 0:
        v[0] = 1
        return v
    return v / n


def main():
    words, colors = [], []
    for line in (ROOT / "data" / "xkcd_rgb.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        name, hexcode = line.split("\t")[:2]
        words.append(normalize(name))
        hexcode = hexcode.strip()
        colors.append([int(hexcode[i : i + 2], 16) for i in (1, 3, 5)])
    table = np.stack([embed(w) for w in words])
    colors = np.array(colors, dtype=np.float64)

    out = []
    for q in QUERIES:
        assert normalize(q) not in words, q
        d = np.linalg.norm(table - embed(normalize(q)), axis=1)
        order = sorted(range(len(words)), key=lambda i: (int(np.floor(d[i] * 1e6 + 0.5)), i))[:5]
        w = 1.0 / d[order]
        w /= w.sum()
        rgb = np.clip(np.floor((w[:, None] * colors[order]).sum(axis=0) + 0.5), 0, 255).astype(int)
        out.append({
            "query": q,
            "neighbors": [words[i] for i in order],
            "distances": [round(float(d[i]), 9) for i in order],
            "color": "#%02x%02x%02x" % tuple(rgb),
        })
    path = ROOT / "tests" / "fixtures" / "blend_oracle.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(f"wrote {len(out)} queries to {path}")


if __name__ == "__main__":
    main()
