#!/usr/bin/env python3
"""Writes the synthetic benchmark fixtures under tests/fixtures/.

Expected metric constants are computed here with numpy/scikit-image so the
C++ implementation is checked against an independent calculation.
"""

import itertools
import json
import random
from pathlib import Path

import numpy as np
from skimage.color import rgb2lab

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures"

FIXED_COLOR = "#123456"
FIXED_PALETTE = ["#202020", "#505050", "#808080", "#b0b0b0", "#e0e0e0"]

THEMES = [
    ("Summer Sale", "sale", ["summer", "beach", "discount"], "Up to 50% off"),
    ("Coffee Morning", "food", ["coffee", "breakfast", "cafe"], "Fresh brew daily"),
    ("Forest Retreat", "travel", ["forest", "nature", "cabin"], "Escape the city"),
    ("Winter Gala", "event", ["winter", "party", "snow"], "Join us on Friday"),
    ("Yoga Class", "fitness", ["yoga", "health", "calm"], "Breathe and stretch"),
    ("Tech Meetup", "event", ["technology", "startup", "network"], "Talks and demos"),
    ("Spring Flowers", "garden", ["spring", "flowers", "bloom"], "New season arrivals"),
    ("Ocean Cleanup", "charity", ["ocean", "volunteer", "beach"], "Help us this weekend"),
    ("Book Fair", "education", ["books", "reading", "library"], "Meet the authors"),
    ("Pizza Night", "food", ["pizza", "dinner", "family"], "Two for one"),
    ("Autumn Harvest", "market", ["autumn", "pumpkin", "farm"], "Local produce"),
    ("Jazz Evening", "music", ["jazz", "concert", "night"], "Live quartet"),
    ("Kids Camp", "education", ["kids", "camp", "summer"], "Sign up today"),
    ("Wedding Invite", "wedding", ["wedding", "love", "celebration"], "Save the date"),
    ("Fitness Challenge", "fitness", ["gym", "running", "challenge"], "30 days to go"),
    ("Art Exhibition", "art", ["gallery", "painting", "modern"], "Opening night"),
    ("Holiday Deals", "sale", ["holiday", "gifts", "winter"], "Limited time"),
    ("Garden Party", "event", ["garden", "party", "summer"], "Drinks at six"),
    ("Space Expo", "science", ["space", "planets", "stars"], "Explore the universe"),
    ("Fresh Market", "market", ["vegetables", "organic", "fresh"], "Every Sunday"),
]

TRAIN_IDS = [f"doc-{i:02d}" for i in range(8)]
VALIDATION_IDS = [f"doc-{i:02d}" for i in range(8, 10)]
TEST_IDS = [f"doc-{i:02d}" for i in range(10, 20)]
IN_BIN_TEST = {"doc-11", "doc-15", "doc-18"}


def hex_of(rgb):
    return "#%02x%02x%02x" % tuple(int(v) for v in rgb)


def rgb_of(hexcode):
    return tuple(int(hexcode[i : i + 2], 16) for i in (1, 3, 5))


def lab(hexcode):
    return rgb2lab(np.array([[rgb_of(hexcode)]], dtype=np.float64) / 255.0)[0, 0]


def delta_e(x, y):
    return float(np.linalg.norm(lab(x) - lab(y)))


def fixed_bin(hexcode):
    return tuple(v // 16 for v in rgb_of(hexcode)) == tuple(v // 16 for v in rgb_of(FIXED_COLOR))


def random_palette(rng, n):
    """n colors outside the fixed color's bin, pairwise delta E >= 10."""
    colors = []
    while len(colors) < n:
        c = hex_of([rng.randrange(256) for _ in range(3)])
        if fixed_bin(c) or any(delta_e(c, o) < 10 for o in colors):
            continue
        colors.append(c)
    return colors


def in_bin_color(rng):
    return hex_of([16 + rng.randrange(16), 48 + rng.randrange(16), 80 + rng.randrange(16)])


def element(eid, etype, frame, palette, text=None, opacity=1.0):
    e = {
        "id": eid,
        "type": etype,
        "layout": dict(zip(("x", "y", "width", "height"), frame)),
        "opacity": opacity,
    }
    if text is not None:
        e["text"] = text
    e["palette"] = palette
    return e


def make_document(rng, index, doc_id):
    title, category, keywords, text = THEMES[index]
    width, height = (1.0, 0.75) if index % 2 == 0 else (0.8, 1.0)
    if doc_id in IN_BIN_TEST:
        # Every color sits in the fixed color's bin, one color per element.
        elements = [
            element("bg", "colored_background", (0.0, 0.0, width, height), [in_bin_color(rng)]),
            element("shape", "svg", (0.1, 0.1, 0.3, 0.3), [in_bin_color(rng)]),
            element("headline", "text", (0.1, 0.5, 0.6, 0.1), [in_bin_color(rng)], text=title),
            element("photo", "raster", (0.5, 0.1, 0.3, 0.3), [in_bin_color(rng)], opacity=0.9),
        ]
    else:
        elements = [
            element("bg", "colored_background", (0.0, 0.0, width, height), random_palette(rng, 1)),
            element("photo", "raster", (0.05, 0.05, 0.5, 0.4), random_palette(rng, rng.randint(3, 5))),
            element("logo", "svg", (0.6, 0.05, 0.2, 0.2), random_palette(rng, rng.randint(1, 3)), opacity=0.8),
            element("headline", "text", (0.1, 0.55, 0.7, 0.12), random_palette(rng, 1), text=title),
            element("subline", "text", (0.1, 0.7, 0.6, 0.08), random_palette(rng, 1), text=text),
        ]
    return {
        "id": doc_id,
        "title": title,
        "category": category,
        "keywords": keywords,
        "layout": {"width": width, "height": height},
        "elements": elements,
    }


PAT_TEXTS = [
    ("pat-01", "green grass field", "train"),
    ("pat-02", "calm ocean at dawn", "train"),
    ("pat-03", "autumn forest leaves", "train"),
    ("pat-04", "neon city night", "train"),
    ("pat-05", "desert sunset dunes", "train"),
    ("pat-06", "fresh spring meadow", "test"),
    ("pat-07", "deep sea blue", "test"),
    ("pat-08", "warm fireplace glow", "test"),
    ("pat-09", "pastel candy shop", "test"),
    ("pat-10", "stormy grey sky", "test"),
]


def min_assignment(p, q):
    return min(sum(delta_e(a, b) for a, b in zip(p, perm)) / len(p) for perm in itertools.permutations(q))


def diversity(p):
    pairs = list(itertools.combinations(p, 2))
    return sum(delta_e(a, b) for a, b in pairs) / len(pairs)


def mean_std(values):
    arr = np.array(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def main():
    rng = random.Random(20240806)
    OUT.mkdir(parents=True, exist_ok=True)

    ids = TRAIN_IDS + VALIDATION_IDS + TEST_IDS
    docs = [make_document(rng, i, doc_id) for i, doc_id in enumerate(ids)]
    with open(OUT / "corpus.jsonl", "w") as f:
        for d in docs:
            f.write(json.dumps(d) + "\n")
    with open(OUT / "split.json", "w") as f:
        json.dump({"train": TRAIN_IDS, "validation": VALIDATION_IDS, "test": TEST_IDS}, f, indent=2)
        f.write("\n")

    # Fixed-color mock: a case is correct iff its document lies in the bin,
    # whichever slots get masked.
    test_docs = [d for d in docs if d["id"] in TEST_IDS]
    filled = {d["id"]: sum(len(e["palette"]) for e in d["elements"]) for d in test_docs}
    accuracy = {}
    for k in (1, 2, 3):
        eligible = [d["id"] for d in test_docs if filled[d["id"]] >= k]
        hits = [i for i in eligible if i in IN_BIN_TEST]
        accuracy[str(k)] = round(100.0 * len(hits) / len(eligible), 2)
    for d in test_docs:
        colors = [c for e in d["elements"] for c in e["palette"]]
        assert all(fixed_bin(c) for c in colors) == (d["id"] in IN_BIN_TEST)
        assert any(fixed_bin(c) for c in colors) == (d["id"] in IN_BIN_TEST)

    pairs = []
    for pid, text, split in PAT_TEXTS:
        pairs.append({"id": pid, "text": text, "palette": random_palette(rng, 5), "split": split})
    with open(OUT / "pat.csv", "w") as f:
        f.write("id,text,palette,split\n")
        for p in pairs:
            f.write(f'{p["id"]},{p["text"]},{" ".join(p["palette"])},{p["split"]}\n')

    test_pairs = [p for p in pairs if p["split"] == "test"]
    sim = [min_assignment(FIXED_PALETTE, p["palette"]) for p in test_pairs]
    gt_div = [diversity(p["palette"]) for p in test_pairs]
    sim_mean, sim_std = mean_std(sim)
    gt_mean, gt_std = mean_std(gt_div)

    red = lab("#ff0000")
    expected = {
        "completion": {
            "documents": len(docs),
            "test_documents": len(test_docs),
            "in_bin_documents": sorted(IN_BIN_TEST),
            "fixed_color": FIXED_COLOR,
            "fixed_accuracy": accuracy,
        },
        "generation": {
            "pairs": len(pairs),
            "test_pairs": len(test_pairs),
            "fixed_palette": FIXED_PALETTE,
            "fixed_similarity_mean": round(sim_mean, 2),
            "fixed_similarity_std": round(sim_std, 2),
            "fixed_diversity_mean": round(diversity(FIXED_PALETTE), 2),
            "gt_diversity_mean": round(gt_mean, 2),
            "gt_diversity_std": round(gt_std, 2),
        },
        "lab": {"#ff0000": [round(float(v), 2) for v in red]},
    }
    with open(OUT / "expected.json", "w") as f:
        json.dump(expected, f, indent=2)
        f.write("\n")
    print(json.dumps(expected, indent=2))


if __name__ == "__main__":
    main()
