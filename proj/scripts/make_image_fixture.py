#!/usr/bin/env python3
"""Writes tests/fixtures/stripes.png: five vertical color bands of unequal width."""

from pathlib import Path

from PIL import Image

ROOT = Path(__file__).resolve().parent.parent
BANDS = [("#1f3a93", 30), ("#e74c3c", 25), ("#f1c40f", 20), ("#2ecc71", 15), ("#ffffff", 10)]


def main():
    img = Image.new("RGB", (100, 20))
    x = 0
    for hexcode, width in BANDS:
        rgb = tuple(int(hexcode[i : i + 2], 16) for i in (1, 3, 5))
        for dx in range(width):
            for y in range(20):
                img.putpixel((x + dx, y), rgb)
        x += width
    img.save(ROOT / "tests" / "fixtures" / "stripes.png")
    img.convert("RGBA").save(ROOT / "tests" / "fixtures" / "stripes_rgba.png")


if __name__ == "__main__":
    main()
