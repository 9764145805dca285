"""Regenerates the bundled .ttp files under src/bittp/data/.

The bundled files are synthetic stand-ins generated by this script: the
header figures (dimension, item count, knapsack capacity, speed range) match
the published benchmark families they are named after, while coordinates and
item values are deterministic pseudo-random data. They exercise the parser
and the variable-count accounting at realistic scale; they are NOT the
published benchmark coordinates. Run from the repository root:

    python tools/make_bundled_instances.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "bittp" / "data"

# name -> (cities, items, capacity, knapsack data type label, rng seed)
FAMILIES = {
    "ch150_n149_bsc": (150, 149, 12310, "bounded strongly corr", 1501),
    "ch150_n149_unc": (150, 149, 6860, "uncorrelated", 1502),
    "ch150_n149_usw": (150, 149, 13608, "uncorrelated, similar weights", 1503),
    "a280_n279_bsc": (280, 279, 25936, "bounded strongly corr", 2801),
    "a280_n279_unc": (280, 279, 12718, "uncorrelated", 2802),
    "a280_n279_usw": (280, 279, 25478, "uncorrelated, similar weights", 2803),
}


def make_items(kind: str, count: int, rng: np.random.Generator):
    if kind == "bounded strongly corr":
        weights = rng.integers(1, 1001, size=count)
        profits = weights + 100
    elif kind == "uncorrelated":
        weights = rng.integers(1, 1001, size=count)
        profits = rng.integers(1, 1001, size=count)
    else:  # uncorrelated, similar weights
        weights = rng.integers(1000, 1011, size=count)
        profits = rng.integers(1, 1001, size=count)
    return profits, weights


def render(name: str) -> str:
    cities, items, capacity, kind, seed = FAMILIES[name]
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 1001, size=cities)
    ys = rng.integers(0, 1001, size=cities)
    profits, weights = make_items(kind, items, rng)
    lines = [
        f"PROBLEM NAME: {name}",
        f"KNAPSACK DATA TYPE: {kind}",
        f"DIMENSION: {cities}",
        f"NUMBER OF ITEMS: {items}",
        f"CAPACITY OF KNAPSACK: {capacity}",
        "MIN SPEED: 0.1",
        "MAX SPEED: 1",
        "RENTING RATIO: 1.00",
        "EDGE_WEIGHT_TYPE: CEIL_2D",
        "NODE_COORD_SECTION\t(INDEX, X, Y):",
    ]
    for i in range(cities):
        lines.append(f"{i + 1} {xs[i]} {ys[i]}")
    lines.append("ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):")
    for i in range(items):
        # one item per city, at cities 2..N in order
        lines.append(f"{i + 1} {profits[i]} {weights[i]} {i + 2}")
    return "\n".join(lines) + "\n"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    for name in FAMILIES:
        path = DATA_DIR / f"{name}.ttp"
        path.write_text(render(name))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
