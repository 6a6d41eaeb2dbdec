"""Force and decay maps over separation and surface distance.

Evaluates the two-emitter force map on a coarse logarithmic grid;
the CSV columns match the `cpchain map` command output, so the same
file feeds the plotting frontend.  Expect a few seconds per grid row.

Run:  python demos/force_map.py
"""

import pathlib

import numpy as np

from cpchain import EmitterParams, Medium, force_map

OUT = pathlib.Path(__file__).parent / "output"


def main():
    gold = Medium.gold()
    emitter = EmitterParams.from_wavelength(700e-9, lifetime=1e-9)
    x_grid = np.geomspace(1e-3, 5.0, 12)
    z_grid = np.geomspace(5e-3, 0.3, 8)

    fmap = force_map(x_grid, z_grid, gold, emitter)

    OUT.mkdir(exist_ok=True)
    path = OUT / "force_map.csv"
    with open(path, "w") as fh:
        fh.write(",".join(fmap.CSV_COLUMNS) + "\n")
        for row in fmap.rows():
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")

    # the enhancement ratio decays from 2 toward 1 along each row
    j = 0  # closest surface distance
    print(f"{'x0*k0':>10} {'F_sup/F_inf at z0*k0=' + str(z_grid[j]):>24}")
    for i, x0 in enumerate(x_grid):
        print(f"{x0:10.2e} {fmap.f_sup[i, j] / fmap.f_inf[i, j]:24.4f}")
    if fmap.failures:
        print("failed points:", fmap.failures)
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
