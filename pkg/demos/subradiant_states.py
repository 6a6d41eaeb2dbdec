"""Forces on the degenerate subradiant states of a six-emitter chain.

The J = 0 sector of six emitters is five-fold degenerate.  Deep in the
collective regime (separations well below the surface distance) every
subradiant state decouples from the surface-mediated channel and its
attraction is strongly suppressed relative to the ground-state force;
with growing separation the forces fan out toward the band set by the
product-state reference values.

Run:  python demos/subradiant_states.py
"""

import pathlib

import numpy as np

from cpchain import (EmitterParams, Geometry, Medium, coupling_set,
                     subradiant_force_spread)

OUT = pathlib.Path(__file__).parent / "output"


def main():
    gold = Medium.gold()
    emitter = EmitterParams.from_wavelength(700e-9, lifetime=1e-9)
    z0 = 0.1
    seps = np.geomspace(5e-3, 0.5, 10)

    OUT.mkdir(exist_ok=True)
    path = OUT / "subradiant_n6.csv"
    with open(path, "w") as fh:
        fh.write("x0_k0," + ",".join(f"F_state_{i}" for i in range(1, 6))
                 + ",F_g,F_e\n")
        print(f"{'x0*k0':>10} {'min/F_g':>9} {'max/F_g':>9}")
        for x0 in seps:
            geo = Geometry.from_dimensionless(6, float(x0), z0, emitter.k0)
            forces = subradiant_force_spread(6, geo, gold, emitter)
            cs = coupling_set(geo, gold, emitter)
            f_g = -cs.domega_minus_dz.sum()
            f_e = -(-cs.domega_minus_dz + cs.domega_res_dz).sum()
            fh.write(",".join(f"{v:.9g}" for v in
                              (x0, *forces, f_g, f_e)) + "\n")
            print(f"{x0:10.2e} {min(forces) / f_g:9.3f} "
                  f"{max(forces) / f_g:9.3f}")
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
