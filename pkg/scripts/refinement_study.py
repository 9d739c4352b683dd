"""Plane wave under mesh refinement at fixed edge modes: FEM and interpolation errors keep converging,
while the ACMS-vs-FEM gap settles to the interface truncation error."""
from common import run

if __name__ == "__main__":
    run(__doc__, "refinement.json", columns=("e0_fem", "e1_fem", "e0_int", "e1_int", "e0h", "e1h"),
        order_key=lambda r: 1.0 / r.h)
