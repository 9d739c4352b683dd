"""Plane wave at fixed edge modes per edge: error growth with the wavenumber."""
from common import run

if __name__ == "__main__":
    run(__doc__, "wavenumber.json", columns=("e0h", "e1h", "e0", "e1", "e1_fem", "e1_int"))
