"""Plane wave, kappa = 1: interface error against u_FEM as edge modes double.

Expect roughly a factor 4 per doubling in e1h and 8 in e0h before saturation.
"""
from common import run

if __name__ == "__main__":
    run(__doc__, "plane_wave_edges.json")
