"""Localized boundary source at kappa = 16: relative errors as edge modes double."""
from common import run

if __name__ == "__main__":
    run(__doc__, "boundary_source_edges.json", columns=("e0hr", "e1hr", "e0h", "e1h"))
