"""Periodic structure with a line defect: relative errors as edge modes double."""
from common import run

if __name__ == "__main__":
    run(__doc__, "crystal.json", columns=("e0hr", "e1hr"))
