"""Interior Gaussian source: error against u_FEM as bubble modes per subdomain double, all edge modes kept."""
from common import run

if __name__ == "__main__":
    run(__doc__, "interior_source_bubbles.json", columns=("e0h", "e1h", "e0hr", "e1hr"))
