"""Shared helpers for the experiment scripts: load a shipped config, run it, print a table."""
import argparse
import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from helmacms import cli  # noqa: E402

COLUMNS = ("e0h", "e1h", "e0hr", "e1hr", "e0", "e1")


def parser(doc: str, config: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--config", default=str(ROOT / "configs" / config))
    p.add_argument("--out", default=None)
    p.add_argument("--refinements", type=int, default=None, help="override mesh.refinements")
    p.add_argument("--values", type=float, nargs="+", default=None, help="override sweep.values")
    p.add_argument("--threads", type=int, default=None)
    return p


def load(args) -> "cli.ExperimentConfig":
    raw = json.loads(Path(args.config).read_text())
    if args.refinements is not None:
        raw.setdefault("mesh", {})["refinements"] = args.refinements
    if args.values is not None:
        axis = raw.get("sweep", {}).get("axis", "S_Gamma")
        raw["sweep"]["values"] = [v if axis == "kappa" else int(v) for v in args.values]
    if args.threads is not None:
        raw["threads"] = args.threads
    return cli.parse_config(raw)


def _cell(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-"
    return f"{x:.2e}" if isinstance(x, float) else str(x)


def print_table(table, columns=COLUMNS) -> None:
    cols = [c for c in columns if any(not math.isnan(v) for v in table.column(c))]
    head = [table.key] + [h for c in cols for h in (c, "ord")]
    print("  ".join(f"{h:>9}" for h in head))
    orders = {c: table.orders(c) for c in cols}
    for k, p in enumerate(table.params):
        row = [_cell(p)]
        for c in cols:
            o = orders[c][k]
            row += [_cell(table.column(c)[k]), "-" if o is None else f"{o:.2f}"]
        print("  ".join(f"{r:>9}" for r in row))


def run(doc: str, config: str, columns=COLUMNS, order_key=None):
    args = parser(doc, config).parse_args()
    cfg = load(args)
    out = Path(args.out or cfg.out)
    table = cli.run_sweep(cfg, out)
    if order_key is not None:
        table.params = [order_key(r) for r in table.rows]
        table.key = "1/h"
    print_table(table, columns)
    print(f"-> {out}")
    return table
