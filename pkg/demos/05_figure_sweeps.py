"""Reproduce the two benchmark sweeps as CSV data files.

Writes a throughput-vs-k comparison (exhaustive search vs both SDO models)
and a throughput-vs-n family over sub-block budgets, plus gnuplot scripts,
into ./sweep_output/.  Uses the same command surface as the harq-sdo CLI.
"""

import os

from harqsdo.cli import main

OUT = os.path.join(os.path.dirname(__file__), "sweep_output")
os.makedirs(OUT, exist_ok=True)

# throughput vs message size at fixed blocklength, all three methods
rc = main([
    "sweep-k",
    "--k", "16:40:2",
    "--n", "88",
    "--m", "4",
    "--eps", "0.5",
    "--model", "all",
    "--out", os.path.join(OUT, "throughput_vs_k.csv"),
    "--gnuplot",
])
print("sweep-k ->", os.path.join(OUT, "throughput_vs_k.csv"), "rc:", rc)

# throughput vs blocklength for a ladder of sub-block budgets
rc = main([
    "sweep-n",
    "--k", "32",
    "--n", "66:120:2",
    "--m", "1:8",
    "--eps", "0.5",
    "--model", "all",
    "--out", os.path.join(OUT, "throughput_vs_n.csv"),
    "--gnuplot",
])
print("sweep-n ->", os.path.join(OUT, "throughput_vs_n.csv"), "rc:", rc)

with open(os.path.join(OUT, "throughput_vs_n.csv")) as fh:
    lines = fh.read().splitlines()
print(f"\n{lines[0]}")
print("\n".join(lines[1:6]))
print(f"... {len(lines) - 6} more rows")
