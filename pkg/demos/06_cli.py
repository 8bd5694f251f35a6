"""Drive the batch harness the way a CI job would.

Equivalent shell commands::

    complexrisk report --config demos/data/linear.json --format table
    complexrisk axioms --config demos/data/max.json --out report.json

The second run exits with status 1 because statistical convexity fails for
max over two components.
"""
from pathlib import Path

from complexrisk.cli import main

data = Path(__file__).parent / "data"
print("exit status", main(["report", "--config", str(data / "linear.json"), "--format", "table"]))
print()
print("exit status", main(["report", "--config", str(data / "max.json"), "--format", "table"]))
