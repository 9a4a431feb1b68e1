#!/usr/bin/env python3
"""
Synthesize a stance panel with known parameters and fit it back.

Runs a small version of the recovery check so it finishes in seconds;
pass ``--full`` for the 2,000-node, 10-seed setting.
"""

import sys
import os

# Add parent directory to path so we can import affective_polarization
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from rich.console import Console
from rich.table import Table

from affective_polarization import ModelParams
from affective_polarization.console import configure_logging
from affective_polarization.experiments import run_roundtrip
from affective_polarization.themes import get_default_theme

TRUTH = ModelParams(3.75, 0.25, 0.63)


def main():
    full = "--full" in sys.argv[1:]
    configure_logging(1)
    theme = get_default_theme()
    console = Console(theme=theme.get_rich_theme())

    n, seeds = (2000, 10) if full else (500, 3)
    with console.status(f"fitting {seeds} synthetic panel(s) of {n} nodes"):
        report = run_roundtrip(TRUTH, n=n, r=0.3, theta0=(0.9, 0.9), intervals=20, n_seeds=seeds, n_jobs=-1)

    table = Table(title="Panel round trip", title_style=theme.get_style("table.title"),
                  header_style=theme.get_style("table.header"), border_style=theme.get_style("table.border"))
    table.add_column("seed", justify="right")
    for name in ("alpha", "beta", "delta"):
        table.add_column(name, justify="right")
    table.add_column("", justify="center")
    for record in report.records:
        cells = [f"{est:.3f} ± {se:.3f}" for est, se in zip(record.result.estimates, record.result.std_errors)]
        mark = "[check.pass]pass[/]" if record.passed else "[check.fail]FAIL[/]"
        table.add_row(str(record.seed), *cells, mark)
    table.caption = f"truth: alpha={TRUTH.alpha}, beta={TRUTH.beta}, delta={TRUTH.delta}"
    console.print(table)
    console.print(f"{report.pass_count} of {len(report.records)} seed(s) within {report.n_se:g} SE")


if __name__ == "__main__":
    main()
