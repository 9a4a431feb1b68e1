#!/usr/bin/env python3
"""
Gallery of the shipped regime suites.

Demonstrates:
- Two-party outcomes as in-group love and out-group hate vary
- Calibrated masking and lockdown trajectories
- Out-group counterfactuals at fixed in-group love
- Five-group horseshoe and alignment regimes
"""

import sys
import os

# Add parent directory to path so we can import affective_polarization
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from rich.console import Console

from affective_polarization.console import configure_logging
from affective_polarization.experiments import SUITES, run_figure_suite
from affective_polarization.themes import get_default_theme


def show_suite(console, suite_id):
    report = run_figure_suite(suite_id)
    report.render(console)
    verdict = "[check.pass]all checks pass[/]" if report.passed else "[check.fail]some checks fail[/]"
    console.print(f"{suite_id}: {verdict}")
    console.print()
    return report.passed


def main():
    configure_logging(0)
    console = Console(theme=get_default_theme().get_rich_theme())
    console.rule("Affective polarization regimes")

    suites = sys.argv[1:] or sorted(SUITES)
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        console.print(f"[error]unknown suite(s): {', '.join(unknown)}[/]")
        console.print(f"available: {', '.join(sorted(SUITES))}")
        return 2

    results = {suite_id: show_suite(console, suite_id) for suite_id in suites}
    failed = [s for s, ok in results.items() if not ok]
    console.rule(f"{len(results) - len(failed)} of {len(results)} suite(s) pass")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
