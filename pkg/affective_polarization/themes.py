"""
Centralized style system for reports and CLI output.

All colors used when rendering regime reports, estimation summaries and
error lines live here, so a caller can restyle the toolkit in one place:

1. Use the defaults
2. Override specific styles
3. Build a whole custom theme
"""

from typing import Dict

from rich.theme import Theme


class ReportTheme:
    """
    Style configuration for every rich-rendered table and message.

    Style keys follow rich's ``[style]`` names, e.g. ``outcome.consensus``.
    """

    def __init__(self, **overrides):
        """
        Initialize theme with default styles and optional overrides.

        Args:
            **overrides: Style definitions to override defaults. Underscores
                         in keyword names map to dots
                         (``outcome_consensus='cyan'``).
        """
        self.styles = {
            # Regime outcomes
            'outcome.consensus': 'bold #4ade80',
            'outcome.partisan-polarization': 'bold #f87171',
            'outcome.non-partisan-split': '#fbbf24',
            'outcome.crossover': 'bold #c084fc',
            'outcome.horseshoe': 'bold #fb923c',
            'outcome.alignment': '#38bdf8',
            'outcome.other': '#9ca3af',

            # Pass/fail marks
            'check.pass': 'bold #4ade80',
            'check.fail': 'bold #f87171',
            'check.info': '#9ca3af italic',

            # Tables
            'table.header': 'bold #e2e8f0',
            'table.border': '#666666',
            'table.title': 'bold #5aa3f0',

            # Parties
            'party.blue': '#5aa3f0',
            'party.red': '#f87171',

            # Messages
            'error': '#ff4444 bold',
            'estimate': 'bold',
            'muted': '#888888',
        }
        self.styles.update({k.replace('_', '.'): v for k, v in overrides.items()})

    def get_style_dict(self) -> Dict[str, str]:
        return self.styles.copy()

    def get_rich_theme(self) -> Theme:
        """Get a rich Theme carrying every style of this report theme."""
        return Theme(self.get_style_dict())

    def override(self, **new_styles) -> 'ReportTheme':
        """Create a new theme with some styles overridden."""
        theme = ReportTheme()
        theme.styles = {**self.styles,
                        **{k.replace('_', '.'): v for k, v in new_styles.items()}}
        return theme

    def get_style(self, key: str, default: str = '') -> str:
        return self.styles.get(key, default)

    def outcome_style(self, outcome: str) -> str:
        return self.styles.get(f'outcome.{outcome}', self.styles['outcome.other'])


class PlainTheme(ReportTheme):
    """No colors; for logs captured to files."""

    def __init__(self, **overrides):
        super().__init__()
        self.styles = {key: 'none' for key in self.styles}
        self.styles.update({'table.header': 'bold', 'check.fail': 'bold', 'error': 'bold'})
        self.styles.update({k.replace('_', '.'): v for k, v in overrides.items()})


DEFAULT_THEME = ReportTheme()


def get_default_theme() -> ReportTheme:
    return DEFAULT_THEME


def create_custom_theme(**styles) -> ReportTheme:
    """
    Create a report theme with specific style overrides.

    Example:
        theme = create_custom_theme(outcome_consensus='cyan bold')
    """
    return ReportTheme(**styles)
