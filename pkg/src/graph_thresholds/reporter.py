"""Report rendering: rich tables for the terminal, pandas for CSV."""

import io
from typing import Any, Dict, List, Optional

import pandas as pd
from rich import box
from rich.console import Console
from rich.table import Table

from .config import settings
from .records import clean_values


def _flatten(payload: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Nested mappings become dotted keys; lists are kept as values."""
    flat: Dict[str, Any] = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict) and value:
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def _is_table(value: Any) -> bool:
    return isinstance(value, list) and bool(value) and all(isinstance(row, dict) for row in value)


class ReportRenderer:
    """Renders tagged reports as text tables or CSV."""

    def __init__(self, width: int = 120):
        self.width = width

    def _console(self, buffer: io.StringIO) -> Console:
        return Console(file=buffer, width=self.width, no_color=True, highlight=False)

    def render_text(self, kind: str, payload: Dict[str, Any], echo: Optional[Dict[str, Any]] = None) -> str:
        """Key/value table of scalars, one table per list of rows, then the config echo."""
        payload = clean_values(payload, settings.significant_digits)
        buffer = io.StringIO()
        console = self._console(buffer)

        summary = Table(title=kind, box=box.SIMPLE, show_header=False)
        summary.add_column("Field", style="cyan")
        summary.add_column("Value", style="white")
        tables: Dict[str, List[dict]] = {}
        for key, value in _flatten(payload).items():
            if _is_table(value):
                tables[key] = value
            else:
                summary.add_row(key, self._format(value))
        console.print(summary)

        for name, rows in tables.items():
            table = Table(title=name, box=box.SIMPLE)
            columns = list(rows[0].keys())
            for column in columns:
                table.add_column(column, justify="right")
            for row in rows:
                table.add_row(*(self._format(row.get(c)) for c in columns))
            console.print(table)

        if echo:
            config = Table(title="config", box=box.SIMPLE, show_header=False)
            config.add_column("Option", style="dim")
            config.add_column("Value", style="dim")
            for key, value in _flatten(clean_values(echo, settings.significant_digits)).items():
                config.add_row(key, self._format(value))
            console.print(config)
        return buffer.getvalue()

    def render_csv(
        self,
        kind: str,
        payload: Dict[str, Any],
        rows: Optional[List[dict]] = None,
        echo: Optional[Dict[str, Any]] = None,
    ) -> str:
        """CSV body under a '#' comment header.

        The header carries the record kind, every scalar and list field of the
        payload and the config echo, one `# key: value` line each. The body is
        the per-row table when the report has one, else a single flattened row.
        Read it back with `pd.read_csv(..., comment="#")`.
        """
        flat = _flatten(clean_values(payload, settings.significant_digits))
        header = [f"# record: {kind}"]
        header += [f"# {k}: {self._format(v)}" for k, v in flat.items() if not _is_table(v)]
        if echo:
            config = _flatten(clean_values(echo, settings.significant_digits), "config.")
            header += [f"# {k}: {self._format(v)}" for k, v in config.items()]
        if rows is None:
            rows = [{k: v for k, v in flat.items() if not isinstance(v, list)}]
        frame = pd.DataFrame(clean_values(rows, settings.significant_digits))
        return "\n".join(header) + "\n" + frame.to_csv(index=False, lineterminator="\n")

    @staticmethod
    def _format(value: Any) -> str:
        if value is None:
            return "-"
        if isinstance(value, list):
            return ", ".join(ReportRenderer._format(v) for v in value)
        return str(value)
