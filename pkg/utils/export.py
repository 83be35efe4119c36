"""Table and record exporters for command-line output."""

import json
from typing import Any

import pandas as pd

CELL_WIDTH = 50


def _cell(value: Any) -> str:
    if pd.api.types.is_scalar(value) and pd.isna(value):
        return ""
    text = str(value).replace("|", "\\|").replace("\n", " ")
    return text[:CELL_WIDTH] + "..." if len(text) > CELL_WIDTH else text


class DataExporter:
    """Formats result rows for stdout: markdown tables, JSON, JSONL."""

    @staticmethod
    def to_jsonl(data: list[dict]) -> str:
        """
        One JSON object per line, keys sorted.

        Args:
            data: List of dictionaries representing rows

        Returns:
            JSONL string (empty when there are no rows)
        """
        return "".join(json.dumps(row, sort_keys=True, default=str) + "\n" for row in data)

    @staticmethod
    def to_json(data: Any, indent: int = 2) -> str:
        return json.dumps(data, indent=indent, sort_keys=True, default=str)

    @staticmethod
    def frame_to_markdown(frame: pd.DataFrame, max_rows: int = 100) -> str:
        """
        Render a DataFrame as a Markdown table.

        Cells are cut to ``CELL_WIDTH`` characters, pipes are escaped and
        missing values are left blank, so PDDL snippets and plan text stay
        on one table row.

        Args:
            frame: Table to render; column labels become the header
            max_rows: Maximum rows to include; a footnote reports the rest

        Returns:
            Markdown table string, or ``No data`` for an empty frame
        """
        if frame.empty:
            return "No data"
        shown = frame.head(max_rows)
        header = "| " + " | ".join(_cell(label) for label in shown.columns) + " |"
        separator = "|" + " --- |" * len(shown.columns)
        columns = [column.map(_cell).tolist() for _, column in shown.items()]
        lines = [header, separator] + ["| " + " | ".join(cells) + " |" for cells in zip(*columns)]
        result = "\n".join(lines)
        if len(frame) > max_rows:
            result += f"\n\n*Showing {max_rows} of {len(frame)} rows*"
        return result

    @staticmethod
    def to_markdown_table(data: list[dict], max_rows: int = 100) -> str:
        """Rows as a Markdown table; columns are the union of keys in first-seen order."""
        return DataExporter.frame_to_markdown(pd.DataFrame.from_records(data), max_rows)
