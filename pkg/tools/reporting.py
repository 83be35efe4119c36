"""Summary tables and optional HTML figures for datasets and validation runs."""

import logging
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import pandas as pd
import plotly.graph_objects as go
import plotly.express as px

from dataset.tokens import TokenCounter, WhitespaceCounter, tuple_lengths
from dataset.tuples import DatasetTuple
from tools.curriculum import CurriculumItem
from tools.validator import Outcome, percentage
from utils.fileio import atomic_write_text

logger = logging.getLogger(__name__)

LAYOUT = dict(
    template="plotly_white",
    title_font_size=16,
    legend_title_font_size=12,
    margin=dict(l=50, r=50, t=60, b=50),
)


def valid_plan_rate_table(rows: Iterable[dict[str, Any]]) -> pd.DataFrame:
    """
    Per-domain valid plan rate.

    Args:
        rows: Mappings with ``domain`` and ``outcome`` (an Outcome or its value)

    Returns:
        DataFrame with columns domain, plans, valid, valid_plan_rate (percent,
        one decimal) and a final ``all`` row
    """
    frame = pd.DataFrame(list(rows), columns=["domain", "outcome"])
    columns = ["domain", "plans", "valid", "valid_plan_rate"]
    if frame.empty:
        return pd.DataFrame(columns=columns)

    frame["valid"] = frame["outcome"].map(lambda o: Outcome(o) is Outcome.VALID)
    table = (
        frame.groupby("domain", sort=True)
        .agg(plans=("valid", "size"), valid=("valid", "sum"))
        .reset_index()
    )
    total = pd.DataFrame(
        [{"domain": "all", "plans": int(table["plans"].sum()), "valid": int(table["valid"].sum())}]
    )
    table = pd.concat([table, total], ignore_index=True)
    table["valid"] = table["valid"].astype(int)
    table["valid_plan_rate"] = [
        percentage(int(valid), int(plans)) for valid, plans in zip(table["valid"], table["plans"])
    ]
    return table[columns]


def token_length_figure(
    tuples: Sequence[DatasetTuple],
    limit: int,
    counter: Optional[TokenCounter] = None,
) -> go.Figure:
    """Histogram of tuple token counts per domain with the limit drawn as a vertical line."""
    counter = counter or WhitespaceCounter()
    frame = tuple_lengths(tuples, counter)
    fig = px.histogram(
        frame,
        x="tokens",
        color="domain",
        barmode="overlay",
        title=f"Tuple length ({counter.counter_id} tokens)",
    )
    fig.add_vline(x=limit, line_dash="dash", annotation_text=f"limit {limit}")
    fig.update_layout(**LAYOUT)
    return fig


def curriculum_figure(items: Sequence[CurriculumItem]) -> go.Figure:
    """Anonymisation probability p(i) with the Bernoulli draws overlaid as markers."""
    frame = pd.DataFrame(
        {
            "index": [item.index for item in items],
            "probability": [float(item.probability) for item in items],
            "anonymized": [1.0 if item.anonymize else 0.0 for item in items],
        }
    )
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=frame["index"], y=frame["probability"], mode="lines", name="p(i)"))
    fig.add_trace(
        go.Scatter(
            x=frame["index"],
            y=frame["anonymized"],
            mode="markers",
            marker=dict(size=3, opacity=0.4),
            name="anonymized",
        )
    )
    fig.update_layout(title="Curriculum schedule", xaxis_title="position", yaxis_title="probability", **LAYOUT)
    return fig


def valid_plan_rate_figure(table: pd.DataFrame) -> go.Figure:
    per_domain = table[table["domain"] != "all"]
    fig = px.bar(per_domain, x="domain", y="valid_plan_rate", title="Valid plan rate by domain")
    fig.update_layout(yaxis_range=[0, 100], **LAYOUT)
    return fig


def write_html_report(figures: Sequence[go.Figure], path: Union[str, Path], title: str = "plangen report") -> None:
    """Write all figures into one self-contained HTML page (plotly.js from CDN)."""
    parts = [fig.to_html(include_plotlyjs="cdn" if i == 0 else False, full_html=False) for i, fig in enumerate(figures)]
    html = (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        f"<title>{title}</title></head><body>\n"
        + "\n".join(parts)
        + "\n</body></html>\n"
    )
    atomic_write_text(path, html)
    logger.info("Wrote report with %d figures to %s", len(figures), path)
