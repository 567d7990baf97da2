"""Useful general methods."""
import logging
from typing import Iterable, Tuple

import numpy as np
import pandas as pd

from svetlichny.exceptions import InputError

logger = logging.getLogger(__name__)


def format_number(value) -> str:
    """Render a number with 12 significant digits, independent of locale."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value == 0.0:
        return "0"  # avoids "-0"
    return f"{value:.12g}"


def format_value(value) -> str:
    """Render numbers with format_number, sequences space-separated, anything else as text."""
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(format_value(item) for item in value)
    if isinstance(value, (bool, int, float, np.number, np.bool_)):
        return format_number(value)
    return str(value)


def render_key_values(items: Iterable[Tuple[str, object]]) -> str:
    """Flat ``key = value`` block, one pair per line."""
    return "\n".join(f"{key} = {format_value(value)}" for key, value in items)


def export_table(results: pd.DataFrame, file_path: str):
    """Export results dataframe to path."""
    extension = file_path.split(".")[-1]
    acceptable_file_types = ("csv", "xlsx", "tsv")

    if extension not in acceptable_file_types:
        raise InputError("Results output path must end with 'xlsx', 'csv', or 'tsv'")

    if extension == "xlsx":
        results.to_excel(file_path, index=False)

    elif extension in ("csv", "tsv"):
        separator = "," if extension == "csv" else "\t"
        results.to_csv(file_path, sep=separator, index=False, lineterminator='\n')

    logger.info(f"Results written to {file_path}")
