"""CSV reports and console summary tables"""

import csv
import os

import click


def format_value(value):
    """Floats with 17 significant digits so reports are bit-reproducible."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ''
    return str(value)


def write_csv(path, header, rows):
    """
    Write a report file, creating the output directory if needed.

    Args:
        path (str): Destination file
        header (list): Column names
        rows (iterable): Row sequences matching the header

    Returns:
        str: path written
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def _short(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return format_value(value)


def echo_table(header, rows, title=None):
    """Print an aligned summary table."""
    cells = [[str(h) for h in header]] + [[_short(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    if title:
        click.echo(title)
    for index, row in enumerate(cells):
        click.echo("  ".join(cell.rjust(width) for cell, width in zip(row, widths)))
        if index == 0:
            click.echo("  ".join("-" * width for width in widths))
