"""Rendering of results: text tables, SVG figures and the JSON bundle."""

from .bundle import ReportBundle, dumps, file_digest, write_text
from .svg import curve_plot, forest_plot
from .tables import contribution_table, fmt, meta_report, row_label, summary_table
