"""Employment effects of statutory working-hours reductions.

Subpackages and modules:

``ledger``
    Study records, CSV ingestion and filtering.
``meta``
    Sample-size weighted meta-analysis with sampling-error correction.
``labor``
    Monopsony, competitive and collective-bargaining models under hours caps.
``policy``
    Cost-per-job, growth decomposition and FTE arithmetic.
``report`` and ``cli``
    Text tables, SVG figures, JSON reports and the command line.
"""

__version__ = "0.1.0"
