"""Desk-scale simulator for Heisenberg-limited adaptive multi-observable estimation.

Subpackages cover the grid Fourier readout (grids), probing-state models
(probing), the adaptive estimation loop (adaptive), the non-iterative
baseline (baseline), query/qubit accounting (resources), dense block-
encoding anchors (blockenc), and the CSV-emitting CLI (cli).
"""

__version__ = "0.1.0"
