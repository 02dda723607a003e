"""Interference-limited query algorithms on a dense quantum simulator.

The centrepiece is a Bernstein–Vazirani oracle that copies a chosen subset
of query coordinates into a witness register; tracing the witness out
dephases the query register and removes exactly those coordinates from the
interference readout.
"""

__version__ = "0.1.0"
