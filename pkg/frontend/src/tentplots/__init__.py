"""Figure renderer for the tent-cocycle laboratory's output files.

Pure consumer: reads the documented sweep CSV and two-column density dumps
and renders vector figures.  Deleting this package changes no number
anywhere in the primary component.
"""

__version__ = "0.1.0"
