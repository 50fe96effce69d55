"""Figure rendering for simulator CSV artifacts (consumes CSV + run.meta only)."""

__version__ = "0.1.0"

from .csvio import InputError, read_meta, read_table  # noqa: F401
from .figures import FIGURE_IDS, build_figure, render  # noqa: F401
