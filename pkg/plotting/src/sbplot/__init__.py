"""Figure rendering for spinboson CSV artifacts: pure CSV-to-image, no physics."""

from .figures import SchemaError, load_csv, plot_sweep, plot_trace

__version__ = "0.1.0"
