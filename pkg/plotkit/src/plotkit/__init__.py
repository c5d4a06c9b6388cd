"""plotkit: profile figures from solver snapshot CSVs."""
from .io import SNAPSHOT_HEADER, Snapshot, SnapshotFormatError, read_snapshot_csv
from .plotting import FIELD_LABELS, PlotSpec, plot

__all__ = ["SNAPSHOT_HEADER", "Snapshot", "SnapshotFormatError",
           "read_snapshot_csv", "FIELD_LABELS", "PlotSpec", "plot"]
__version__ = "1.0.0"
