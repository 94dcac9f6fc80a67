"""signkin: kinematic analysis toolkit for signed-language motion data."""

from . import annotation, entrain, kinemetrics, reduction, skeleton, spotter, stats, synth
from .errors import ToolkitError

__all__ = [
    "annotation",
    "entrain",
    "kinemetrics",
    "reduction",
    "skeleton",
    "spotter",
    "stats",
    "synth",
    "ToolkitError",
]

__version__ = "0.1.0"
