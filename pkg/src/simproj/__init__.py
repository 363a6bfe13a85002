"""simproj: interactive similarity-based 2D projection learning."""

__version__ = "0.1.0"
