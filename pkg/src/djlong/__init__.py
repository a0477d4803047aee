"""Angular profiles of homogeneous steady stratified flows in the plane."""

__version__ = "0.1.0"
