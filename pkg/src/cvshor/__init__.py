"""Classical simulation of continuous-variable period finding."""

__version__ = "0.1.0"
