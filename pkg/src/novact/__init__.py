"""Learning basic robot actions and generating novel ones by exploring a
self-organized 2-D action-memory space."""

__version__ = "0.1.0"
