"""Viewpoint-keyed steganography for Neural Radiance Fields."""

__version__ = "0.1.0"
