"""Sensor-field simulation, JPEG-domain steganography and sink-side steganalysis."""

__version__ = "0.1.0"
