"""Text-page super-resolution and OCR benchmarking."""

__version__ = "0.1.0"
