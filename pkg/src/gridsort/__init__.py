"""Local-first image exploration engine.

Scans folder trees for images, extracts compact visual descriptors,
arranges them on a visually sorted column grid, and answers iterative
multi-query similarity searches. Descriptors are quantized and cached on
disk so re-opening a folder skips all pixel work.
"""

__version__ = "0.1.0"
