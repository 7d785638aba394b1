"""plotkit: figure rendering for curvephase simulation artifacts."""

from .figures import KINDS, FigureError, FigureSpec, render

__version__ = "0.1.0"

__all__ = ["KINDS", "FigureError", "FigureSpec", "render"]
