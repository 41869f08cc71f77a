"""HTTP service wrapping the analysis package."""
