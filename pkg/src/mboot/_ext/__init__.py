"""Compiled kernels (optional) and their pure-Python twins."""
