"""Unit test package for svetlichny."""
