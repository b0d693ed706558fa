"""Test suite for the GME witness pipeline."""
