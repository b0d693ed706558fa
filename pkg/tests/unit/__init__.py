"""Unit tests for the witness pipeline components."""
