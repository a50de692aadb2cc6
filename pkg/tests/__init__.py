"""Tests package for qpkit."""
