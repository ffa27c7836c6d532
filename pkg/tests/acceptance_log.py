"""Shared store for the per-criterion PASS/FAIL lines."""

LINES: list = []
