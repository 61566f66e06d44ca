"""Shared pytest configuration; also anchors the tests directory on sys.path."""
