"""Keeps the tests directory on sys.path so oracles.py imports flat."""
