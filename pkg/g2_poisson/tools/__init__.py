"""Verification suites sharing one run() protocol."""
