"""Pipelines routing CLI requests to suites and services."""
