"""
Test Suite for rockseg
This package contains the unit and end-to-end tests for the pipeline
"""
