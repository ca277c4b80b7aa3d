"""
fpure-cli - A command-line toolkit for F-purity and F-pure threshold invariants.

This package computes Fedder colons, the Theta_e invariants, Loewy lengths of
splitting ideals, divided-power differential operators and certified rational
bounds on fpt, dfpt and mfpt for quotients of polynomial rings over prime fields.
"""

# Define package version
__version__ = "1.0.0"
