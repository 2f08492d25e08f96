"""Exact toolkit for sum_i prod_{j != i} 1/f(z_j - z_i) = c with n <= 6 points."""

__version__ = "0.1.0"
