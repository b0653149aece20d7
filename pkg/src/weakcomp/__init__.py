"""Weakly compressible monoids: compression, word problems and grammar constructions."""
