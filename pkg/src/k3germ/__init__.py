"""Exact germs of K3 surface automorphisms and their lattice shadows."""
