"""Numerical laboratory for linked-twist maps on the torus, plane and sphere."""
