"""Cyclotomic Gaudin hierarchies: Lax matrices on coadjoint orbits,
residue-defined Hamiltonians, multi-time flows, and a Lagrangian one-form,
with numerical certification suites for the periodic Toda chain, the DST
model, and their coupling."""

__version__ = "0.1.0"
