"""hallalg: exact Hall algebra engine with Hopf structure verification."""

__version__ = "0.1.0"
