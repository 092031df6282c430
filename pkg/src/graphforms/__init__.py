"""graphforms - canonical forms, graph complex homology and canonical integrals."""

__version__ = "0.1.0"
