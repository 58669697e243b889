"""Desk-scale verification toolkit for isospectral lattice constructions.

Submodules:

* :mod:`isospec.finfield`   -- exact arithmetic in F_{p^n}, linearized polynomials
* :mod:`isospec.heisenberg` -- H(F_q), its conjugacy classes, the H_T family, products
* :mod:`isospec.sunada`     -- fingerprints, conjugator search, Schreier graph spectra
* :mod:`isospec.lietype`    -- root subgroups of SL_3 / Sp_4, Chevalley group orders
* :mod:`isospec.cyclofields` -- primitive roots and real cyclotomic fields
* :mod:`isospec.bounds`     -- log-space covolume / counting constants
* :mod:`isospec.cli`        -- command line entry point
"""

from .errors import CapExceeded, IsospecError

__version__ = "0.1.0"

__all__ = ["CapExceeded", "IsospecError", "__version__"]
