"""Periodic surface-electrode rf trap lattice design.

Thin wrapper around the compiled ``_trapforge`` extension: Bravais
lattice and patch-grid geometry, Fourier field evaluation, the linear
program over patch amplitudes, and pseudopotential analysis
(curvatures, depths, spurious traps, physical units).
"""

from ._trapforge import *  # noqa: F401,F403
from ._trapforge import __doc__ as _core_doc  # noqa: F401
