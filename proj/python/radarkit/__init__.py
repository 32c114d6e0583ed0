"""Software re-creation of a STEMlab + 24 GHz FMCW radar teaching kit.

The compiled extension carries the radar-channel simulator, the SCPI
instrument emulator and the chirp-characterization / range-Doppler
processing chains.
"""

from ._radarkit import *  # noqa: F401,F403
from ._radarkit import __version__  # noqa: F401
