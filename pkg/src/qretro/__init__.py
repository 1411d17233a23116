"""qretro: a numerical laboratory for the question "what was the quantum past?"

Three formalisms, side by side: textbook propagation with Born-rule
collapse (irreversible), Bohmian trajectories (run backward to a unique
past), and decoherent histories (many pasts consistent with one present).
"""

__version__ = "0.1.0"

from . import bohm, histories, measure, qcore, scenarios  # noqa: F401
