"""Scale, tidy subgroups, flat factoring and relative completions on exact models."""
from .errors import (ConfigInvalid, KComputationFailed, KNotStable, NoStabilization, NonIntegralExponent,
                     NotFlat, NotHomomorphism, OracleDisagreement, OrbitNotSaturated, PrecisionExhausted,
                     SupportOverflow, TdlcError, WindowTooSmall)
from .fields import LaurentField, PAdicField, RatFunc, make_field, newton_slopes, scale_from_charpoly
from .index import Displacement, IndexValue
from .lattice import Lattice, LatticeModel, LinearAuto, meet, join, rel_index
from .scale import (FlatFactoring, PlusMinus, PropertyReport, TidyCertificate, flat_factor, is_minimizing,
                    is_tidy_above, plus_minus_parts, scale_report, tidy)
from .shift import AnnihilatorCode, ShiftModel, Window, counterexample_suite, tail_detect
from .tree import SegmentStabilizer, TreeModel, Vertex, classify, stab_index

__version__ = "0.1.0"

__all__ = [
    "AnnihilatorCode", "ConfigInvalid", "Displacement", "FlatFactoring", "IndexValue", "KComputationFailed",
    "KNotStable", "LaurentField", "Lattice", "LatticeModel", "LinearAuto", "NoStabilization",
    "NonIntegralExponent", "NotFlat", "NotHomomorphism", "OracleDisagreement", "OrbitNotSaturated", "PAdicField",
    "PlusMinus", "PrecisionExhausted", "PropertyReport", "RatFunc", "SegmentStabilizer", "ShiftModel",
    "SupportOverflow", "TdlcError", "TidyCertificate", "TreeModel", "Vertex", "Window", "WindowTooSmall",
    "classify", "counterexample_suite", "flat_factor", "is_minimizing", "is_tidy_above", "join", "make_field",
    "meet", "newton_slopes", "plus_minus_parts", "rel_index", "scale_from_charpoly", "scale_report",
    "stab_index", "tail_detect", "tidy",
]
