"""Exact finite geometry over field towers GF(q) <= GF(q^n): linear sets,
cones and their affine extensions, hypercylinders and KM-arcs, and the
Hamming and rank metric codes they define."""

from .galois import GF, Tower, field_make, field_of_order, tower_make
from .pg import GuardError, Subspace, gaussian_binomial, space_size
from .linset import LinearSet, hyperplane_profile, is_h_scattered, predicted_t
from .psets import PointSet, profile, recognize_hypercylinder
from .constructions import (cone, cone_from_params, construction_one, construction_two,
                            hypercylinder, moore_h_scattered)
from .codes_hamming import HammingCode, ProjectiveSystem, hypercylinder_code, weight_distribution
from .codes_rank import RankCode, cone_rank_code, construction_one_rank_code, rank_weight

__version__ = "0.1.0"
