"""Separating invariants for Klein four and cyclic group modules over finite fields."""

from .field import FieldElement, FiniteField, make_field, parse_field, primitive_root_of_unity
from .poly import Polynomial, parse_polynomial
from .action import GroupAction, act_point, act_poly, is_invariant, norm, orbit, orbit_sum, \
    transfer_full, transfer_relative
from .reps import ModuleSpec, build, parse_spec, surjection
from .sep import SeparatingSet, find_k, find_l, generic_search, glue, separating_set
from .verify import check_fiber_condition, check_separating, lemma_oracles, power_sum, witness

__version__ = "0.1.0"
