"""Finite preordered spaces with rings attached, made executable.

Build finite spaces as preorders, attach finite commutative rings with
restriction maps, put module sheaves on top, and decide: quasi-coherence,
section/transport computations, beat-point cores, minimality, and homotopy
equivalence via core isomorphism.
"""

from ._kernels import BACKEND as kernel_backend
from .cover import (CoverSpec, cover_functoriality, cover_quotient,
                    pi_preimage_has_min)
from .errors import (AxiomError, InvalidParameter, MismatchedSpaces,
                     NonCommutingDiagram, NotABeatPoint, NotAHom, NotOpen,
                     NotOpenCoverMember, NotT0, NotThinner, ParseError,
                     PreconditionViolated, RingedCoreError, SearchCapExceeded,
                     UnknownPoint, UnknownSheaf)
from .finalg import (BaseChange, FiniteModule, FiniteRing, ModuleDiagram,
                     ModuleHom, ModulePresentation, RingDiagram, RingHom,
                     base_change, check_hom, check_module_hom,
                     find_module_homs, find_module_isos, find_ring_homs,
                     find_ring_isos, induced_hom, is_ring_iso,
                     limit_of_diagram, limit_of_ring_diagram,
                     module_from_presentation, module_from_ring,
                     module_from_tables, module_product, module_zero,
                     ring_from_tables, ring_product, ring_zmod)
from .finposet import (FinPoset, MonotoneMap, check_monotone, closure,
                       enumerate_monotone_maps, is_open, is_t0,
                       poset_isomorphisms, t0_quotient, up_set)
from .homotopy import (CoreReport, Fence, HeqResult, are_homotopic, core,
                       enumerate_morphisms, find_beat_points,
                       homotopy_equivalent, is_minimal, minimal_rigidity_check,
                       morphism_equal_check, morphism_leq, remove_beat_point,
                       space_isomorphisms, verify_sdr)
from .rspace import (Adjunction, ModuleSheaf, RingedSpace, SheafHom,
                     SpaceMorphism, check_morphism, constant_space,
                     global_sections_ring, induced_subspace,
                     is_locally_constant, is_quasi_coherent, punctual,
                     punctual_morphism, pullback, pushforward,
                     sections_module, sheaves_isomorphic, structure_sheaf,
                     tilde, unit_counit, validate_sheaf, validate_sheaf_hom,
                     validate_space)

__version__ = "0.1.0"
