"""Kernel backend selection.

The compiled kernels (``_ckernels``, built from Cython) are preferred when
importable; the pure-Python twins are the fallback.  Set RINGEDCORE_PURE=1
to force the fallback, e.g. for benchmarking one against the other.
"""

import os

if os.environ.get("RINGEDCORE_PURE"):
    from . import _pykernels as impl
else:
    try:
        from . import _ckernels as impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pykernels as impl

BACKEND = impl.BACKEND

encode_tuple = impl.encode_tuple
decode_tuple = impl.decode_tuple
transitive_closure = impl.transitive_closure
ring_axiom_violation = impl.ring_axiom_violation
module_axiom_violation = impl.module_axiom_violation
hom_violation = impl.hom_violation
enumerate_monotone = impl.enumerate_monotone
subgroup_span = impl.subgroup_span
coset_partition = impl.coset_partition
kernel_rows = impl.kernel_rows
matching_tuples = impl.matching_tuples
