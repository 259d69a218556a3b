"""Backend selection for the hot kernels.

The compiled extension is used when available; setting GROWLAB_PURE_PYTHON=1
forces the numpy fallback.  Both backends expose the same callables.
"""

import os

if os.environ.get("GROWLAB_PURE_PYTHON"):
    from . import _pyfallback as _impl
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        from . import _pyfallback as _impl

BACKEND = _impl.BACKEND
evolve_csr = _impl.evolve_csr
StepSampler = _impl.StepSampler
pair_tridiag_scan = _impl.pair_tridiag_scan
gray_subset_min_ratio = _impl.gray_subset_min_ratio
