"""Model-based robust training toolkit.

Subpackages:
    kernels     -- hot array kernels (compiled core with a numpy fallback)
    diffcore    -- small classifiers with explicit forward/backward passes
    variation   -- nuisance spaces and models of natural variation
    genmodel    -- unpaired translation trainer for learned variation models
    robusttrain -- ERM/PGD baselines and the model-based training algorithms
    datakit     -- dataset ingestion, photometric metrics, domain curation
    harness     -- CLI, experiment orchestration, evaluation, result emission
"""

from mbrt.errors import CapabilityError, ConfigError, FormatError, InputError, NumericalError

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "ConfigError",
    "FormatError",
    "InputError",
    "NumericalError",
    "__version__",
]
