__version__ = "0.1.0"

from string_threshold.admissibility import (  # noqa: F401
    find_admissible_subgraph,
    is_eps_admissible,
    is_H_admissible,
)
from string_threshold.data_structures import (  # noqa: F401
    AdmissibilityWitness,
    BicliquePair,
    DenseGraph,
    SubdivisionPattern,
    WeightedCompleteGraph,
)
from string_threshold.simplex import minimize_phi  # noqa: F401
from string_threshold.subdivision import (  # noqa: F401
    contains_induced_weak_subdivision,
    partial_subdivisions,
)
from string_threshold.turan import quotient, reduce_weights  # noqa: F401
from string_threshold.verification import verify_prop_quarter  # noqa: F401
