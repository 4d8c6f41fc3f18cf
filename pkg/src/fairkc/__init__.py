"""Fair k-center clustering via joiner decomposition and a small feasibility LP."""
from .errors import (InfeasibleFairnessError, InputError, LoadError, SizeError, SolverError,
                     TimeLimitExceeded, UnreachableError)
from .fairness import FairnessParams, GroupModel, ViolationReport, audit, params_from_delta, signature_of
from .fdlp import FrequencyDistributorLP, VarKey, build_lp, lp_stats
from .geometry import DistanceMatrix, PointSet, distance, distance_matrix
from .greedy import CenterSet, assign_nearest, greedy_k_center, make_center_set
from .joiners import FrequencyTable, build_frequency_table, joiner_of
from .pipeline import Clustering, SearchTrace, fair_k_cluster, randomized_assign
from .simplex import FeasibilityResult, check_feasible

__version__ = "0.1.0"
