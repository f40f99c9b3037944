"""One-sided Hari-Zimmermann GSVD of a real or complex matrix pair (F, G).

The decomposition is F Z = U Sigma_F, G Z = V Sigma_G with orthonormal-column
U and V, nonsingular Z, and Sigma_F^2 + Sigma_G^2 = I; the generalized
singular values are Sigma = Sigma_F / Sigma_G.  The solver never assembles
the Grammians F^H F and G^H G globally, which is what preserves accuracy on
pairs whose Grammians would be severely ill-conditioned.
"""

from .core import (GsvdResult, MatrixPlanePair, ProblemPair, border_pair,
                   read_matrix, write_matrix)
from .blocked import (cholesky_upper, form_grammians, gsvd_blocked,
                      postmultiply, preprocess_tall, qr_shorten, rescale_z,
                      solve)
from .distsim import exchange_step, partition_stripes, run_distributed
from .dotprod import (CompensatedAccumulator, dot_compensated,
                      dot_ordinary, norm_sq, tree_reduce)
from .errors import (FileFormatError, HzgsvdError, NotPositiveDefiniteError,
                     ProtocolError, RankError)
from .harness import (AccuracyReport, GenSpec, accuracy_report,
                      gen_condition_pair, gen_pair, gevd_route,
                      pitfall_report, random_genspec, random_orthogonal)
from .kernel2x2 import (PivotPair2x2, Transform2x2, TransformScalars,
                        finalize_transform, form_pivot, relatively_orthogonal,
                        rescale_pivot, transform_complex, transform_real)
from .pointwise import (SolverConfig, SweepStats, gsvd_1x1, prescale_init,
                        solve_pointwise)
from .strategies import CommMapping, StrategyTable, comm_mapping, gen_table, \
    validate_table

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport", "CommMapping", "CompensatedAccumulator", "FileFormatError", "GenSpec",
    "GsvdResult", "HzgsvdError", "MatrixPlanePair", "NotPositiveDefiniteError",
    "PivotPair2x2", "ProblemPair", "ProtocolError", "RankError",
    "SolverConfig", "StrategyTable", "SweepStats", "Transform2x2",
    "TransformScalars", "accuracy_report", "border_pair", "cholesky_upper",
    "comm_mapping", "dot_compensated", "dot_ordinary", "exchange_step",
    "finalize_transform", "form_grammians", "form_pivot", "gen_condition_pair",
    "gen_pair", "gen_table", "gevd_route", "gsvd_1x1", "gsvd_blocked",
    "norm_sq", "partition_stripes", "pitfall_report", "postmultiply",
    "prescale_init", "preprocess_tall", "qr_shorten", "random_genspec",
    "random_orthogonal", "read_matrix", "relatively_orthogonal", "rescale_pivot",
    "rescale_z", "run_distributed", "solve", "solve_pointwise", "transform_complex",
    "transform_real", "tree_reduce", "validate_table", "write_matrix",
]
