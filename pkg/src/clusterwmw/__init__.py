"""Wilcoxon-Mann-Whitney effect estimation and tests for clustered data.

Handles clusters that hold members of one or both groups and cluster sizes
that may carry information about the outcome.
"""

from .dataset import (Cluster, ClusteredDataset, DatasetSummary, Observation, ingest,
                      parse_csv, read_csv, summary)
from .empirical import (EcdfHandle, group_ecdf, group_handle, kernel_h, kernel_matrix,
                        whole_cluster_ecdf, within_cluster_ecdf)
from .errors import (ClusterWMWError, DataError, DegenerateResampleError,
                     DegenerateVarianceError, EnumerationCapError, InsufficientDrawsError,
                     NegativeVarianceError, NoComparisonsError, NotPositiveDefiniteError)
from .estimators import (EffectEstimate, EstimatorMethod, ResampleDraw, draw_resample,
                         e_m1m2, e_u_star, enumerate_resample_expectations, p_hat_mc,
                         p_hat_star, p_ignorable, p_tilde, p_tilde_altform, u_star)
from .inference import (InferenceResult, VarianceEstimate, bm_variance_single_draw, df_hat,
                        e_w_hat, hoffman_variance, run_method, t_tilde_test, var_tilde, w_hat,
                        z_h_test, z_hat_test, z_star_test, z_tilde_test)
from .simulation import (CovarianceSpec, ExperimentReport, ScenarioConfig, TheoreticalEffects,
                         build_sigma, gen_ics_dataset, gen_ignorable_dataset,
                         mc_effect_oracle, run_experiment, sample_cluster, theoretical_effects,
                         theoretical_p, theoretical_p0)

__version__ = "0.1.0"


def schema_path(name: str):
    """Path of a shipped JSON schema: ``analyze``, ``theory`` or ``report``."""
    from importlib.resources import files
    return files(__name__) / "schemas" / f"{name}.schema.json"
