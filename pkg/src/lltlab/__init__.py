"""Exact lattice distributions and interval-type local limit statistics.

The library builds exact grid-supported laws (standardized i.i.d. lattice
sums, multi-group Curie-Weiss magnetizations), evaluates continuous reference
densities (Gaussian, standardized Irwin-Hall), and computes the statistics
that quantify local limit behavior: pointwise deviations over the grid, the
histogram-ratio statistic, and the supremum of the relative box-probability
error over sub-boxes with minimal edge lengths, together with its sharpness
counterexample and closed-form bound.
"""

from .densities import (ContinuousDensity, DensityBounds, GaussianDensity,
                        IrwinHallDensity, standard_normal)
from .errors import (BoundDegenerate, ConfigInvalid, DensityNotBoundedBelow,
                     DimensionUnsupported, EmptyRegion, EmptySupport,
                     LltLabError, MinLengthExceedsBox, NegativeMass,
                     NonpositiveScale, NotEnoughGridPoints, NotNormalized,
                     RegimeViolation, SingularMatrix, SupportOverflow,
                     ToleranceUnreachable, ZeroDensityOnBox, ZeroVariance)
from .grids import (Box, GridSpec, LatticePmf, build_pmf, closed_box,
                    open_box, read_pmf_csv, write_pmf_csv)
from .histogram import (HistogramDensity, histogram_at, histogram_measure,
                        pointwise_llt_stat, step1_stat)
from .intervalsup import (MinLength, SupResult, continuous_sup_ratio,
                          counterexample_interval, mu_vs_histogram_stat,
                          sup_ratio_deviation, theoretical_step3_bound)
from .models import (BaseLattice1D, CwModel, base_from_config, cw_covariance,
                     cw_from_config, cw_magnetization_pmf, fair_coin,
                     iid_sum_pmf, model_pmf_from_config, moments,
                     sizes_from_fractions, standardized_iid_sum)
from .study import (MinLengthRule, StudyConfig, compute_row, load_config,
                    model_at, run_study, validate_config, write_rows_csv)

__version__ = "0.1.0"
