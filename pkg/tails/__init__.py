from .approx import (normal_tail, log_normal_tail, skew_corrected_tail, log_skew_corrected_tail,
                     standardized_poisson_tail, log_standardized_poisson_tail, cramer_diagnostic,
                     cramer_envelope, fit_cramer_constant, poisson_point_approx, PoissonPointApprox,
                     TailApprox, tail_value)
from .bounds import (BoundReport, theorem1_bound, kolmogorov_bound, mgf_t_max, kruns_bound, ustat_bound,
                     subgraph_psi, subgraph_range, subgraph_bound)
