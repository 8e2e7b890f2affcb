from .summary import MomentSummary
from .exact import variance_exact, gamma_exact, exact_cost
from .analytic import (kruns_sigma2_analytic, kruns_gamma_analytic, subgraph_sigma2_analytic,
                       binomial_gamma_analytic, ustat_sigma2_hoeffding, iid_gamma_analytic)
from .montecarlo import moments_mc
from .compute import compute_moments, exact_feasible, exact_moments_summary
