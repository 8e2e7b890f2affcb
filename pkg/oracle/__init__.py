from .exact import ExactDistribution, exact_distribution, exact_tail, exact_moments, exact_cdf, configuration_count
from .check import random_tiny_model, chi_square_agreement, run_oracle_check, OracleReport
