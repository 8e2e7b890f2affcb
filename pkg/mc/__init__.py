from .blocks import run_blocks
from .engine import ExperimentConfig, TailEstimate, estimate_tails, tail_counts, merge_estimates, wilson_interval
from .report import RelativeErrorRow, relative_error_table, row_record, to_csv, to_json, parse_csv, CSV_COLUMNS
from .mgf import mgf_check, MgfReport, iid_log_mgf, rademacher_log_mgf
