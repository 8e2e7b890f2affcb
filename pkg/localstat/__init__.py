from .base import BaseVariableSpec, BaseKind
from .summands import (Summand, ProductSummand, ProductPlusLinearSummand, IdentitySummand, TableSummand,
                       builtin_summand, BUILTIN_SUMMANDS)
from .enumeration import joint_support, joint_size
from .model import LocalStatisticModel, make_model, check_index_sets
from .dependency import DependencyStructure, StructuralParams, build_dependency, structural_params
from .sampling import WSampler, BaseDrawer, ModelSampler, sample_W
from .io import load_model, dump_model
from .checks import efron_stein_sum, max_swap_difference, check_parameter_inequalities, InequalityReport
