from .statistic import Statistic, DirectSampler
from .kruns import KRunsSpec, KRunsSampler, build_kruns, kruns_raw_model, kruns_index_sets
from .ustat import UStatSpec, UStatSampler, build_ustat, kernel_facts, elementary_symmetric
from .subgraph import (SubgraphSpec, build_subgraph, pattern_graph, automorphism_count, enumerate_copies,
                       expected_copy_count, subgraph_raw_model)
from .iid import iid_model, build_iid
