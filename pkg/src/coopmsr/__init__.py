"""Cooperative minimum-storage regenerating (MSR) array codes.

An (n, k) MDS array code with node size (d+h-k)(d-k+1)^n that repairs any
h failed nodes from any d helpers while exchanging exactly the cooperative
cut-set bound of h(d+h-1)(d-k+1)^n symbols.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    NodeSize,
    RepairTranscript,
    cutset_centralized,
    cutset_cooperative,
    meter_close,
    node_size_table,
)
from .cluster import (
    ClusterLost,
    ClusterState,
    cluster_init,
    fail_nodes,
    run_cooperative_repair,
    run_naive_repair,
    verify_cluster,
)
from .code import (
    CodeParams,
    ParamsError,
    digits,
    encode,
    grs_erasure_solve,
    make_params,
    mds_decode,
    parity_residual,
    replace_digit,
)
from .field import FieldCtx, FieldError, field_make
from .repair import (
    PartialNode,
    RepairError,
    RepairMessage,
    RepairPlan,
    cooperative_repair,
    helper_round1_response,
    round1_decode,
    round2_finish,
    round2_message,
)
