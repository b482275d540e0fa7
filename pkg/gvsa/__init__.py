from gvsa.kron import kron_apply_naive, path_adjacency
from gvsa.node_functions import (
    NodeFunctionKind,
    ic_abs_subgradient,
    node_function_combo,
    node_function_ic,
    node_function_lde,
    node_function_tensor,
    parse_node_function,
)
from gvsa.supports import SupportMatrix, build_support_correlation, parse_support_param
from gvsa.tensor import (
    GraphVariateTensor,
    LowRankGraphVariateOperator,
    graph_variate_tensor,
    renormalize_dynamic,
    zscore_nodes,
)

__all__ = [
    "kron_apply_naive",
    "path_adjacency",
    "NodeFunctionKind",
    "ic_abs_subgradient",
    "node_function_combo",
    "node_function_ic",
    "node_function_lde",
    "node_function_tensor",
    "parse_node_function",
    "SupportMatrix",
    "build_support_correlation",
    "parse_support_param",
    "GraphVariateTensor",
    "LowRankGraphVariateOperator",
    "graph_variate_tensor",
    "renormalize_dynamic",
    "zscore_nodes",
]
