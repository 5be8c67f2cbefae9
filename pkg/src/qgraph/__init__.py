"""Quantum graphs: Laplacian spectra, nodal and Neumann domains, spectral minimal partitions."""
from .graph import (
    CutSet,
    GraphPoint,
    MetricGraph,
    Partition,
    VertexSplit,
    apply_cut,
    betti_number,
    build_graph,
    components,
    is_tree,
    total_length,
)
from .morse import (
    DomainReport,
    classify,
    glue_equipartition,
    morse_representative,
    neumann_domains,
    neumann_points,
    nodal_domains,
    nodal_points,
    report,
)
from .partition import (
    MinimalPartitionResult,
    lambda_D,
    lambda_N,
    minimal_partition,
    minimal_partition_general,
    verify_interlacing,
    verify_surgery_monotonicity,
)
from .spectral import BoundaryCondition, Eigenfunction, Eigenpair, eigenvalues, secular_matrix

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "CutSet",
    "DomainReport",
    "Eigenfunction",
    "Eigenpair",
    "GraphPoint",
    "MetricGraph",
    "MinimalPartitionResult",
    "Partition",
    "VertexSplit",
    "apply_cut",
    "betti_number",
    "build_graph",
    "classify",
    "components",
    "eigenvalues",
    "glue_equipartition",
    "is_tree",
    "lambda_D",
    "lambda_N",
    "minimal_partition",
    "minimal_partition_general",
    "morse_representative",
    "neumann_domains",
    "neumann_points",
    "nodal_domains",
    "nodal_points",
    "report",
    "secular_matrix",
    "total_length",
    "verify_interlacing",
    "verify_surgery_monotonicity",
]
