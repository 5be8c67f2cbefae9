"""Exception hierarchy shared by all qgraph modules."""


class QGraphError(Exception):
    """Base class for every error raised by qgraph."""


class GraphError(QGraphError, ValueError):
    pass


class ZeroOrNegativeLength(GraphError):
    pass


class DanglingEndpoint(GraphError):
    pass


class Disconnected(GraphError):
    pass


class CutPointOffGraph(GraphError):
    pass


class DuplicateCut(GraphError):
    pass


class SolverError(QGraphError):
    pass


class ConvergenceFailure(SolverError):
    pass


class ScanExhausted(SolverError):
    pass


class RankMismatch(SolverError):
    pass


class AnalysisError(QGraphError):
    pass


class NotMorse(AnalysisError):
    pass


class NotEquipartition(AnalysisError):
    pass


class ZeroAtInterface(AnalysisError):
    pass


class NotGenericMinimizer(AnalysisError):
    pass


class PartitionError(QGraphError):
    pass


class EmptyBoundary(PartitionError):
    pass


class BudgetExceeded(PartitionError):
    pass


class InfeasibleK(PartitionError):
    pass
