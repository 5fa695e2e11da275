from cli.models.hamiltonian import Bond, DenseOperator, FockSpace, HamiltonianSpec
from cli.models.partition import DiscreteScheme, PartitionResult, SymbolKind, TailPolicy
from cli.models.spin_spec import FzHamiltonian, SpinSpec, XHamiltonian
from cli.models.worldline_path import JumpEvent, WorldlinePath

__all__ = [
    "Bond",
    "DenseOperator",
    "DiscreteScheme",
    "FockSpace",
    "FzHamiltonian",
    "HamiltonianSpec",
    "JumpEvent",
    "PartitionResult",
    "SpinSpec",
    "SymbolKind",
    "TailPolicy",
    "WorldlinePath",
    "XHamiltonian",
]
