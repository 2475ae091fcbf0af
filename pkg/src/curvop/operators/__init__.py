"""Normal-ordered differential operators on surfaces."""
from .assemble import (ASSEMBLERS, DRESSELHAUS_PARTS, assemble_dresselhaus, assemble_dresselhaus_parts,
                       assemble_hamiltonian, assemble_momentum, assemble_oam, assemble_rashba)
from .diffop import D1, D2, Coef, DiffOp, deriv, dump_operator, eval_on_grid, normal_order, operator_document
from .wavefunction import apply_to_wavefunction

__all__ = [
    "ASSEMBLERS", "DRESSELHAUS_PARTS", "assemble_hamiltonian", "assemble_momentum", "assemble_oam",
    "assemble_rashba", "assemble_dresselhaus", "assemble_dresselhaus_parts",
    "D1", "D2", "Coef", "DiffOp", "deriv", "normal_order", "eval_on_grid", "operator_document",
    "dump_operator", "apply_to_wavefunction",
]
