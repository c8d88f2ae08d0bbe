"""Word maps with constants over GL_n(q): witnesses, norms and identity search."""

from .field import FieldSpec, field_make
from .linalg import MatrixFq, Subspace
from .words import Letter, WordWithConstants

__all__ = ["FieldSpec", "field_make", "MatrixFq", "Subspace", "Letter", "WordWithConstants"]
__version__ = "0.1.0"
