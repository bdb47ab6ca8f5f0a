"""Synthetic filtrations: simplex category, contexts, Dirichlet functors."""

from .context import ContextPrefix, TimeInContext, cantor_expand, cantor_value
from .dirichlet import DirichletParams
from .filtration import FiltrationState, ObservationEvent
from .prob import FiniteProbSpace, PointMap, RandomVariable
from .realizer import BarycentricPoint
from .simplex import Degeneracy, Face, GeneratorWord, OrderPreservingMap

__version__ = "0.1.0"

__all__ = [
    "BarycentricPoint",
    "ContextPrefix",
    "Degeneracy",
    "DirichletParams",
    "Face",
    "FiniteProbSpace",
    "FiltrationState",
    "GeneratorWord",
    "ObservationEvent",
    "OrderPreservingMap",
    "PointMap",
    "RandomVariable",
    "TimeInContext",
    "cantor_expand",
    "cantor_value",
]
