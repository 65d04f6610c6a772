"""Discrete confocal quadrics: nets on Z^N and its half-integer dual, their
identities, low-dimensional closed forms, IC-nets and mesh export."""
from .continuous import ContinuousParams, eval_continuous, invert_continuous
from .discrete import DiscreteNet, DiscreteParams, HalfLatticePoint, eval_discrete
from .errors import DomainError, GeometryError, ParameterError, SingularStencilError, SolverError
from .specfun import dsqrt, log_gamma, pochhammer

__version__ = "0.1.0"
