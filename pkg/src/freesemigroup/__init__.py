"""Free and Boolean convolution semigroups on two backends.

The analytic backend evaluates Cauchy transforms on the upper half-plane
through subordination fixed points.  The series backend works with exact
rational moment sequences.
"""

from .brownian import *  # noqa: F401,F403
from .density import *  # noqa: F401,F403
from .divisibility import *  # noqa: F401,F403
from .errors import ConsistencyError, ConvergenceError, DomainError
from .measures import *  # noqa: F401,F403
from .meixner import *  # noqa: F401,F403
from .semigroup import *  # noqa: F401,F403
from .series import *  # noqa: F401,F403
from .subordination import *  # noqa: F401,F403

from . import brownian, density, divisibility, measures, meixner, semigroup, series, subordination

__version__ = "0.1.0"

__all__ = (
    ["ConsistencyError", "ConvergenceError", "DomainError", "__version__"]
    + brownian.__all__ + density.__all__ + divisibility.__all__ + measures.__all__
    + meixner.__all__ + semigroup.__all__ + series.__all__ + subordination.__all__
)
