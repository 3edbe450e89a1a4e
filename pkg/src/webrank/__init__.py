"""Exact jet computations for (n+1)-webs of curves in dimension n.

Canonical connection and curvature, flatness (rank one) decisions, abelian
relations, and the dimension-3 construction of flat 4-webs from (Q, u, v).
"""

from ._rational import BACKEND, rational
from .connection import *  # noqa: F401,F403
from .dim3 import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .forms import *  # noqa: F401,F403
from .jets import *  # noqa: F401,F403
from .parser import InputDocument, load_document, parse_document, parse_polynomial
from .report import AnalysisReport, run

__version__ = "0.1.0"
