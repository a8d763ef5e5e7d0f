"""Connection coefficients of Okubo systems of rank 2n built from rank-n data.

Modules: numerics (Gamma function, branch windows), model (system data,
geometry, Riemann schemes), local (Frobenius bases), continuation (Taylor
continuation along planned paths), connection (numerical and closed-form
connection tables, verification suites), euler (Euler-type integrals and
their relations), cli (system files, reports, commands).
"""

from .connection import (connect_numeric, gamma_values, measure_big,
                         predict_big_coefficients, predict_rho_dependence, verify)
from .euler import IntegralSpec, check_relation, eval_V, eval_W, quad_segment
from .instances import euler_instance, gauss_spec, random_instance
from .local import standard_basis
from .model import (BigSystemSpec, build_big, build_frame, build_underlying, reduce,
                    riemann_scheme, validate)

__version__ = "0.1.0"
