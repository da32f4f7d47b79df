"""Exact construction and verification of defining polynomials for the
modular curves X_0(2^(2n)).

The pieces:

* ``qseries``   -- truncated Laurent q-expansions with fractional exponents
                   and exact rational coefficients;
* ``modforms``  -- eta/theta expansions, eta quotients, Newman's conditions,
                   and the cusp geometry of Gamma_0(2^n);
* ``curvepoly`` -- sparse integer bivariate polynomials and the parity-split
                   doubling recursion producing the tower polynomials;
* ``verify``    -- truncation-bounded verification with explicit rigor
                   bounds and structured reports;
* ``cli``       -- the command-line front end.
"""

from .curvepoly import (
    BiPoly,
    HalfExpPoly,
    ResourceCapError,
    StructureReport,
    evaluate_at_series,
    p_poly,
    parity_split,
    recursion_step,
    render_latex,
    render_text,
    structure_report,
)
from .modforms import (
    Cusp,
    EtaQuotient,
    NewmanVerdict,
    cusp_width,
    cusps_of,
    eta_quotient_series,
    eta_series,
    genus_fermat,
    genus_X0,
    newman_conditions,
    order_at_cusp,
    theta_series,
    valence_sum,
    x_series,
    y_series,
)
from .qseries import (
    AllZeroWindowError,
    NotInvertibleError,
    PrecisionError,
    QExp,
)
from .verify import NotModularError, VerificationReport

__version__ = "0.1.0"

__all__ = [
    "AllZeroWindowError",
    "BiPoly",
    "Cusp",
    "EtaQuotient",
    "HalfExpPoly",
    "NewmanVerdict",
    "NotInvertibleError",
    "NotModularError",
    "PrecisionError",
    "QExp",
    "ResourceCapError",
    "StructureReport",
    "VerificationReport",
    "cusp_width",
    "cusps_of",
    "eta_quotient_series",
    "eta_series",
    "evaluate_at_series",
    "genus_X0",
    "genus_fermat",
    "newman_conditions",
    "order_at_cusp",
    "p_poly",
    "parity_split",
    "recursion_step",
    "render_latex",
    "render_text",
    "structure_report",
    "theta_series",
    "valence_sum",
    "x_series",
    "y_series",
    "__version__",
]
