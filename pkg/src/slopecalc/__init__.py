"""Exact slope calculus for p-adic Hodge data.

Rational-exact Newton polygons, Frobenius modules with monodromy, Hodge
filtrations, Harder-Narasimhan filtrations with weak-admissibility and
acyclicity deciders, formal coherent-sheaf and finite-Dimensional Vector
Space bookkeeping, and a consistency battery for synthetic two-degree
cohomology data.  Everything is computed over `fractions.Fraction`; no
floating point arithmetic is used anywhere.
"""

from .bc import (
    BCObject,
    Dimension,
    QBCObject,
    canonical_filtration,
    check_exact,
    dimension,
    ext_tables,
    height_functor_rank,
    hn_slopes,
    label_b,
    label_c,
    label_qp,
)
from .diagram import (
    BatteryReport,
    SyntheticCohomology,
    battery,
    build_modification,
    dichotomy,
    mv_check,
)
from .filtration import HodgeData, dual_hodge, induced_on_subspace, shift, t_h
from .hn import (
    FilteredPhiModule,
    HNFiltration,
    Verdict,
    degree,
    enumerate_subobjects,
    fn4_reduce,
    hn_filtration,
    is_acyclic,
    is_weakly_admissible,
    vst_dimension,
)
from .isocrystal import (
    PhiModule,
    SlopeMultiset,
    check_phi_n,
    det,
    dual,
    from_slopes,
    newton_slopes,
    t_n,
    tensor,
)
from .rational import (
    INFINITY,
    FlagRequiredError,
    InputError,
    Polygon,
    RatMatrix,
    charpoly,
    newton_polygon,
    rat,
    rat_str,
    valuation,
)
from .sheaf import FFSheaf, canonicalize, cohomology_dim, hom_dim

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
