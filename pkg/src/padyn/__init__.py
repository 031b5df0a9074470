"""padyn: a finite-model engine for partial group actions on matrix bundles.

Builds enveloping (global) actions, orbit bundles, induced algebras,
partial crossed products, and verifies Morita equivalences through both
block profiles and an explicit imprimitivity bimodule.
"""

__version__ = "0.1.0"

from .actions import (
    PartialAction,
    commute,
    enveloping,
    is_free,
    is_global,
    orbits,
    product_action,
    quotient_action,
    restrict,
    stabilizer,
    validate_action,
)
from .bundles import (
    AlgebraPartialAction,
    BundleAction,
    FiniteBundle,
    Section,
    SectionAlgebra,
    alpha_tilde,
    bundle_commute,
    enveloping_bundle,
    induced_action_on_sections,
    line_bundle,
    product_bundle_action,
    restrict_bundle_action,
    section_algebra,
    trivial_bundle,
    validate_bundle_action,
)
from .crossed import (
    CrossedProduct,
    global_crossed_product,
    partial_crossed_product,
    verify_enveloping_morita,
)
from .groups import FiniteGroup, cyclic_group, direct_product, validate_group
from .imprimitivity import (
    ImprimitivityBimodule,
    build_bimodule,
    symmetric_imprimitivity,
    verify_bimodule_axioms,
)
from .induced import (
    InducedAlgebra,
    OrbitBundle,
    ind_iso,
    induced_algebra,
    induced_algebra_action,
    orbit_bundle,
    quotient_bundle_action,
)
from .star_algebra import (
    BlockStructure,
    MatrixStarAlgebra,
    is_positive,
    morita_equivalent,
    star_closure,
    wedderburn,
)
from .systems import (
    InvalidSystem,
    SystemDescription,
    canonical_json,
    load_system,
    load_system_file,
    random_instance,
    save_system,
    serialize_system,
    system_digest,
)

__all__ = [name for name in dir() if not name.startswith("_")]
