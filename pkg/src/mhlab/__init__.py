"""Weak martingale Musielak-Orlicz Hardy spaces on finite filtered probability
spaces: norms, operators, atomic decompositions and inequality checks."""

from .filtration import (
    AdaptedProcess,
    Filtration,
    FiltrationError,
    Martingale,
    ProbSpace,
    StoppingTime,
    build_filtration,
    conditional_expectation,
    dyadic_filtration,
    make_rng,
    martingale_from_terminal,
    random_filtration,
    random_martingale,
    regularity_constant,
    skewed_filtration,
    stopped_martingale,
)
from .musielak import (
    MOFunction,
    lq_phi_norm,
    luxemburg_indicator_norm,
    modular_rho,
    phi_measure,
    verify_uniform_type,
    weak_norm,
)
from .operators import (
    all_space_norms,
    apply_operator,
    check_sublinear,
    minimal_envelope,
    space_norm,
)
from .weights import check_Aq, check_S_condition
from .atomic import (
    decompose,
    decompose_PQ,
    decompose_s,
    decompose_SM,
    decomposition_norm,
    reconstruct,
    stopping_time_regular,
    validate_atom,
)

__version__ = "0.1.0"
