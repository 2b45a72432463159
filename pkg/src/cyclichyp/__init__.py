"""Cyclic basic hypergeometric functions at roots of unity and the integrable
chiral Potts model."""

from .branched import BranchedValue, cyclic_pochhammer, delta, p0, p_func, pochhammer, sector_index
from .chiral_potts import (
    LambdaChoice,
    Moduli,
    RapidityPoint,
    order_parameter,
    solve_rapidity,
    star_triangle_check,
    weight_W,
    weight_Wbar,
    weights_to_hyp,
)
from .context import DEFAULT_CONFIG, NumericConfig, UnityContext
from .errors import CyclicHypError
from .fermat import FermatPoint, affine_to_fermat, fermat_to_affine, psi_direct, translate_psi, w_kms, w_sms
from .series import HypSpec, is_cyclic, is_saalschutz, phi_eval
from .summation import Region, RegionTag, SummationInput, classify_region, closed_form, direct_sum, oracle_phase
from .transformations import (
    Phi1Params,
    Phi2Params,
    WeightTable,
    convolution_3phi2,
    fourier_dual,
    iota_swap,
    m_transform,
    mu_transform,
    transform_3phi2,
    verify_z4,
)

__version__ = "0.1.0"
