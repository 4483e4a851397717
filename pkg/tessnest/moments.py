"""
Closed-form intensities and asymptotic variances for nested tessellations.

Every quantity is isotropic and valid in general dimension d unless noted.
Gamma-function ratios come from ``scipy.special.gamma``. ``theory_moments``
picks the long-range (Poisson hyperplane initial) or the weakly dependent
(Poisson-Voronoi initial) bundle for a model.
"""

import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Any, Dict, Optional

from scipy.special import gamma as gamma_fn

from .defaults import BRAKKE_CONSTANT, INNER_VARIANCE_CONSTANT
from .exceptions import InvalidInputError, UnsupportedModelError
from .tessellate import TessellationKind, TessellationSpec

if TYPE_CHECKING:
    from .nesting import ModelSpec


@dataclass(frozen=True)
class MomentReport:
    """
    Theoretical moments of Z = number of facet crossings in a window W.

    E Z ~ mean_density * |W| and Var Z ~ asym_variance * |W|^(2 * norm_exponent).

    Attributes:
        mean_density: Expected Z per unit area
        asym_variance: Variance of the normalised limit law
        norm_exponent: alpha in the normaliser |W|^alpha
        facet_intensity: k-facet intensity of the initial tessellation
        component_section_intensity: lambda_0^(k,d) of the component
        component_surface_intensity: lambda_0^(d,d) of the component
        m: Number of cell k-faces containing a k-facet
        model: Human-readable model label
        d: Dimension
        k: Facet dimension
    """

    mean_density: float
    asym_variance: float
    norm_exponent: float
    facet_intensity: float
    component_section_intensity: float
    component_surface_intensity: float
    m: int
    model: str = ""
    d: int = 2
    k: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _check_dim(d: int) -> None:
    if int(d) != d or d < 1:
        raise InvalidInputError(f"dimension must be a positive integer, got {d}", "d")


def _check_facet(d: int, k: int, lowest: int = 1) -> None:
    _check_dim(d)
    if int(k) != k or not lowest <= k <= d - 1:
        raise InvalidInputError(f"k={k} outside [{lowest}, {d - 1}] for d={d}", "k")


def _check_intensity(lam: float, name: str = "lambda") -> None:
    if not (lam >= 0.0 and math.isfinite(lam)):
        raise InvalidInputError(f"intensity must be non-negative, got {lam}", name)


def unit_ball_volume(d: int) -> float:
    """kappa_d = pi^(d/2) / Gamma(d/2 + 1)."""
    if int(d) != d or d < 0:
        raise InvalidInputError(f"dimension must be a non-negative integer, got {d}", "d")
    return float(math.pi ** (d / 2.0) / gamma_fn(d / 2.0 + 1.0))


def stereo_coeff(k: int, d: int) -> float:
    """c_k^(d) = Gamma((k+1)/2) Gamma(d/2) / (Gamma(k/2) Gamma((d+1)/2))."""
    _check_facet(d, k)
    return float(gamma_fn((k + 1) / 2.0) * gamma_fn(d / 2.0) / (gamma_fn(k / 2.0) * gamma_fn((d + 1) / 2.0)))


def pht_intensity(lam: float, d: int, k: int) -> float:
    """Intensity lambda_{k,d} of the k-facets of an isotropic Poisson hyperplane tessellation."""
    _check_intensity(lam)
    _check_facet(d, k, lowest=0)
    kd, kk, kd1 = unit_ball_volume(d), unit_ball_volume(k), unit_ball_volume(d - 1)
    return math.comb(d, k) * kd / kk * (kd1 / (d * kd)) ** (d - k) * lam ** (d - k)


def pht_sigma2(lam: float, d: int, k: int) -> float:
    """
    Asymptotic variance sigma^2_{k,d} of the k-flat volume of a Poisson
    hyperplane process in growing balls, normalised by |B|^(2 - 1/d).
    """
    _check_intensity(lam)
    _check_facet(d, k, lowest=0)
    kd, kk, kd1 = unit_ball_volume(d), unit_ball_volume(k), unit_ball_volume(d - 1)
    return (
        lam ** (2 * d - 2 * k - 1)
        * 2.0 ** (2 * d - 1)
        * kd ** (1.0 / d)
        / math.factorial(2 * d - 1)
        * math.comb(d - 1, k) ** 2
        * (math.factorial(d) * kd1 / (math.factorial(k) * kk)) ** 2
        * (kd1 / (d * kd)) ** (2 * (d - k))
    )


def pht_sigma2_hyperfacet(lam: float, d: int) -> float:
    """sigma^2_{d-1,d}, which does not depend on the direction distribution."""
    _check_intensity(lam)
    _check_dim(d)
    if d < 2:
        raise InvalidInputError(f"need d >= 2, got {d}", "d")
    kd, kd1 = unit_ball_volume(d), unit_ball_volume(d - 1)
    return lam * 2.0 ** (2 * d - 1) * kd1**2 / (math.factorial(2 * d - 1) * kd ** (2.0 - 1.0 / d))


def miles_intensity(d: int, k: int) -> float:
    """Mean k-facet content per unit volume of a unit-intensity Poisson-Voronoi tessellation."""
    _check_facet(d, k)
    kap = unit_ball_volume
    num = (2.0 * math.pi) ** (d - k + 1) * gamma_fn(d - k + k / d) * kap(d * (d - k) + k - 2) * kap(k - 1)
    den = math.factorial(d - k + 1) * d * kap(d * (d - k) + k - 1) * kap(d) ** (k / d)
    return float(num / den * (kap(d - 1) / kap(d)) ** (d - k))


def pvt_facet_intensity(gamma: float, d: int, k: int) -> float:
    """k-facet intensity of a PVT with cell intensity gamma (scaling gamma^((d-k)/d))."""
    _check_intensity(gamma, "gamma")
    return miles_intensity(d, k) * gamma ** ((d - k) / d)


def typical_cell_perimeter(gamma: float) -> float:
    """E P(typical planar PVT cell) = 4 / sqrt(gamma)."""
    if not gamma > 0.0:
        raise InvalidInputError(f"cell intensity must be positive, got {gamma}", "gamma")
    return 4.0 / math.sqrt(gamma)


def brakke_constant(override: Optional[float] = None) -> float:
    """Asymptotic variance per unit area of unit-intensity planar PVT edge length."""
    if override is not None:
        if not override > 0.0:
            raise InvalidInputError(f"override must be positive, got {override}", "brakke")
        return float(override)
    return BRAKKE_CONSTANT


def component_surface_intensity(kind: TessellationKind, lam: float, d: int = 2) -> float:
    """lambda_0^(d,d): surface intensity of the component tessellation's cell boundaries."""
    _check_intensity(lam)
    _check_dim(d)
    if kind is TessellationKind.PLT:
        if d != 2:
            raise UnsupportedModelError("Poisson line component only exists in the plane", f"plt d={d}")
        return float(lam)
    return pvt_facet_intensity(lam, d, d - 1)


def component_section_intensity(kind: TessellationKind, lam: float, d: int = 2, k: int = 1) -> float:
    """lambda_0^(k,d) = c_k^(d) lambda_0^(d,d)."""
    return stereo_coeff(k, d) * component_surface_intensity(kind, lam, d)


def pht_nesting_moments(
    lam_x: float, component: TessellationSpec, d: int = 2, k: int = 1
) -> MomentReport:
    """
    Moments for a Poisson hyperplane initial tessellation (long-range dependent).

    The multiplicity is m = 2^(d-k), E Z/|W| = m lambda_0 lambda_{k,d} and the
    variance grows like |W|^(2 - 1/d).
    """
    _check_facet(d, k)
    _check_intensity(lam_x)
    m = 2 ** (d - k)
    lam0 = component_section_intensity(component.kind, component.intensity, d, k)
    facet = pht_intensity(lam_x, d, k)
    return MomentReport(
        mean_density=m * lam0 * facet,
        asym_variance=(m * lam0) ** 2 * pht_sigma2(lam_x, d, k),
        norm_exponent=1.0 - 1.0 / (2.0 * d),
        facet_intensity=facet,
        component_section_intensity=lam0,
        component_surface_intensity=component_surface_intensity(component.kind, component.intensity, d),
        m=m,
        model=f"PLT({lam_x:g})/{component}",
        d=d,
        k=k,
    )


def inner_variance_term(gamma: float, component: TessellationSpec, inner_constant: Optional[float] = None) -> float:
    """
    (tau_0^(1,2))^2 = gamma E Var(crossings on the typical cell boundary).

    PLT component: 16 sqrt(gamma) lambda / pi, since the crossings are twice a
    Poisson(lambda P / pi) count. PVT component: the simulated constant times
    sqrt(gamma lambda).
    """
    lam = component.intensity
    if component.kind is TessellationKind.PLT:
        return 16.0 * math.sqrt(gamma) * lam / math.pi
    constant = INNER_VARIANCE_CONSTANT if inner_constant is None else inner_constant
    return constant * math.sqrt(gamma * lam)


def weak_nesting_moments(
    gamma: float,
    component: TessellationSpec,
    d: int = 2,
    k: int = 1,
    brakke: Optional[float] = None,
    inner_constant: Optional[float] = None,
) -> MomentReport:
    """
    Moments for a planar Poisson-Voronoi initial tessellation (weakly dependent).

    eta = lambda_0 m mu_1 with m = 2 and mu_1 = 2 sqrt(gamma); the limit
    variance is tau_0^2 + (lambda_0 m)^2 tau^2_{1,2}, with tau^2_{1,2} the
    intensity-free Brakke constant. Normaliser |W|^(1/2).
    """
    if (d, k) != (2, 1):
        raise UnsupportedModelError("constants are only known in the plane", f"pvt d={d} k={k}")
    _check_intensity(gamma, "gamma")
    m = 2
    lam0 = component_section_intensity(component.kind, component.intensity, d, k)
    facet = pvt_facet_intensity(gamma, d, k)
    return MomentReport(
        mean_density=lam0 * m * facet,
        asym_variance=inner_variance_term(gamma, component, inner_constant)
        + (lam0 * m) ** 2 * brakke_constant(brakke),
        norm_exponent=0.5,
        facet_intensity=facet,
        component_section_intensity=lam0,
        component_surface_intensity=component_surface_intensity(component.kind, component.intensity, d),
        m=m,
        model=f"PVT({gamma:g})/{component}",
        d=d,
        k=k,
    )


def theory_moments(model: "ModelSpec", d: int = 2, k: int = 1, brakke: Optional[float] = None) -> MomentReport:
    """Moment bundle for a model, chosen by the kind of its initial tessellation."""
    if model.initial.kind is TessellationKind.PLT:
        return pht_nesting_moments(model.initial.intensity, model.component, d, k)
    if model.initial.kind is TessellationKind.PVT:
        return weak_nesting_moments(model.initial.intensity, model.component, d, k, brakke=brakke)
    raise UnsupportedModelError("unknown initial tessellation", str(model.initial.kind))
