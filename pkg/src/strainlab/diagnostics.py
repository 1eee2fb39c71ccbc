"""Scalar diagnostics of a strain state: integral identities, spectral
infima, regularity-criterion integrands, reference constants and blow-up
bookkeeping.

Everything that pairs quadratic or cubic expressions is evaluated with
exact (padded) products, so the reported residuals measure mathematics,
not aliasing.  Quantities that are inherently non-band-limited (pointwise
eigenvalues, L^q norms of nonlinear expressions) use plain collocation
quadrature and are reported raw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .eigen import sym3_det, sym3_eigenvalues, sym3_trace_cubed
from .nonlinearity import (
    NonlinearTerms,
    blowup_ratio_terms,
    compute_terms,
    q_perturbation,
    rhs_from_terms,
)
from .spectral import (
    TENSOR_WEIGHTS,
    TensorField,
    VectorField,
    inner_product,
    lq_norm,
    pointwise_magnitude,
    sobolev_norm_sq,
    to_physical,
)

#: Fraction of spectral mass allowed in the top third of the retained band.
RESOLUTION_LIMIT = 1e-6

#: How the Laplacian in the perturbation-ratio denominator is read: it is
#: applied to the strain tensor itself, not to the velocity.
RATIO_DENOMINATOR_CONVENTION = "tensor-laplacian"

DEFAULT_ALPHAS = (0.0, 1.0)
DEFAULT_QS = (2.0,)


# ---------------------------------------------------------------------------
# cubic integrals and identity residuals


def det_integral(s: TensorField) -> float:
    """int det(S) dx, exact for band-limited S (padded collocation sum)."""
    big = s.grid.padded(2)
    samples = to_physical(s.pad_to(big))
    return float(np.sum(sym3_det(samples)) * big.cell_volume)


def trace_cubed_integral(s: TensorField) -> float:
    """int tr(S^3) dx, exact for band-limited S."""
    big = s.grid.padded(2)
    samples = to_physical(s.pad_to(big))
    return float(np.sum(sym3_trace_cubed(samples)) * big.cell_volume)


def cubic_triple(t: TensorField, omega: VectorField) -> tuple[float, float, float, float]:
    """The three expressions of the cubic interaction, plus a magnitude scale.

    Returns (a, b, c, scale) with
        a = <T, w (x) w>,  b = -4 int det(T),  c = -(4/3) int tr(T^3),
    all by exact quadrature on the doubled grid.  For T in strain space with
    w its vorticity the three agree.  The scale is a non-cancelling majorant
    used to normalise their differences.
    """
    big = t.grid.padded(2)
    tp = to_physical(t.pad_to(big))
    wp = to_physical(omega.pad_to(big))
    cell = big.cell_volume
    wsq = wp[0] ** 2 + wp[1] ** 2 + wp[2] ** 2
    outer = np.stack(
        [wp[0] * wp[0], wp[0] * wp[1], wp[0] * wp[2], wp[1] * wp[1], wp[1] * wp[2], wp[2] * wp[2]]
    )
    a = float(np.sum(np.tensordot(TENSOR_WEIGHTS, tp * outer, axes=(0, 0))) * cell)
    b = -4.0 * float(np.sum(sym3_det(tp)) * cell)
    c = -(4.0 / 3.0) * float(np.sum(sym3_trace_cubed(tp)) * cell)
    t_mag = pointwise_magnitude(tp, 6)
    scale = max(
        float(np.sum(t_mag * wsq) * cell),
        4.0 * float(np.sum(t_mag**3) * cell),
        np.finfo(float).tiny,
    )
    return a, b, c, scale


@dataclass(frozen=True)
class IdentitySuite:
    """Normalised residuals of the exact integral identities."""

    ortho_resid: float
    cubic_resids: tuple[float, float]
    pairing_resids: tuple[float, float]
    cubic_values: tuple[float, float, float]

    @property
    def worst(self) -> float:
        return max(self.ortho_resid, *self.cubic_resids, *self.pairing_resids)


def identity_suite(s: TensorField, terms: NonlinearTerms | None = None) -> IdentitySuite:
    """Residuals of the structural identities of strain dynamics.

    * <-Lap S, w (x) w> = 0 (the dissipation-interaction orthogonality),
    * <S, w(x)w> = -4 int det S = -(4/3) int tr S^3 (pairwise),
    * <(u.grad)S, S> = 0 and <(1/3)S^2 + (1/4) w(x)w, S> = 0.

    Each residual is scaled by a non-cancelling product of factor norms.
    """
    if terms is None:
        terms = compute_terms(s, advection=True, exact=True)
    if not terms.exact or terms.advection is None:
        raise ValueError("identity_suite needs exact terms with advection")
    big = terms.grid
    sp = s.pad_to(big)
    lap_s = ops.laplacian(sp)

    ortho_num = abs(inner_product(lap_s, terms.vort_outer))
    ortho_den = math.sqrt(sobolev_norm_sq(lap_s) * sobolev_norm_sq(terms.vort_outer))
    ortho = ortho_num / max(ortho_den, np.finfo(float).tiny)

    a, b, c, scale = cubic_triple(s, terms.vorticity)
    cubic = (abs(a - b) / scale, abs(b - c) / scale)

    adv_num = abs(inner_product(terms.advection, sp))
    adv_den = math.sqrt(sobolev_norm_sq(terms.advection) * sobolev_norm_sq(sp))
    mix = (1.0 / 3.0) * terms.strain_sq + 0.25 * terms.vort_outer
    mix_num = abs(inner_product(mix, sp))
    mix_den = math.sqrt(sobolev_norm_sq(mix) * sobolev_norm_sq(sp))
    pairings = (
        adv_num / max(adv_den, np.finfo(float).tiny),
        mix_num / max(mix_den, np.finfo(float).tiny),
    )
    return IdentitySuite(ortho, cubic, pairings, (a, b, c))


@dataclass(frozen=True)
class EnstrophyRate:
    """d/dt ||S||_L2^2 evaluated three independent ways."""

    measured: float
    identity: float
    vorticity_form: float


def enstrophy_rate(
    s: TensorField, mu: float, advection: bool = False, terms: NonlinearTerms | None = None
) -> EnstrophyRate:
    """Instantaneous enstrophy production rate of the model with weight mu.

    measured        2 <dS/dt, S> with exact products,
    identity        -2 ||S||_H1^2 - 4 int det S (model-independent),
    vorticity_form  -||w||_H1^2 + <S, w (x) w>.
    """
    if terms is None:
        terms = compute_terms(s, advection=advection, exact=True)
    if not terms.exact:
        raise ValueError("enstrophy_rate needs exact terms")
    if advection and terms.advection is None:
        raise ValueError("advection rate requested but terms lack the advection tensor")
    use = terms
    if terms.advection is not None and not advection:
        use = NonlinearTerms(
            terms.strain_sq, terms.vort_outer, None, terms.velocity, terms.vorticity, True
        )
    sp = s.pad_to(terms.grid)
    measured = 2.0 * inner_product(rhs_from_terms(s, use, mu), sp)
    identity = -2.0 * sobolev_norm_sq(s, 1.0) - 4.0 * det_integral(s)
    a = inner_product(sp, terms.vort_outer)
    vort_form = -sobolev_norm_sq(terms.vorticity, 1.0) + a
    return EnstrophyRate(measured, identity, vort_form)


# ---------------------------------------------------------------------------
# spectral infima


def inf_rho_l2(s: TensorField) -> tuple[float, float]:
    """min over rho of ||-rho Lap S - S||_L2^2 and its minimiser.

    Closed form: value = ||S||^2 - ||S||_H1^4 / ||Lap S||^2 at
    rho = ||S||_H1^2 / ||Lap S||^2.
    """
    e = sobolev_norm_sq(s)
    if e == 0.0:
        return 0.0, 0.0
    h1 = sobolev_norm_sq(s, 1.0)
    z = sobolev_norm_sq(s, 2.0)
    return e - h1 * h1 / z, h1 / z


def inf_rho_halpha(s: TensorField, alpha: float) -> tuple[float, float]:
    """min over rho of ||-rho Lap S - S||_{H^alpha}^2 and its minimiser."""
    ha = sobolev_norm_sq(s, alpha)
    if ha == 0.0:
        return 0.0, 0.0
    h1 = sobolev_norm_sq(s, alpha + 1.0)
    h2 = sobolev_norm_sq(s, alpha + 2.0)
    return ha - h1 * h1 / h2, h1 / h2


@dataclass(frozen=True)
class LqInfimum:
    value: float
    rho_star: float
    bracket_ok: bool


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def inf_rho_lq(s: TensorField, q: float, rel_tol: float = 1e-8) -> LqInfimum:
    """min over rho >= 0 of ||-rho Lap S - S||_{L^q} by golden-section search.

    The map is convex in rho, so golden section on an expanding bracket
    converges; the initial bracket is [0, 2 rho*] with rho* the L2
    minimiser.  `bracket_ok` reports whether a bracket containing the
    minimum was actually found.
    """
    e = sobolev_norm_sq(s)
    if e == 0.0:
        return LqInfimum(0.0, 0.0, True)
    lap = ops.laplacian(s)

    def f(rho: float) -> float:
        return lq_norm(TensorField(s.grid, -rho * lap.coeffs - s.coeffs), q)

    _, rho0 = inf_rho_l2(s)
    hi = 2.0 * rho0 if rho0 > 0 else 1.0
    bracket_ok = True
    grow = 0
    while f(hi) < f(hi * (1.0 - 1e-3)) and grow < 60:
        hi *= 2.0
        grow += 1
    if grow == 60:
        bracket_ok = False
    a, b = 0.0, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rel_tol * max(abs(b), 1e-30):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    rho_star = 0.5 * (a + b)
    return LqInfimum(f(rho_star), rho_star, bracket_ok)


# ---------------------------------------------------------------------------
# criterion integrands


@dataclass(frozen=True)
class RegularityIntegrands:
    """Raw integrand values of the perturbative regularity criteria."""

    q_h_alpha: dict[float, float]
    crit_alpha: dict[float, float]
    endpoint_ratio: float
    lambda2_plus_lq: dict[float, float]

    @staticmethod
    def p_of_alpha(alpha: float) -> float:
        return 2.0 / (1.0 + alpha)

    @staticmethod
    def p_of_q(q: float) -> float:
        if q <= 1.5:
            raise ValueError(f"q must exceed 3/2, got {q}")
        return 2.0 if q == np.inf else 2.0 / (2.0 - 3.0 / q)


def lambda2_plus_lq(s: TensorField, q: float) -> float:
    """L^q norm of max(lambda_2(S), 0), the positive middle eigenvalue."""
    lam2 = sym3_eigenvalues(to_physical(s))[1]
    np.maximum(lam2, 0.0, out=lam2)
    if q == np.inf:
        return float(np.max(lam2))
    if q < 1.0:
        raise ValueError(f"q must be >= 1 or inf, got {q}")
    return float(np.sum(lam2**q) * s.grid.cell_volume) ** (1.0 / q)


def regularity_integrands(
    s: TensorField,
    alphas=DEFAULT_ALPHAS,
    qs=DEFAULT_QS,
    terms: NonlinearTerms | None = None,
) -> RegularityIntegrands:
    """Evaluate the criterion integrands for the full dynamics at one state.

    For each alpha: ||Q||_{H^alpha}^p / ||S||_{H^1}^p with p = 2/(1+alpha),
    where Q is the projected perturbation; the endpoint ratio is
    ||Q||_L2 / ||Lap S||_L2.  For each q: the L^q norm of the positive
    middle eigenvalue of S.
    """
    qfield = q_perturbation(s, terms)
    h1 = sobolev_norm_sq(s, 1.0)
    q_h: dict[float, float] = {}
    crit: dict[float, float] = {}
    for alpha in alphas:
        qn = math.sqrt(sobolev_norm_sq(qfield, alpha))
        p = RegularityIntegrands.p_of_alpha(alpha)
        q_h[alpha] = qn
        crit[alpha] = qn**p / h1 ** (p / 2.0) if h1 > 0 else 0.0
    z = math.sqrt(sobolev_norm_sq(s, 2.0))
    endpoint = math.sqrt(sobolev_norm_sq(qfield)) / z if z > 0 else 0.0
    lam = {q: lambda2_plus_lq(s, q) for q in qs}
    return RegularityIntegrands(q_h, crit, endpoint, lam)


def resolution_fraction(s: TensorField) -> float:
    """Spectral mass fraction carried by modes with max_i |k_i| > (2/3) cutoff."""
    grid = s.grid
    lo = 2.0 * grid.dealias_cutoff / 3.0
    axis_hi = np.abs(grid.k_axis) > lo
    hi = axis_hi[:, None, None] | axis_hi[None, :, None] | axis_hi[None, None, :]
    power = np.tensordot(TENSOR_WEIGHTS, np.abs(s.coeffs) ** 2, axes=(0, 0))
    total = float(np.sum(power))
    if total == 0.0:
        return 0.0
    return float(np.sum(power[hi])) / total


# ---------------------------------------------------------------------------
# reference constants


def existence_coefficient(mu: float) -> float:
    """C(mu) = 1 / (8^5 (2|mu| + |3 mu - 2|)^4); T >= C / ||S0||_L2^4."""
    return 1.0 / (8.0**5 * (2.0 * abs(mu) + abs(3.0 * mu - 2.0)) ** 4)


def interpolation_constant(s_exp: float) -> float:
    """Sharp whole-space constant of the Fourier L1 / Sobolev interpolation
    used by the smallness conditions:
    C_s = 2^(-s/3) pi^(-2s/3) sqrt(Gamma(3/2 - s) / Gamma(3/2 + s)),
    valid for 0 <= s < 3/2.  Reported for reference, not asserted on the
    torus.
    """
    if not 0.0 <= s_exp < 1.5:
        raise ValueError(f"order must lie in [0, 3/2), got {s_exp}")
    return (
        2.0 ** (-s_exp / 3.0)
        * math.pi ** (-2.0 * s_exp / 3.0)
        * math.sqrt(math.gamma(1.5 - s_exp) / math.gamma(1.5 + s_exp))
    )


def reference_constants() -> dict[str, float]:
    """Named constants of the quantitative theory, evaluated in float64.

    Each is reproducible from its closed form; the test-suite pins them
    against 20-digit arithmetic.
    """
    pi4 = math.pi**4
    return {
        "enstrophy_existence_coefficient": 1728.0 * pi4,
        "riccati_rate_coefficient": 1.0 / (3456.0 * pi4),
        "existence_coefficient_mu_0": existence_coefficient(0.0),
        "existence_coefficient_mu_2_3": existence_coefficient(2.0 / 3.0),
        "existence_coefficient_mu_1": existence_coefficient(1.0),
        "heat_kernel_l2_norm": 8.0**-0.25,
        "interpolation_constant_order_1": interpolation_constant(1.0),
        "endpoint_criterion_threshold": 2.0 * (math.pi / 2.0) ** (4.0 / 3.0),
    }


def riccati_envelope(e0: float, t: float) -> float:
    """Enstrophy envelope E0 / sqrt(1 - E0^2 t / (1728 pi^4)); inf past the horizon."""
    if e0 == 0.0:
        return 0.0
    horizon = 1728.0 * math.pi**4 / (e0 * e0)
    if t >= horizon:
        return math.inf
    return e0 / math.sqrt(1.0 - t / horizon)


# ---------------------------------------------------------------------------
# blow-up bookkeeping


@dataclass(frozen=True)
class BlowupReport:
    """Arithmetic of the finite-time growth criterion for one initial state.

    f0 > 0 is the seed condition; when it holds, t_star is the time by which
    the hypotheses force loss of regularity.  Trajectory checks (envelope,
    ratio, resolution) are filled in when sampled records are supplied.
    """

    e0: float
    h1_0: float
    det_0: float
    f0: float
    k0: float
    seed_ok: bool
    t_star: float
    denominator_convention: str = RATIO_DENOMINATOR_CONVENTION
    ratio_max: float = math.nan
    ratio_ok_until: float = math.nan
    envelope_ok: bool | None = None
    envelope_max_fraction: float = math.nan
    resolution_lost_t: float = math.nan
    growth_monotone: bool | None = None
    claim: str = ""


def blowup_t_star(e0: float, f0: float, k0: float) -> float:
    """Latest possible regularity time (-E0 + sqrt(E0^2 + f0 K0)) / f0.

    Returns inf when f0 <= 0 (the seed arithmetic then forces nothing).
    """
    if f0 <= 0.0:
        return math.inf
    return (-e0 + math.sqrt(e0 * e0 + f0 * k0)) / f0


def blowup_report(s0: TensorField, records=None) -> BlowupReport:
    """Evaluate the finite-time growth bookkeeping for initial state s0.

    f0 = -3 ||S0||_H1^2 - 4 int det(S0);  K0 = (1/2)||u0||_L2^2;
    E0 = (1/2)||grad u0||_L2^2 = ||S0||_L2^2;
    t_star = (-E0 + sqrt(E0^2 + f0 K0)) / f0 for f0 > 0, else inf.

    With records from a run, also checks the Riccati envelope, the
    perturbation-ratio threshold 2, monotone growth while resolved, and
    when resolution was lost.  The report never claims a singularity; it
    only states consistency up to resolution loss.
    """
    e0 = sobolev_norm_sq(s0)
    h1_0 = sobolev_norm_sq(s0, 1.0)
    det0 = det_integral(s0)
    f0 = -3.0 * h1_0 - 4.0 * det0
    u0 = ops.velocity_from_strain(s0)
    k0 = 0.5 * sobolev_norm_sq(u0)
    seed_ok = -det0 > 0.75 * h1_0
    t_star = blowup_t_star(e0, f0, k0)

    ratio_max = math.nan
    ratio_ok_until = math.nan
    envelope_ok: bool | None = None
    envelope_max = math.nan
    res_lost = math.nan
    monotone: bool | None = None
    if records:
        ratios = [(r.t, r.blowup_ratio) for r in records if not math.isnan(r.blowup_ratio)]
        if ratios:
            ratio_max = max(v for _, v in ratios)
            ratio_ok_until = ratios[-1][0]
            for t, v in ratios:
                if v > 2.0:
                    ratio_ok_until = t
                    break
        fracs = []
        resolved = [r for r in records if r.resolution_ok]
        for r in records:
            env = riccati_envelope(records[0].enstrophy, r.t - records[0].t)
            if r.resolution_ok and env > 0 and math.isfinite(env):
                fracs.append(r.enstrophy / env)
        if fracs:
            envelope_max = max(fracs)
            envelope_ok = envelope_max <= 1.0 + 1e-9
        lost = [r.t for r in records if not r.resolution_ok]
        if lost:
            res_lost = lost[0]
        if len(resolved) >= 2:
            ens = [r.enstrophy for r in resolved]
            monotone = all(b > a for a, b in zip(ens, ens[1:]))

    if not seed_ok:
        claim = "seed condition not met; no growth statement applies"
    elif records is None:
        claim = "seed condition met; run the state to test the hypotheses"
    else:
        bits = []
        if monotone is None:
            bits.append("too few resolved samples to judge growth")
        else:
            bits.append("growth monotone while resolved" if monotone else "growth not monotone")
        if envelope_ok is None:
            bits.append("envelope untested")
        else:
            bits.append("envelope respected" if envelope_ok else "envelope exceeded")
        if not math.isnan(res_lost):
            bits.append(f"resolution lost at t={res_lost:.6g}")
        else:
            bits.append("resolution held")
        claim = "consistent with the growth hypotheses up to resolution loss: " + ", ".join(bits)

    return BlowupReport(
        e0=e0,
        h1_0=h1_0,
        det_0=det0,
        f0=f0,
        k0=k0,
        seed_ok=seed_ok,
        t_star=t_star,
        ratio_max=ratio_max,
        ratio_ok_until=ratio_ok_until,
        envelope_ok=envelope_ok,
        envelope_max_fraction=envelope_max,
        resolution_lost_t=res_lost,
        growth_monotone=monotone,
        claim=claim,
    )


#: Gronwall constants of the perturbative criterion at alpha = 0 and 1; the
#: alpha = 1 value comes from the differential inequality
#: d/dt ||S||_H1^2 <= 2 (||Q||_H1 / ||S||_H1) ||S||_H1^2.
GRONWALL_CONSTANTS = {0.0: 0.5, 1.0: 2.0}


def gronwall_check(records, alpha: float) -> tuple[float, np.ndarray]:
    """Largest h1_sq / envelope ratio along a run, for the criterion at alpha.

    The envelope is h1_sq(0) * exp(C_alpha * int_0^t integrand) with the
    integrand ||Q||_{H^alpha}^p / ||S||_{H^1}^p, p = 2/(1+alpha), integrated
    by the trapezoid rule over the sampled times.

    Returns (max ratio, envelope array).
    """
    c = GRONWALL_CONSTANTS[alpha]
    times = np.array([r.t for r in records])
    h1 = np.array([r.h1_sq for r in records])
    integrand = np.array([r.crit_alpha.get(alpha, math.nan) for r in records])
    if np.any(np.isnan(integrand)):
        raise ValueError("records lack the criterion integrand; rerun at a deeper level")
    cum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(times))]
    )
    envelope = h1[0] * np.exp(c * cum)
    return float(np.max(h1 / envelope)), envelope


# ---------------------------------------------------------------------------
# the per-sample record


@dataclass
class DiagnosticsRecord:
    """Everything the laboratory knows about one sampled state.

    Fields not computed at the requested depth hold NaN; `resolution_ok`
    states whether the spectral tail carried less than RESOLUTION_LIMIT of
    the total mass, gating any statement about the sample.
    """

    t: float
    enstrophy: float
    h1_sq: float
    h2_sq: float
    resolution_fraction: float
    resolution_ok: bool
    det_int: float = math.nan
    rate_measured: float = math.nan
    rate_identity: float = math.nan
    rate_vorticity: float = math.nan
    ortho_resid: float = math.nan
    cubic_resid_det: float = math.nan
    cubic_resid_tr: float = math.nan
    pairing_resid_adv: float = math.nan
    pairing_resid_mix: float = math.nan
    endpoint_ratio: float = math.nan
    blowup_ratio: float = math.nan
    inf_rho_l2: float = math.nan
    rho_star_l2: float = math.nan
    q_h_alpha: dict[float, float] = field(default_factory=dict)
    crit_alpha: dict[float, float] = field(default_factory=dict)
    inf_rho_halpha: dict[float, float] = field(default_factory=dict)
    inf_rho_lq: dict[float, float] = field(default_factory=dict)
    crit_lq: dict[float, float] = field(default_factory=dict)
    lambda2p_lq: dict[float, float] = field(default_factory=dict)


LEVELS = ("light", "standard", "full")


def compute_record(
    s: TensorField,
    t: float,
    mu: float,
    advection: bool,
    level: str = "standard",
    alphas=DEFAULT_ALPHAS,
    qs=DEFAULT_QS,
) -> DiagnosticsRecord:
    """Evaluate the diagnostics of one state at the requested depth.

    light     norms and the resolution gate only (no transforms),
    standard  plus every transform-once quantity: determinant integral,
              rates, identity residuals, criterion integrands, closed-form
              infima, the perturbation ratio,
    full      plus the L^q infima (golden section) and eigenvalue norms.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown diagnostics level {level!r}")
    frac = resolution_fraction(s)
    rec = DiagnosticsRecord(
        t=t,
        enstrophy=sobolev_norm_sq(s),
        h1_sq=sobolev_norm_sq(s, 1.0),
        h2_sq=sobolev_norm_sq(s, 2.0),
        resolution_fraction=frac,
        resolution_ok=frac < RESOLUTION_LIMIT,
    )
    if level == "light" or rec.enstrophy == 0.0:
        return rec

    terms = compute_terms(s, advection=True, exact=True)
    rec.det_int = det_integral(s)
    rate = enstrophy_rate(s, mu, advection, terms=terms)
    rec.rate_measured = rate.measured
    rec.rate_identity = rate.identity
    rec.rate_vorticity = rate.vorticity_form
    suite = identity_suite(s, terms=terms)
    rec.ortho_resid = suite.ortho_resid
    rec.cubic_resid_det, rec.cubic_resid_tr = suite.cubic_resids
    rec.pairing_resid_adv, rec.pairing_resid_mix = suite.pairing_resids
    reg = regularity_integrands(s, alphas, qs=(), terms=terms)
    rec.q_h_alpha = reg.q_h_alpha
    rec.crit_alpha = reg.crit_alpha
    rec.endpoint_ratio = reg.endpoint_ratio
    num, den = blowup_ratio_terms(s, terms=terms)
    den_norm = math.sqrt(sobolev_norm_sq(den))
    rec.blowup_ratio = (
        math.sqrt(sobolev_norm_sq(num)) / den_norm if den_norm > 0 else math.nan
    )
    rec.inf_rho_l2, rec.rho_star_l2 = inf_rho_l2(s)
    rec.inf_rho_halpha = {a: inf_rho_halpha(s, a)[0] for a in alphas}
    if level == "standard":
        return rec

    for q in qs:
        res = inf_rho_lq(s, q)
        rec.inf_rho_lq[q] = res.value
        rec.crit_lq[q] = res.value ** RegularityIntegrands.p_of_q(q)
        rec.lambda2p_lq[q] = lambda2_plus_lq(s, q)
    return rec
