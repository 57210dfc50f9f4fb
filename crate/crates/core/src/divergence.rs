//! Scalar divergences on the positive half-line.
//!
//! Three families are provided:
//!
//! * the asymmetric **AB** divergence `d_AB^(α,β)(x, y)`;
//! * its symmetrized form **ABS**, `d_ABS^(α,β)(x, y) = d_AB(x, y) + d_AB(y, x)`,
//!   which is `(α+β)`-homogeneous;
//! * the one-parameter family `d_t²(x, y) = ½((xᵗ − yᵗ)/t)²`, which is
//!   `2t`-homogeneous and equals `½ d_ABS^(t,t)`.
//!
//! Each family has singular parameter lines (β = 0, α = 0, α + β = 0,
//! α = β = 0, t = 0) where the generic closed form divides by zero. The
//! parameters are snapped onto those lines with [`branch_select`] and the
//! matching limit form is evaluated. All branches are written in terms of
//! `u = ln x − ln y` with `expm1` / power series so that evaluation stays
//! accurate when `x ≈ y` or when the parameters approach a singular line.
//!
//! Two conventions on the singular lines:
//!
//! * at α = β = 0 the ABS divergence is `(ln x − ln y)²`, the continuous
//!   limit of the generic branch (and twice the AB value `½(ln x − ln y)²`);
//! * at α = −β the ABS divergence is the continuous limit
//!   `(x^α/y^α + y^α/x^α − 2)/α²`. The variant with an extra
//!   `(x^α − y^α) ln(x^α/y^α)` term is available through
//!   [`SkewPairForm::WithLogTerm`].

use crate::error::{Error, Result};
use crate::math;

/// Default tolerance for snapping a parameter onto a singular line.
pub const DEFAULT_EPS_PARAM: f64 = 1e-12;

/// Exponents `(α, β)` of the AB / ABS families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterPair {
    alpha: f64,
    beta: f64,
}

impl ParameterPair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
            });
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Homogeneity degree γ = α + β.
    pub fn gamma(&self) -> f64 {
        self.alpha + self.beta
    }
}

/// Which closed form applies to a parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivergenceBranch {
    /// α ≠ 0, β ≠ 0, α + β ≠ 0.
    Generic,
    /// α ≠ 0, β = 0.
    AlphaOnly,
    /// α = −β ≠ 0.
    SkewPair,
    /// α = 0, β ≠ 0.
    BetaOnly,
    /// α = β = 0.
    BothZero,
}

/// Evaluation form used on the α = −β line of the ABS family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SkewPairForm {
    /// `(r + 1/r − 2)/α²` with `r = x^α/y^α`; continuous in (α, β).
    #[default]
    ContinuousLimit,
    /// Adds `(x^α − y^α) ln(x^α/y^α)/α²` to the continuous form.
    WithLogTerm,
}

/// Knobs shared by every scalar evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Parameters with magnitude at or below this are treated as zero.
    pub eps_param: f64,
    pub skew_pair: SkewPairForm,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            eps_param: DEFAULT_EPS_PARAM,
            skew_pair: SkewPairForm::ContinuousLimit,
        }
    }
}

/// A member of one of the three divergence families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceSpec {
    Ab(ParameterPair),
    Abs(ParameterPair),
    /// `d_t²`; identified with homogeneity degree `2t`.
    Dt(f64),
}

/// Picks the branch for `params`, treating any of |α|, |β|, |α+β| at or
/// below `eps_param` as zero.
pub fn branch_select(params: ParameterPair, eps_param: f64) -> DivergenceBranch {
    let a0 = params.alpha.abs() <= eps_param;
    let b0 = params.beta.abs() <= eps_param;
    let s0 = params.gamma().abs() <= eps_param;
    match (a0, b0) {
        (true, true) => DivergenceBranch::BothZero,
        (false, true) => DivergenceBranch::AlphaOnly,
        (true, false) => DivergenceBranch::BetaOnly,
        (false, false) if s0 => DivergenceBranch::SkewPair,
        (false, false) => DivergenceBranch::Generic,
    }
}

/// Asymmetric AB divergence `d_AB^(α,β)(x, y)` for `x, y > 0`.
pub fn ab_divergence(params: ParameterPair, x: f64, y: f64) -> Result<f64> {
    ab_divergence_with(params, x, y, &EvalConfig::default())
}

pub fn ab_divergence_with(params: ParameterPair, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
    check_positive(x, y)?;
    ab_positive(params, x, y, cfg)
}

/// Symmetric ABS divergence `d_ABS^(α,β)(x, y)` for `x, y > 0`.
pub fn abs_divergence(params: ParameterPair, x: f64, y: f64) -> Result<f64> {
    abs_divergence_with(params, x, y, &EvalConfig::default())
}

pub fn abs_divergence_with(params: ParameterPair, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
    check_positive(x, y)?;
    let (lo, hi) = ordered(x, y);
    abs_positive(params, hi, lo, cfg)
}

/// `d_t²(x, y) = ½((xᵗ − yᵗ)/t)²`, or `½(ln x − ln y)²` at `t = 0`.
pub fn dt_squared(t: f64, x: f64, y: f64) -> Result<f64> {
    dt_squared_with(t, x, y, &EvalConfig::default())
}

pub fn dt_squared_with(t: f64, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
        });
    }
    check_positive(x, y)?;
    let (lo, hi) = ordered(x, y);
    dt_positive(t, hi, lo, cfg)
}

/// Fixed argument order so symmetric divergences are bitwise symmetric.
fn ordered(x: f64, y: f64) -> (f64, f64) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Type-1 symmetrization `½[d_AB(x, y) + d_AB(y, x)]`.
pub fn symmetrize_type1(params: ParameterPair, x: f64, y: f64) -> Result<f64> {
    symmetrize_type1_with(params, x, y, &EvalConfig::default())
}

pub fn symmetrize_type1_with(
    params: ParameterPair,
    x: f64,
    y: f64,
    cfg: &EvalConfig,
) -> Result<f64> {
    let forward = ab_divergence_with(params, x, y, cfg)?;
    let backward = ab_divergence_with(params, y, x, cfg)?;
    Ok(0.5 * (forward + backward))
}

impl DivergenceSpec {
    pub fn ab(alpha: f64, beta: f64) -> Result<Self> {
        ParameterPair::new(alpha, beta).map(Self::Ab)
    }

    pub fn abs(alpha: f64, beta: f64) -> Result<Self> {
        ParameterPair::new(alpha, beta).map(Self::Abs)
    }

    pub fn dt(t: f64) -> Result<Self> {
        if t.is_finite() {
            Ok(Self::Dt(t))
        } else {
            Err(Error::InvalidParameter {
                name: "t",
                value: t,
            })
        }
    }

    /// Degree λ with `d(cx, cy) = c^λ d(x, y)`.
    pub fn homogeneity_degree(&self) -> f64 {
        match self {
            Self::Ab(p) | Self::Abs(p) => p.gamma(),
            Self::Dt(t) => 2.0 * t,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Self::Ab(_))
    }

    /// True when the divergence extends continuously to a zero argument,
    /// i.e. only positive powers appear and no logarithm.
    pub fn regular_at_zero(&self, eps_param: f64) -> bool {
        match self {
            Self::Ab(p) | Self::Abs(p) => {
                branch_select(*p, eps_param) == DivergenceBranch::Generic
                    && p.alpha > 0.0
                    && p.beta > 0.0
            }
            Self::Dt(t) => *t > eps_param,
        }
    }

    /// Evaluates the scalar divergence for `x, y > 0`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.eval_with(x, y, &EvalConfig::default())
    }

    pub fn eval_with(&self, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
        match self {
            Self::Ab(p) => ab_divergence_with(*p, x, y, cfg),
            Self::Abs(p) => abs_divergence_with(*p, x, y, cfg),
            Self::Dt(t) => dt_squared_with(*t, x, y, cfg),
        }
    }

    /// Like [`eval_with`](Self::eval_with) but admits zero arguments when
    /// [`regular_at_zero`](Self::regular_at_zero) holds. Returns `Ok(None)`
    /// when a zero argument meets a singular branch.
    pub(crate) fn eval_nonneg(&self, x: f64, y: f64, cfg: &EvalConfig) -> Result<Option<f64>> {
        if x > 0.0 && y > 0.0 {
            return self.eval_with(x, y, cfg).map(Some);
        }
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::Domain {
                name: "x",
                value: x,
            });
        }
        if !(y >= 0.0 && y.is_finite()) {
            return Err(Error::Domain {
                name: "y",
                value: y,
            });
        }
        if !self.regular_at_zero(cfg.eps_param) {
            return Ok(None);
        }
        let value = match self {
            Self::Ab(p) => {
                let (a, b, s) = (p.alpha, p.beta, p.gamma());
                let cross = math::powf(x, a) * math::powf(y, b);
                let xs = pow_checked(x, s, "x^(alpha+beta)")?;
                let ys = pow_checked(y, s, "y^(alpha+beta)")?;
                -(cross - a / s * xs - b / s * ys) / (a * b)
            }
            Self::Abs(p) => {
                let (a, b) = (p.alpha, p.beta);
                let da = pow_checked(x, a, "x^alpha")? - pow_checked(y, a, "y^alpha")?;
                let db = pow_checked(x, b, "x^beta")? - pow_checked(y, b, "y^beta")?;
                da * db / (a * b)
            }
            Self::Dt(t) => {
                let d = (pow_checked(x, *t, "x^t")? - pow_checked(y, *t, "y^t")?) / t;
                0.5 * d * d
            }
        };
        finite(value).map(Some)
    }
}

fn check_positive(x: f64, y: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            name: "x",
            value: x,
        });
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain {
            name: "y",
            value: y,
        });
    }
    Ok(())
}

fn pow_checked(base: f64, exponent: f64, term: &'static str) -> Result<f64> {
    let v = math::powf(base, exponent);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range { term, exponent })
    }
}

fn exp_checked(z: f64, term: &'static str, exponent: f64) -> Result<f64> {
    let v = math::expm1(z);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range { term, exponent })
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range {
            term: "result",
            exponent: f64::NAN,
        })
    }
}

/// Radius (in |u|·max|exponent|) under which power series replace closed forms.
const SERIES_RADIUS: f64 = 0.5;

/// `Σ_{k≥2} c_k v^k / k!` where `c_k` comes from `coeff(k)`.
///
/// Stops after two consecutive negligible terms, since single coefficients
/// may vanish (e.g. `h_1(s, α) = 0` when `s = −α`).
fn exp_like_series(v: f64, mut coeff: impl FnMut(u32) -> f64) -> f64 {
    let mut vk = v * v / 2.0;
    let mut sum = 0.0;
    let mut quiet = 0;
    for k in 2..96u32 {
        let term = coeff(k) * vk;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            quiet += 1;
            if quiet == 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        vk *= v / f64::from(k + 1);
    }
    sum
}

/// `v·eᵛ − (eᵛ − 1)`, which is `v²/2 + O(v³)`.
fn log_branch_kernel(v: f64) -> f64 {
    if v.abs() < SERIES_RADIUS {
        exp_like_series(v, |k| f64::from(k - 1))
    } else {
        v * math::exp(v) - math::expm1(v)
    }
}

/// `eᵛ − 1 − v`.
fn expm1_minus_identity(v: f64) -> f64 {
    if v.abs() < SERIES_RADIUS {
        exp_like_series(v, |_| 1.0)
    } else {
        math::expm1(v) - v
    }
}

/// `(eᶻ − 1)/z`, equal to 1 at `z = 0`.
fn expm1_over(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        math::expm1(z) / z
    }
}

fn ab_positive(params: ParameterPair, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    let u = math::ln(x) - math::ln(y);
    let value = match branch_select(params, cfg.eps_param) {
        DivergenceBranch::Generic => {
            let s = a + b;
            let scale = pow_checked(y, s, "y^(alpha+beta)")?;
            let reach = u.abs() * a.abs().max(b.abs()).max(s.abs());
            if reach < SERIES_RADIUS {
                // Σ_{k≥2} h_{k-2}(s, α) u^k / k!, h_m the complete
                // homogeneous polynomial of degree m in (s, α).
                let mut h = 1.0;
                let mut a_pow = 1.0;
                let series = exp_like_series(u, |k| {
                    if k > 2 {
                        a_pow *= a;
                        h = s * h + a_pow;
                    }
                    h
                });
                scale * series
            } else if b.abs() <= s.abs() {
                // division by β removed: α u e^{αu} E(βu) − (e^{αu} − 1), all over α s
                let grow = exp_checked(a * u, "x^alpha/y^alpha", a)? + 1.0;
                let bracket = a * u * grow * expm1_over(b * u) - (grow - 1.0);
                scale * bracket / (a * s)
            } else {
                // (α/s)(e^{su} − 1) − (e^{αu} − 1), all over α β
                let lead = exp_checked(s * u, "x^(alpha+beta)/y^(alpha+beta)", s)?;
                let trail = exp_checked(a * u, "x^alpha/y^alpha", a)?;
                scale * (a / s * lead - trail) / (a * b)
            }
        }
        DivergenceBranch::AlphaOnly => {
            let scale = pow_checked(y, a, "y^alpha")?;
            scale * log_branch_kernel(a * u) / (a * a)
        }
        DivergenceBranch::BetaOnly => {
            let scale = pow_checked(x, b, "x^beta")?;
            scale * log_branch_kernel(-b * u) / (b * b)
        }
        DivergenceBranch::SkewPair => expm1_minus_identity(a * u) / (a * a),
        DivergenceBranch::BothZero => 0.5 * u * u,
    };
    // rounding can leave a tiny negative residue near x = y
    finite(if value < 0.0 { 0.0 } else { value })
}

/// `(xᵃ − yᵃ)/a` for `a ≠ 0`, where `u = ln x − ln y`. Close to the diagonal
/// the difference is taken as `yᵃ u E(a u)` to avoid cancellation.
fn power_gap(x: f64, y: f64, u: f64, a: f64, names: [&'static str; 2]) -> Result<f64> {
    if (a * u).abs() > SERIES_RADIUS {
        Ok((pow_checked(x, a, names[0])? - pow_checked(y, a, names[1])?) / a)
    } else {
        Ok(pow_checked(y, a, names[1])? * u * expm1_over(a * u))
    }
}

const ALPHA_TERMS: [&str; 2] = ["x^alpha", "y^alpha"];
const BETA_TERMS: [&str; 2] = ["x^beta", "y^beta"];

fn abs_positive(params: ParameterPair, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    let u = math::ln(x) - math::ln(y);
    let value = match branch_select(params, cfg.eps_param) {
        DivergenceBranch::Generic => {
            power_gap(x, y, u, a, ALPHA_TERMS)? * power_gap(x, y, u, b, BETA_TERMS)?
        }
        DivergenceBranch::AlphaOnly => power_gap(x, y, u, a, ALPHA_TERMS)? * u,
        DivergenceBranch::BetaOnly => power_gap(x, y, u, b, BETA_TERMS)? * u,
        DivergenceBranch::SkewPair => {
            let half = math::sinh(0.5 * a * u);
            let limit = 4.0 * half * half / (a * a);
            match cfg.skew_pair {
                SkewPairForm::ContinuousLimit => limit,
                SkewPairForm::WithLogTerm => limit + power_gap(x, y, u, a, ALPHA_TERMS)? * u,
            }
        }
        DivergenceBranch::BothZero => u * u,
    };
    finite(value)
}

fn dt_positive(t: f64, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
    let u = math::ln(x) - math::ln(y);
    let diff = if t.abs() <= cfg.eps_param {
        u
    } else {
        power_gap(x, y, u, t, ["x^t", "y^t"])?
    };
    finite(0.5 * diff * diff)
}
