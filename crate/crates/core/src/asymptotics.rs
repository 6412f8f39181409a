//! Closed-form fixed points, convergence exponents and asymptotic-law
//! coefficients of the mean-field recurrences, plus empirical exponent
//! fitting for verification.

use crate::nonlin::Activation;
use crate::recurrence::{Arch, NetConfig};
use crate::transforms::{c_alpha, j_alpha, j_alpha_deriv};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Result of a fixed-point solve.
///
/// `exponent` is the polynomial convergence rate of `e^l` toward `e_star`:
/// `δ*` for tanh FRN, `μ = (1 − 𝕁̇_α(e*))/(1−α)` for α-ReLU.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub e_star: f64,
    pub exponent: f64,
    /// `𝕁̇_α(e*)` when applicable (α-ReLU only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_at_fixed_point: Option<f64>,
    pub residual: f64,
}

/// Which asymptotic law the coefficients describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawFamily {
    TanhP,
    TanhGradLogRatio,
    ReluPClosed,
    ReluEConvergence,
    AlphaReluP,
    AlphaReluGradExponent,
    ChiExponents,
}

/// Named coefficients of one asymptotic law; serializes to JSON with the
/// coefficient names as keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLaw {
    pub family: LawFamily,
    pub coefficients: BTreeMap<String, f64>,
    /// Regime tag where the law splits cases (e.g. remainder regimes of
    /// the α-ReLU length expansion).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AsymptoticLaw {
    fn new(family: LawFamily) -> Self {
        AsymptoticLaw {
            family,
            coefficients: BTreeMap::new(),
            regime: None,
            notes: Vec::new(),
        }
    }

    fn with(mut self, name: &str, value: f64) -> Self {
        self.coefficients.insert(name.to_string(), value);
        self
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients.get(name).copied()
    }
}

/// Unconditionally convergent bisection; the interval is assumed to
/// bracket exactly one sign change.
fn bisect(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, max_iter: usize) -> Result<f64> {
    let mut lo = lo;
    let mut hi = hi;
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerical(format!(
            "bisection sign check failed: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4; // √(2/π)

/// Solves `e* = [σ_v²·(2/π)·arcsin(e*) + σ_a²] / (σ_v² + σ_a²)` and the
/// convergence exponent `δ* = 1 − (2/π)(1−e*²)^{−1/2} σ_v²/(σ_v²+σ_a²)`.
///
/// The solve runs in the gap variable `ε = 1 − e`, which keeps full
/// relative precision when σ_a/σ_v is large and e* sits within 1e−8 of 1
/// (there `1 − e*²` would otherwise cancel and push δ* across 1/2).
/// `var_v = 0` degenerates to `e* = 1` with the `σ_w = 0` rate
/// `1 − e^l = Θ(l^{−1})`, reported as exponent 1.
pub fn tanh_frn_fixed_point(var_v: f64, var_a: f64) -> Result<FixedPointResult> {
    if !(var_v >= 0.0) || !(var_a >= 0.0) {
        return Err(Error::Domain(format!(
            "variances must be >= 0, got var_v={var_v} var_a={var_a}"
        )));
    }
    if var_v == 0.0 {
        return Ok(FixedPointResult {
            e_star: 1.0,
            exponent: 1.0,
            slope_at_fixed_point: None,
            residual: 0.0,
        });
    }
    let total = var_v + var_a;
    let ratio = var_v / total;
    // fixed-point equation in ε: ε = (4/π)·ratio·asin(√(ε/2)), using
    // asin(1−ε) = π/2 − 2·asin(√(ε/2))
    let gap = |eps: f64| eps - (4.0 / PI) * ratio * (eps / 2.0).sqrt().asin();
    let (eps_star, residual) = if var_a == 0.0 {
        (1.0, 0.0)
    } else {
        let e = bisect(&gap, 1e-300, 1.0, 200)?;
        (e, gap(e).abs())
    };
    let e_star = 1.0 - eps_star;
    let exponent = 1.0 - (2.0 / PI) * ratio / (eps_star * (2.0 - eps_star)).sqrt();
    Ok(FixedPointResult {
        e_star,
        exponent,
        slope_at_fixed_point: None,
        residual,
    })
}

fn require_tanh(cfg: &NetConfig, what: &str) -> Result<()> {
    if cfg.activation != Activation::Tanh {
        return Err(Error::Domain(format!("{what}: tanh activation required")));
    }
    Ok(())
}

fn frn_vars(cfg: &NetConfig) -> (f64, f64) {
    match cfg.arch {
        Arch::Rrn => (1.0, 0.0),
        Arch::Frn => (cfg.var_v.unwrap_or(1.0), cfg.var_a.unwrap_or(0.0)),
    }
}

/// Coefficients of `p^l = b0·l + b1·l^{1/2} + b2·log l + O(1)` for tanh
/// networks with σ_w > 0. The RRN is the FRN special case σ_v² = 1,
/// σ_a² = 0.
pub fn tanh_p_coefficients(cfg: &NetConfig) -> Result<AsymptoticLaw> {
    cfg.validate()?;
    require_tanh(cfg, "tanh_p_coefficients")?;
    if cfg.var_w <= 0.0 {
        return Err(Error::Domain(
            "tanh_p_coefficients: needs sigma_w > 0 (growth is exactly linear otherwise)".into(),
        ));
    }
    let c = SQRT_2_OVER_PI;
    let sw = cfg.var_w.sqrt();
    let (vv, va) = frn_vars(cfg);
    let b0 = vv + va;
    let b1 = -2.0 * c * vv / (sw * b0.sqrt());
    let b2 = -c * c * vv * vv / (cfg.var_w * b0 * b0);
    Ok(AsymptoticLaw::new(LawFamily::TanhP)
        .with("b0", b0)
        .with("b1", b1)
        .with("b2", b2))
}

/// The constants of `log(ℵ^m/ℵ^l) = 𝒜(√l − √m) + ℬ(log l − log m) + O(1)`.
pub fn tanh_grad_coefficients(cfg: &NetConfig) -> Result<AsymptoticLaw> {
    cfg.validate()?;
    require_tanh(cfg, "tanh_grad_coefficients")?;
    let sw = cfg.var_w.sqrt();
    let (a, b) = match cfg.arch {
        Arch::Rrn => (
            4.0 / 3.0 * SQRT_2_OVER_PI * sw,
            4.0 / (3.0 * PI) - cfg.var_w * 4.0 / (9.0 * PI),
        ),
        Arch::Frn => {
            let (vv, va) = frn_vars(cfg);
            let b0 = vv + va;
            (
                4.0 / 3.0 * SQRT_2_OVER_PI * vv * sw / b0.sqrt(),
                4.0 / (9.0 * PI) * vv * vv / b0 * (3.0 / b0 - cfg.var_w),
            )
        }
    };
    Ok(AsymptoticLaw::new(LawFamily::TanhGradLogRatio)
        .with("A", a)
        .with("B", b))
}

/// Predicted `log(ℵ^m/ℵ^l)` for layers `1 ≤ m ≤ l`; 0 when σ_w = 0 (the
/// gradient is flat across layers).
pub fn tanh_grad_log_ratio(cfg: &NetConfig, l: usize, m: usize) -> Result<f64> {
    cfg.validate()?;
    require_tanh(cfg, "tanh_grad_log_ratio")?;
    if m < 1 || m > l {
        return Err(Error::Domain(format!(
            "tanh_grad_log_ratio: need 1 <= m <= l, got m={m} l={l}"
        )));
    }
    if cfg.var_w == 0.0 {
        return Ok(0.0);
    }
    let law = tanh_grad_coefficients(cfg)?;
    let (a, b) = (
        law.coefficient("A").unwrap(),
        law.coefficient("B").unwrap(),
    );
    let (lf, mf) = (l as f64, m as f64);
    Ok(a * (lf.sqrt() - mf.sqrt()) + b * (lf.ln() - mf.ln()))
}

/// The characteristic-equation constants of the ReLU FRN length dynamics
/// `p^l = A + C·B^l`.
pub fn relu_p_law(cfg: &NetConfig, p0: f64) -> Result<AsymptoticLaw> {
    cfg.validate()?;
    if cfg.arch != Arch::Frn || cfg.activation != (Activation::AlphaRelu { alpha: 1.0 }) {
        return Err(Error::Domain(
            "relu_p_law: ReLU (alpha = 1) FRN required".into(),
        ));
    }
    let (vv, va) = frn_vars(cfg);
    let prod = vv * cfg.var_w;
    if prod == 0.0 {
        // degenerate linear branch: p gains a constant per layer
        return Ok(AsymptoticLaw::new(LawFamily::ReluPClosed)
            .with("slope", vv * cfg.var_b / 2.0 + va)
            .with("intercept", p0)
            .regime_tag("linear"));
    }
    // fixed point of p = (1 + σ_v²σ_w²/2)·p̲ + σ_v²σ_b²/2 + σ_a²
    let a = -(vv * cfg.var_b + 2.0 * va) / prod;
    let b = 1.0 + prod / 2.0;
    Ok(AsymptoticLaw::new(LawFamily::ReluPClosed)
        .with("A", a)
        .with("B", b)
        .with("C", p0 - a))
}

impl AsymptoticLaw {
    fn regime_tag(mut self, tag: &str) -> Self {
        self.regime = Some(tag.to_string());
        self
    }
}

/// Closed form `p^l = A + C·B^l` (ReLU FRN); degenerates to linear growth
/// when σ_v²σ_w² = 0.
pub fn relu_p_closed(cfg: &NetConfig, p0: f64, l: usize) -> Result<f64> {
    let law = relu_p_law(cfg, p0)?;
    if law.regime.as_deref() == Some("linear") {
        return Ok(p0 + law.coefficient("slope").unwrap() * l as f64);
    }
    let (a, b, c) = (
        law.coefficient("A").unwrap(),
        law.coefficient("B").unwrap(),
        law.coefficient("C").unwrap(),
    );
    Ok(a + c * b.powi(l as i32))
}

/// Leading/subleading coefficients of the α-ReLU FRN length expansion
/// `p^l = K₁·l^{1/(1−α)} + R(l)`, α ∈ (0, 1), with the remainder regime
/// split at α = 1/2.
pub fn alpha_relu_p_coefficients(cfg: &NetConfig) -> Result<AsymptoticLaw> {
    cfg.validate()?;
    let Activation::AlphaRelu { alpha } = cfg.activation else {
        return Err(Error::Domain(
            "alpha_relu_p_coefficients: alpha-ReLU activation required".into(),
        ));
    };
    if cfg.arch != Arch::Frn {
        return Err(Error::Domain(
            "alpha_relu_p_coefficients: FRN required".into(),
        ));
    }
    if alpha >= 1.0 {
        return Err(Error::Domain(
            "alpha_relu_p_coefficients: alpha >= 1 grows exponentially; use relu_p_closed".into(),
        ));
    }
    if alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "alpha_relu_p_coefficients: needs alpha in (0, 1), got {alpha}"
        )));
    }
    let (vv, va) = frn_vars(cfg);
    let ca = c_alpha(alpha)?;
    let one_minus = 1.0 - alpha;
    let base = vv * ca * cfg.var_w.powf(alpha);
    let k1 = (base * one_minus).powf(1.0 / one_minus);
    let k2 = 0.5 * base.powf(1.0 / one_minus) * one_minus.powf(alpha / one_minus - 1.0) * alpha;
    let regime = if alpha > 0.5 {
        "remainder_k2_l_pow_alpha_over_1_minus_alpha_log_l"
    } else if alpha == 0.5 {
        "remainder_c_minus_k2_l_log_l"
    } else {
        "remainder_linear_c_times_1_minus_alpha_over_1_minus_2alpha"
    };
    Ok(AsymptoticLaw::new(LawFamily::AlphaReluP)
        .with("K1", k1)
        .with("K2", k2)
        .with("C", va)
        .with("lead_exponent", 1.0 / one_minus)
        .regime_tag(regime))
}

/// Stable fixed point of `𝕁_α` in (0, 1) and the convergence exponent
/// `μ = (1 − 𝕁̇_α(e*))/(1 − α)`, for α ∈ (1/2, 1).
pub fn alpha_relu_e_fixed_point(alpha: f64) -> Result<FixedPointResult> {
    if alpha >= 1.0 {
        return Err(Error::Domain(
            "alpha_relu_e_fixed_point: at alpha = 1 the fixed point is 1; use relu_e_convergence"
                .into(),
        ));
    }
    if !(alpha > 0.5) {
        return Err(Error::Domain(format!(
            "alpha_relu_e_fixed_point: needs alpha in (1/2, 1), got {alpha}"
        )));
    }
    let g = |c: f64| j_alpha(alpha, c).map(|kv| kv.value - c).unwrap_or(f64::NAN);
    let e_star = bisect(&g, 0.0, 1.0 - 1e-9, 200)?;
    let residual = g(e_star).abs();
    let slope = j_alpha_deriv(alpha, e_star)?;
    if slope >= 1.0 {
        return Err(Error::Numerical(format!(
            "fixed point is not stable: J'_alpha(e*) = {slope} >= 1"
        )));
    }
    Ok(FixedPointResult {
        e_star,
        exponent: (1.0 - slope) / (1.0 - alpha),
        slope_at_fixed_point: Some(slope),
        residual,
    })
}

/// The coefficient of `1 − e^l ∼ [¼·σ_v²σ_w²·B⁻¹·U·l]⁻²` for the ReLU FRN,
/// with `B = 1 + σ_v²σ_w²/2` and `U = 2√2/(3π)`.
pub fn relu_e_convergence(var_v: f64, var_w: f64) -> Result<AsymptoticLaw> {
    let prod = var_v * var_w;
    if !(prod > 0.0) {
        return Err(Error::Domain(format!(
            "relu_e_convergence: needs sigma_v^2 sigma_w^2 > 0, got {prod}"
        )));
    }
    let b = 1.0 + prod / 2.0;
    let u = 2.0 * 2.0_f64.sqrt() / (3.0 * PI);
    let coefficient = (0.25 * prod * u / b).powi(-2);
    Ok(AsymptoticLaw::new(LawFamily::ReluEConvergence)
        .with("coefficient", coefficient)
        .with("B", b)
        .with("U", u)
        .with("exponent", -2.0))
}

fn variance_warning_note(alpha: f64, notes: &mut Vec<String>) {
    if alpha <= 0.75 {
        notes.push(format!(
            "empirical gradient variance diverges for alpha <= 3/4 (alpha = {alpha}); \
             mean-field predictions will overestimate simulated norms"
        ));
    }
}

/// Gradient-growth exponent `R = α²/((1−α)(2α−1))` for α ∈ (1/2, 1); at
/// α = 1 the dynamics turns exponential with per-layer base
/// `1 + σ_v²σ_w²/2` and the returned law carries the `exponential` regime
/// tag instead of `R`.
pub fn alpha_relu_grad_exponent(alpha: f64) -> Result<AsymptoticLaw> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "alpha_relu_grad_exponent: needs alpha in (1/2, 1], got {alpha}"
        )));
    }
    let mut law = AsymptoticLaw::new(LawFamily::AlphaReluGradExponent);
    variance_warning_note(alpha, &mut law.notes);
    if alpha == 1.0 {
        law.notes.push(
            "daleth^{l-m} = daleth^l B^m with B = 1 + sigma_v^2 sigma_w^2 / 2".into(),
        );
        return Ok(law.regime_tag("exponential"));
    }
    let r = alpha * alpha / ((1.0 - alpha) * (2.0 * alpha - 1.0));
    Ok(law.with("R", r).regime_tag("polynomial"))
}

/// Depth-scaling exponents of the parameter-gradient norms `χ_•^{l−m}`.
///
/// For α = 1: `χ_w`, `χ_v` are independent of m, while `χ_b`, `χ_a` scale
/// as `B^m`. For α ∈ (1/2, 1): `χ_b ∼ l^R (l−m)^{−R−1}`, `χ_w`, `χ_v`
/// `∼ l^R (l−m)^{α/(1−α)−R}`, and `χ_a ∼ (l/(l−m))^R`.
pub fn chi_exponents(alpha: f64) -> Result<AsymptoticLaw> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "chi_exponents: needs alpha in (1/2, 1], got {alpha}"
        )));
    }
    let mut law = AsymptoticLaw::new(LawFamily::ChiExponents);
    variance_warning_note(alpha, &mut law.notes);
    if alpha == 1.0 {
        law.notes
            .push("chi_b and chi_a scale as B^m; chi_w and chi_v are constant in m".into());
        return Ok(law
            .with("chi_w_m_exponent", 0.0)
            .with("chi_v_m_exponent", 0.0)
            .regime_tag("exponential"));
    }
    let r = alpha * alpha / ((1.0 - alpha) * (2.0 * alpha - 1.0));
    let fwd = alpha / (1.0 - alpha);
    Ok(law
        .with("R", r)
        .with("chi_b_lm_exponent", -r - 1.0)
        .with("chi_w_lm_exponent", fwd - r)
        .with("chi_v_lm_exponent", fwd - r)
        .with("chi_a_ratio_exponent", r)
        .with("l_prefactor_exponent", r)
        .regime_tag("polynomial"))
}

/// Least-squares slope of `log series[l]` against `log l` over
/// `l ∈ [l_min, l_max]`. The series is indexed by layer.
pub fn fit_exponent(series: &[f64], l_min: usize, l_max: usize) -> Result<f64> {
    if l_min < 1 || l_max >= series.len() {
        return Err(Error::Domain(format!(
            "fit_exponent: window [{l_min}, {l_max}] outside series of length {}",
            series.len()
        )));
    }
    if l_max < l_min + 10 {
        return Err(Error::Domain(format!(
            "fit_exponent: window [{l_min}, {l_max}] too short (need l_max >= l_min + 10)"
        )));
    }
    let mut n = 0.0;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for l in l_min..=l_max {
        let y = series[l];
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::Domain(format!(
                "fit_exponent: series must be strictly positive on the window; \
                 series[{l}] = {y}"
            )));
        }
        let lx = (l as f64).ln();
        let ly = y.ln();
        n += 1.0;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::QuadratureSpec;
    use crate::recurrence::forward;

    #[test]
    fn tanh_fixed_point_chaotic_limit() {
        // σ_a = 0 ⇒ e* = 0, δ* = 1 − 2/π ≈ 0.36338
        let fp = tanh_frn_fixed_point(1.0, 0.0).unwrap();
        assert_eq!(fp.e_star, 0.0);
        assert!((fp.exponent - (1.0 - 2.0 / PI)).abs() < 1e-12);
        assert!((fp.exponent - 0.36338).abs() < 1e-5);
    }

    #[test]
    fn tanh_fixed_point_stable_limit() {
        // σ_a/σ_v → ∞ ⇒ e* → 1, δ* → 1/2 from below
        let mut last = 0.0;
        for va in [1.0, 10.0, 100.0, 10_000.0] {
            let fp = tanh_frn_fixed_point(1.0, va).unwrap();
            assert!(fp.e_star > last && fp.e_star < 1.0);
            assert!(fp.exponent < 0.5);
            last = fp.e_star;
        }
        let fp = tanh_frn_fixed_point(1.0, 1e6).unwrap();
        assert!(fp.e_star > 0.999);
        assert!(fp.exponent > 0.49);
    }

    #[test]
    fn bench_fixed_point_is_exactly_half() {
        // arcsin(1/2) = π/6 makes e* = 1/2 for σ_v² = 1.5, σ_a² = 0.5
        let fp = tanh_frn_fixed_point(1.5, 0.5).unwrap();
        assert!(fp.residual < 1e-12);
        assert!((fp.e_star - 0.5).abs() < 1e-10, "e* = {}", fp.e_star);
        let want = 1.0 - (2.0 / PI) / (0.75_f64).sqrt() * 0.75;
        assert!((fp.exponent - want).abs() < 1e-12);
    }

    #[test]
    fn delta_star_range_over_rho_grid() {
        // δ* ∈ [1 − 2/π, 1/2) for all ratios σ_a/σ_v
        for i in 0..50 {
            let rho = 100.0 * i as f64 / 49.0;
            let fp = tanh_frn_fixed_point(1.0, rho * rho).unwrap();
            assert!(
                fp.exponent >= 1.0 - 2.0 / PI - 1e-12 && fp.exponent < 0.5,
                "rho={rho}: delta*={}",
                fp.exponent
            );
        }
    }

    #[test]
    fn fixed_point_depends_only_on_ratio() {
        for k in [0.5, 2.0, 10.0] {
            let a = tanh_frn_fixed_point(1.5, 0.5).unwrap();
            let b = tanh_frn_fixed_point(1.5 * k, 0.5 * k).unwrap();
            assert!((a.e_star - b.e_star).abs() < 1e-12);
            assert!((a.exponent - b.exponent).abs() < 1e-12);
        }
    }

    #[test]
    fn tanh_p_coefficients_rrn_and_frn() {
        let rrn = NetConfig::rrn(Activation::Tanh, 1.0, 0.5, 10).unwrap();
        let law = tanh_p_coefficients(&rrn).unwrap();
        assert_eq!(law.coefficient("b0").unwrap(), 1.0);
        assert!((law.coefficient("b1").unwrap() + 2.0 * SQRT_2_OVER_PI).abs() < 1e-14);
        assert!((law.coefficient("b2").unwrap() + 2.0 / PI).abs() < 1e-14);

        // FRN with σ_v² = 1, σ_a² = 0 reduces to the RRN coefficients
        let frn = NetConfig::frn(Activation::Tanh, 1.0, 0.5, 1.0, 0.0, 10).unwrap();
        let law2 = tanh_p_coefficients(&frn).unwrap();
        for k in ["b0", "b1", "b2"] {
            assert_eq!(law.coefficient(k).unwrap(), law2.coefficient(k).unwrap());
        }
    }

    #[test]
    fn tanh_grad_constants() {
        let rrn = NetConfig::rrn(Activation::Tanh, 1.0, 0.5, 10).unwrap();
        let law = tanh_grad_coefficients(&rrn).unwrap();
        assert!((law.coefficient("A").unwrap() - 4.0 / 3.0 * SQRT_2_OVER_PI).abs() < 1e-14);
        assert!(
            (law.coefficient("B").unwrap() - (4.0 / (3.0 * PI) - 4.0 / (9.0 * PI))).abs() < 1e-14
        );
        assert_eq!(tanh_grad_log_ratio(&rrn, 7, 7).unwrap(), 0.0);
        assert!(tanh_grad_log_ratio(&rrn, 7, 0).is_err());
    }

    #[test]
    fn relu_law_bench_base() {
        let cfg = NetConfig::frn(
            Activation::alpha_relu(1.0).unwrap(),
            1.69,
            0.49,
            1.5,
            0.5,
            10,
        )
        .unwrap();
        let law = relu_p_law(&cfg, 1.0).unwrap();
        assert!((law.coefficient("B").unwrap() - 2.2675).abs() < 1e-12);
        assert_eq!(relu_p_closed(&cfg, 1.0, 0).unwrap(), 1.0);
    }

    #[test]
    fn relu_p_closed_matches_recurrence_for_random_configs() {
        // not random at runtime: a fixed spread of configurations
        let spec = QuadratureSpec::default();
        let grid = [
            (0.5, 0.2, 1.0, 0.3),
            (1.69, 0.49, 1.5, 0.5),
            (2.0, 0.0, 0.7, 0.0),
            (0.3, 1.0, 2.0, 1.0),
            (1.0, 0.5, 1.0, 0.5),
            (1.3, 0.7, 0.4, 0.9),
            (0.9, 0.1, 1.1, 0.2),
            (1.5, 0.3, 0.6, 0.8),
            (0.2, 0.9, 1.8, 0.1),
            (2.5, 0.4, 0.9, 0.6),
        ];
        for (vw, vb, vv, va) in grid {
            let cfg =
                NetConfig::frn(Activation::alpha_relu(1.0).unwrap(), vw, vb, vv, va, 40).unwrap();
            let t = forward(&cfg, 1.0, 0.5, &spec).unwrap();
            for l in 0..=40 {
                let closed = relu_p_closed(&cfg, 1.0, l).unwrap();
                assert!(
                    ((t.p[l] - closed) / closed).abs() < 1e-12,
                    "vw={vw} l={l}: {} vs {closed}",
                    t.p[l]
                );
            }
        }
    }

    #[test]
    fn alpha_relu_p_regimes() {
        let mk = |alpha: f64| {
            NetConfig::frn(
                Activation::alpha_relu(alpha).unwrap(),
                1.69,
                0.49,
                1.5,
                0.5,
                10,
            )
            .unwrap()
        };
        let law = alpha_relu_p_coefficients(&mk(0.55)).unwrap();
        assert!(law.coefficient("K1").unwrap() > 0.0);
        assert!(law.regime.as_deref().unwrap().contains("k2"));
        let law = alpha_relu_p_coefficients(&mk(0.3)).unwrap();
        assert!(law.regime.as_deref().unwrap().contains("linear"));
        assert!(alpha_relu_p_coefficients(&mk(1.0)).is_err());
    }

    #[test]
    fn alpha_relu_fixed_points_are_stable() {
        for alpha in [0.6, 0.75, 0.9] {
            let fp = alpha_relu_e_fixed_point(alpha).unwrap();
            assert!(fp.e_star > 0.0 && fp.e_star < 1.0);
            assert!(fp.slope_at_fixed_point.unwrap() < 1.0);
            assert!(fp.residual < 1e-10, "alpha={alpha}: {}", fp.residual);
            let mu = (1.0 - fp.slope_at_fixed_point.unwrap()) / (1.0 - alpha);
            assert_eq!(fp.exponent, mu);
        }
        // frozen from the bisection itself (stable quadrature route)
        let fp = alpha_relu_e_fixed_point(0.6).unwrap();
        assert!((fp.e_star - 0.984_020_398_1).abs() < 1e-6, "{}", fp.e_star);
        assert!(alpha_relu_e_fixed_point(1.0).is_err());
        assert!(alpha_relu_e_fixed_point(0.5).is_err());
    }

    #[test]
    fn relu_e_convergence_constants() {
        let law = relu_e_convergence(1.5, 1.69).unwrap();
        let u = law.coefficient("U").unwrap();
        assert!((u - 0.30011).abs() < 1e-5);
        let b = law.coefficient("B").unwrap();
        assert!((b - 2.2675).abs() < 1e-12);
        let want = (0.25 * 2.535 / 2.2675 * u).powi(-2);
        assert!((law.coefficient("coefficient").unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn grad_exponent_values() {
        // R(3/4) = 9/2 and R(2/3) = 4
        let r = |a: f64| {
            alpha_relu_grad_exponent(a)
                .unwrap()
                .coefficient("R")
                .unwrap()
        };
        assert!((r(0.75) - 4.5).abs() < 1e-12);
        assert!((r(2.0 / 3.0) - 4.0).abs() < 1e-12);
        assert!((r(0.9) - 10.125).abs() < 1e-12);
        let law = alpha_relu_grad_exponent(1.0).unwrap();
        assert_eq!(law.regime.as_deref(), Some("exponential"));
        assert!(alpha_relu_grad_exponent(0.5).is_err());
    }

    #[test]
    fn r_is_minimized_at_three_quarters() {
        let r = |a: f64| a * a / ((1.0 - a) * (2.0 * a - 1.0));
        let mut a = 0.7501;
        while a < 1.0 {
            assert!(r(a) >= 4.5 - 1e-9, "alpha={a}: {}", r(a));
            a += 0.005;
        }
    }

    #[test]
    fn chi_exponent_values() {
        let law = chi_exponents(0.9).unwrap();
        assert!((law.coefficient("chi_w_lm_exponent").unwrap() - (9.0 - 10.125)).abs() < 1e-12);
        assert!((law.coefficient("chi_a_ratio_exponent").unwrap() - 10.125).abs() < 1e-12);
        let law = chi_exponents(1.0).unwrap();
        assert_eq!(law.coefficient("chi_w_m_exponent").unwrap(), 0.0);
    }

    #[test]
    fn grad_log_ratio_tracks_recurrence_at_large_depth() {
        // backward-recurrence ratio vs the A(√l−√m) + B(log l − log m) law
        let cfg = NetConfig::frn(Activation::Tanh, 1.69, 0.49, 1.5, 0.5, 2000).unwrap();
        let spec = QuadratureSpec::default();
        let t = forward(&cfg, 1.0, 0.5, &spec).unwrap();
        let b = crate::recurrence::backward(&cfg, &t, 1.0, &spec).unwrap();
        let lhs = (b.daleth[1000] / b.daleth[2000]).ln();
        let pred = tanh_grad_log_ratio(&cfg, 2000, 1000).unwrap();
        assert!(
            (lhs - pred).abs() < 2.0,
            "log ratio {lhs:.4} vs prediction {pred:.4}"
        );
    }

    #[test]
    fn alpha_relu_leading_term_band() {
        // p^l / (K1 l^{1/(1-alpha)}) lands in a loose band early; the
        // subleading log term is still large at this depth
        let cfg = NetConfig::frn(
            Activation::alpha_relu(0.9).unwrap(),
            1.69,
            0.49,
            1.5,
            0.5,
            200,
        )
        .unwrap();
        let t = forward(&cfg, 1.0, 0.5, &QuadratureSpec::default()).unwrap();
        let k1 = alpha_relu_p_coefficients(&cfg)
            .unwrap()
            .coefficient("K1")
            .unwrap();
        let ratio = t.p[200] / (k1 * 200f64.powi(10));
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn fit_exponent_recovers_power_laws() {
        let mut series = vec![0.0; 200];
        for l in 1..200 {
            series[l] = (l as f64) * (l as f64);
        }
        let got = fit_exponent(&series, 10, 150).unwrap();
        assert!((got - 2.0).abs() < 1e-9);
        let flat = vec![3.5; 100];
        assert!(fit_exponent(&flat, 1, 99).unwrap().abs() < 1e-12);
        assert!(fit_exponent(&series, 10, 15).is_err());
        series[50] = -1.0;
        assert!(fit_exponent(&series, 10, 150).is_err());
    }

    #[test]
    fn laws_serialize_with_named_keys() {
        let law = relu_e_convergence(1.5, 1.69).unwrap();
        let json = serde_json::to_string(&law).unwrap();
        assert!(json.contains("\"coefficient\""));
        assert!(json.contains("\"family\":\"relu_e_convergence\""));
        let fp = tanh_frn_fixed_point(1.5, 0.5).unwrap();
        let json = serde_json::to_string(&fp).unwrap();
        assert!(json.contains("e_star"));
    }
}
