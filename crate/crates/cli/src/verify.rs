//! `verify`: the invariant and property suite, as a machine-readable
//! report with per-check pass/fail.
//!
//! Profiles:
//! * `default` — every numerically sound check: transform identities,
//!   closed-form vs quadrature duals, recurrence vs closed form, fitted
//!   exponents against theory on windows where the asymptotics have set in.
//! * `kernel-identities` — only the arccosine-kernel identity checks.
//! * `strict` — the default suite plus three literal acceptance clauses
//!   whose depth windows precede the asymptotic regime (they fail by a
//!   finite-depth margin; see the acceptance test suite for the analysis).

use anyhow::Result;
use mfrn::asymptotics::{
    alpha_relu_grad_exponent, fit_exponent, relu_e_convergence, tanh_frn_fixed_point,
    tanh_grad_coefficients, tanh_p_coefficients,
};
use mfrn::nonlin::Activation;
use mfrn::quad::QuadratureSpec;
use mfrn::recurrence::{backward, forward, NetConfig};
use mfrn::simulator::{simulate_forward, SimSpec};
use mfrn::special::bessel_k0;
use mfrn::transforms::{
    j1_closed, j_alpha, j_alpha_deriv, j_alpha_via_bessel, l_alpha, v_deriv_transform,
    v_psi_closed, v_transform, w_transform,
};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub profile: String,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

const BENCH: (f64, f64, f64, f64) = (1.69, 0.49, 1.5, 0.5); // (var_w, var_b, var_v, var_a)

fn bench_net(activation: Activation, depth: usize) -> NetConfig {
    NetConfig::frn(activation, BENCH.0, BENCH.1, BENCH.2, BENCH.3, depth).unwrap()
}

/// Closed-form `Vψ_α` against quadrature, 1e−8 relative on the α × q grid.
/// `MFRN_VERIFY_CORRUPT_CALPHA` perturbs the closed form — a mutation hook
/// proving the check can fail.
fn check_v_closed_vs_quadrature() -> Check {
    let corrupt = std::env::var_os("MFRN_VERIFY_CORRUPT_CALPHA").is_some();
    let mut worst = 0.0_f64;
    for &alpha in &[0.51, 0.6, 0.75, 0.9, 1.0] {
        let a = Activation::alpha_relu(alpha).unwrap();
        for &q in &[0.1, 1.0, 10.0] {
            let quad = match v_transform(&a, q, &spec()) {
                Ok(kv) => kv.value,
                Err(e) => return check("v_closed_vs_quadrature", false, e.to_string()),
            };
            let mut closed = v_psi_closed(alpha, q).unwrap();
            if corrupt {
                closed *= 1.001;
            }
            worst = worst.max(((quad - closed) / closed).abs());
        }
    }
    check(
        "v_closed_vs_quadrature",
        worst < 1e-8,
        format!("max relative deviation {worst:.2e} (tolerance 1e-8)"),
    )
}

/// `Wψ_α(q, cq) = Vψ_α(q)·𝕁_α(c)` on a 4×4 (α, c) grid, 1e−5 relative.
fn check_kernel_factorization() -> Check {
    let mut worst = 0.0_f64;
    for &alpha in &[0.6, 0.75, 0.9, 1.0] {
        let a = Activation::alpha_relu(alpha).unwrap();
        for &c in &[0.1, 0.3, 0.8, 0.95] {
            let q = 2.0;
            let w = match w_transform(&a, q, c, &spec()) {
                Ok(kv) => kv.value,
                Err(e) => return check("kernel_factorization", false, e.to_string()),
            };
            let vj = v_psi_closed(alpha, q).unwrap() * j_alpha(alpha, c).unwrap().value;
            worst = worst.max(((w - vj) / vj).abs());
        }
    }
    check(
        "kernel_factorization",
        worst < 1e-5,
        format!("max relative deviation {worst:.2e} (tolerance 1e-5)"),
    )
}

/// The Bessel-representation cross-check, the 𝕁 recurrence, the L
/// recurrence, the derivative identity, and the K₀ tail behavior.
fn check_bessel_identities() -> Check {
    let mut fails = Vec::new();
    let mut worst = 0.0_f64;

    for &(alpha, theta) in &[
        (0.7, PI / 3.0),
        (1.0, PI / 4.0),
        (0.6, 2.0),
        (1.5, PI / 4.0),
        (2.5, PI / 4.0),
        (0.51, PI / 6.0),
    ] {
        let a = j_alpha_via_bessel(alpha, theta).unwrap().value;
        let b = j_alpha(alpha, theta.cos()).unwrap().value;
        let d = (a - b).abs();
        worst = worst.max(d);
        if d > 1e-5 {
            fails.push(format!("bessel route at ({alpha}, {theta:.3}): {d:.2e}"));
        }
    }

    // 𝕁 recurrence away from the removable singularity at α = 3/2
    for &(alpha, c) in &[(2.5, 0.2), (2.5, 0.7), (1.8, 0.2), (2.2, 0.7)] {
        let lhs = j_alpha(alpha, c).unwrap().value;
        let rhs = c * j_alpha(alpha - 1.0, c).unwrap().value
            + (alpha - 1.0).powi(2) / ((2.0 * alpha - 1.0) * (2.0 * alpha - 3.0))
                * (1.0 - c * c)
                * j_alpha(alpha - 2.0, c).unwrap().value;
        let d = (lhs - rhs).abs();
        worst = worst.max(d);
        if d > 1e-5 {
            fails.push(format!("J recurrence at ({alpha}, {c}): {d:.2e}"));
        }
    }

    // the L-form recurrence is regular at α = 3/2
    for &(alpha, theta) in &[(1.5, PI / 4.0), (2.5, PI / 4.0)] {
        let lhs = l_alpha(alpha, theta).unwrap();
        let rhs = ((2.0 * alpha - 1.0) * theta.cos() * l_alpha(alpha - 1.0, theta).unwrap()
            + (alpha - 1.0).powi(2) * l_alpha(alpha - 2.0, theta).unwrap())
            / theta.sin().powi(2);
        let d = ((lhs - rhs) / lhs).abs();
        worst = worst.max(d);
        if d > 1e-5 {
            fails.push(format!("L recurrence at ({alpha}, {theta:.3}): {d:.2e}"));
        }
    }

    // derivative identity vs central differences
    let h = 1e-5;
    let fd = (j_alpha(0.8, 0.4 + h).unwrap().value - j_alpha(0.8, 0.4 - h).unwrap().value)
        / (2.0 * h);
    let idy = j_alpha_deriv(0.8, 0.4).unwrap();
    if (fd - idy).abs() > 1e-5 {
        fails.push(format!("J' at (0.8, 0.4): {:.2e}", (fd - idy).abs()));
    }
    for &alpha in &[0.75, 0.9, 1.0] {
        let got = j_alpha_deriv(alpha, 1.0).unwrap();
        let want = alpha * alpha / (2.0 * alpha - 1.0);
        if (got - want).abs() > 1e-10 {
            fails.push(format!("J'({alpha}, 1): {got} vs {want}"));
        }
    }

    // K₀ large-argument law within 2%
    let ratio = bessel_k0(10.0) * (20.0 / PI).sqrt() * 10.0_f64.exp();
    if (ratio - 1.0).abs() > 0.02 {
        fails.push(format!("K0 asymptotics ratio {ratio}"));
    }

    // 𝕁₁ closed form
    for &c in &[0.0, 0.5, 0.9] {
        let d = (j_alpha(1.0, c).unwrap().value - j1_closed(c).unwrap()).abs();
        if d > 1e-6 {
            fails.push(format!("J1 closed form at {c}: {d:.2e}"));
        }
    }

    check(
        "bessel_identities",
        fails.is_empty(),
        if fails.is_empty() {
            format!("all identities within tolerance (worst {worst:.2e})")
        } else {
            fails.join("; ")
        },
    )
}

/// Forward recurrence against `A + C·B^l` and the exact backward ratio.
fn check_relu_exactness() -> Check {
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
    let mut worst = 0.0_f64;
    for (vw, vb, vv, va) in grid {
        let cfg =
            NetConfig::frn(Activation::alpha_relu(1.0).unwrap(), vw, vb, vv, va, 40).unwrap();
        let t = forward(&cfg, 1.0, 0.5, &spec()).unwrap();
        let a = -(vb * vv + 2.0 * va) / (vv * vw);
        let b = 1.0 + vv * vw / 2.0;
        let c0 = 1.0 - a;
        for l in 0..=40usize {
            let closed = a + c0 * b.powi(l as i32);
            worst = worst.max(((t.p[l] - closed) / closed).abs());
        }
        let bwd = backward(&cfg, &t, 1.0, &spec()).unwrap();
        let want = 1.0 + vv * vw / 2.0;
        for l in 1..=40 {
            worst = worst.max(((bwd.daleth[l - 1] / bwd.daleth[l] - want) / want).abs());
        }
    }
    check(
        "relu_exactness",
        worst < 1e-12,
        format!("max relative deviation {worst:.2e} (tolerance 1e-12)"),
    )
}

/// The three-term tanh length expansion has a bounded remainder: its value
/// drifts by < 0.5 between depths 10³ and 10⁴.
fn check_tanh_p_expansion() -> Check {
    let mut details = Vec::new();
    let mut pass = true;
    let configs: Vec<NetConfig> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&vw| NetConfig::rrn(Activation::Tanh, vw, 0.5, 10_000).unwrap())
        .chain([bench_net(Activation::Tanh, 10_000)])
        .collect();
    for cfg in configs {
        let law = tanh_p_coefficients(&cfg).unwrap();
        let (b0, b1, b2) = (
            law.coefficient("b0").unwrap(),
            law.coefficient("b1").unwrap(),
            law.coefficient("b2").unwrap(),
        );
        // p only: iterate without the correlation half for speed
        let mut p = 1.0;
        let mut dev_1e3 = 0.0;
        let mut dev_1e4 = 0.0;
        for l in 1..=10_000usize {
            let q = cfg.var_w * p + cfg.var_b;
            let v = v_transform(&Activation::Tanh, q, &spec()).unwrap().value;
            p = match cfg.arch {
                mfrn::recurrence::Arch::Rrn => v + p,
                mfrn::recurrence::Arch::Frn => {
                    cfg.var_v.unwrap() * v + cfg.var_a.unwrap() + p
                }
            };
            let lf = l as f64;
            if l == 1000 {
                dev_1e3 = p - (b0 * lf + b1 * lf.sqrt() + b2 * lf.ln());
            }
            if l == 10_000 {
                dev_1e4 = p - (b0 * lf + b1 * lf.sqrt() + b2 * lf.ln());
            }
        }
        let drift = (dev_1e4 - dev_1e3).abs();
        if drift > 0.5 {
            pass = false;
        }
        details.push(format!(
            "var_w={} remainder {:.3} -> {:.3} (drift {:.3})",
            cfg.var_w, dev_1e3, dev_1e4, drift
        ));
    }
    check("tanh_p_expansion_bounded", pass, details.join("; "))
}

/// Fixed-point residual, the δ* range over a ρ grid, and scale invariance.
fn check_tanh_fixed_point() -> Check {
    let mut fails = Vec::new();
    let fp = tanh_frn_fixed_point(BENCH.2, BENCH.3).unwrap();
    if fp.residual >= 1e-12 {
        fails.push(format!("benchmark residual {:.2e}", fp.residual));
    }
    for i in 0..50 {
        let rho = 100.0 * i as f64 / 49.0;
        let fp = tanh_frn_fixed_point(1.0, rho * rho).unwrap();
        if !(fp.exponent >= 1.0 - 2.0 / PI - 1e-12 && fp.exponent < 0.5) {
            fails.push(format!("delta* out of range at rho={rho}: {}", fp.exponent));
        }
    }
    for k in [0.5, 2.0, 10.0] {
        let a = tanh_frn_fixed_point(1.5, 0.5).unwrap();
        let b = tanh_frn_fixed_point(1.5 * k, 0.5 * k).unwrap();
        if (a.e_star - b.e_star).abs() > 1e-12 || (a.exponent - b.exponent).abs() > 1e-12 {
            fails.push(format!("scale invariance broken at k={k}"));
        }
    }
    check(
        "tanh_fixed_point",
        fails.is_empty(),
        if fails.is_empty() {
            format!(
                "residual {:.1e}; delta* in [1-2/pi, 1/2) on 50-point rho grid; \
                 ratio-invariant under rescaling",
                fp.residual
            )
        } else {
            fails.join("; ")
        },
    )
}

/// `log(ℵ^m/ℵ^l)` from the backward recurrence against
/// `𝒜(√l−√m) + ℬ(log l − log m)` within an additive O(1) band of 2.
fn check_tanh_gradient_law() -> Check {
    let mut details = Vec::new();
    let mut pass = true;
    let configs = [
        (0.25, 0.25, 0.25, 0.25),
        (0.5, 0.5, 0.5, 0.5),
        (0.5, 0.25, 0.25, 0.5),
        (0.5, 0.5, 1.0, 0.5),
    ];
    for (vw, vb, vv, va) in configs {
        let cfg = NetConfig::frn(Activation::Tanh, vw, vb, vv, va, 4000).unwrap();
        let law = tanh_grad_coefficients(&cfg).unwrap();
        let (ca, cb) = (
            law.coefficient("A").unwrap(),
            law.coefficient("B").unwrap(),
        );
        // cumulative log multipliers of the backward recurrence
        let mut p = 1.0;
        let mut cum = vec![0.0f64; 4001];
        for l in 1..=4000usize {
            let q = vw * p + vb;
            let v = v_transform(&Activation::Tanh, q, &spec()).unwrap().value;
            let vd = v_deriv_transform(&Activation::Tanh, q, &spec()).unwrap().value;
            cum[l] = cum[l - 1] + (vv * vw * vd + 1.0).ln();
            p = vv * v + va + p;
        }
        let l = 4000usize;
        for m in [1000usize, 2000] {
            let lhs = cum[l] - cum[m];
            let pred = ca * ((l as f64).sqrt() - (m as f64).sqrt())
                + cb * ((l as f64).ln() - (m as f64).ln());
            let dev = (lhs - pred).abs();
            if dev >= 2.0 {
                pass = false;
            }
            details.push(format!("vw={vw} m={m}: deviation {dev:.4}"));
        }
    }
    check("tanh_gradient_law", pass, details.join("; "))
}

/// Fitted log–log slope of `p^l` equals `1/(1−α)` ± 0.05 on [500, 2000],
/// and `p/l^{1/(1−α)}` is within 10% of `K₁` at depth 2000 for α = 0.55.
fn check_alpha_relu_forward_exponents() -> Check {
    let mut details = Vec::new();
    let mut pass = true;
    for &alpha in &[0.55, 0.7] {
        let cfg = bench_net(Activation::alpha_relu(alpha).unwrap(), 2000);
        let t = forward(&cfg, 1.0, 0.5, &spec()).unwrap();
        let slope = fit_exponent(&t.p, 500, 2000).unwrap();
        let target = 1.0 / (1.0 - alpha);
        if (slope - target).abs() > 0.05 {
            pass = false;
        }
        details.push(format!("alpha={alpha}: slope {slope:.4} vs {target:.4}"));
        if alpha == 0.55 {
            let law = mfrn::asymptotics::alpha_relu_p_coefficients(&cfg).unwrap();
            let k1 = law.coefficient("K1").unwrap();
            let ratio = t.p[2000] / (k1 * 2000f64.powf(target));
            if (ratio - 1.0).abs() > 0.10 {
                pass = false;
            }
            details.push(format!("K1 ratio {ratio:.4}"));
        }
    }
    check("alpha_relu_forward_exponents", pass, details.join("; "))
}

/// Fitted slope of `log(ℵ⁰/ℵ^l)` against `log l` equals `R(α)` ± 0.1 on
/// [500, 2000]; spot checks R(3/4) = 4.5 and R(2/3) = 4 exactly.
fn check_alpha_relu_backward_exponents() -> Check {
    let mut details = Vec::new();
    let mut pass = true;
    for &alpha in &[0.8, 0.9] {
        let cfg = bench_net(Activation::alpha_relu(alpha).unwrap(), 2000);
        let t = forward(&cfg, 1.0, 0.5, &spec()).unwrap();
        let b = backward(&cfg, &t, 1.0, &spec()).unwrap();
        // ratio series daleth^0 / daleth^l, indexed by l
        let mut ratio = vec![0.0; 2001];
        for l in 1..=2000 {
            ratio[l] = b.daleth[0] / b.daleth[l];
        }
        let slope = fit_exponent(&ratio, 500, 2000).unwrap();
        let r = alpha_relu_grad_exponent(alpha)
            .unwrap()
            .coefficient("R")
            .unwrap();
        if (slope - r).abs() > 0.1 {
            pass = false;
        }
        details.push(format!("alpha={alpha}: slope {slope:.4} vs R {r:.4}"));
    }
    let r34 = alpha_relu_grad_exponent(0.75).unwrap().coefficient("R").unwrap();
    let r23 = alpha_relu_grad_exponent(2.0 / 3.0)
        .unwrap()
        .coefficient("R")
        .unwrap();
    if (r34 - 4.5).abs() > 1e-12 || (r23 - 4.0).abs() > 1e-12 {
        pass = false;
        details.push(format!("spot values R(3/4)={r34} R(2/3)={r23}"));
    }
    check("alpha_relu_backward_exponents", pass, details.join("; "))
}

/// ReLU e-convergence: fitted slope of `1 − e^l` reaches −2 ± 0.2 once the
/// asymptotic regime is entered (window [200, 600]; the acceptance suite
/// also probes the literal [20, 60] clause, which sits before the regime).
fn check_relu_e_convergence(window: (usize, usize), name: &str) -> Check {
    let cfg = bench_net(Activation::alpha_relu(1.0).unwrap(), window.1);
    let mut details = Vec::new();
    let mut pass = true;
    for &e0 in &[0.2, 0.5] {
        let t = forward(&cfg, 1.0, e0, &spec()).unwrap();
        if t.last_layer() < window.1 {
            pass = false;
            details.push(format!("overflow before layer {}", window.1));
            continue;
        }
        let one_minus_e: Vec<f64> = t.e.iter().map(|&e| 1.0 - e).collect();
        let slope = fit_exponent(&one_minus_e, window.0, window.1).unwrap();
        if (slope + 2.0).abs() > 0.2 {
            pass = false;
        }
        details.push(format!("e0={e0}: slope {slope:.4}"));
    }
    let law = relu_e_convergence(BENCH.2, BENCH.0).unwrap();
    details.push(format!(
        "U={:.5} B={:.4}",
        law.coefficient("U").unwrap(),
        law.coefficient("B").unwrap()
    ));
    check(name, pass, details.join("; "))
}

/// 𝕁_α is nondecreasing and convex on [0, 1] (discrete second differences
/// ≥ −1e−7 on a 100-point grid).
fn check_j_alpha_shape() -> Check {
    let mut fails = Vec::new();
    for &alpha in &[0.6, 0.8, 1.0] {
        let n = 100;
        let vals: Vec<f64> = (0..=n)
            .map(|i| j_alpha(alpha, i as f64 / n as f64).unwrap().value)
            .collect();
        for i in 1..=n {
            if vals[i] < vals[i - 1] - 1e-12 {
                fails.push(format!("J_{alpha} decreasing at node {i}"));
            }
        }
        for i in 1..n {
            let second = vals[i + 1] - 2.0 * vals[i] + vals[i - 1];
            if second < -1e-7 {
                fails.push(format!("J_{alpha} concave at node {i}: {second:.2e}"));
            }
        }
    }
    check(
        "j_alpha_monotone_convex",
        fails.is_empty(),
        if fails.is_empty() {
            "nondecreasing and convex on [0,1] for alpha in {0.6, 0.8, 1.0}".into()
        } else {
            fails.join("; ")
        },
    )
}

/// `Vṫanh(q) ≥ 1/√(4q+1)` and the √q tail constants of `Vtanh`, `Vṫanh`.
fn check_tanh_transform_bounds() -> Check {
    let mut fails = Vec::new();
    for &q in &[0.1, 1.0, 10.0, 100.0] {
        let v = v_deriv_transform(&Activation::Tanh, q, &spec()).unwrap().value;
        let bound = 1.0 / (4.0 * q + 1.0).sqrt();
        if v < bound {
            fails.push(format!("lower bound violated at q={q}: {v} < {bound}"));
        }
    }
    let sqrt_2_over_pi = (2.0 / PI).sqrt();
    for &q in &[100.0, 1000.0, 10_000.0] {
        let v = v_transform(&Activation::Tanh, q, &spec()).unwrap().value;
        let ratio = (1.0 - v) * q.sqrt() / sqrt_2_over_pi;
        if !(0.8..=1.2).contains(&ratio) {
            fails.push(format!("1 - Vtanh tail ratio at q={q}: {ratio}"));
        }
    }
    let vd = v_deriv_transform(&Activation::Tanh, 1e4, &spec()).unwrap().value;
    let limit = vd * 1e4f64.sqrt();
    if (limit - 2.0 / 3.0 * sqrt_2_over_pi).abs() > 0.01 {
        fails.push(format!("sqrt(q) Vdot-tanh constant {limit:.4} vs 0.5319"));
    }
    check(
        "tanh_transform_bounds",
        fails.is_empty(),
        if fails.is_empty() {
            format!("sqrt(q)*Vdot -> {limit:.4} (0.5319 expected); lower bound holds")
        } else {
            fails.join("; ")
        },
    )
}

/// `Wφ(q, cq)` is nondecreasing in c on [0, 1].
fn check_w_monotone() -> Check {
    let mut fails = Vec::new();
    for (label, act) in [
        ("tanh", Activation::Tanh),
        ("alpha_relu(0.7)", Activation::alpha_relu(0.7).unwrap()),
    ] {
        for &q in &[0.4, 5.0] {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=10 {
                let c = i as f64 / 10.0;
                let w = w_transform(&act, q, c, &spec()).unwrap().value;
                if w < prev - 1e-9 {
                    fails.push(format!("{label} q={q}: W decreases at c={c}"));
                }
                prev = w;
            }
        }
    }
    check(
        "w_monotone_in_c",
        fails.is_empty(),
        if fails.is_empty() {
            "nondecreasing on the c grid for tanh and alpha-ReLU".into()
        } else {
            fails.join("; ")
        },
    )
}

/// `χ_w` of the ReLU FRN is constant across layers within 1%.
fn check_chi_w_constant() -> Check {
    let cfg = bench_net(Activation::alpha_relu(1.0).unwrap(), 50);
    let t = forward(&cfg, 1.0, 0.5, &spec()).unwrap();
    let b = backward(&cfg, &t, 1.0, &spec()).unwrap();
    let window: Vec<f64> = (10..=50).map(|k| b.chi_w[k]).collect();
    let max = window.iter().cloned().fold(f64::MIN, f64::max);
    let min = window.iter().cloned().fold(f64::MAX, f64::min);
    let spread = (max - min) / min;
    check(
        "relu_chi_w_depth_independent",
        spread < 0.01,
        format!("relative spread {spread:.4e} over layers 10..=50 (tolerance 1%)"),
    )
}

/// Byte-identical outputs for identical seeds.
fn check_determinism() -> Check {
    let cfg = bench_net(Activation::Tanh, 6);
    let sim = SimSpec {
        width: 24,
        runs: 3,
        seed: 2024,
        backward_mode: mfrn::simulator::BackwardMode::IndependentWeights,
        last_grad: mfrn::simulator::LastGrad::SignVector,
    };
    let a = simulate_forward(&cfg, &sim, 1.0, 0.5).unwrap().to_csv();
    let b = simulate_forward(&cfg, &sim, 1.0, 0.5).unwrap().to_csv();
    let t1 = forward(&cfg, 1.0, 0.5, &spec()).unwrap().to_csv();
    let t2 = forward(&cfg, 1.0, 0.5, &spec()).unwrap().to_csv();
    check(
        "determinism",
        a == b && t1 == t2,
        "repeated runs with one seed are byte-identical".into(),
    )
}

// --- strict-profile literal clauses -------------------------------------

fn strict_tanh_rrn_p_over_l() -> Check {
    let mut details = Vec::new();
    let mut pass = true;
    for &vw in &[0.5, 1.0, 2.0] {
        let mut p = 1.0_f64;
        for _ in 1..=10_000usize {
            let q = vw * p + 0.5;
            p += v_transform(&Activation::Tanh, q, &spec()).unwrap().value;
        }
        let ratio = p / 10_000.0;
        if !(0.99..=1.01).contains(&ratio) {
            pass = false;
        }
        details.push(format!("var_w={vw}: p/l = {ratio:.5}"));
    }
    check(
        "strict_criterion5_tanh_rrn_linear_growth",
        pass,
        format!(
            "{} [literal band [0.99, 1.01] at l = 1e4; the sqrt-order deficit \
             2*sqrt(2/pi)/(sigma_w*sqrt(l)) has not decayed yet]",
            details.join("; ")
        ),
    )
}

fn strict_tanh_e_diff_slope() -> Check {
    let cfg = bench_net(Activation::Tanh, 2000);
    let fp = tanh_frn_fixed_point(BENCH.2, BENCH.3).unwrap();
    let target = -fp.exponent - 1.0;
    let mut details = Vec::new();
    let mut pass = true;
    for &e0 in &[0.3, 0.5, 0.9] {
        let t = forward(&cfg, 1.0, e0, &spec()).unwrap();
        let mut diff = vec![0.0; t.e.len()];
        for l in 1..t.e.len() {
            diff[l] = (t.e[l] - t.e[l - 1]).abs();
        }
        let slope = fit_exponent(&diff, 400, 2000).unwrap();
        if (slope - target).abs() > 0.05 {
            pass = false;
        }
        details.push(format!("e0={e0}: slope {slope:.4} vs {target:.4}"));
    }
    check(
        "strict_criterion6_tanh_e_diff_slope",
        pass,
        format!(
            "{} [literal +-0.05 on layers 400..2000; the slope approaches its \
             limit with O(l^-1/2) corrections and is still ~0.13-0.19 short]",
            details.join("; ")
        ),
    )
}

fn strict_relu_e_slope_early_window() -> Check {
    let inner = check_relu_e_convergence((20, 60), "inner");
    check(
        "strict_criterion10_relu_e_slope_20_60",
        inner.passed,
        format!(
            "{} [literal window 20..60; the l^-2 law sets in near l ~ 200]",
            inner.detail
        ),
    )
}

pub fn run_profile(profile: &str) -> Result<VerifyReport> {
    let checks: Vec<Check> = match profile {
        "kernel-identities" => vec![check_kernel_factorization(), check_bessel_identities()],
        "strict" => {
            let mut v = default_checks();
            v.push(strict_tanh_rrn_p_over_l());
            v.push(strict_tanh_e_diff_slope());
            v.push(strict_relu_e_slope_early_window());
            v
        }
        "default" => default_checks(),
        other => anyhow::bail!("unknown profile {other:?} (default | kernel-identities | strict)"),
    };
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        profile: profile.to_string(),
        checks,
        all_passed,
    })
}

fn default_checks() -> Vec<Check> {
    vec![
        check_v_closed_vs_quadrature(),
        check_kernel_factorization(),
        check_bessel_identities(),
        check_relu_exactness(),
        check_tanh_p_expansion(),
        check_tanh_fixed_point(),
        check_tanh_gradient_law(),
        check_alpha_relu_forward_exponents(),
        check_alpha_relu_backward_exponents(),
        check_relu_e_convergence((200, 600), "relu_e_convergence_slope"),
        check_j_alpha_shape(),
        check_tanh_transform_bounds(),
        check_w_monotone(),
        check_chi_w_constant(),
        check_determinism(),
    ]
}
