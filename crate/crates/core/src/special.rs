//! Special functions: gamma, error function, and the modified Bessel
//! function of the second kind `K₀`.
//!
//! Gamma and erf are re-exported from `libm`. `K₀` is evaluated from its
//! integral definition `K₀(z) = ∫₁^∞ e^{−zx} (x²−1)^{−1/2} dx`; the
//! substitution `x = cosh t` removes the endpoint singularity and leaves
//! `∫₀^∞ e^{−z cosh t} dt`, which decays double-exponentially, so the
//! trapezoid rule converges geometrically.

/// Γ(x) for real x (poles at non-positive integers).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// The error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const K0_TRAP_STEPS: usize = 200;

/// `K₀(z)` for z > 0.
pub fn bessel_k0(z: f64) -> f64 {
    assert!(z > 0.0, "bessel_k0 needs z > 0");
    if z < 1e-6 {
        // K0(z) = -ln(z/2) - γ + O(z² ln z); remainder < 1e-12 here
        return -(z / 2.0).ln() - EULER_GAMMA;
    }
    if z > 740.0 {
        return 0.0; // below f64 underflow of e^{-z}
    }
    // truncate where z cosh T > 746 (integrand below 1e-324)
    let t_max = libm::acosh(746.0 / z);
    trapezoid_exp(z, t_max, false)
}

/// `e^z K₀(z)`, safe to combine with growing exponentials in integrands.
pub fn bessel_k0_scaled(z: f64) -> f64 {
    assert!(z > 0.0, "bessel_k0_scaled needs z > 0");
    if z < 1e-6 {
        return (-(z / 2.0).ln() - EULER_GAMMA) * z.exp();
    }
    // e^z K0(z) = ∫ exp(-z(cosh t - 1)) dt, cosh t - 1 = 2 sinh²(t/2)
    let t_max = libm::acosh(1.0 + 746.0 / z);
    trapezoid_exp(z, t_max, true)
}

fn trapezoid_exp(z: f64, t_max: f64, scaled: bool) -> f64 {
    let n = K0_TRAP_STEPS;
    let h = t_max / n as f64;
    let f = |t: f64| {
        if scaled {
            let s = (0.5 * t).sinh();
            (-z * 2.0 * s * s).exp()
        } else {
            (-z * t.cosh()).exp()
        }
    };
    let mut sum = 0.5 * (f(0.0) + f(t_max));
    for k in 1..n {
        sum += f(k as f64 * h);
    }
    sum * h
}
