//! Exact layerwise mean-field recurrences for residual networks.
//!
//! Reduced (RRN): `x = φ(h) + x̲`, full (FRN): `x = v·φ(h) + x̲ + a`, with
//! `h = w·x̲ + b`. In the infinite-width limit the squared lengths and
//! cross-input correlations obey
//!
//! ```text
//! q = σ_w² p̲ + σ_b²            λ = σ_w² γ̲ + σ_b²
//! p = [σ_v²] Vφ(q) + [σ_a²] + p̲   γ = [σ_v²] Wφ(q, λ) + [σ_a²] + γ̲
//! ```
//!
//! with the bracketed factors present only for the FRN, and the backward
//! gradient norm satisfies `ℵ̲ = ([σ_v²]·σ_w²·Vφ̇(q) + 1)·ℵ`.

use crate::nonlin::Activation;
use crate::quad::QuadratureSpec;
use crate::transforms::{
    j_alpha, v_deriv_transform, v_dot_psi_closed, v_psi_closed, v_transform, w_transform,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Residual architecture family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arch {
    Rrn,
    Frn,
}

/// Architecture, initialization variances and depth.
///
/// `var_v`/`var_a` are the variances of the post-nonlinearity affine map and
/// exist only for the FRN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetConfig {
    pub arch: Arch,
    pub activation: Activation,
    pub var_w: f64,
    pub var_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var_a: Option<f64>,
    pub depth: usize,
}

impl NetConfig {
    pub fn rrn(activation: Activation, var_w: f64, var_b: f64, depth: usize) -> Result<Self> {
        let cfg = NetConfig {
            arch: Arch::Rrn,
            activation,
            var_w,
            var_b,
            var_v: None,
            var_a: None,
            depth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn frn(
        activation: Activation,
        var_w: f64,
        var_b: f64,
        var_v: f64,
        var_a: f64,
        depth: usize,
    ) -> Result<Self> {
        let cfg = NetConfig {
            arch: Arch::Frn,
            activation,
            var_w,
            var_b,
            var_v: Some(var_v),
            var_a: Some(var_a),
            depth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.activation.validate()?;
        for (name, v) in [("var_w", Some(self.var_w)), ("var_b", Some(self.var_b))] {
            let v = v.unwrap();
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be >= 1".into()));
        }
        match self.arch {
            Arch::Rrn => {
                if self.var_v.is_some() || self.var_a.is_some() {
                    return Err(Error::Config(
                        "RRN configs carry no var_v / var_a".into(),
                    ));
                }
                // the RRN length/correlation recurrences hold for
                // antisymmetric activations only
                if !self.activation.is_antisymmetric() {
                    return Err(Error::Config(
                        "RRN requires an antisymmetric activation (tanh); \
                         rectified kinds need the FRN"
                            .into(),
                    ));
                }
            }
            Arch::Frn => {
                let (Some(vv), Some(va)) = (self.var_v, self.var_a) else {
                    return Err(Error::Config(
                        "FRN configs need both var_v and var_a".into(),
                    ));
                };
                if !(vv >= 0.0 && vv.is_finite()) || !(va >= 0.0 && va.is_finite()) {
                    return Err(Error::Config(format!(
                        "var_v / var_a must be >= 0, got {vv} / {va}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// σ_v² for the FRN, the implicit 1 for the RRN.
    fn branch_var(&self) -> f64 {
        match self.arch {
            Arch::Rrn => 1.0,
            Arch::Frn => self.var_v.unwrap_or(1.0),
        }
    }

    /// σ_a² for the FRN, 0 for the RRN.
    fn bias_var(&self) -> f64 {
        match self.arch {
            Arch::Rrn => 0.0,
            Arch::Frn => self.var_a.unwrap_or(0.0),
        }
    }

    /// The per-layer gradient multiplier is `mult·Vφ̇(q) + 1`.
    fn grad_mult(&self) -> f64 {
        self.branch_var() * self.var_w
    }
}

/// Per-layer forward statistics. Index `l` runs from 0 (input) to the last
/// finite layer; `q`/`lambda` are undefined at layer 0 and stored as NaN
/// (so derived equality would be vacuous; compare through `to_csv`).
#[derive(Debug, Clone)]
pub struct ForwardTrajectory {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Angular expressivity `e = γ/p`.
    pub e: Vec<f64>,
    /// Metric expressivity `s = p − γ = (1 − e)·p`.
    pub s: Vec<f64>,
    /// True when the iteration left f64 range and was truncated early.
    pub overflow: bool,
}

impl ForwardTrajectory {
    /// Last computed layer index.
    pub fn last_layer(&self) -> usize {
        self.p.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,p,q,gamma,lambda,e,s\n");
        for l in 0..self.p.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                l, self.p[l], self.q[l], self.gamma[l], self.lambda[l], self.e[l], self.s[l]
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != "layer,p,q,gamma,lambda,e,s" {
            return Err(Error::Config(format!(
                "unexpected forward trajectory header: {header}"
            )));
        }
        let mut t = ForwardTrajectory {
            p: vec![],
            q: vec![],
            gamma: vec![],
            lambda: vec![],
            e: vec![],
            s: vec![],
            overflow: false,
        };
        for (i, line) in lines.enumerate() {
            let cols = parse_row(line, 7, i)?;
            t.p.push(cols[1]);
            t.q.push(cols[2]);
            t.gamma.push(cols[3]);
            t.lambda.push(cols[4]);
            t.e.push(cols[5]);
            t.s.push(cols[6]);
        }
        Ok(t)
    }
}

/// Per-layer backward statistics. `daleth[l]` is the squared gradient norm
/// with respect to layer-`l` activations; the `chi_*` hold parameter
/// gradients and are undefined at layer 0 (stored as NaN). `chi_v`/`chi_a`
/// exist only for the FRN.
#[derive(Debug, Clone)]
pub struct BackwardTrajectory {
    pub daleth: Vec<f64>,
    pub chi_b: Vec<f64>,
    pub chi_w: Vec<f64>,
    pub chi_v: Option<Vec<f64>>,
    pub chi_a: Option<Vec<f64>>,
    /// Set for α-ReLU with α ∈ (1/2, 3/4]: the mean-field value exists but
    /// the empirical gradient variance diverges, so simulations will not
    /// concentrate around it.
    pub variance_warning: bool,
}

impl BackwardTrajectory {
    pub fn last_layer(&self) -> usize {
        self.daleth.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,daleth,chi_b,chi_w,chi_v,chi_a\n");
        for l in 0..self.daleth.len() {
            let cv = self
                .chi_v
                .as_ref()
                .map_or(String::new(), |v| format!("{}", v[l]));
            let ca = self
                .chi_a
                .as_ref()
                .map_or(String::new(), |v| format!("{}", v[l]));
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                l, self.daleth[l], self.chi_b[l], self.chi_w[l], cv, ca
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != "layer,daleth,chi_b,chi_w,chi_v,chi_a" {
            return Err(Error::Config(format!(
                "unexpected backward trajectory header: {header}"
            )));
        }
        let mut daleth = vec![];
        let mut chi_b = vec![];
        let mut chi_w = vec![];
        let mut chi_v: Vec<f64> = vec![];
        let mut chi_a: Vec<f64> = vec![];
        let mut has_va = false;
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(Error::Config(format!("row {i}: expected 6 columns")));
            }
            daleth.push(parse_f64(cols[1], i)?);
            chi_b.push(parse_f64(cols[2], i)?);
            chi_w.push(parse_f64(cols[3], i)?);
            if !cols[4].is_empty() {
                has_va = true;
                chi_v.push(parse_f64(cols[4], i)?);
                chi_a.push(parse_f64(cols[5], i)?);
            }
        }
        Ok(BackwardTrajectory {
            daleth,
            chi_b,
            chi_w,
            chi_v: has_va.then_some(chi_v),
            chi_a: has_va.then_some(chi_a),
            variance_warning: false,
        })
    }
}

fn parse_f64(s: &str, row: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Config(format!("row {row}: bad float {s:?}")))
}

fn parse_row(line: &str, n: usize, row: usize) -> Result<Vec<f64>> {
    let cols: Vec<&str> = line.split(',').collect();
    if cols.len() != n {
        return Err(Error::Config(format!(
            "row {row}: expected {n} columns, got {}",
            cols.len()
        )));
    }
    cols.iter().map(|s| parse_f64(s, row)).collect()
}

/// Whether the forward/backward V and W evaluations can use the α-ReLU
/// closed forms instead of quadrature.
fn closed_form_alpha(cfg: &NetConfig) -> Option<f64> {
    match cfg.activation {
        Activation::AlphaRelu { alpha } => Some(alpha),
        _ => None,
    }
}

/// Iterates the forward recurrences from `p⁰ = p0`, `γ⁰ = e0·p0`.
///
/// Overflow to non-finite values truncates the trajectory at the last
/// finite layer and sets the `overflow` flag (expected for ReLU FRN at
/// large depth).
pub fn forward(
    cfg: &NetConfig,
    p0: f64,
    e0: f64,
    spec: &QuadratureSpec,
) -> Result<ForwardTrajectory> {
    cfg.validate()?;
    spec.validate()?;
    if !(p0 > 0.0) || !p0.is_finite() {
        return Err(Error::Domain(format!("forward: p0 must be > 0, got {p0}")));
    }
    if !(-1.0..=1.0).contains(&e0) {
        return Err(Error::Domain(format!(
            "forward: e0 must lie in [-1, 1], got {e0}"
        )));
    }
    let alpha = closed_form_alpha(cfg);
    let bv = cfg.branch_var();
    let av = cfg.bias_var();

    let mut t = ForwardTrajectory {
        p: vec![p0],
        q: vec![f64::NAN],
        gamma: vec![e0 * p0],
        lambda: vec![f64::NAN],
        e: vec![e0],
        s: vec![p0 - e0 * p0],
        overflow: false,
    };
    for _ in 1..=cfg.depth {
        let p_prev = *t.p.last().unwrap();
        let g_prev = *t.gamma.last().unwrap();
        let q = cfg.var_w * p_prev + cfg.var_b;
        let lambda = cfg.var_w * g_prev + cfg.var_b;
        if !q.is_finite() {
            t.overflow = true;
            break;
        }
        let (v, w) = match alpha {
            Some(al) => {
                let v = v_psi_closed(al, q)?;
                let c = (lambda / q).clamp(-1.0, 1.0);
                let w = if c == 1.0 {
                    v
                } else {
                    v * j_alpha(al, c)?.value
                };
                (v, w)
            }
            None => {
                let v = v_transform(&cfg.activation, q, spec)?.value;
                let c = (lambda / q).clamp(-1.0, 1.0);
                let w = if c == 1.0 {
                    v
                } else {
                    w_transform(&cfg.activation, q, c, spec)?.value
                };
                (v, w)
            }
        };
        let p = bv * v + av + p_prev;
        let gamma = bv * w + av + g_prev;
        if !p.is_finite() || !gamma.is_finite() {
            t.overflow = true;
            break;
        }
        t.p.push(p);
        t.q.push(q);
        t.gamma.push(gamma);
        t.lambda.push(lambda);
        t.e.push(gamma / p);
        t.s.push(p - gamma);
    }
    Ok(t)
}

/// Iterates the backward gradient recurrence from `ℵ^L = daleth_l` down to
/// layer 0, together with the parameter-gradient norms.
pub fn backward(
    cfg: &NetConfig,
    fwd: &ForwardTrajectory,
    daleth_l: f64,
    spec: &QuadratureSpec,
) -> Result<BackwardTrajectory> {
    cfg.validate()?;
    spec.validate()?;
    cfg.activation.validate_for_gradients()?;
    if !(daleth_l > 0.0) || !daleth_l.is_finite() {
        return Err(Error::Domain(format!(
            "backward: daleth_L must be > 0, got {daleth_l}"
        )));
    }
    if fwd.overflow {
        return Err(Error::Domain(
            "backward: forward trajectory overflowed; backward pass needs a \
             finite trajectory through its full depth"
                .into(),
        ));
    }
    let depth = fwd.last_layer();
    if depth == 0 {
        return Err(Error::Domain("backward: empty forward trajectory".into()));
    }

    let variance_warning = matches!(
        cfg.activation,
        Activation::AlphaRelu { alpha } if alpha <= 0.75
    );
    let alpha = closed_form_alpha(cfg);
    let bv = cfg.branch_var();
    let mult = cfg.grad_mult();
    let is_frn = cfg.arch == Arch::Frn;

    let mut daleth = vec![0.0; depth + 1];
    let mut chi_b = vec![f64::NAN; depth + 1];
    let mut chi_w = vec![f64::NAN; depth + 1];
    let mut chi_v = is_frn.then(|| vec![f64::NAN; depth + 1]);
    let mut chi_a = is_frn.then(|| vec![f64::NAN; depth + 1]);

    daleth[depth] = daleth_l;
    for l in (1..=depth).rev() {
        let q = fwd.q[l];
        let (v_dot, v) = match alpha {
            Some(al) => (v_dot_psi_closed(al, q)?, v_psi_closed(al, q)?),
            None => (
                v_deriv_transform(&cfg.activation, q, spec)?.value,
                v_transform(&cfg.activation, q, spec)?.value,
            ),
        };
        let d = daleth[l];
        chi_b[l] = bv * d * v_dot;
        chi_w[l] = bv * d * v_dot * fwd.p[l - 1];
        if let Some(cv) = chi_v.as_mut() {
            cv[l] = d * v;
        }
        if let Some(ca) = chi_a.as_mut() {
            ca[l] = d;
        }
        daleth[l - 1] = (mult * v_dot + 1.0) * d;
    }
    Ok(BackwardTrajectory {
        daleth,
        chi_b,
        chi_w,
        chi_v,
        chi_a,
        variance_warning,
    })
}
