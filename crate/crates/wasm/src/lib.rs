//! Browser bindings for the mean-field engine: three interactive
//! operations behind `wasm-bindgen`, each taking plain numbers and
//! returning JSON for the demo page to plot.
//!
//! Build with `wasm-pack build crates/wasm --target web` (or
//! `cargo build -p mfrn-wasm --target wasm32-unknown-unknown` plus
//! `wasm-bindgen`); the same functions compile natively for tests.

use mfrn::asymptotics::{alpha_relu_e_fixed_point, alpha_relu_grad_exponent, tanh_frn_fixed_point};
use mfrn::nonlin::Activation;
use mfrn::quad::QuadratureSpec;
use mfrn::recurrence::{backward, forward, NetConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Curves {
    layers: Vec<usize>,
    series: Vec<Series>,
    overflow: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct Series {
    name: String,
    e0: f64,
    values: Vec<f64>,
}

fn net_from_args(
    activation: &str,
    alpha: f64,
    var_w: f64,
    var_b: f64,
    var_v: f64,
    var_a: f64,
    depth: usize,
) -> Result<NetConfig, mfrn::Error> {
    let act = match activation {
        "tanh" => Activation::Tanh,
        "alpha_relu" => Activation::alpha_relu(alpha)?,
        other => {
            return Err(mfrn::Error::Config(format!(
                "unknown activation {other:?} (tanh | alpha_relu)"
            )))
        }
    };
    NetConfig::frn(act, var_w, var_b, var_v, var_a, depth)
}

fn err_json(e: impl std::fmt::Display) -> String {
    serde_json::to_string(&Curves {
        layers: vec![],
        series: vec![],
        overflow: false,
        error: Some(e.to_string()),
    })
    .unwrap()
}

/// Forward trajectories: per-layer `p`, `e`, `s` curves for a grid of
/// initial correlations `e0`.
#[wasm_bindgen]
pub fn forward_curves(
    activation: &str,
    alpha: f64,
    var_w: f64,
    var_b: f64,
    var_v: f64,
    var_a: f64,
    depth: usize,
) -> String {
    let cfg = match net_from_args(activation, alpha, var_w, var_b, var_v, var_a, depth) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let spec = QuadratureSpec::default();
    let mut out = Curves {
        layers: vec![],
        series: vec![],
        overflow: false,
        error: None,
    };
    for e0 in [0.1, 0.3, 0.5, 0.7, 0.9] {
        match forward(&cfg, 1.0, e0, &spec) {
            Ok(t) => {
                if out.layers.len() < t.p.len() {
                    out.layers = (0..t.p.len()).collect();
                }
                out.overflow |= t.overflow;
                out.series.push(Series {
                    name: "p".into(),
                    e0,
                    values: t.p.clone(),
                });
                out.series.push(Series {
                    name: "e".into(),
                    e0,
                    values: t.e.clone(),
                });
                out.series.push(Series {
                    name: "s".into(),
                    e0,
                    values: t.s.clone(),
                });
            }
            Err(e) => return err_json(e),
        }
    }
    serde_json::to_string(&out).unwrap()
}

/// Backward gradient norms: per-layer `ℵ` and parameter-gradient norms.
#[wasm_bindgen]
pub fn gradient_curves(
    activation: &str,
    alpha: f64,
    var_w: f64,
    var_b: f64,
    var_v: f64,
    var_a: f64,
    depth: usize,
) -> String {
    let cfg = match net_from_args(activation, alpha, var_w, var_b, var_v, var_a, depth) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let spec = QuadratureSpec::default();
    let fwd = match forward(&cfg, 1.0, 0.5, &spec) {
        Ok(t) => t,
        Err(e) => return err_json(e),
    };
    if fwd.overflow {
        return err_json("forward trajectory overflowed before the requested depth");
    }
    match backward(&cfg, &fwd, 1.0, &spec) {
        Ok(b) => {
            let mut out = Curves {
                layers: (0..b.daleth.len()).collect(),
                series: vec![
                    Series {
                        name: "daleth".into(),
                        e0: f64::NAN,
                        values: b.daleth.clone(),
                    },
                    Series {
                        name: "chi_b".into(),
                        e0: f64::NAN,
                        values: b.chi_b.clone(),
                    },
                    Series {
                        name: "chi_w".into(),
                        e0: f64::NAN,
                        values: b.chi_w.clone(),
                    },
                ],
                overflow: false,
                error: None,
            };
            if let Some(cv) = b.chi_v {
                out.series.push(Series {
                    name: "chi_v".into(),
                    e0: f64::NAN,
                    values: cv,
                });
            }
            serde_json::to_string(&out).unwrap()
        }
        Err(e) => err_json(e),
    }
}

#[derive(Serialize)]
struct FixedPointScan {
    x: Vec<f64>,
    e_star: Vec<f64>,
    exponent: Vec<f64>,
    label: String,
    error: Option<String>,
}

/// Fixed points and convergence exponents as a function of one knob:
/// the ratio σ_a/σ_v for tanh, α itself for α-ReLU.
#[wasm_bindgen]
pub fn fixed_point_scan(activation: &str, points: usize) -> String {
    let n = points.clamp(2, 400);
    let mut out = FixedPointScan {
        x: vec![],
        e_star: vec![],
        exponent: vec![],
        label: String::new(),
        error: None,
    };
    match activation {
        "tanh" => {
            out.label = "rho = sigma_a / sigma_v".into();
            for i in 0..n {
                let rho = 4.0 * i as f64 / (n - 1) as f64;
                match tanh_frn_fixed_point(1.0, rho * rho) {
                    Ok(fp) => {
                        out.x.push(rho);
                        out.e_star.push(fp.e_star);
                        out.exponent.push(fp.exponent);
                    }
                    Err(e) => {
                        out.error = Some(e.to_string());
                        break;
                    }
                }
            }
        }
        "alpha_relu" => {
            out.label = "alpha".into();
            for i in 0..n {
                let alpha = 0.55 + 0.40 * i as f64 / (n - 1) as f64;
                match alpha_relu_e_fixed_point(alpha) {
                    Ok(fp) => {
                        out.x.push(alpha);
                        out.e_star.push(fp.e_star);
                        out.exponent.push(fp.exponent);
                    }
                    Err(e) => {
                        out.error = Some(e.to_string());
                        break;
                    }
                }
            }
        }
        "alpha_relu_grad" => {
            out.label = "alpha (gradient exponent R)".into();
            for i in 0..n {
                let alpha = 0.76 + 0.23 * i as f64 / (n - 1) as f64;
                match alpha_relu_grad_exponent(alpha) {
                    Ok(law) => {
                        out.x.push(alpha);
                        out.e_star.push(f64::NAN);
                        out.exponent.push(law.coefficient("R").unwrap_or(f64::NAN));
                    }
                    Err(e) => {
                        out.error = Some(e.to_string());
                        break;
                    }
                }
            }
        }
        other => out.error = Some(format!("unknown scan {other:?}")),
    }
    serde_json::to_string(&out).unwrap()
}
