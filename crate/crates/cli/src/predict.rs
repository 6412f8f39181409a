//! `predict`: mean-field trajectories and asymptotic laws for one config.

use crate::config::ExperimentConfig;
use anyhow::{Context, Result};
use mfrn::asymptotics::{
    alpha_relu_e_fixed_point, alpha_relu_grad_exponent, alpha_relu_p_coefficients, chi_exponents,
    relu_e_convergence, relu_p_law, tanh_frn_fixed_point, tanh_grad_coefficients,
    tanh_p_coefficients,
};
use mfrn::nonlin::Activation;
use mfrn::recurrence::{backward, forward, Arch};
use serde_json::{json, Map, Value};
use std::fs;
use std::path::Path;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let spec = cfg.quadrature();
    let mut trajectories = Vec::new();
    let gradient_ready = cfg.net.activation.validate_for_gradients().is_ok();

    for (i, &(p0, e0)) in cfg.initial_conditions().iter().enumerate() {
        let fwd = forward(&cfg.net, p0, e0, &spec)?;
        let fwd_path = out_dir.join(format!("forward_{i:02}.csv"));
        fs::write(&fwd_path, fwd.to_csv())?;
        let mut entry = json!({
            "p0": p0,
            "e0": e0,
            "forward_csv": fwd_path.file_name().unwrap().to_str(),
            "overflow": fwd.overflow,
            "last_layer": fwd.last_layer(),
        });
        if gradient_ready && !fwd.overflow {
            let bwd = backward(&cfg.net, &fwd, cfg.daleth_l(), &spec)?;
            let bwd_path = out_dir.join(format!("backward_{i:02}.csv"));
            fs::write(&bwd_path, bwd.to_csv())?;
            entry["backward_csv"] = json!(bwd_path.file_name().unwrap().to_str());
            entry["gradient_variance_warning"] = json!(bwd.variance_warning);
        }
        trajectories.push(entry);
    }

    let asym = asymptotics_json(cfg)?;
    let report = json!({
        "label": cfg.label,
        "net": serde_json::to_value(&cfg.net)?,
        "trajectories": trajectories,
        "asymptotics": asym,
    });
    fs::write(
        out_dir.join("asymptotics.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    println!(
        "predict: wrote {} trajectory set(s) and asymptotics.json to {}",
        cfg.initial_conditions().len(),
        out_dir.display()
    );
    Ok(())
}

/// Every closed-form law that applies to this configuration.
pub fn asymptotics_json(cfg: &ExperimentConfig) -> Result<Value> {
    let net = &cfg.net;
    let mut out = Map::new();
    match net.activation {
        Activation::Tanh => {
            if net.var_w > 0.0 {
                out.insert(
                    "p_expansion".into(),
                    serde_json::to_value(tanh_p_coefficients(net)?)?,
                );
            }
            out.insert(
                "grad_log_ratio".into(),
                serde_json::to_value(tanh_grad_coefficients(net)?)?,
            );
            if net.arch == Arch::Frn {
                let fp = tanh_frn_fixed_point(net.var_v.unwrap(), net.var_a.unwrap())?;
                out.insert("fixed_point".into(), serde_json::to_value(fp)?);
            }
        }
        Activation::AlphaRelu { alpha } if net.arch == Arch::Frn => {
            if alpha == 1.0 {
                let p0 = cfg.initial_conditions().first().map_or(1.0, |ic| ic.0);
                out.insert("p_closed".into(), serde_json::to_value(relu_p_law(net, p0)?)?);
                out.insert(
                    "e_convergence".into(),
                    serde_json::to_value(relu_e_convergence(
                        net.var_v.unwrap(),
                        net.var_w,
                    )?)?,
                );
                out.insert(
                    "grad_exponent".into(),
                    serde_json::to_value(alpha_relu_grad_exponent(alpha)?)?,
                );
                out.insert(
                    "chi_exponents".into(),
                    serde_json::to_value(chi_exponents(alpha)?)?,
                );
            } else if alpha < 1.0 && alpha > 0.0 {
                out.insert(
                    "p_expansion".into(),
                    serde_json::to_value(alpha_relu_p_coefficients(net)?)?,
                );
                if alpha > 0.5 {
                    out.insert(
                        "e_fixed_point".into(),
                        serde_json::to_value(alpha_relu_e_fixed_point(alpha)?)?,
                    );
                    out.insert(
                        "grad_exponent".into(),
                        serde_json::to_value(alpha_relu_grad_exponent(alpha)?)?,
                    );
                    out.insert(
                        "chi_exponents".into(),
                        serde_json::to_value(chi_exponents(alpha)?)?,
                    );
                }
            }
        }
        _ => {
            out.insert(
                "note".into(),
                json!("no closed-form asymptotics for this activation/architecture pairing"),
            );
        }
    }
    Ok(Value::Object(out))
}
