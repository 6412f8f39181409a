//! `sweep`: depth/variance grids of the quantities that predict trained
//! performance — the gradient log-ratio `log(ℵ⁰/ℵ^L)`, the metric
//! expressivity `s^L`, and the length `p^L` — plus contour levels for
//! external plotting.

use crate::config::{AxisName, ExperimentConfig, SweepAxis};
use anyhow::{bail, Context, Result};
use mfrn::nonlin::Activation;
use mfrn::recurrence::{backward, forward, NetConfig};
use rayon::prelude::*;
use std::fs;
use std::path::Path;

const MAX_GRID: usize = 1_000_000;

struct GridRow {
    a1: f64,
    a2: f64,
    p_l: f64,
    s_l: f64,
    log_grad_ratio: f64,
    level: f64,
    overflow: bool,
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    let Some(sweep) = &cfg.sweep else {
        bail!("sweep requires a \"sweep\" section in the config");
    };
    if sweep.axis1.name == sweep.axis2.name {
        bail!("sweep axes must differ");
    }
    let n = sweep.axis1.values.len() * sweep.axis2.values.len();
    if n == 0 {
        bail!("sweep axes must be non-empty");
    }
    if n > MAX_GRID {
        bail!("sweep grid of {n} points exceeds the {MAX_GRID} limit");
    }
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let (p0, e0) = cfg.initial_conditions().first().copied().unwrap_or((1.0, 0.5));
    let points: Vec<(f64, f64)> = sweep
        .axis1
        .values
        .iter()
        .flat_map(|&a| sweep.axis2.values.iter().map(move |&b| (a, b)))
        .collect();
    let rows: Vec<GridRow> = points
        .par_iter()
        .map(|&(a1, a2)| grid_point(cfg, sweep, a1, a2, p0, e0))
        .collect::<Result<_>>()?;

    let mut csv = format!(
        "{},{},p_L,s_L,log_grad_ratio,level,overflow\n",
        sweep.axis1.name.as_str(),
        sweep.axis2.name.as_str()
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.a1, r.a2, r.p_l, r.s_l, r.log_grad_ratio, r.level, r.overflow
        ));
    }
    fs::write(out_dir.join("sweep.csv"), csv)?;

    let mut levels = String::from("quantity,level\n");
    for (name, get) in [
        (
            "log_grad_ratio",
            &(|r: &GridRow| r.log_grad_ratio) as &dyn Fn(&GridRow) -> f64,
        ),
        ("s_L", &|r| r.s_l),
        ("p_L", &|r| r.p_l),
    ] {
        let mut vals: Vec<f64> = rows.iter().map(get).filter(|v| v.is_finite()).collect();
        if vals.is_empty() {
            continue;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for decile in 1..=9 {
            let idx = (vals.len() - 1) * decile / 10;
            levels.push_str(&format!("{},{}\n", name, vals[idx]));
        }
    }
    fs::write(out_dir.join("levels.csv"), levels)?;
    println!(
        "sweep: {} grid points -> {}",
        rows.len(),
        out_dir.display()
    );
    Ok(())
}

fn apply_axis(net: &mut NetConfig, axis: &SweepAxis, value: f64) -> Result<()> {
    match axis.name {
        AxisName::VarW => net.var_w = value,
        AxisName::VarV => {
            if net.var_v.is_none() {
                bail!("var_v axis needs an FRN config");
            }
            net.var_v = Some(value);
        }
        AxisName::VarA => {
            if net.var_a.is_none() {
                bail!("var_a axis needs an FRN config");
            }
            net.var_a = Some(value);
        }
        AxisName::Alpha => match net.activation {
            Activation::AlphaRelu { .. } => {
                net.activation = Activation::AlphaRelu { alpha: value };
            }
            Activation::TemperedAlphaRelu { eps, .. } => {
                net.activation = Activation::TemperedAlphaRelu { alpha: value, eps };
            }
            Activation::Tanh => bail!("alpha axis needs an alpha-ReLU config"),
        },
        AxisName::Depth => {
            if value < 1.0 || value.fract() != 0.0 {
                bail!("depth axis values must be positive integers, got {value}");
            }
            net.depth = value as usize;
        }
    }
    Ok(())
}

fn grid_point(
    cfg: &ExperimentConfig,
    sweep: &crate::config::SweepConfig,
    a1: f64,
    a2: f64,
    p0: f64,
    e0: f64,
) -> Result<GridRow> {
    let mut net = cfg.net;
    apply_axis(&mut net, &sweep.axis1, a1)?;
    apply_axis(&mut net, &sweep.axis2, a2)?;
    net.validate()?;
    let spec = cfg.quadrature();
    let t = forward(&net, p0, e0, &spec)?;
    let last = t.last_layer();
    let log_grad_ratio = if !t.overflow && net.activation.validate_for_gradients().is_ok() {
        let b = backward(&net, &t, cfg.daleth_l(), &spec)?;
        (b.daleth[0] / b.daleth[last]).ln()
    } else {
        f64::NAN
    };
    // level quantity for iso-curves: σ_w√L sets the tanh gradient
    // log-ratio scale; for rectified kinds s^L itself is the contour
    let level = match net.activation {
        Activation::Tanh => net.var_w.sqrt() * (net.depth as f64).sqrt(),
        _ => t.s[last],
    };
    Ok(GridRow {
        a1,
        a2,
        p_l: t.p[last],
        s_l: t.s[last],
        log_grad_ratio,
        level,
        overflow: t.overflow,
    })
}
