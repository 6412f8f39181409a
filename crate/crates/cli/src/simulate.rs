//! `simulate`: Monte Carlo runs of finite-width networks with a z-score
//! comparison against the mean-field recurrences.

use crate::config::{ExperimentConfig, SimPass};
use anyhow::{bail, Context, Result};
use mfrn::recurrence::{backward, forward, NetConfig};
use mfrn::simulator::{compare, simulate_backward, simulate_forward, LayerStats, Theory};
use serde_json::json;
use std::fs;
use std::path::Path;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    let Some(sim) = &cfg.sim else {
        bail!("simulate requires a \"sim\" section in the config");
    };
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let spec = cfg.quadrature();
    let pass = cfg.sim_pass.unwrap_or(SimPass::Both);
    let mut reports = Vec::new();

    if matches!(pass, SimPass::Forward | SimPass::Both) {
        for (i, &(p0, e0)) in cfg.initial_conditions().iter().enumerate() {
            let stats = simulate_forward(&cfg.net, sim, p0, e0)?;
            let path = out_dir.join(format!("stats_forward_{i:02}.csv"));
            fs::write(&path, stats.to_csv())?;
            let theory = forward(&truncated(&cfg.net, &stats), p0, e0, &spec)?;
            let report = compare(Theory::Forward(&theory), &stats)?;
            reports.push(json!({
                "pass_kind": "forward",
                "p0": p0,
                "e0": e0,
                "stats_csv": path.file_name().unwrap().to_str(),
                "overflow": stats.overflow,
                "comparison": serde_json::to_value(&report)?,
            }));
        }
    }
    if matches!(pass, SimPass::Backward | SimPass::Both) {
        let p0 = cfg.initial_conditions().first().map_or(1.0, |ic| ic.0);
        let stats = simulate_backward(&cfg.net, sim, p0)?;
        let path = out_dir.join("stats_backward.csv");
        fs::write(&path, stats.to_csv())?;
        let fwd = forward(&cfg.net, p0, 0.5, &spec)?;
        let theory = backward(&cfg.net, &fwd, 1.0, &spec)?;
        let report = compare(Theory::Backward(&theory), &stats)?;
        reports.push(json!({
            "pass_kind": "backward",
            "p0": p0,
            "stats_csv": path.file_name().unwrap().to_str(),
            "variance_warning": theory.variance_warning,
            "comparison": serde_json::to_value(&report)?,
        }));
    }

    let doc = json!({
        "label": cfg.label,
        "width": sim.width,
        "runs": sim.runs,
        "seed": sim.seed,
        "reports": reports,
    });
    fs::write(
        out_dir.join("compare.json"),
        serde_json::to_string_pretty(&doc)?,
    )?;
    println!(
        "simulate: wrote stats and compare.json to {}",
        out_dir.display()
    );
    Ok(())
}

/// Theory must match the empirical depth when the simulation overflowed.
fn truncated(net: &NetConfig, stats: &LayerStats) -> NetConfig {
    let mut net = *net;
    net.depth = stats.depth().max(1);
    net
}
