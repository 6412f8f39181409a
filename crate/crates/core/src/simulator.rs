//! Monte Carlo simulation of finite-width random residual networks.
//!
//! Every tensor drawn during a simulation gets its own ChaCha stream keyed
//! by `(seed, run, layer, role)`, so results are bitwise reproducible no
//! matter how runs are scheduled across threads. Weight matrices carry
//! entry variance `σ²/N`, biases `σ²`, matching the mean-field scaling.

use crate::recurrence::{Arch, BackwardTrajectory, ForwardTrajectory, NetConfig};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Whether backpropagation reuses the forward weights or samples a fresh
/// i.i.d. copy (the mean-field gradient-independence device).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackwardMode {
    TiedWeights,
    IndependentWeights,
}

/// Distribution of the last-layer gradient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LastGrad {
    /// i.i.d. uniform ±1 entries; satisfies the symmetry assumption exactly.
    SignVector,
    UnitGaussian,
}

/// Width, run count and seeding of a Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub width: usize,
    pub runs: usize,
    pub seed: u64,
    #[serde(default = "default_backward_mode")]
    pub backward_mode: BackwardMode,
    #[serde(default = "default_last_grad")]
    pub last_grad: LastGrad,
}

fn default_backward_mode() -> BackwardMode {
    BackwardMode::IndependentWeights
}

fn default_last_grad() -> LastGrad {
    LastGrad::SignVector
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width < 2 {
            return Err(Error::Config(format!(
                "width must be >= 2, got {}",
                self.width
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-layer empirical mean/std of one quantity, across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantityStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Aggregated per-layer statistics of a simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerStats {
    pub width: usize,
    pub runs: usize,
    pub quantities: BTreeMap<String, QuantityStats>,
    pub overflow: bool,
}

impl LayerStats {
    pub fn depth(&self) -> usize {
        self.quantities
            .values()
            .next()
            .map_or(0, |q| q.mean.len().saturating_sub(1))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,quantity,mean,std,runs,width\n");
        for (name, q) in &self.quantities {
            for l in 0..q.mean.len() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    l, name, q.mean[l], q.std[l], self.runs, self.width
                ));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != "layer,quantity,mean,std,runs,width" {
            return Err(Error::Config(format!("unexpected stats header: {header}")));
        }
        let mut stats = LayerStats {
            width: 0,
            runs: 0,
            quantities: BTreeMap::new(),
            overflow: false,
        };
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(Error::Config(format!("row {i}: expected 6 columns")));
            }
            let mean: f64 = cols[2]
                .parse()
                .map_err(|_| Error::Config(format!("row {i}: bad mean")))?;
            let std: f64 = cols[3]
                .parse()
                .map_err(|_| Error::Config(format!("row {i}: bad std")))?;
            stats.runs = cols[4]
                .parse()
                .map_err(|_| Error::Config(format!("row {i}: bad runs")))?;
            stats.width = cols[5]
                .parse()
                .map_err(|_| Error::Config(format!("row {i}: bad width")))?;
            let q = stats
                .quantities
                .entry(cols[1].to_string())
                .or_insert_with(|| QuantityStats {
                    mean: vec![],
                    std: vec![],
                });
            q.mean.push(mean);
            q.std.push(std);
        }
        Ok(stats)
    }
}

/// Tensor roles for stream derivation.
#[derive(Clone, Copy)]
enum Role {
    InputDirection = 0,
    InputOrthogonal = 1,
    WeightW = 2,
    BiasB = 3,
    WeightV = 4,
    BiasA = 5,
    BackWeightW = 6,
    BackWeightV = 7,
    LastGradient = 8,
}

fn stream(seed: u64, run: u64, layer: u64, role: Role) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&run.to_le_bytes());
    key[16..24].copy_from_slice(&layer.to_le_bytes());
    key[24..32].copy_from_slice(&(role as u64).to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

fn sample_normal(rng: &mut ChaCha12Rng, n: usize, sd: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z * sd
        })
        .collect()
}

/// `y = M x` for a row-major N×N matrix.
fn matvec(m: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for (a, b) in row.iter().zip(x.iter()) {
            acc += a * b;
        }
        *o = acc;
    }
}

/// `y = Mᵀ x`.
fn matvec_t(m: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    out.fill(0.0);
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let row = &m[i * n..(i + 1) * n];
        for (o, &mij) in out.iter_mut().zip(row.iter()) {
            *o += mij * xi;
        }
    }
}

fn mean_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64
}

fn dot_mean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// Builds a pair of inputs with `‖x‖²/N = ‖x'‖²/N = p0` exactly and
/// `x·x'/(N·p0) = e0` exactly: a random direction, a Gram–Schmidt
/// orthogonal complement, and an exact rotation by `arccos e0`.
pub fn make_input_pair(
    width: usize,
    p0: f64,
    e0: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(p0 > 0.0) {
        return Err(Error::Domain(format!("make_input_pair: p0 must be > 0, got {p0}")));
    }
    if !(-1.0..=1.0).contains(&e0) {
        return Err(Error::Domain(format!(
            "make_input_pair: e0 must lie in [-1, 1], got {e0}"
        )));
    }
    if width < 2 && e0.abs() != 1.0 {
        return Err(Error::Domain(
            "make_input_pair: width 1 can only realize e0 = ±1".into(),
        ));
    }
    let mut rng = stream(seed, 0, 0, Role::InputDirection);
    let mut u = sample_normal(&mut rng, width, 1.0);
    normalize(&mut u);
    if e0 == 1.0 {
        let s = (width as f64 * p0).sqrt();
        let x: Vec<f64> = u.iter().map(|v| v * s).collect();
        return Ok((x.clone(), x));
    }
    let mut rng = stream(seed, 0, 0, Role::InputOrthogonal);
    let mut v = sample_normal(&mut rng, width, 1.0);
    let uv: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    for (vi, ui) in v.iter_mut().zip(u.iter()) {
        *vi -= uv * ui;
    }
    normalize(&mut v);
    let s = (width as f64 * p0).sqrt();
    let sin = (1.0 - e0 * e0).sqrt();
    let x: Vec<f64> = u.iter().map(|a| a * s).collect();
    let xp: Vec<f64> = u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| (e0 * a + sin * b) * s)
        .collect();
    Ok((x, xp))
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

struct ForwardRun {
    p: Vec<f64>,
    p_prime: Vec<f64>,
    q: Vec<f64>,
    gamma: Vec<f64>,
    e: Vec<f64>,
}

fn forward_run(cfg: &NetConfig, sim: &SimSpec, p0: f64, e0: f64, run: u64) -> Result<ForwardRun> {
    let n = sim.width;
    let nf = n as f64;
    let (mut x, mut xp) = make_input_pair(n, p0, e0, sim.seed.wrapping_add(run))?;
    let depth = cfg.depth;
    let mut rec = ForwardRun {
        p: vec![mean_sq(&x)],
        p_prime: vec![mean_sq(&xp)],
        q: vec![f64::NAN],
        gamma: vec![dot_mean(&x, &xp)],
        e: vec![],
    };
    rec.e.push(rec.gamma[0] / (rec.p[0] * rec.p_prime[0]).sqrt());
    let mut h = vec![0.0; n];
    let mut hp = vec![0.0; n];
    let mut phi = vec![0.0; n];
    let mut phip = vec![0.0; n];
    for layer in 1..=depth {
        let mut rw = stream(sim.seed, run, layer as u64, Role::WeightW);
        let w = sample_normal(&mut rw, n * n, (cfg.var_w / nf).sqrt());
        let mut rb = stream(sim.seed, run, layer as u64, Role::BiasB);
        let b = sample_normal(&mut rb, n, cfg.var_b.sqrt());
        matvec(&w, &x, &mut h);
        matvec(&w, &xp, &mut hp);
        for i in 0..n {
            h[i] += b[i];
            hp[i] += b[i];
            phi[i] = cfg.activation.activate(h[i]).unwrap_or(f64::NAN);
            phip[i] = cfg.activation.activate(hp[i]).unwrap_or(f64::NAN);
        }
        match cfg.arch {
            Arch::Rrn => {
                for i in 0..n {
                    x[i] += phi[i];
                    xp[i] += phip[i];
                }
            }
            Arch::Frn => {
                let mut rv = stream(sim.seed, run, layer as u64, Role::WeightV);
                let v = sample_normal(&mut rv, n * n, (cfg.var_v.unwrap() / nf).sqrt());
                let mut ra = stream(sim.seed, run, layer as u64, Role::BiasA);
                let a = sample_normal(&mut ra, n, cfg.var_a.unwrap().sqrt());
                let mut vphi = vec![0.0; n];
                let mut vphip = vec![0.0; n];
                matvec(&v, &phi, &mut vphi);
                matvec(&v, &phip, &mut vphip);
                for i in 0..n {
                    x[i] += vphi[i] + a[i];
                    xp[i] += vphip[i] + a[i];
                }
            }
        }
        let p = mean_sq(&x);
        let pp = mean_sq(&xp);
        let g = dot_mean(&x, &xp);
        if !p.is_finite() || !pp.is_finite() || !g.is_finite() {
            break;
        }
        rec.p.push(p);
        rec.p_prime.push(pp);
        rec.q.push(mean_sq(&h));
        rec.gamma.push(g);
        rec.e.push(g / (p * pp).sqrt());
    }
    Ok(rec)
}

/// Propagates an input pair through `runs` independent networks and
/// aggregates per-layer empirical `p̂`, `q̂`, `γ̂`, `ê` across runs.
pub fn simulate_forward(
    cfg: &NetConfig,
    sim: &SimSpec,
    p0: f64,
    e0: f64,
) -> Result<LayerStats> {
    cfg.validate()?;
    sim.validate()?;
    let runs: Vec<ForwardRun> = (0..sim.runs as u64)
        .into_par_iter()
        .map(|r| forward_run(cfg, sim, p0, e0, r))
        .collect::<Result<_>>()?;
    let depth = runs.iter().map(|r| r.p.len()).min().unwrap() - 1;
    let overflow = depth < cfg.depth;
    let mut quantities = BTreeMap::new();
    for (name, get) in [
        ("p", &(|r: &ForwardRun, l: usize| r.p[l]) as &dyn Fn(&ForwardRun, usize) -> f64),
        ("q", &|r, l| r.q[l]),
        ("gamma", &|r, l| r.gamma[l]),
        ("e", &|r, l| r.e[l]),
    ] {
        quantities.insert(name.to_string(), aggregate(&runs, depth, get));
    }
    Ok(LayerStats {
        width: sim.width,
        runs: sim.runs,
        quantities,
        overflow,
    })
}

fn aggregate<R>(runs: &[R], depth: usize, get: &dyn Fn(&R, usize) -> f64) -> QuantityStats {
    let nruns = runs.len() as f64;
    let mut mean = vec![0.0; depth + 1];
    let mut std = vec![0.0; depth + 1];
    for l in 0..=depth {
        let m: f64 = runs.iter().map(|r| get(r, l)).sum::<f64>() / nruns;
        let var: f64 = if runs.len() > 1 {
            runs.iter().map(|r| (get(r, l) - m).powi(2)).sum::<f64>() / (nruns - 1.0)
        } else {
            0.0
        };
        mean[l] = m;
        std[l] = var.sqrt();
    }
    QuantityStats { mean, std }
}

struct BackwardRun {
    daleth: Vec<f64>,
    chi_b: Vec<f64>,
    chi_w: Vec<f64>,
    chi_v: Vec<f64>,
    chi_a: Vec<f64>,
}

fn backward_run(cfg: &NetConfig, sim: &SimSpec, p0: f64, run: u64) -> Result<BackwardRun> {
    let n = sim.width;
    let nf = n as f64;
    let depth = cfg.depth;
    let (mut x, _) = make_input_pair(n, p0, 1.0, sim.seed.wrapping_add(run))?;

    // forward pass, keeping h and the layer inputs' mean squares
    let mut hs: Vec<Vec<f64>> = Vec::with_capacity(depth);
    let mut forward_v: Vec<Vec<f64>> = Vec::with_capacity(depth);
    let mut p_prev = vec![0.0; depth + 1];
    let mut phi_ms = vec![0.0; depth + 1];
    let mut h = vec![0.0; n];
    let mut phi = vec![0.0; n];
    for layer in 1..=depth {
        p_prev[layer] = mean_sq(&x);
        let mut rw = stream(sim.seed, run, layer as u64, Role::WeightW);
        let w = sample_normal(&mut rw, n * n, (cfg.var_w / nf).sqrt());
        let mut rb = stream(sim.seed, run, layer as u64, Role::BiasB);
        let b = sample_normal(&mut rb, n, cfg.var_b.sqrt());
        matvec(&w, &x, &mut h);
        for i in 0..n {
            h[i] += b[i];
            phi[i] = cfg.activation.activate(h[i]).unwrap_or(f64::NAN);
        }
        phi_ms[layer] = mean_sq(&phi);
        match cfg.arch {
            Arch::Rrn => {
                for i in 0..n {
                    x[i] += phi[i];
                }
                forward_v.push(Vec::new());
            }
            Arch::Frn => {
                let mut rv = stream(sim.seed, run, layer as u64, Role::WeightV);
                let v = sample_normal(&mut rv, n * n, (cfg.var_v.unwrap() / nf).sqrt());
                let mut ra = stream(sim.seed, run, layer as u64, Role::BiasA);
                let a = sample_normal(&mut ra, n, cfg.var_a.unwrap().sqrt());
                let mut vphi = vec![0.0; n];
                matvec(&v, &phi, &mut vphi);
                for i in 0..n {
                    x[i] += vphi[i] + a[i];
                }
                forward_v.push(v);
            }
        }
        hs.push(h.clone());
    }

    // last-layer gradient
    let mut rg = stream(sim.seed, run, depth as u64 + 1, Role::LastGradient);
    let mut g: Vec<f64> = match sim.last_grad {
        LastGrad::SignVector => (0..n)
            .map(|_| if rg.random::<bool>() { 1.0 } else { -1.0 })
            .collect(),
        LastGrad::UnitGaussian => sample_normal(&mut rg, n, 1.0),
    };

    let mut rec = BackwardRun {
        daleth: vec![0.0; depth + 1],
        chi_b: vec![f64::NAN; depth + 1],
        chi_w: vec![f64::NAN; depth + 1],
        chi_v: vec![f64::NAN; depth + 1],
        chi_a: vec![f64::NAN; depth + 1],
    };
    rec.daleth[depth] = mean_sq(&g);
    let mut u = vec![0.0; n];
    let mut wu = vec![0.0; n];
    for layer in (1..=depth).rev() {
        let h = &hs[layer - 1];
        // weights seen by the backward pass
        let (w_back, v_back): (Vec<f64>, Vec<f64>) = match sim.backward_mode {
            BackwardMode::TiedWeights => {
                let mut rw = stream(sim.seed, run, layer as u64, Role::WeightW);
                let w = sample_normal(&mut rw, n * n, (cfg.var_w / nf).sqrt());
                (w, forward_v[layer - 1].clone())
            }
            BackwardMode::IndependentWeights => {
                let mut rw = stream(sim.seed, run, layer as u64, Role::BackWeightW);
                let w = sample_normal(&mut rw, n * n, (cfg.var_w / nf).sqrt());
                let v = if cfg.arch == Arch::Frn {
                    let mut rv = stream(sim.seed, run, layer as u64, Role::BackWeightV);
                    sample_normal(&mut rv, n * n, (cfg.var_v.unwrap() / nf).sqrt())
                } else {
                    Vec::new()
                };
                (w, v)
            }
        };
        // u_j = φ̇(h_j) · (Vᵀ g)_j   (FRN)  or  φ̇(h_j) · g_j   (RRN)
        match cfg.arch {
            Arch::Frn => {
                matvec_t(&v_back, &g, &mut u);
                for j in 0..n {
                    u[j] *= cfg.activation.activate_deriv(h[j]).unwrap_or(f64::NAN);
                }
            }
            Arch::Rrn => {
                for j in 0..n {
                    u[j] = g[j] * cfg.activation.activate_deriv(h[j]).unwrap_or(f64::NAN);
                }
            }
        }
        // parameter gradients at this layer; the (j,k) means factorize exactly
        let g_ms = mean_sq(&g);
        let u_ms = mean_sq(&u);
        rec.chi_b[layer] = u_ms;
        rec.chi_w[layer] = u_ms * p_prev[layer];
        if cfg.arch == Arch::Frn {
            rec.chi_v[layer] = g_ms * phi_ms[layer];
            rec.chi_a[layer] = g_ms;
        }
        // ∂E/∂x̲ = g + Wᵀ u
        matvec_t(&w_back, &u, &mut wu);
        for j in 0..n {
            g[j] += wu[j];
        }
        rec.daleth[layer - 1] = mean_sq(&g);
    }
    Ok(rec)
}

/// Runs the forward pass on a single input and backpropagates the
/// last-layer gradient through the exact layerwise Jacobians, recording
/// per-layer `ℵ̂` and parameter-gradient norms `χ̂_•`.
pub fn simulate_backward(cfg: &NetConfig, sim: &SimSpec, p0: f64) -> Result<LayerStats> {
    cfg.validate()?;
    sim.validate()?;
    cfg.activation.validate_for_gradients()?;
    let runs: Vec<BackwardRun> = (0..sim.runs as u64)
        .into_par_iter()
        .map(|r| backward_run(cfg, sim, p0, r))
        .collect::<Result<_>>()?;
    let depth = cfg.depth;
    let mut quantities = BTreeMap::new();
    quantities.insert(
        "daleth".to_string(),
        aggregate(&runs, depth, &|r: &BackwardRun, l| r.daleth[l]),
    );
    quantities.insert(
        "chi_b".to_string(),
        aggregate(&runs, depth, &|r: &BackwardRun, l| r.chi_b[l]),
    );
    quantities.insert(
        "chi_w".to_string(),
        aggregate(&runs, depth, &|r: &BackwardRun, l| r.chi_w[l]),
    );
    if cfg.arch == Arch::Frn {
        quantities.insert(
            "chi_v".to_string(),
            aggregate(&runs, depth, &|r: &BackwardRun, l| r.chi_v[l]),
        );
        quantities.insert(
            "chi_a".to_string(),
            aggregate(&runs, depth, &|r: &BackwardRun, l| r.chi_a[l]),
        );
    }
    let overflow = quantities
        .values()
        .any(|q| q.mean.iter().any(|v| !v.is_finite() && !v.is_nan()));
    Ok(LayerStats {
        width: sim.width,
        runs: sim.runs,
        quantities,
        overflow,
    })
}

/// Theory-side series to compare a simulation against.
pub enum Theory<'a> {
    Forward(&'a ForwardTrajectory),
    Backward(&'a BackwardTrajectory),
}

/// Per-quantity z-score summary of empirical means against a theoretical
/// trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityComparison {
    pub max_abs_z: f64,
    pub frac_within_3: f64,
    pub layers: usize,
}

/// Comparison report; `pass` means at least 95% of layers sit within
/// three standard errors for every compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub per_quantity: BTreeMap<String, QuantityComparison>,
    pub pass: bool,
}

/// Z-scores the empirical means against theory:
/// `z = (mean − theory)/(std/√runs)` per layer.
pub fn compare(theory: Theory<'_>, empirical: &LayerStats) -> Result<CompareReport> {
    let pairs: Vec<(&str, &[f64])> = match theory {
        Theory::Forward(t) => vec![
            ("p", t.p.as_slice()),
            ("q", t.q.as_slice()),
            ("gamma", t.gamma.as_slice()),
            ("e", t.e.as_slice()),
        ],
        Theory::Backward(t) => {
            let mut v: Vec<(&str, &[f64])> = vec![
                ("daleth", t.daleth.as_slice()),
                ("chi_b", t.chi_b.as_slice()),
                ("chi_w", t.chi_w.as_slice()),
            ];
            if let Some(cv) = &t.chi_v {
                v.push(("chi_v", cv.as_slice()));
            }
            if let Some(ca) = &t.chi_a {
                v.push(("chi_a", ca.as_slice()));
            }
            v
        }
    };
    let mut per_quantity = BTreeMap::new();
    let mut pass = true;
    let sqrt_runs = (empirical.runs as f64).sqrt();
    for (name, theo) in pairs {
        let Some(emp) = empirical.quantities.get(name) else {
            continue;
        };
        if emp.mean.len() != theo.len() {
            return Err(Error::Config(format!(
                "compare: depth mismatch for {name}: empirical {} vs theory {}",
                emp.mean.len() - 1,
                theo.len() - 1
            )));
        }
        let mut max_abs_z: f64 = 0.0;
        let mut within = 0usize;
        let mut total = 0usize;
        for l in 0..theo.len() {
            if theo[l].is_nan() && emp.mean[l].is_nan() {
                continue; // undefined at this layer (e.g. q at layer 0)
            }
            let se = emp.std[l] / sqrt_runs;
            let diff = emp.mean[l] - theo[l];
            let z = if se == 0.0 {
                if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                diff / se
            };
            max_abs_z = max_abs_z.max(z.abs());
            total += 1;
            if z.abs() <= 3.0 {
                within += 1;
            }
        }
        let frac = if total == 0 {
            1.0
        } else {
            within as f64 / total as f64
        };
        if frac < 0.95 {
            pass = false;
        }
        per_quantity.insert(
            name.to_string(),
            QuantityComparison {
                max_abs_z,
                frac_within_3: frac,
                layers: total,
            },
        );
    }
    Ok(CompareReport { per_quantity, pass })
}
