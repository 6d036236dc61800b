//! Benchmark harness: runs every solver over a grid of generated instances
//! and writes per-instance rows plus per-size summaries.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::gen::{generate, Family, GenParams};
use crate::iea::{solve_exact, SolveOptions};
use crate::ldt::{ldt, ReleaseOverrides};
use crate::model::Time;
use crate::oracle::brute_force;
use crate::partition::stage0;
use crate::ptas::{solve_approx, PtasOptions};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub sizes: Vec<usize>,
    pub family: Family,
    pub rmax: Option<Time>,
    pub pmax: Time,
    pub qmax: Time,
    pub seed: u64,
}

impl Grid {
    /// Parses `n=10,20;family=tight-transit;rmax=40;pmax=20;qmax=20;seed=0`.
    /// Only `n` is required. Without `rmax` releases spread over `n * pmax / 2`.
    pub fn parse(spec: &str) -> Result<Grid> {
        let mut grid = Grid { sizes: Vec::new(), family: Family::Uniform, rmax: None, pmax: 20, qmax: 20, seed: 0 };
        let mut has_n = false;
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Contract(format!("grid item {part:?} is not key=value")))?;
            let num = |v: &str| -> Result<i64> {
                v.trim().parse().map_err(|_| Error::Contract(format!("bad number {v:?} in grid")))
            };
            match key.trim() {
                "n" => {
                    has_n = true;
                    for v in val.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                        let n = num(v)?;
                        if n < 0 {
                            return Err(Error::Contract("negative size in grid".into()));
                        }
                        grid.sizes.push(n as usize);
                    }
                }
                "family" => grid.family = val.trim().parse()?,
                "rmax" => grid.rmax = Some(num(val)?),
                "pmax" => grid.pmax = num(val)?,
                "qmax" => grid.qmax = num(val)?,
                "seed" => grid.seed = num(val)? as u64,
                other => return Err(Error::Contract(format!("unknown grid key {other:?}"))),
            }
        }
        if !has_n {
            return Err(Error::Contract("grid needs n=...".into()));
        }
        Ok(grid)
    }

    pub fn params(&self, n: usize) -> GenParams {
        let rmax = self.rmax.unwrap_or((n as Time * self.pmax) / 2);
        GenParams { n, rmax, pmax: self.pmax, qmax: self.qmax, family: self.family }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub grid: Grid,
    pub reps: u64,
    pub ks: Vec<u64>,
    pub oracle_cap: usize,
    /// Largest size the exact solver and the approximation scheme run on.
    pub solve_cap: usize,
    pub iea_budget: u64,
    pub exhaustive_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtasCell {
    pub k: u64,
    pub makespan: Time,
    pub permuted_long: usize,
    pub permutations: u64,
    pub continue_rate: f64,
    pub certificate: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub seed: u64,
    pub lower_bound: Time,
    pub ldt: Time,
    pub permuted_count: usize,
    pub iea: Option<Time>,
    pub iea_certified: Option<bool>,
    pub iea_permutations: Option<u64>,
    pub oracle: Option<Time>,
    pub ptas: Vec<PtasCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: usize,
    pub instances: usize,
    pub mean_permuted_share: f64,
    /// Mean permuted long jobs per `k`.
    pub mean_permuted_long: BTreeMap<u64, f64>,
    /// Observed share of permutations after which the scheme moved on.
    pub continue_rate: BTreeMap<u64, f64>,
    /// Mean of `min(1, 1/4 + permuted_long/permuted_count)` over instances with `permuted_count > 0`.
    pub predicted_continue: BTreeMap<u64, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SizeSummary>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub seed: u64,
    pub solver: String,
    pub micros: u128,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<(BenchReport, Vec<TimingRow>)> {
    for &k in &cfg.ks {
        if k < 2 {
            return Err(Error::Contract(format!("k must be at least 2, got {k}")));
        }
    }
    let mut rows = Vec::new();
    let mut timing = Vec::new();
    let mut summary = Vec::new();
    for &n in &cfg.grid.sizes {
        let params = cfg.grid.params(n);
        let mut permuted_share = Vec::new();
        let mut permuted_longs: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        let mut cont: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        let mut predicted: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        for rep in 0..cfg.reps {
            let seed = cfg.grid.seed + rep;
            let inst = generate(&params, seed)?;
            let permuted_count = stage0(&inst).permuted_count();
            if n > 0 {
                permuted_share.push(permuted_count as f64 / n as f64);
            }
            let mut row = BenchRow {
                n,
                seed,
                lower_bound: inst.lower_bound(),
                ldt: ldt(&inst, &ReleaseOverrides::new()).makespan(&inst),
                permuted_count,
                iea: None,
                iea_certified: None,
                iea_permutations: None,
                oracle: None,
                ptas: Vec::new(),
            };
            if n <= cfg.solve_cap {
                let opts = SolveOptions {
                    max_permutations: Some(cfg.iea_budget),
                    exhaustive_budget: Some(cfg.exhaustive_budget),
                    ..SolveOptions::default()
                };
                let t = Instant::now();
                let r = solve_exact(&inst, &opts);
                timing.push(TimingRow { n, seed, solver: "iea".into(), micros: t.elapsed().as_micros() });
                row.iea = Some(r.makespan);
                row.iea_certified = Some(r.certificate.is_optimal());
                row.iea_permutations = Some(r.stats.permutations);
                for &k in &cfg.ks {
                    let mut popts = PtasOptions::new(k);
                    popts.fallback = Some(opts.clone());
                    let t = Instant::now();
                    let a = solve_approx(&inst, &popts)?;
                    timing.push(TimingRow { n, seed, solver: format!("ptas-{k}"), micros: t.elapsed().as_micros() });
                    permuted_longs.entry(k).or_default().push(a.stats.permuted_long as f64);
                    if a.stats.permutations > 0 {
                        cont.entry(k).or_default().push(a.stats.continue_rate);
                    }
                    if permuted_count > 0 {
                        let p = (0.25 + a.stats.permuted_long as f64 / permuted_count as f64).min(1.0);
                        predicted.entry(k).or_default().push(p);
                    }
                    row.ptas.push(PtasCell {
                        k,
                        makespan: a.makespan,
                        permuted_long: a.stats.permuted_long,
                        permutations: a.stats.permutations,
                        continue_rate: a.stats.continue_rate,
                        certificate: serde_json::to_value(&a.certificate)
                            .ok()
                            .and_then(|v| v.as_str().map(String::from))
                            .unwrap_or_default(),
                    });
                }
            }
            if n <= cfg.oracle_cap {
                let t = Instant::now();
                row.oracle = Some(brute_force(&inst, cfg.oracle_cap, true)?.1);
                timing.push(TimingRow { n, seed, solver: "oracle".into(), micros: t.elapsed().as_micros() });
            }
            rows.push(row);
        }
        let collapse = |m: BTreeMap<u64, Vec<f64>>| m.into_iter().map(|(k, v)| (k, mean(&v))).collect();
        summary.push(SizeSummary {
            n,
            instances: cfg.reps as usize,
            mean_permuted_share: mean(&permuted_share),
            mean_permuted_long: collapse(permuted_longs),
            continue_rate: collapse(cont),
            predicted_continue: collapse(predicted),
        });
    }
    Ok((BenchReport { config: cfg.clone(), rows, summary }, timing))
}

/// Writes `rows.csv`, `summary.csv` and `report.json` (all timing free) and
/// `timing.csv` into `dir`.
pub fn write_report(dir: &Path, report: &BenchReport, timing: &[TimingRow]) -> Result<()> {
    let io = |e: std::io::Error| Error::Contract(format!("cannot write report: {e}"));
    let csv_err = |e: csv::Error| Error::Contract(format!("cannot write csv: {e}"));
    fs::create_dir_all(dir).map_err(io)?;
    let opt = |v: Option<Time>| v.map(|x| x.to_string()).unwrap_or_default();

    let mut w = csv::Writer::from_path(dir.join("rows.csv")).map_err(csv_err)?;
    let mut header = vec!["n", "seed", "lower_bound", "ldt", "permuted_count", "iea", "iea_certified", "iea_permutations", "oracle"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    for k in &report.config.ks {
        header.push(format!("ptas{k}"));
        header.push(format!("ptas{k}_permuted_long"));
        header.push(format!("ptas{k}_permutations"));
        header.push(format!("ptas{k}_certificate"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in &report.rows {
        let mut rec = vec![
            r.n.to_string(),
            r.seed.to_string(),
            r.lower_bound.to_string(),
            r.ldt.to_string(),
            r.permuted_count.to_string(),
            opt(r.iea),
            r.iea_certified.map(|b| b.to_string()).unwrap_or_default(),
            r.iea_permutations.map(|p| p.to_string()).unwrap_or_default(),
            opt(r.oracle),
        ];
        for k in &report.config.ks {
            match r.ptas.iter().find(|c| c.k == *k) {
                Some(c) => rec.extend([
                    c.makespan.to_string(),
                    c.permuted_long.to_string(),
                    c.permutations.to_string(),
                    c.certificate.clone(),
                ]),
                None => rec.extend(std::iter::repeat(String::new()).take(4)),
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io)?;

    let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(csv_err)?;
    w.write_record(["n", "instances", "mean_permuted_share", "k", "mean_permuted_long", "continue_rate", "predicted_continue"])
        .map_err(csv_err)?;
    for s in &report.summary {
        let fmt = |m: &BTreeMap<u64, f64>, k: u64| m.get(&k).map(|v| format!("{v:.4}")).unwrap_or_default();
        if report.config.ks.is_empty() || s.mean_permuted_long.is_empty() {
            w.write_record([s.n.to_string(), s.instances.to_string(), format!("{:.4}", s.mean_permuted_share)])
                .map_err(csv_err)?;
            continue;
        }
        for &k in &report.config.ks {
            w.write_record([
                s.n.to_string(),
                s.instances.to_string(),
                format!("{:.4}", s.mean_permuted_share),
                k.to_string(),
                fmt(&s.mean_permuted_long, k),
                fmt(&s.continue_rate, k),
                fmt(&s.predicted_continue, k),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(io)?;

    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Contract(e.to_string()))?;
    fs::write(dir.join("report.json"), json + "\n").map_err(io)?;

    let mut w = csv::Writer::from_path(dir.join("timing.csv")).map_err(csv_err)?;
    w.write_record(["n", "seed", "solver", "micros"]).map_err(csv_err)?;
    for t in timing {
        w.write_record([t.n.to_string(), t.seed.to_string(), t.solver.clone(), t.micros.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}
