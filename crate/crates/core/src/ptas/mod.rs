//! Approximation scheme: for a fixed `k >= 2` returns a schedule within a
//! factor `1 + 1/k` of the optimum.
//!
//! Only the long jobs (`p * k > lb`) are enumerated. Releases are rounded
//! first, each order of the permuted long jobs gives a skeleton, and a
//! bounded search tree fills in the short jobs around it. The returned
//! schedule is checked against the preemptive bound; if the check cannot
//! confirm the factor, the exact solver is used instead.

pub mod rounding;
pub mod tree;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::iea::exhaustive::preemptive_bound;
use crate::iea::insertion::{insert_permutation, Insertion};
use crate::iea::priority::{neighbors, steady_permutation, PriorityList};
use crate::iea::{solve_exact, SolveOptions};
use crate::ldt::analyze;
use crate::model::{Entry, Instance, Schedule, Time};
use crate::partition::stage0;

pub use self::rounding::{round_releases, split_short_long, Rounded};
use self::tree::{build_tree, TreeEnd, TreeInput};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PtasOptions {
    pub k: u64,
    pub dominance: bool,
    /// Exact solver options used when the factor cannot be confirmed. With
    /// `None` the unconfirmed schedule is returned as is.
    pub fallback: Option<SolveOptions>,
}

impl PtasOptions {
    pub fn new(k: u64) -> Self {
        PtasOptions { k, dominance: true, fallback: Some(SolveOptions::default()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxCertificate {
    ShortDelayingKernel,
    ShortRemainderDelaying,
    UniformComponentOptimal,
    TreeExhaustedBest,
    ExactFallback,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PtasStats {
    pub lower_bound: Time,
    pub long_jobs: usize,
    /// Permuted long jobs before and after rounding.
    pub permuted_long: usize,
    pub permuted_long_rounded: usize,
    pub permutations: u64,
    pub dominated: u64,
    pub events: BTreeMap<String, u64>,
    pub complete_schedules: u64,
    pub max_schedules_per_tree: u64,
    pub tree_budget: u64,
    pub tree_budget_hits: u64,
    pub expansions: u64,
    pub repeated_activations: u64,
    pub delay_property_failures: u64,
    /// The factor was confirmed against the preemptive bound.
    pub confirmed: bool,
    pub fallback_used: bool,
    /// Share of permutations after which the search moved on.
    pub continue_rate: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxResult {
    pub schedule: Schedule,
    pub makespan: Time,
    pub certificate: ApproxCertificate,
    /// Bound used to confirm the factor.
    pub bound: Time,
    pub stats: PtasStats,
}

/// `value <= (1 + 1/k) * bound`, or the makespan kernel is delayed by at
/// most `bound / k`.
pub fn within_factor(inst: &Instance, s: &Schedule, k: u64, bound: Time) -> bool {
    let m = s.makespan(inst) as i128;
    let (k, b) = (k as i128, bound as i128);
    if m * k <= (k + 1) * b {
        return true;
    }
    analyze(inst, s).kernels.iter().any(|kr| (kr.delay as i128) * k <= b)
}

pub fn solve_approx(inst: &Instance, opts: &PtasOptions) -> Result<ApproxResult> {
    let k = opts.k;
    if k < 2 {
        return Err(Error::Contract(format!("k must be at least 2, got {k}")));
    }
    let n = inst.len();
    let lb = inst.lower_bound();
    let mut stats = PtasStats { lower_bound: lb, ..Default::default() };
    if n == 0 {
        return Ok(ApproxResult {
            schedule: Schedule::default(),
            makespan: 0,
            certificate: ApproxCertificate::UniformComponentOptimal,
            bound: 0,
            stats,
        });
    }
    let all: Vec<usize> = (0..n).collect();
    let bound = preemptive_bound(inst, &all, Time::MIN);
    let is_long = split_short_long(inst, k, lb);
    let long_ids: Vec<usize> = all.iter().copied().filter(|&j| is_long[j]).collect();
    stats.long_jobs = long_ids.len();
    let permuted_long = if long_ids.is_empty() { 0 } else { stage0(&inst.restrict(&long_ids)).permuted_count() };
    stats.permuted_long = permuted_long;
    let work = if permuted_long == 0 { inst.clone() } else { round_releases(inst, permuted_long).instance };
    let work_bound = preemptive_bound(&work, &all, Time::MIN);
    let long_inst = work.restrict(&long_ids);
    let long_cfg = stage0(&long_inst);
    stats.permuted_long_rounded = long_cfg.permuted_count();
    let budget = permuted_long.max(1) * n;
    stats.tree_budget = budget as u64;

    let steady = steady_permutation(&long_cfg, &long_inst);
    let mut list = PriorityList::new(long_cfg.permuted_jobs(), vec![steady]);
    let mut best: Option<(Time, Schedule)> = None;
    let mut halted: Option<ApproxCertificate> = None;
    let mut moved_on = 0u64;
    while let Some(perm) = list.next(&long_cfg, &long_inst) {
        let skeleton = match insert_permutation(&long_cfg.base_schedule, &long_inst, &perm, |j| long_inst.r(j), opts.dominance) {
            Insertion::Complete(s) => s,
            Insertion::Dominated { .. } => {
                stats.dominated += 1;
                continue;
            }
        };
        stats.permutations += 1;
        let skeleton: Vec<Entry> =
            skeleton.entries.iter().map(|e| Entry { job: long_ids[e.job], start: e.start }).collect();
        let out = build_tree(&TreeInput { inst: &work, k, lb: work_bound, skeleton, is_long: &is_long, budget });
        stats.complete_schedules += out.schedules.len() as u64;
        stats.max_schedules_per_tree = stats.max_schedules_per_tree.max(out.schedules.len() as u64);
        stats.expansions += out.expansions;
        stats.repeated_activations += out.repeated_activations;
        stats.delay_property_failures += out.delay_property_failures;
        for s in &out.schedules {
            let mapped = Schedule::from_sequence(inst, &s.jobs());
            let m = mapped.makespan(inst);
            if best.as_ref().map_or(true, |(b, _)| m < *b) {
                best = Some((m, mapped));
            }
        }
        let event = match &out.end {
            TreeEnd::ShortDelaying { short_job: true } => "short-delaying-halt",
            TreeEnd::ShortDelaying { short_job: false } => "short-remainder-halt",
            TreeEnd::TightKernel => "uniform-optimal",
            TreeEnd::Secondary { .. } => "secondary-next",
            TreeEnd::LongDelayingUnresolved => "long-delaying-next",
            TreeEnd::Budget => "tree-budget",
        };
        *stats.events.entry(event.to_string()).or_insert(0) += 1;
        match out.end {
            TreeEnd::ShortDelaying { short_job } => {
                halted = Some(if short_job {
                    ApproxCertificate::ShortDelayingKernel
                } else {
                    ApproxCertificate::ShortRemainderDelaying
                });
                break;
            }
            TreeEnd::TightKernel => {
                halted = Some(ApproxCertificate::UniformComponentOptimal);
                break;
            }
            TreeEnd::Secondary { blamed_long } => {
                moved_on += 1;
                if let Some(b) = blamed_long {
                    let local = long_ids.iter().position(|&j| j == b).expect("long job");
                    for p in neighbors(&long_inst, &perm, local) {
                        list.push(p);
                    }
                }
            }
            TreeEnd::Budget => {
                stats.tree_budget_hits += 1;
                moved_on += 1;
            }
            TreeEnd::LongDelayingUnresolved => moved_on += 1,
        }
    }
    if stats.permutations > 0 {
        stats.continue_rate = moved_on as f64 / stats.permutations as f64;
    }
    let (makespan, schedule) = best.unwrap_or_else(|| {
        let s = crate::ldt::ldt(inst, &crate::ldt::ReleaseOverrides::new());
        (s.makespan(inst), s)
    });
    stats.confirmed = within_factor(inst, &schedule, k, bound);
    let Some(fallback) = opts.fallback.as_ref().filter(|_| !stats.confirmed) else {
        return Ok(ApproxResult {
            schedule,
            makespan,
            certificate: halted.unwrap_or(ApproxCertificate::TreeExhaustedBest),
            bound,
            stats,
        });
    };
    stats.fallback_used = true;
    let exact = solve_exact(inst, fallback);
    Ok(ApproxResult {
        schedule: exact.schedule,
        makespan: exact.makespan,
        certificate: ApproxCertificate::ExactFallback,
        bound,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_k() {
        let inst = Instance::from_triples(&[(0, 1, 1)]).unwrap();
        assert!(solve_approx(&inst, &PtasOptions::new(1)).is_err());
    }

    #[test]
    fn second_pulled_out_long_job_is_kept() {
        let inst = Instance::from_triples(&[(2, 2, 5), (5, 4, 3), (3, 2, 5), (3, 2, 5), (4, 3, 0)]).unwrap();
        let r = solve_approx(&inst, &PtasOptions::new(5)).unwrap();
        assert!(crate::model::validate(&inst, &r.schedule, true).is_empty());
    }

    #[test]
    fn examples_within_factor() {
        let i1 = Instance::from_triples(&[(0, 5, 0), (1, 2, 10), (3, 1, 9)]).unwrap();
        let i2 = Instance::from_triples(&[(0, 10, 0), (2, 3, 6), (4, 2, 8)]).unwrap();
        for (inst, opt) in [(i1, 13), (i2, 17)] {
            for k in 2..6 {
                let r = solve_approx(&inst, &PtasOptions::new(k)).unwrap();
                assert!(r.makespan as u64 * k <= (k + 1) * opt as u64, "k={k}");
                assert!(crate::model::validate(&inst, &r.schedule, true).is_empty());
            }
        }
    }
}
