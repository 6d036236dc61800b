//! Exact solver: enumerates permutations of the permuted jobs over the
//! partial schedule of the remaining jobs, refining the job typing whenever a
//! new kernel shows up.
//!
//! The answer is returned as optimal only with a certificate: a kernel that
//! starts at its earliest release and has no delaying job, a makespan equal
//! to the preemptive bound, or a completed exhaustive search.

pub mod exhaustive;
pub mod insertion;
pub mod priority;

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

use crate::ldt::{analyze, KernelReport, ReleaseOverrides, ScheduleAnalysis};
use crate::model::{Instance, Schedule, Time};
use crate::partition::{iterative_step, stage0, Configuration, JobType, StepMode, StepOutcome};
use crate::perm::all_orders;

use self::insertion::{insert_permutation, Insertion};
use self::priority::{neighbors, steady_permutation, PriorityList};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Discard permutations whose schedules are dominated by an earlier slot.
    pub dominance: bool,
    /// Stop enumerating after this many permutations.
    pub max_permutations: Option<u64>,
    /// Run the exhaustive search when enumeration ends uncertified.
    pub exhaustive: bool,
    pub exhaustive_budget: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { dominance: true, max_permutations: None, exhaustive: true, exhaustive_budget: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Certificate {
    Optimal { by: String },
    /// Best schedule found within the budget.
    Incumbent { lower_bound: Time },
}

impl Certificate {
    pub fn is_optimal(&self) -> bool {
        matches!(self, Certificate::Optimal { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub permuted_initial: usize,
    pub permuted_final: usize,
    pub permutations: u64,
    pub inconsistent: u64,
    pub dominated: u64,
    pub configurations: u64,
    pub iterative_updates: u64,
    pub rejected_updates: u64,
    pub stage2_runs: u64,
    pub stage2_iterations_max: u64,
    pub stage2_bound_violations: u64,
    pub stage2_cap_hits: u64,
    pub stage2_repeats: u64,
    pub stage2_fixed_delaying: u64,
    pub halts: BTreeMap<String, u64>,
    /// Delaying jobs with `delay >= p`, in LDT schedules.
    pub delay_violations_ldt: u64,
    /// Same, in schedules built by insertion.
    pub delay_violations_inserted: u64,
    pub kernels_checked_ldt: u64,
    pub kernels_checked_inserted: u64,
    pub enumeration_exhausted: bool,
    pub budget_exhausted: bool,
    pub exhaustive_used: bool,
    pub exhaustive_nodes: u64,
    pub exhaustive_improved: bool,
}

impl SearchStats {
    fn halt(&mut self, what: &str) {
        *self.halts.entry(what.to_string()).or_insert(0) += 1;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResult {
    pub schedule: Schedule,
    pub makespan: Time,
    pub certificate: Certificate,
    pub stats: SearchStats,
    pub config: Configuration,
}

struct Incumbent {
    schedule: Schedule,
    makespan: Time,
}

impl Incumbent {
    fn offer(&mut self, inst: &Instance, s: &Schedule) {
        let m = s.makespan(inst);
        if m < self.makespan {
            self.makespan = m;
            self.schedule = s.clone();
        }
    }
}

fn audit_delays(inst: &Instance, a: &ScheduleAnalysis, violations: &mut u64, checked: &mut u64) {
    for k in &a.kernels {
        if let Some(l) = k.delaying {
            *checked += 1;
            if k.delay >= inst.p(l) {
                *violations += 1;
            }
        }
    }
}

/// A kernel without a delaying job that starts at its earliest release.
fn tight_kernel(a: &ScheduleAnalysis) -> Option<&KernelReport> {
    a.kernels.iter().find(|k| k.delaying.is_none() && k.is_tight())
}

enum Verdict {
    Global,
    Next { blame: Option<(Vec<usize>, usize)> },
    NewKernel,
}

struct Search<'a> {
    inst: &'a Instance,
    opts: &'a SolveOptions,
    cfg: Configuration,
    list: PriorityList,
    best: Incumbent,
    stats: SearchStats,
}

pub fn solve_exact(inst: &Instance, opts: &SolveOptions) -> SolveResult {
    let n = inst.len();
    let cfg = stage0(inst);
    let mut stats = SearchStats { permuted_initial: cfg.permuted_count(), ..Default::default() };
    let mut best = Incumbent { schedule: Schedule::default(), makespan: Time::MAX };
    for s in &cfg.initial_schedules {
        best.offer(inst, s);
        audit_delays(inst, &analyze(inst, s), &mut stats.delay_violations_ldt, &mut stats.kernels_checked_ldt);
    }
    if n == 0 {
        return SolveResult {
            schedule: Schedule::default(),
            makespan: 0,
            certificate: Certificate::Optimal { by: "empty".into() },
            stats,
            config: cfg,
        };
    }
    let all: Vec<usize> = (0..n).collect();
    let bound = exhaustive::preemptive_bound(inst, &all, Time::MIN);
    if cfg.conflict_free {
        stats.halt("conflict-free");
        stats.permuted_final = 0;
        return SolveResult {
            makespan: best.makespan,
            schedule: best.schedule,
            certificate: Certificate::Optimal { by: "conflict-free".into() },
            stats,
            config: cfg,
        };
    }
    let steady = steady_permutation(&cfg, inst);
    let list = PriorityList::new(cfg.permuted_jobs(), vec![steady]);
    let mut search = Search { inst, opts, cfg, list, best, stats };
    search.stats.configurations = 1;
    let mut certified: Option<String> = None;
    loop {
        if let Some(cap) = opts.max_permutations {
            if search.stats.permutations >= cap {
                search.stats.budget_exhausted = true;
                break;
            }
        }
        let Some(perm) = search.list.next(&search.cfg, inst) else {
            search.stats.enumeration_exhausted = true;
            break;
        };
        search.stats.permutations += 1;
        let verdict = search.run_permutation(perm);
        if let Verdict::Global = verdict {
            certified = Some("tight-kernel".into());
            break;
        }
        if search.best.makespan <= bound {
            certified = Some("preemptive-bound".into());
            break;
        }
    }
    if certified.is_none() && search.best.makespan <= bound {
        certified = Some("preemptive-bound".into());
    }
    let Search { cfg, list, mut best, mut stats, .. } = search;
    stats.inconsistent += list.inconsistent;
    stats.iterative_updates = cfg.iterative_updates as u64;
    stats.rejected_updates = cfg.rejected_updates as u64;
    stats.permuted_final = cfg.permuted_count();
    let certificate = match certified {
        Some(by) => Certificate::Optimal { by },
        None if opts.exhaustive => {
            stats.exhaustive_used = true;
            let out = exhaustive::search(inst, best.makespan, opts.exhaustive_budget);
            stats.exhaustive_nodes = out.nodes;
            if let Some(s) = out.schedule {
                stats.exhaustive_improved = true;
                best.offer(inst, &s);
            }
            if out.complete {
                Certificate::Optimal { by: "exhaustive-search".into() }
            } else {
                Certificate::Incumbent { lower_bound: bound }
            }
        }
        None => Certificate::Incumbent { lower_bound: bound },
    };
    SolveResult { schedule: best.schedule, makespan: best.makespan, certificate, stats, config: cfg }
}

impl Search<'_> {
    fn insert(&mut self, perm: &[usize], over: &ReleaseOverrides, dominance: bool) -> Option<Schedule> {
        let inst = self.inst;
        match insert_permutation(&self.cfg.base_schedule, inst, perm, |j| over.effective(inst, j), dominance) {
            Insertion::Complete(s) => Some(s),
            Insertion::Dominated { .. } => None,
        }
    }

    fn analyze_inserted(&mut self, s: &Schedule) -> ScheduleAnalysis {
        self.best.offer(self.inst, s);
        let a = analyze(self.inst, s);
        audit_delays(
            self.inst,
            &a,
            &mut self.stats.delay_violations_inserted,
            &mut self.stats.kernels_checked_inserted,
        );
        a
    }

    /// Checks the halting rules on a complete schedule. Returns `None` when
    /// every kernel has a delaying job and none contains a free job.
    fn judge(&mut self, perm: &[usize], s: &Schedule, a: &ScheduleAnalysis) -> Option<Verdict> {
        if tight_kernel(a).is_some() {
            self.stats.halt("tight-kernel");
            return Some(Verdict::Global);
        }
        if let Some(k) = a.kernels.iter().find(|k| k.delaying.is_none()) {
            let blamed = k.jobs.iter().copied().find(|&j| self.cfg.types[j].is_permuted());
            self.stats.halt(if blamed.is_some() { "kernel-with-permuted-job" } else { "untight-kernel" });
            return Some(Verdict::Next { blame: blamed.map(|b| (perm.to_vec(), b)) });
        }
        if a.kernels.iter().any(|k| k.jobs.iter().any(|&j| self.cfg.is_free(j))) {
            let before = self.cfg.permuted_jobs();
            if let StepOutcome::Updated { kernel, omitted, emerging } =
                iterative_step(&mut self.cfg, s, self.inst, StepMode::Complete)
            {
                self.stats.halt("new-kernel");
                self.stats.configurations += 1;
                let report = self.cfg.kernels[kernel].report.clone();
                let offspring = self.offspring(perm, s, &report, &before, &omitted, &emerging);
                self.stats.inconsistent += self.list.inconsistent;
                self.list = PriorityList::new(self.cfg.permuted_jobs(), offspring);
                return Some(Verdict::NewKernel);
            }
        }
        None
    }

    fn run_permutation(&mut self, perm: Vec<usize>) -> Verdict {
        let Some(s) = self.insert(&perm, &ReleaseOverrides::new(), self.opts.dominance) else {
            self.stats.dominated += 1;
            return Verdict::Next { blame: None };
        };
        let a = self.analyze_inserted(&s);
        if let Some(v) = self.judge(&perm, &s, &a) {
            return self.finish(v);
        }
        let v = self.stage2(perm, a);
        self.finish(v)
    }

    fn finish(&mut self, v: Verdict) -> Verdict {
        if let Verdict::Next { blame: Some((perm, e)) } = &v {
            for p in neighbors(self.inst, perm, *e) {
                self.list.push(p);
            }
        }
        v
    }

    /// Repeatedly activates the delaying job of the earliest kernel by moving
    /// it behind the kernel and raising its release, then rebuilds.
    fn stage2(&mut self, mut perm: Vec<usize>, mut a: ScheduleAnalysis) -> Verdict {
        self.stats.stage2_runs += 1;
        let n = self.inst.len();
        let permuted_count = self.cfg.permuted_count();
        let cap = ((n - permuted_count) * permuted_count) as u64;
        let mut over = ReleaseOverrides::new();
        let mut seen: HashSet<(Vec<usize>, usize)> = HashSet::new();
        let mut iterations = 0u64;
        let verdict = loop {
            let k = a.kernels[0].clone();
            let l = k.delaying.expect("judge leaves only kernels with delaying jobs");
            if !self.cfg.types[l].is_permuted() {
                self.stats.stage2_fixed_delaying += 1;
                self.stats.halt("stage2-fixed-delaying");
                break Verdict::Next { blame: None };
            }
            let mut key = k.jobs.clone();
            key.sort_unstable();
            if !seen.insert((key, l)) {
                self.stats.stage2_repeats += 1;
                self.stats.halt("stage2-repeat");
                break Verdict::Next { blame: None };
            }
            if iterations + 1 >= cap {
                self.stats.stage2_cap_hits += 1;
                self.stats.halt("stage2-cap");
                break Verdict::Next { blame: None };
            }
            let target = k.jobs.iter().map(|&j| over.effective(self.inst, j)).max().unwrap_or(0);
            over.raise(l, target);
            for &j in &k.emerging_after {
                if self.cfg.types[j].is_permuted() {
                    over.raise(j, target);
                }
            }
            let last_in_kernel = perm.iter().rposition(|j| k.jobs.contains(j));
            let from = perm.iter().position(|&j| j == l).expect("permuted job is in the permutation");
            if let Some(to) = last_in_kernel {
                if to > from {
                    let job = perm.remove(from);
                    perm.insert(to, job);
                }
            }
            iterations += 1;
            let s = self.insert(&perm, &over, false).expect("no dominance test in stage 2");
            a = self.analyze_inserted(&s);
            if let Some(v) = self.judge(&perm, &s, &a) {
                break v;
            }
        };
        self.stats.stage2_iterations_max = self.stats.stage2_iterations_max.max(iterations);
        if iterations > 0 && iterations >= cap {
            self.stats.stage2_bound_violations += 1;
        }
        verdict
    }

    /// Permutations that place every order of the new emerging jobs followed
    /// by every order of the new omitted jobs right before the first old
    /// permuted job at or after the new kernel.
    fn offspring(
        &self,
        perm: &[usize],
        s: &Schedule,
        k: &KernelReport,
        old: &[usize],
        omitted: &[usize],
        emerging: &[usize],
    ) -> Vec<Vec<usize>> {
        let old_perm: Vec<usize> = perm.iter().copied().filter(|j| old.contains(j)).collect();
        let anchor = old_perm
            .iter()
            .position(|&j| s.start_of(j).is_some_and(|t| t >= k.first_start))
            .unwrap_or(old_perm.len());
        let extra: Vec<usize> = self
            .cfg
            .permuted_jobs()
            .into_iter()
            .filter(|j| !old_perm.contains(j) && !omitted.contains(j) && !emerging.contains(j))
            .collect();
        let mut out = Vec::new();
        for b in all_orders(emerging) {
            for a in all_orders(omitted) {
                let mut p = old_perm[..anchor].to_vec();
                p.extend(&b);
                p.extend(&a);
                p.extend(&extra);
                p.extend(&old_perm[anchor..]);
                if self.cfg.is_consistent(self.inst, &p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Labels of the jobs as strings, for reports.
pub fn type_names(cfg: &Configuration) -> Vec<&'static str> {
    cfg.types.iter().map(JobType::short_name).collect()
}
