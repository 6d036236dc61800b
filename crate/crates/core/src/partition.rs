//! Job typing: the kernels found so far, their decompositions, the label of
//! every job and the partial schedule of non-permuted jobs built from them.

use serde::{Deserialize, Serialize};

use crate::decomposition::{decompose, decompose_jobs, Decomposition};
use crate::ldt::{activate, analyze, conflicts, ldt, KernelReport, ReleaseOverrides};
use crate::model::{Entry, Instance, Schedule, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Found while activating delaying jobs of plain LDT schedules.
    Initial,
    /// Found in the partial schedule of non-permuted jobs.
    Partial,
    /// Found in a complete schedule during enumeration.
    Complete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub report: KernelReport,
    pub decomposition: Decomposition,
    pub origin: Origin,
}

/// Role of a job. Kernel indices refer to [`Configuration::kernels`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum JobType {
    /// Emerging job of one or more kernels.
    Emerging { kernels: Vec<usize> },
    /// Omitted while decomposing a kernel.
    Omitted { kernel: usize },
    /// Emerging job of a kernel discovered in a complete schedule.
    LateEmerging { kernel: usize },
    /// Member of the atomic kernel of a decomposition.
    Atomic { kernel: usize },
    /// Member of another component of a decomposition.
    Component { kernel: usize },
    /// Not associated with any kernel.
    Free,
}

impl JobType {
    /// Jobs that are permuted by the enumeration.
    pub fn is_permuted(&self) -> bool {
        matches!(self, JobType::Emerging { .. } | JobType::Omitted { .. } | JobType::LateEmerging { .. })
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            JobType::Emerging { .. } => "T1_1",
            JobType::Omitted { .. } => "T1_2",
            JobType::LateEmerging { .. } => "T1_3",
            JobType::Atomic { .. } => "T2",
            JobType::Component { .. } => "T3",
            JobType::Free => "T4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub generation: usize,
    pub event: String,
    pub kernel: Option<usize>,
    pub relabelled: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub kernels: Vec<KernelEntry>,
    pub types: Vec<JobType>,
    /// Partial schedule of all non-permuted jobs.
    pub base_schedule: Schedule,
    pub generation: usize,
    pub iterative_updates: usize,
    pub rejected_updates: usize,
    /// LDT schedules produced by successive activations, the plain LDT first.
    pub initial_schedules: Vec<Schedule>,
    /// The plain LDT schedule has no conflict and is therefore optimal.
    pub conflict_free: bool,
    /// Why the activation sequence stopped.
    pub initial_halt: String,
    pub audit: Vec<AuditRecord>,
}

/// Outcome of one iterative step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Unchanged,
    /// A new kernel was found but its components collide with existing ones.
    Rejected,
    Updated { kernel: usize, omitted: Vec<usize>, emerging: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepMode {
    Partial,
    Complete,
}

impl Configuration {
    pub fn permuted_jobs(&self) -> Vec<usize> {
        (0..self.types.len()).filter(|&j| self.types[j].is_permuted()).collect()
    }

    pub fn permuted_count(&self) -> usize {
        self.types.iter().filter(|t| t.is_permuted()).count()
    }

    pub fn is_free(&self, job: usize) -> bool {
        self.types[job] == JobType::Free
    }

    /// Kernel ids ordered by the start of their decomposition.
    pub fn kernel_order(&self, inst: &Instance) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.kernels.len()).collect();
        ids.sort_by_key(|&k| (self.kernels[k].decomposition.span(inst).0, k));
        ids
    }

    pub fn component_intervals(&self, inst: &Instance) -> Vec<(Time, Time)> {
        self.kernels.iter().flat_map(|k| k.decomposition.intervals(inst)).collect()
    }

    fn overlaps_existing(&self, inst: &Instance, d: &Decomposition) -> bool {
        let old = self.component_intervals(inst);
        d.intervals(inst).iter().any(|&(a, b)| old.iter().any(|&(c, e)| a < e && c < b))
    }

    /// A permutation of the permuted jobs is consistent when the omitted and
    /// late emerging jobs of earlier kernels come before those of later
    /// kernels, and no late emerging job of a kernel sits between two omitted
    /// jobs of the same kernel.
    pub fn is_consistent(&self, inst: &Instance, perm: &[usize]) -> bool {
        let order = self.kernel_order(inst);
        let mut rank = vec![0usize; self.kernels.len()];
        for (pos, &k) in order.iter().enumerate() {
            rank[k] = pos;
        }
        let mut max_rank: Option<usize> = None;
        for &j in perm {
            let k = match self.types[j] {
                JobType::Omitted { kernel } | JobType::LateEmerging { kernel } => kernel,
                _ => continue,
            };
            if let Some(m) = max_rank {
                if rank[k] < m {
                    return false;
                }
            }
            max_rank = Some(max_rank.map_or(rank[k], |m| m.max(rank[k])));
        }
        for k in 0..self.kernels.len() {
            let omitted: Vec<usize> = perm
                .iter()
                .enumerate()
                .filter(|(_, &j)| self.types[j] == JobType::Omitted { kernel: k })
                .map(|(i, _)| i)
                .collect();
            if let (Some(&lo), Some(&hi)) = (omitted.first(), omitted.last()) {
                let between = perm[lo..hi].iter().any(|&j| self.types[j] == JobType::LateEmerging { kernel: k });
                if between {
                    return false;
                }
            }
        }
        true
    }

    fn label_decomposition(&mut self, id: usize, d: &Decomposition) -> Vec<(usize, String)> {
        let mut changed = Vec::new();
        for &j in &d.omitted {
            if self.types[j] == JobType::Free {
                self.types[j] = JobType::Omitted { kernel: id };
                changed.push((j, "T1_2".to_string()));
            }
        }
        for c in &d.components {
            for e in &c.entries {
                if self.types[e.job] == JobType::Free {
                    self.types[e.job] = if d.atomic_kernel.contains(&e.job) {
                        JobType::Atomic { kernel: id }
                    } else {
                        JobType::Component { kernel: id }
                    };
                    changed.push((e.job, self.types[e.job].short_name().to_string()));
                }
            }
        }
        changed
    }
}

/// Activates the delaying job of the earliest kernel of successive LDT
/// schedules, recording each kernel and its decomposition, then labels jobs
/// and builds the partial schedule. Stops when the earliest kernel has no
/// delaying job or repeats jobs or time of an earlier kernel.
pub fn initial_kernels(inst: &Instance) -> Configuration {
    let n = inst.len();
    let mut over = ReleaseOverrides::new();
    let mut s = ldt(inst, &over);
    let conflict_free = conflicts(inst, &s).is_empty();
    let mut cfg = Configuration {
        kernels: Vec::new(),
        types: vec![JobType::Free; n],
        base_schedule: Schedule::default(),
        generation: 0,
        iterative_updates: 0,
        rejected_updates: 0,
        initial_schedules: vec![s.clone()],
        conflict_free,
        initial_halt: String::new(),
        audit: Vec::new(),
    };
    if n == 0 {
        cfg.initial_halt = "empty".into();
        return cfg;
    }
    if conflict_free {
        cfg.initial_halt = "conflict-free".into();
        cfg.base_schedule = s;
        return cfg;
    }
    let mut reports: Vec<KernelReport> = Vec::new();
    loop {
        let a = analyze(inst, &s);
        let k = a.kernels[0].clone();
        let Some(l) = k.delaying else {
            cfg.initial_halt = "no-delaying-job".into();
            break;
        };
        if cfg.kernels.iter().any(|e| e.report.jobs.iter().any(|j| k.contains(*j))) {
            cfg.initial_halt = "repeated-kernel".into();
            break;
        }
        let d = decompose(inst, &k);
        if cfg.overlaps_existing(inst, &d) {
            cfg.initial_halt = "overlapping-kernel".into();
            break;
        }
        cfg.kernels.push(KernelEntry { report: k.clone(), decomposition: d, origin: Origin::Initial });
        reports.push(k.clone());
        let (next_over, next_s) = activate(inst, &over, &k, l).expect("delaying job is emerging");
        over = next_over;
        s = next_s;
        cfg.initial_schedules.push(s.clone());
        if cfg.kernels.len() > n {
            cfg.initial_halt = "cap".into();
            break;
        }
    }
    for id in 0..cfg.kernels.len() {
        let d = cfg.kernels[id].decomposition.clone();
        let relabelled = cfg.label_decomposition(id, &d);
        cfg.audit.push(AuditRecord { generation: 0, event: "initial-kernel".into(), kernel: Some(id), relabelled });
    }
    for (id, k) in reports.iter().enumerate() {
        let mut relabelled = Vec::new();
        for &j in &k.emerging {
            match &mut cfg.types[j] {
                JobType::Free => {
                    cfg.types[j] = JobType::Emerging { kernels: vec![id] };
                    relabelled.push((j, "T1_1".to_string()));
                }
                JobType::Emerging { kernels } if !kernels.contains(&id) => kernels.push(id),
                _ => {}
            }
        }
        cfg.audit.push(AuditRecord { generation: 0, event: "emerging".into(), kernel: Some(id), relabelled });
    }
    let base = cfg.initial_schedules.last().expect("at least one schedule").clone();
    cfg.base_schedule = build_base_schedule(&cfg, inst, &base);
    cfg
}

/// Initial kernels followed by iterative steps on the partial schedule until
/// it has no kernel with a free job.
pub fn stage0(inst: &Instance) -> Configuration {
    let mut cfg = initial_kernels(inst);
    if cfg.conflict_free {
        return cfg;
    }
    for _ in 0..=inst.len() {
        let s = cfg.base_schedule.clone();
        match iterative_step(&mut cfg, &s, inst, StepMode::Partial) {
            StepOutcome::Updated { .. } => {}
            _ => break,
        }
    }
    cfg
}

/// Components fixed at their times; free jobs at their times in `base`, or
/// in the earliest later idle interval that fits if that time is taken.
pub fn build_base_schedule(cfg: &Configuration, inst: &Instance, base: &Schedule) -> Schedule {
    let mut entries: Vec<Entry> = cfg
        .kernels
        .iter()
        .flat_map(|k| k.decomposition.components.iter().flat_map(|c| c.entries.iter().copied()))
        .collect();
    let mut busy: Vec<(Time, Time)> = entries.iter().map(|e| (e.start, e.start + inst.p(e.job))).collect();
    busy.sort_unstable();
    for e in &base.entries {
        if !cfg.is_free(e.job) {
            continue;
        }
        let p = inst.p(e.job);
        let mut t = e.start;
        for &(a, b) in &busy {
            if b <= t {
                continue;
            }
            if a >= t + p {
                break;
            }
            t = b;
        }
        entries.push(Entry { job: e.job, start: t });
        let pos = busy.partition_point(|&iv| iv < (t, t + p));
        busy.insert(pos, (t, t + p));
    }
    Schedule::merged(entries)
}

/// Looks for the earliest kernel of `s` that contains a free job. If found,
/// its free jobs are decomposed into a new kernel entry, its free emerging
/// jobs become permuted, and the partial schedule is rebuilt.
pub fn iterative_step(cfg: &mut Configuration, s: &Schedule, inst: &Instance, mode: StepMode) -> StepOutcome {
    let a = analyze(inst, s);
    let Some(k) = a.kernels.iter().find(|k| k.jobs.iter().any(|&j| cfg.is_free(j))) else {
        return StepOutcome::Unchanged;
    };
    let free: Vec<usize> = k.jobs.iter().copied().filter(|&j| cfg.is_free(j)).collect();
    let d = decompose_jobs(inst, &free);
    if cfg.overlaps_existing(inst, &d) {
        cfg.rejected_updates += 1;
        cfg.audit.push(AuditRecord {
            generation: cfg.generation,
            event: "rejected-overlap".into(),
            kernel: None,
            relabelled: Vec::new(),
        });
        return StepOutcome::Rejected;
    }
    let id = cfg.kernels.len();
    let mut emerging: Vec<usize> = Vec::new();
    for j in k.delaying.into_iter().chain(k.emerging.iter().copied()) {
        if cfg.is_free(j) && !emerging.contains(&j) {
            emerging.push(j);
        }
    }
    let previous = cfg.base_schedule.clone();
    let mut relabelled = cfg.label_decomposition(id, &d);
    for &j in &emerging {
        cfg.types[j] = match mode {
            StepMode::Partial => JobType::Emerging { kernels: vec![id] },
            StepMode::Complete => JobType::LateEmerging { kernel: id },
        };
        relabelled.push((j, cfg.types[j].short_name().to_string()));
    }
    let omitted = d.omitted.clone();
    cfg.kernels.push(KernelEntry {
        report: k.clone(),
        decomposition: d,
        origin: match mode {
            StepMode::Partial => Origin::Partial,
            StepMode::Complete => Origin::Complete,
        },
    });
    cfg.generation += 1;
    cfg.iterative_updates += 1;
    cfg.audit.push(AuditRecord {
        generation: cfg.generation,
        event: "new-kernel".into(),
        kernel: Some(id),
        relabelled,
    });
    cfg.base_schedule = build_base_schedule(cfg, inst, &previous);
    StepOutcome::Updated { kernel: id, omitted, emerging }
}
