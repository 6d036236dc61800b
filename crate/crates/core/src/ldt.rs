//! Largest-delivery-time list scheduling and the analysis of its output:
//! blocks, kernels, overflow jobs, delaying jobs and conflicts.

use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};
use crate::model::{Entry, Instance, Schedule, Time};

/// Per-job release raises. Raising never lowers an existing value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReleaseOverrides(BTreeMap<usize, Time>);

impl ReleaseOverrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, job: usize) -> Option<Time> {
        self.0.get(&job).copied()
    }

    pub fn effective(&self, inst: &Instance, job: usize) -> Time {
        match self.0.get(&job) {
            Some(&t) => t.max(inst.r(job)),
            None => inst.r(job),
        }
    }

    pub fn raise(&mut self, job: usize, t: Time) {
        let slot = self.0.entry(job).or_insert(t);
        *slot = (*slot).max(t);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Time)> + '_ {
        self.0.iter().map(|(&j, &t)| (j, t))
    }
}

/// LDT on all jobs with the given overrides.
pub fn ldt(inst: &Instance, over: &ReleaseOverrides) -> Schedule {
    let all: Vec<usize> = (0..inst.len()).collect();
    ldt_subset(inst, &all, |j| over.effective(inst, j))
}

/// LDT on a subset of jobs with an arbitrary release function.
///
/// Whenever the machine is free, the next decision time is the later of that
/// moment and the earliest release among unscheduled jobs. Among released
/// jobs the largest delivery wins, then the shortest processing time, then the
/// smallest id.
pub fn ldt_subset(inst: &Instance, jobs: &[usize], release: impl Fn(usize) -> Time) -> Schedule {
    let mut pending: Vec<(Time, usize)> = jobs.iter().map(|&j| (release(j), j)).collect();
    pending.sort_unstable();
    let mut heap: BinaryHeap<(Time, Reverse<Time>, Reverse<usize>)> = BinaryHeap::new();
    let mut entries = Vec::with_capacity(jobs.len());
    let mut next = 0;
    let mut t = Time::MIN;
    while entries.len() < pending.len() {
        if heap.is_empty() {
            t = t.max(pending[next].0);
        }
        while next < pending.len() && pending[next].0 <= t {
            let j = pending[next].1;
            heap.push((inst.q(j), Reverse(inst.p(j)), Reverse(j)));
            next += 1;
        }
        let (_, _, Reverse(j)) = heap.pop().expect("a released job exists");
        entries.push(Entry { job: j, start: t });
        t += inst.p(j);
    }
    Schedule::new(entries)
}

/// Maximal run of consecutive entries with no idle time in between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Index range `[first, last]` into the schedule entries.
    pub first: usize,
    pub last: usize,
    pub start: Time,
    pub end: Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    /// Kernel jobs in schedule order.
    pub jobs: Vec<usize>,
    /// Index of the first kernel entry in the analyzed schedule.
    pub first_index: usize,
    pub overflow: usize,
    /// Full completion time of the overflow job.
    pub value: Time,
    pub first_start: Time,
    pub min_release: Time,
    pub delaying: Option<usize>,
    /// `first_start - min_release`.
    pub delay: Time,
    /// Jobs of the enclosing block with delivery below the overflow job's.
    pub emerging: Vec<usize>,
    /// Emerging jobs scheduled after the kernel.
    pub emerging_after: Vec<usize>,
    pub block: usize,
}

impl KernelReport {
    pub fn contains(&self, job: usize) -> bool {
        self.jobs.contains(&job)
    }

    /// The kernel starts at its earliest release, so `value` is a lower bound.
    pub fn is_tight(&self) -> bool {
        self.delay == 0
    }

    pub fn max_release(&self, inst: &Instance) -> Time {
        self.jobs.iter().map(|&j| inst.r(j)).max().unwrap_or(0)
    }

    pub fn end(&self, inst: &Instance) -> Time {
        self.first_start + self.jobs.iter().map(|&j| inst.p(j)).sum::<Time>()
    }
}

/// A job with larger delivery released while `job` was running.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub job: usize,
    pub intruder: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleAnalysis {
    pub makespan: Time,
    pub blocks: Vec<Block>,
    /// One kernel per block that attains the makespan, earliest first.
    pub kernels: Vec<KernelReport>,
}

impl ScheduleAnalysis {
    pub fn earliest(&self) -> Option<&KernelReport> {
        self.kernels.first()
    }
}

pub fn blocks(inst: &Instance, s: &Schedule) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::new();
    for (i, e) in s.entries.iter().enumerate() {
        let end = e.start + inst.p(e.job);
        match out.last_mut() {
            Some(b) if b.end == e.start => {
                b.last = i;
                b.end = end;
            }
            _ => out.push(Block { first: i, last: i, start: e.start, end }),
        }
    }
    out
}

/// Kernel analysis against the releases of `inst`.
pub fn analyze(inst: &Instance, s: &Schedule) -> ScheduleAnalysis {
    let blocks = blocks(inst, s);
    let makespan = s.makespan(inst);
    let mut kernels = Vec::new();
    if s.is_empty() {
        return ScheduleAnalysis { makespan, blocks, kernels };
    }
    for (bi, b) in blocks.iter().enumerate() {
        let Some(o_idx) = (b.first..=b.last).rev().find(|&i| s.full_completion_at(inst, i) == makespan) else {
            continue;
        };
        let o = s.entries[o_idx].job;
        let q_o = inst.q(o);
        let mut f = o_idx;
        while f > b.first && inst.q(s.entries[f - 1].job) >= q_o {
            f -= 1;
        }
        let jobs: Vec<usize> = s.entries[f..=o_idx].iter().map(|e| e.job).collect();
        let first_start = s.entries[f].start;
        let min_release = jobs.iter().map(|&j| inst.r(j)).min().expect("kernel is non-empty");
        let delaying = if f > b.first && first_start > min_release { Some(s.entries[f - 1].job) } else { None };
        let mut emerging = Vec::new();
        let mut emerging_after = Vec::new();
        for i in b.first..=b.last {
            let j = s.entries[i].job;
            if inst.q(j) < q_o {
                emerging.push(j);
                if i > o_idx {
                    emerging_after.push(j);
                }
            }
        }
        kernels.push(KernelReport {
            jobs,
            first_index: f,
            overflow: o,
            value: makespan,
            first_start,
            min_release,
            delaying,
            delay: first_start - min_release,
            emerging,
            emerging_after,
            block: bi,
        });
    }
    ScheduleAnalysis { makespan, blocks, kernels }
}

/// For every entry, the earliest-released job of the schedule with larger
/// delivery that is released inside `(start, completion]` of that entry.
pub fn conflicts(inst: &Instance, s: &Schedule) -> Vec<Conflict> {
    let mut by_release: Vec<usize> = s.jobs();
    by_release.sort_by_key(|&j| (inst.r(j), j));
    let mut out = Vec::new();
    for e in &s.entries {
        let c = e.start + inst.p(e.job);
        let from = by_release.partition_point(|&j| inst.r(j) <= e.start);
        let hit = by_release[from..]
            .iter()
            .take_while(|&&j| inst.r(j) <= c)
            .find(|&&j| inst.q(j) > inst.q(e.job));
        if let Some(&x) = hit {
            out.push(Conflict { job: e.job, intruder: x });
        }
    }
    out
}

/// Raises the release of `l` and of the emerging jobs after `kernel` to the
/// largest kernel release, then reruns LDT.
pub fn activate(
    inst: &Instance,
    over: &ReleaseOverrides,
    kernel: &KernelReport,
    l: usize,
) -> Result<(ReleaseOverrides, Schedule)> {
    if kernel.delaying != Some(l) && !kernel.emerging.contains(&l) {
        return Err(Error::Contract(format!("job {l} is not an emerging job for the kernel")));
    }
    let target = kernel.jobs.iter().map(|&j| over.effective(inst, j)).max().unwrap_or(0);
    let mut next = over.clone();
    next.raise(l, target);
    for &j in &kernel.emerging_after {
        next.raise(j, target);
    }
    let s = ldt(inst, &next);
    Ok((next, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i1() -> Instance {
        Instance::from_triples(&[(0, 5, 0), (1, 2, 10), (3, 1, 9)]).unwrap()
    }

    fn i2() -> Instance {
        Instance::from_triples(&[(0, 10, 0), (2, 3, 6), (4, 2, 8)]).unwrap()
    }

    fn starts(s: &Schedule) -> Vec<(usize, Time)> {
        s.entries.iter().map(|e| (e.job, e.start)).collect()
    }

    #[test]
    fn ldt_on_first_example() {
        let inst = i1();
        let s = ldt(&inst, &ReleaseOverrides::new());
        assert_eq!(starts(&s), vec![(0, 0), (1, 5), (2, 7)]);
        assert_eq!(s.makespan(&inst), 17);
        let a = analyze(&inst, &s);
        let k = a.earliest().unwrap();
        assert_eq!(k.jobs, vec![1, 2]);
        assert_eq!(k.overflow, 2);
        assert_eq!(k.delaying, Some(0));
        assert_eq!(k.delay, 4);
        assert!(k.delay < inst.p(0));
    }

    #[test]
    fn ldt_on_second_example() {
        let inst = i2();
        let s = ldt(&inst, &ReleaseOverrides::new());
        assert_eq!(starts(&s), vec![(0, 0), (2, 10), (1, 12)]);
        assert_eq!(s.makespan(&inst), 21);
        let k = analyze(&inst, &s).kernels[0].clone();
        assert_eq!(k.jobs, vec![2, 1]);
        assert_eq!(k.delaying, Some(0));
        assert_eq!(k.delay, 8);
    }

    #[test]
    fn activation_on_examples() {
        let inst = i1();
        let base = ReleaseOverrides::new();
        let s = ldt(&inst, &base);
        let k = analyze(&inst, &s).kernels[0].clone();
        let (over, s1) = activate(&inst, &base, &k, 0).unwrap();
        assert_eq!(starts(&s1), vec![(1, 1), (2, 3), (0, 4)]);
        assert_eq!(s1.makespan(&inst), 13);
        let (again, s2) = activate(&inst, &over, &k, 0).unwrap();
        assert_eq!(again, over);
        assert_eq!(s2, s1);

        let inst = i2();
        let s = ldt(&inst, &base);
        let k = analyze(&inst, &s).kernels[0].clone();
        let (_, s1) = activate(&inst, &base, &k, 0).unwrap();
        assert_eq!(starts(&s1), vec![(1, 2), (2, 5), (0, 7)]);
        assert_eq!(s1.makespan(&inst), 17);
        assert!(activate(&inst, &base, &k, 2).is_err());
    }

    #[test]
    fn conflicts_in_first_example() {
        let inst = i1();
        let s = ldt(&inst, &ReleaseOverrides::new());
        assert_eq!(conflicts(&inst, &s), vec![Conflict { job: 0, intruder: 1 }]);
    }

    #[test]
    fn single_job_and_empty() {
        let inst = Instance::from_triples(&[(4, 3, 2)]).unwrap();
        let s = ldt(&inst, &ReleaseOverrides::new());
        assert_eq!(starts(&s), vec![(0, 4)]);
        let k = &analyze(&inst, &s).kernels[0];
        assert!(k.is_tight() && k.delaying.is_none());
        let empty = Instance::new(vec![]).unwrap();
        let s = ldt(&empty, &ReleaseOverrides::new());
        assert!(s.is_empty());
        assert!(analyze(&empty, &s).kernels.is_empty());
    }

    #[test]
    fn ties_prefer_shorter_then_smaller_id() {
        let inst = Instance::from_triples(&[(0, 3, 5), (0, 2, 5), (0, 2, 5)]).unwrap();
        let s = ldt(&inst, &ReleaseOverrides::new());
        assert_eq!(s.jobs(), vec![1, 2, 0]);
    }

    #[test]
    fn overrides_only_raise() {
        let inst = i1();
        let mut o = ReleaseOverrides::new();
        o.raise(0, 3);
        o.raise(0, 1);
        assert_eq!(o.effective(&inst, 0), 3);
        o.raise(2, 1);
        assert_eq!(o.effective(&inst, 2), 3);
    }
}
