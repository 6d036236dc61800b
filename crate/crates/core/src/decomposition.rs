//! Recursive decomposition of a kernel into uniform components.
//!
//! The kernel jobs are rescheduled by LDT on their own. The result splits at
//! idle gaps into components. A component whose own kernel still has a
//! delaying job is mixed: that job is omitted and the rest of the component is
//! decomposed again. Every final component starts at its earliest release
//! and its kernel has no delaying job, so each component value is a lower
//! bound on the optimum.

use serde::{Deserialize, Serialize};

use crate::ldt::{analyze, blocks, ldt_subset, KernelReport};
use crate::model::{Entry, Instance, Schedule, Time};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub entries: Vec<Entry>,
}

impl Component {
    pub fn start(&self) -> Time {
        self.entries[0].start
    }

    pub fn end(&self, inst: &Instance) -> Time {
        let e = self.entries.last().expect("components are non-empty");
        e.start + inst.p(e.job)
    }

    pub fn jobs(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.job).collect()
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.entries.clone())
    }

    pub fn value(&self, inst: &Instance) -> Time {
        self.schedule().makespan(inst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Uniform components in time order.
    pub components: Vec<Component>,
    /// Jobs removed during the recursion, in removal order.
    pub omitted: Vec<usize>,
    /// Jobs found scheduled ahead of a job with larger delivery that preceded
    /// them one level up.
    pub anticipated: Vec<usize>,
    /// Index of the component attaining `lb_value` (the latest on ties).
    pub atomic: usize,
    /// Kernel of the atomic component.
    pub atomic_kernel: Vec<usize>,
    pub lb_value: Time,
    pub steps: usize,
}

impl Decomposition {
    pub fn schedule(&self) -> Schedule {
        Schedule::merged(self.components.iter().flat_map(|c| c.entries.iter().copied()))
    }

    pub fn component_jobs(&self) -> Vec<usize> {
        self.components.iter().flat_map(|c| c.jobs()).collect()
    }

    pub fn other_component_jobs(&self) -> Vec<usize> {
        self.component_jobs().into_iter().filter(|j| !self.atomic_kernel.contains(j)).collect()
    }

    /// Time interval covered by the components.
    pub fn span(&self, inst: &Instance) -> (Time, Time) {
        let start = self.components.first().map(|c| c.start()).unwrap_or(0);
        let end = self.components.last().map(|c| c.end(inst)).unwrap_or(0);
        (start, end)
    }

    /// Time intervals of the individual components.
    pub fn intervals(&self, inst: &Instance) -> Vec<(Time, Time)> {
        self.components.iter().map(|c| (c.start(), c.end(inst))).collect()
    }
}

pub fn decompose(inst: &Instance, kernel: &KernelReport) -> Decomposition {
    decompose_jobs(inst, &kernel.jobs)
}

/// Decomposes an arbitrary non-empty job set given in its current order.
pub fn decompose_jobs(inst: &Instance, order: &[usize]) -> Decomposition {
    assert!(!order.is_empty(), "cannot decompose an empty job set");
    let mut comps = Vec::new();
    let mut omitted = Vec::new();
    let mut anticipated = Vec::new();
    split(inst, order, &mut comps, &mut omitted, &mut anticipated);
    comps.sort_by_key(|c: &Component| c.start());
    let mut atomic = 0;
    let mut lb_value = Time::MIN;
    for (i, c) in comps.iter().enumerate() {
        let v = c.value(inst);
        if v >= lb_value {
            lb_value = v;
            atomic = i;
        }
    }
    let atomic_kernel = analyze(inst, &comps[atomic].schedule()).kernels[0].jobs.clone();
    let steps = omitted.len();
    Decomposition { components: comps, omitted, anticipated, atomic, atomic_kernel, lb_value, steps }
}

fn split(
    inst: &Instance,
    order: &[usize],
    comps: &mut Vec<Component>,
    omitted: &mut Vec<usize>,
    anticipated: &mut Vec<usize>,
) {
    let s = ldt_subset(inst, order, |j| inst.r(j));
    for b in blocks(inst, &s) {
        let part = Schedule::new(s.entries[b.first..=b.last].to_vec());
        let rank = |j: usize| order.iter().position(|&x| x == j).expect("job from parent");
        for (a, ea) in part.entries.iter().enumerate() {
            let i = ea.job;
            let ahead = part.entries[a + 1..]
                .iter()
                .any(|eb| inst.q(eb.job) > inst.q(i) && rank(eb.job) < rank(i));
            if ahead && !anticipated.contains(&i) {
                anticipated.push(i);
            }
        }
        let a = analyze(inst, &part);
        match a.kernels[0].delaying {
            Some(l) => {
                omitted.push(l);
                let rest: Vec<usize> = part.jobs().into_iter().filter(|&j| j != l).collect();
                split(inst, &rest, comps, omitted, anticipated);
            }
            None => comps.push(Component { entries: part.entries }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldt::{ldt, ReleaseOverrides};

    fn kernel_of(inst: &Instance) -> KernelReport {
        analyze(inst, &ldt(inst, &ReleaseOverrides::new())).kernels[0].clone()
    }

    #[test]
    fn first_example_is_uniform() {
        let inst = Instance::from_triples(&[(0, 5, 0), (1, 2, 10), (3, 1, 9)]).unwrap();
        let d = decompose(&inst, &kernel_of(&inst));
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].entries, vec![Entry { job: 1, start: 1 }, Entry { job: 2, start: 3 }]);
        assert!(d.omitted.is_empty());
        assert_eq!(d.atomic_kernel, vec![1, 2]);
        assert_eq!(d.lb_value, 13);
    }

    #[test]
    fn second_example_omits_one_job() {
        let inst = Instance::from_triples(&[(0, 10, 0), (2, 3, 6), (4, 2, 8)]).unwrap();
        let d = decompose(&inst, &kernel_of(&inst));
        assert_eq!(d.omitted, vec![1]);
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].entries, vec![Entry { job: 2, start: 4 }]);
        assert_eq!(d.lb_value, 14);
        assert_eq!(d.steps, 1);
        assert_eq!(d.anticipated, vec![1]);
    }

    #[test]
    fn single_job_kernel() {
        let inst = Instance::from_triples(&[(3, 2, 1)]).unwrap();
        let d = decompose_jobs(&inst, &[0]);
        assert_eq!(d.components[0].entries, vec![Entry { job: 0, start: 3 }]);
        assert_eq!(d.lb_value, 6);
    }

    #[test]
    fn uniform_component_is_a_fixed_point() {
        let inst = Instance::from_triples(&[(0, 4, 3), (1, 2, 9), (2, 1, 8), (9, 3, 1), (10, 1, 7)]).unwrap();
        let d = decompose_jobs(&inst, &[0, 1, 2, 3, 4]);
        for c in &d.components {
            let again = decompose_jobs(&inst, &c.jobs());
            assert_eq!(again.components, vec![c.clone()]);
            assert!(again.omitted.is_empty());
        }
    }
}
