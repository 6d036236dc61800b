//! Depth-first branch and bound over active schedules, used to settle cases
//! the kernel enumeration cannot certify.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::model::{Entry, Instance, Schedule, Time};

/// Makespan of the preemptive LDT schedule of `jobs`, none starting before
/// `t0`. A lower bound for every non-preemptive schedule of those jobs.
pub fn preemptive_bound(inst: &Instance, jobs: &[usize], t0: Time) -> Time {
    let mut order: Vec<(Time, usize)> = jobs.iter().map(|&j| (inst.r(j).max(t0), j)).collect();
    order.sort_unstable();
    let mut heap: BinaryHeap<(Time, Reverse<usize>)> = BinaryHeap::new();
    let mut left: Vec<Time> = vec![0; inst.len()];
    let mut best = Time::MIN;
    let mut t = Time::MIN;
    let mut next = 0;
    while next < order.len() || !heap.is_empty() {
        if heap.is_empty() {
            t = t.max(order[next].0);
        }
        while next < order.len() && order[next].0 <= t {
            let j = order[next].1;
            left[j] = inst.p(j);
            heap.push((inst.q(j), Reverse(j)));
            next += 1;
        }
        let &(q, Reverse(j)) = heap.peek().expect("non-empty");
        let horizon = if next < order.len() { order[next].0 } else { Time::MAX };
        let run = left[j].min(horizon - t);
        t += run;
        left[j] -= run;
        if left[j] == 0 {
            heap.pop();
            best = best.max(t + q);
        }
    }
    best
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    pub schedule: Option<Schedule>,
    pub nodes: u64,
    pub complete: bool,
}

/// Finds a schedule with makespan below `upper` if one exists. `complete`
/// is false when the node budget ran out first.
pub fn search(inst: &Instance, upper: Time, budget: Option<u64>) -> SearchOutcome {
    let n = inst.len();
    let mut st = State {
        inst,
        best: upper,
        best_seq: None,
        seq: Vec::with_capacity(n),
        used: vec![false; n],
        nodes: 0,
        budget: budget.unwrap_or(u64::MAX),
        aborted: false,
    };
    st.dfs(Time::MIN, Time::MIN);
    SearchOutcome {
        schedule: st.best_seq.map(|seq| Schedule::new(seq)),
        nodes: st.nodes,
        complete: !st.aborted,
    }
}

struct State<'a> {
    inst: &'a Instance,
    best: Time,
    best_seq: Option<Vec<Entry>>,
    seq: Vec<Entry>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl State<'_> {
    fn dfs(&mut self, t: Time, value: Time) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let inst = self.inst;
        let rest: Vec<usize> = (0..inst.len()).filter(|&j| !self.used[j]).collect();
        if rest.is_empty() {
            if value < self.best {
                self.best = value;
                self.best_seq = Some(self.seq.clone());
            }
            return;
        }
        if value.max(preemptive_bound(inst, &rest, t)) >= self.best {
            return;
        }
        // Only jobs that can start before the earliest possible completion
        // lead to active schedules.
        let cutoff = rest.iter().map(|&j| inst.r(j).max(t) + inst.p(j)).min().expect("non-empty");
        let mut cands: Vec<usize> = rest.into_iter().filter(|&j| inst.r(j).max(t) < cutoff).collect();
        cands.sort_by_key(|&j| (Reverse(inst.q(j)), inst.r(j), j));
        for j in cands {
            let start = inst.r(j).max(t);
            let end = start + inst.p(j);
            self.used[j] = true;
            self.seq.push(Entry { job: j, start });
            self.dfs(end, value.max(end + inst.q(j)));
            self.seq.pop();
            self.used[j] = false;
            if self.aborted {
                return;
            }
        }
    }
}
