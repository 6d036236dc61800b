//! Order in which permutations of the permuted jobs are tried.

use std::collections::{HashSet, VecDeque};

use crate::iea::insertion::insert_at_idle;
use crate::model::{Instance, Time};
use crate::partition::Configuration;
use crate::perm::next_lex;

/// Greedy permutation: repeatedly take the earliest idle moment of the
/// partial schedule at which some permuted job is released and insert the
/// released job with the largest delivery there (shortest, then smallest id
/// on ties). The induced order is the permutation.
pub fn steady_permutation(cfg: &Configuration, inst: &Instance) -> Vec<usize> {
    let mut left = cfg.permuted_jobs();
    let mut s = cfg.base_schedule.clone();
    let mut perm = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let min_r = left.iter().map(|&j| inst.r(j)).min().expect("non-empty");
        let mut prev_end = Time::MIN;
        let mut t = None;
        for e in &s.entries {
            let cand = prev_end.max(min_r);
            if cand < e.start {
                t = Some(cand);
                break;
            }
            prev_end = e.start + inst.p(e.job);
        }
        let t = t.unwrap_or(prev_end.max(min_r));
        let &pick = left
            .iter()
            .filter(|&&j| inst.r(j) <= t)
            .max_by_key(|&&j| (inst.q(j), std::cmp::Reverse(inst.p(j)), std::cmp::Reverse(j)))
            .expect("a job is released at the chosen moment");
        s = insert_at_idle(&s, inst, pick, t).0;
        left.retain(|&j| j != pick);
        perm.push(pick);
    }
    perm
}

/// Queue of preferred permutations backed by a lexicographic sweep over all
/// permutations, never yielding the same permutation twice per configuration.
#[derive(Clone, Debug, Default)]
pub struct PriorityList {
    queue: VecDeque<Vec<usize>>,
    visited: HashSet<Vec<usize>>,
    sweep: Vec<usize>,
    sweep_started: bool,
    sweep_done: bool,
    pub inconsistent: u64,
}

impl PriorityList {
    pub fn new(jobs: Vec<usize>, preferred: Vec<Vec<usize>>) -> Self {
        let mut sweep = jobs;
        sweep.sort_unstable();
        PriorityList {
            queue: preferred.into(),
            visited: HashSet::new(),
            sweep,
            sweep_started: false,
            sweep_done: false,
            inconsistent: 0,
        }
    }

    pub fn push(&mut self, perm: Vec<usize>) {
        self.queue.push_back(perm);
    }

    pub fn visited(&self) -> usize {
        self.visited.len()
    }

    pub fn next(&mut self, cfg: &Configuration, inst: &Instance) -> Option<Vec<usize>> {
        while let Some(p) = self.queue.pop_front() {
            if self.visited.contains(&p) {
                continue;
            }
            if !cfg.is_consistent(inst, &p) {
                self.visited.insert(p);
                self.inconsistent += 1;
                continue;
            }
            self.visited.insert(p.clone());
            return Some(p);
        }
        while !self.sweep_done {
            if self.sweep_started {
                if !next_lex(&mut self.sweep) {
                    self.sweep_done = true;
                    break;
                }
            }
            self.sweep_started = true;
            if self.visited.contains(&self.sweep) {
                continue;
            }
            let p = self.sweep.clone();
            self.visited.insert(p.clone());
            if !cfg.is_consistent(inst, &p) {
                self.inconsistent += 1;
                continue;
            }
            return Some(p);
        }
        None
    }
}

/// Swaps of `blamed` with earlier jobs of smaller delivery, nearest first.
pub fn neighbors(inst: &Instance, perm: &[usize], blamed: usize) -> Vec<Vec<usize>> {
    let Some(pos) = perm.iter().position(|&j| j == blamed) else {
        return Vec::new();
    };
    (0..pos)
        .rev()
        .filter(|&i| inst.q(perm[i]) < inst.q(blamed))
        .map(|i| {
            let mut p = perm.to_vec();
            p.swap(i, pos);
            p
        })
        .collect()
}
