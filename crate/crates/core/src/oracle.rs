//! Reference answers for small instances: brute force over all job orders
//! and the preemptive relaxation. Shares no search code with the solvers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{Instance, Schedule, Time};

pub const DEFAULT_CAP: usize = 10;

/// Optimal schedule by trying every order as a semi-active schedule.
/// `prune` skips orders whose prefix already reaches the best value.
pub fn brute_force(inst: &Instance, cap: usize, prune: bool) -> Result<(Schedule, Time)> {
    let n = inst.len();
    if n > cap {
        return Err(Error::OracleRefused { n, cap });
    }
    if n == 0 {
        return Ok((Schedule::default(), 0));
    }
    let mut order: Vec<usize> = (0..n).collect();
    // finish[i] and value[i] describe the prefix order[..=i].
    let mut finish = vec![0 as Time; n];
    let mut value = vec![0 as Time; n];
    let mut best = Time::MAX;
    let mut best_order = order.clone();
    let mut from = 0;
    loop {
        let mut cut = None;
        for i in from..n {
            let j = order[i];
            let prev = if i == 0 { Time::MIN } else { finish[i - 1] };
            let start = prev.max(inst.r(j));
            finish[i] = start + inst.p(j);
            let v = finish[i] + inst.q(j);
            value[i] = if i == 0 { v } else { value[i - 1].max(v) };
            if prune && value[i] >= best {
                cut = Some(i);
                break;
            }
        }
        match cut {
            None => {
                if value[n - 1] < best {
                    best = value[n - 1];
                    best_order = order.clone();
                }
                match successor(&mut order) {
                    Some(i) => from = i,
                    None => break,
                }
            }
            Some(i) => {
                // Every order sharing order[..=i] is no better: skip them.
                order[i + 1..].sort_unstable_by(|a, b| b.cmp(a));
                match successor(&mut order) {
                    Some(k) => from = k,
                    None => break,
                }
            }
        }
    }
    Ok((Schedule::from_sequence(inst, &best_order), best))
}

/// Next order in lexicographic sequence; returns the first changed index.
fn successor(v: &mut [usize]) -> Option<usize> {
    let n = v.len();
    let pivot = (0..n.saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1])?;
    let swap = (pivot + 1..n).rev().find(|&k| v[k] > v[pivot]).expect("exists");
    v.swap(pivot, swap);
    v[pivot + 1..].reverse();
    Some(pivot)
}

/// Makespan of the preemptive schedule that always runs the released job
/// with the largest delivery time. Never exceeds the optimum.
pub fn preemptive_ldt_bound(inst: &Instance) -> Time {
    let n = inst.len();
    let mut by_release: Vec<usize> = (0..n).collect();
    by_release.sort_by_key(|&j| inst.r(j));
    let mut remaining: Vec<Time> = (0..n).map(|j| inst.p(j)).collect();
    let mut ready: BinaryHeap<(Time, Reverse<usize>)> = BinaryHeap::new();
    let mut now: Time = 0;
    let mut k = 0;
    let mut result = 0;
    let mut done = 0;
    while done < n {
        if ready.is_empty() && now < inst.r(by_release[k]) {
            now = inst.r(by_release[k]);
        }
        while k < n && inst.r(by_release[k]) <= now {
            let j = by_release[k];
            ready.push((inst.q(j), Reverse(j)));
            k += 1;
        }
        let (q, Reverse(j)) = *ready.peek().expect("a job is ready");
        let next_event = if k < n { inst.r(by_release[k]) } else { Time::MAX };
        let slice = remaining[j].min(next_event - now);
        now += slice;
        remaining[j] -= slice;
        if remaining[j] == 0 {
            ready.pop();
            done += 1;
            result = result.max(now + q);
        }
    }
    result
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

    #[test]
    fn known_optima() {
        assert_eq!(brute_force(&i1(), 10, true).unwrap().1, 13);
        assert_eq!(brute_force(&i2(), 10, true).unwrap().1, 17);
        assert_eq!(brute_force(&i2(), 10, false).unwrap().1, 17);
        let (s, v) = brute_force(&i2(), 10, true).unwrap();
        assert_eq!(s.makespan(&i2()), v);
    }

    #[test]
    fn preemptive_bound_of_examples() {
        assert_eq!(preemptive_ldt_bound(&i1()), 13);
        assert_eq!(preemptive_ldt_bound(&i2()), 15);
    }

    #[test]
    fn refuses_above_cap() {
        let inst = Instance::from_triples(&[(0, 1, 0); 4]).unwrap();
        assert!(matches!(brute_force(&inst, 3, true), Err(Error::OracleRefused { n: 4, cap: 3 })));
    }

    #[test]
    fn successor_visits_all_orders() {
        let mut v = vec![0, 1, 2, 3];
        let mut count = 1;
        while successor(&mut v).is_some() {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
