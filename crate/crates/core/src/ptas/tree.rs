//! Building complete schedules for one order of the long jobs.
//!
//! A sweep walks forward in time with the long jobs fixed in their order and
//! tentative start times. Short jobs (and a long job pulled out of the
//! skeleton) are placed LDT-style into the room the long jobs leave. Whenever
//! a long job would run over the release of a short job with larger delivery
//! and the rest of the long job is itself long, the state is recorded as a
//! branch point. Backtracking resumes from a branch point with the long job
//! pulled out and the short job started first.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::ldt::analyze;
use crate::model::{Entry, Instance, Schedule, Time};

#[derive(Clone, Debug)]
struct Sweep {
    settled: Vec<Entry>,
    frontier: Time,
    skeleton: VecDeque<Entry>,
    pending: Vec<usize>,
    shorts: BTreeSet<(Time, usize)>,
}

#[derive(Clone, Debug)]
struct BranchPoint {
    id: usize,
    state: Sweep,
    long: usize,
    short: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeEnd {
    /// A kernel is delayed by at most `lb / k`.
    ShortDelaying { short_job: bool },
    /// A kernel without delaying job starts at its earliest release.
    TightKernel,
    /// A kernel without delaying job that is not tight.
    Secondary { blamed_long: Option<usize> },
    /// Every kernel is delayed by a long job that cannot be pulled out.
    LongDelayingUnresolved,
    /// Complete-schedule budget reached.
    Budget,
}

#[derive(Clone, Debug)]
pub struct TreeOutcome {
    pub schedules: Vec<Schedule>,
    pub end: TreeEnd,
    pub expansions: u64,
    pub repeated_activations: u64,
    /// Kernels whose delaying short job delays by at least its own length.
    pub delay_property_failures: u64,
}

pub struct TreeInput<'a> {
    pub inst: &'a Instance,
    pub k: u64,
    /// Lower bound on the optimum of `inst`.
    pub lb: Time,
    /// Long jobs with their start times, in start order.
    pub skeleton: Vec<Entry>,
    pub is_long: &'a [bool],
    pub budget: usize,
}

pub fn build_tree(input: &TreeInput<'_>) -> TreeOutcome {
    let inst = input.inst;
    let shorts: BTreeSet<(Time, usize)> =
        (0..inst.len()).filter(|&j| !input.is_long[j]).map(|j| (inst.r(j), j)).collect();
    let root = Sweep {
        settled: Vec::with_capacity(inst.len()),
        frontier: Time::MIN,
        skeleton: input.skeleton.iter().copied().collect(),
        pending: Vec::new(),
        shorts,
    };
    let mut next_id = 0;
    let mut expanded: HashSet<usize> = HashSet::new();
    let mut activated: HashSet<(usize, Vec<usize>)> = HashSet::new();
    let mut out = TreeOutcome {
        schedules: Vec::new(),
        end: TreeEnd::Budget,
        expansions: 0,
        repeated_activations: 0,
        delay_property_failures: 0,
    };
    let (mut s, mut points) = run(input, root, Vec::new(), &mut next_id);
    loop {
        out.schedules.push(s.clone());
        let a = analyze(inst, &s);
        let mut short_halt = None;
        for k in &a.kernels {
            if let Some(l) = k.delaying {
                let short_job = !input.is_long[l];
                if (k.delay as i128) * (input.k as i128) <= input.lb as i128 {
                    short_halt = Some(short_job);
                    break;
                }
                if short_job {
                    out.delay_property_failures += 1;
                }
            }
        }
        if let Some(short_job) = short_halt {
            out.end = TreeEnd::ShortDelaying { short_job };
            return out;
        }
        if let Some(k) = a.kernels.iter().find(|k| k.delaying.is_none()) {
            out.end = if k.is_tight() {
                TreeEnd::TightKernel
            } else {
                TreeEnd::Secondary { blamed_long: k.jobs.iter().copied().find(|&j| input.is_long[j]) }
            };
            return out;
        }
        if out.schedules.len() >= input.budget {
            out.end = TreeEnd::Budget;
            return out;
        }
        let kernel = &a.kernels[0];
        let l = kernel.delaying.expect("all kernels have delaying jobs here");
        let mut key = kernel.jobs.clone();
        key.sort_unstable();
        let Some(m) = points.iter().position(|p| p.long == l && !expanded.contains(&p.id)) else {
            out.end = TreeEnd::LongDelayingUnresolved;
            return out;
        };
        if !activated.insert((l, key)) {
            out.repeated_activations += 1;
        }
        let bp = points[m].clone();
        expanded.insert(bp.id);
        out.expansions += 1;
        let mut state = bp.state;
        state.skeleton.retain(|e| e.job != bp.long);
        state.pending.push(bp.long);
        state.shorts.remove(&(inst.r(bp.short), bp.short));
        let start = state.frontier.max(inst.r(bp.short));
        state.settled.push(Entry { job: bp.short, start });
        state.frontier = start + inst.p(bp.short);
        points.truncate(m);
        (s, points) = run(input, state, points, &mut next_id);
    }
}

/// Runs the sweep to completion and returns the schedule with the branch
/// points met on the way appended to `points`.
fn run(
    input: &TreeInput<'_>,
    mut st: Sweep,
    mut points: Vec<BranchPoint>,
    next_id: &mut usize,
) -> (Schedule, Vec<BranchPoint>) {
    let inst = input.inst;
    let pick = |st: &Sweep, t: Time| -> Option<usize> {
        let shorts = st.shorts.iter().take_while(|&&(r, _)| r <= t).map(|&(_, j)| j);
        shorts
            .chain(st.pending.iter().copied().filter(|&p| inst.r(p) <= t))
            .max_by_key(|&j| (inst.q(j), std::cmp::Reverse(inst.p(j)), std::cmp::Reverse(j)))
    };
    loop {
        let r_min = st.shorts.first().map(|&(r, _)| r).into_iter().chain(st.pending.iter().map(|&p| inst.r(p))).min();
        let Some(r_min) = r_min else {
            for e in st.skeleton.drain(..) {
                let start = e.start.max(st.frontier);
                st.settled.push(Entry { job: e.job, start });
                st.frontier = start + inst.p(e.job);
            }
            return (Schedule::new(st.settled), points);
        };
        let t = st.frontier.max(r_min);
        if let Some(&head) = st.skeleton.front() {
            let si = head.start.max(st.frontier);
            let ci = si + inst.p(head.job);
            if si <= t {
                if ci > t {
                    let j = pick(&st, t).expect("a job is released at t");
                    let covering = !input.is_long[j]
                        && inst.q(head.job) < inst.q(j)
                        && ((ci - inst.r(j)) as i128) * (input.k as i128) > input.lb as i128;
                    if covering {
                        points.push(BranchPoint { id: *next_id, state: st.clone(), long: head.job, short: j });
                        *next_id += 1;
                    }
                }
                st.skeleton.pop_front();
                st.settled.push(Entry { job: head.job, start: si });
                st.frontier = ci;
                continue;
            }
        }
        let j = pick(&st, t).expect("a job is released at t");
        if let Some(pos) = st.pending.iter().position(|&p| p == j) {
            st.pending.remove(pos);
        } else {
            st.shorts.remove(&(inst.r(j), j));
        }
        st.settled.push(Entry { job: j, start: t });
        st.frontier = t + inst.p(j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn pulls_long_job_out_for_short_urgent_job() {
        // One long job with small delivery covering the release of a short
        // urgent job.
        let inst = Instance::from_triples(&[(0, 10, 0), (1, 1, 20)]).unwrap();
        let is_long = vec![true, false];
        let input = TreeInput {
            inst: &inst,
            k: 3,
            lb: 22,
            skeleton: vec![Entry { job: 0, start: 0 }],
            is_long: &is_long,
            budget: 10,
        };
        let out = build_tree(&input);
        assert_eq!(out.expansions, 1);
        let last = out.schedules.last().unwrap();
        assert!(validate(&inst, last, true).is_empty());
        assert_eq!(last.makespan(&inst), 22);
        assert_eq!(out.end, TreeEnd::TightKernel);
    }

    #[test]
    fn shorts_only() {
        let inst = Instance::from_triples(&[(0, 1, 3), (0, 1, 5)]).unwrap();
        let is_long = vec![false, false];
        let input = TreeInput { inst: &inst, k: 2, lb: 6, skeleton: vec![], is_long: &is_long, budget: 4 };
        let out = build_tree(&input);
        assert_eq!(out.schedules[0].jobs(), vec![1, 0]);
        assert_eq!(out.schedules.len(), 1);
    }
}
