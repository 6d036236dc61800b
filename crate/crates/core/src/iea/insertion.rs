//! Inserting permuted jobs one by one into the partial schedule.

use crate::model::{Entry, Instance, Schedule, Time};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    Complete(Schedule),
    /// Job at this permutation position fits earlier without increasing the
    /// makespan, so the permutation is dominated.
    Dominated { at: usize },
}

/// Puts `job` at the earliest idle moment not before `earliest` and shifts
/// later jobs right as far as needed. Returns the schedule and the position
/// of the inserted job.
pub fn insert_at_idle(s: &Schedule, inst: &Instance, job: usize, earliest: Time) -> (Schedule, usize) {
    let mut prev_end = Time::MIN;
    let mut pos = s.len();
    let mut at = earliest;
    for (i, e) in s.entries.iter().enumerate() {
        let t = prev_end.max(earliest);
        if t < e.start {
            pos = i;
            at = t;
            break;
        }
        prev_end = e.start + inst.p(e.job);
    }
    if pos == s.len() {
        at = prev_end.max(earliest);
    }
    (place(s, inst, job, pos, at), pos)
}

/// Inserts `job` at index `pos` starting at `at`, shifting followers right.
pub fn place(s: &Schedule, inst: &Instance, job: usize, pos: usize, at: Time) -> Schedule {
    let mut entries = Vec::with_capacity(s.len() + 1);
    entries.extend_from_slice(&s.entries[..pos]);
    entries.push(Entry { job, start: at });
    let mut t = at + inst.p(job);
    for e in &s.entries[pos..] {
        let start = e.start.max(t);
        entries.push(Entry { job: e.job, start });
        t = start + inst.p(e.job);
    }
    Schedule::new(entries)
}

/// Earliest gap ending before `before` in which `job` can start at or after
/// `release`. Returns the insertion index and start time.
fn earlier_gap(s: &Schedule, inst: &Instance, release: Time, before: usize) -> Option<(usize, Time)> {
    let mut prev_end = Time::MIN;
    for (i, e) in s.entries[..=before].iter().enumerate() {
        let t = prev_end.max(release);
        if t < e.start {
            return Some((i, t));
        }
        prev_end = e.start + inst.p(e.job);
    }
    None
}

/// Builds the complete schedule of a permutation. Each job goes to the
/// earliest idle moment at or after its release and the completion of the
/// previously inserted job.
pub fn insert_permutation(
    base: &Schedule,
    inst: &Instance,
    perm: &[usize],
    release: impl Fn(usize) -> Time,
    dominance: bool,
) -> Insertion {
    let mut s = base.clone();
    let mut frontier = Time::MIN;
    let mut prev_pos: Option<usize> = None;
    for (k, &job) in perm.iter().enumerate() {
        let r = release(job);
        if dominance {
            if let Some(pp) = prev_pos {
                if let Some((i, t)) = earlier_gap(&s, inst, r, pp) {
                    let variant = place(&s, inst, job, i, t);
                    if variant.makespan(inst) <= s.makespan(inst) {
                        return Insertion::Dominated { at: k };
                    }
                }
            }
        }
        let (next, pos) = insert_at_idle(&s, inst, job, r.max(frontier));
        frontier = next.entries[pos].start + inst.p(job);
        prev_pos = Some(pos);
        s = next;
    }
    Insertion::Complete(s)
}
