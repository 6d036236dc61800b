//! Jobs, instances, schedules and the plain-text instance format.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Integral time unit.
pub type Time = i64;

/// Upper bound on any single job parameter so that sums never overflow.
pub const MAX_PARAM: Time = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub release: Time,
    pub processing: Time,
    pub delivery: Time,
}

impl Job {
    pub fn new(release: Time, processing: Time, delivery: Time) -> Self {
        Job { release, processing, delivery }
    }
}

/// A validated set of jobs. Job ids are indices into `jobs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Job>", into = "Vec<Job>")]
pub struct Instance {
    jobs: Vec<Job>,
}

impl TryFrom<Vec<Job>> for Instance {
    type Error = Error;
    fn try_from(jobs: Vec<Job>) -> Result<Self> {
        Instance::new(jobs)
    }
}

impl From<Instance> for Vec<Job> {
    fn from(inst: Instance) -> Self {
        inst.jobs
    }
}

impl Instance {
    pub fn new(jobs: Vec<Job>) -> Result<Self> {
        for (id, j) in jobs.iter().enumerate() {
            if j.release < 0 || j.delivery < 0 {
                return Err(Error::InvalidInstance(format!(
                    "job {id}: release and delivery must be non-negative"
                )));
            }
            if j.processing < 1 {
                return Err(Error::InvalidInstance(format!(
                    "job {id}: processing time must be at least 1"
                )));
            }
            if j.release > MAX_PARAM || j.processing > MAX_PARAM || j.delivery > MAX_PARAM {
                return Err(Error::InvalidInstance(format!("job {id}: parameter too large")));
            }
        }
        if jobs.len() > (1 << 20) {
            return Err(Error::InvalidInstance("too many jobs".into()));
        }
        Ok(Instance { jobs })
    }

    /// Builds an instance from `(r, p, q)` triples.
    pub fn from_triples(triples: &[(Time, Time, Time)]) -> Result<Self> {
        Instance::new(triples.iter().map(|&(r, p, q)| Job::new(r, p, q)).collect())
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    pub fn r(&self, id: usize) -> Time {
        self.jobs[id].release
    }

    pub fn p(&self, id: usize) -> Time {
        self.jobs[id].processing
    }

    pub fn q(&self, id: usize) -> Time {
        self.jobs[id].delivery
    }

    pub fn total_processing(&self) -> Time {
        self.jobs.iter().map(|j| j.processing).sum()
    }

    pub fn max_processing(&self) -> Time {
        self.jobs.iter().map(|j| j.processing).max().unwrap_or(0)
    }

    /// Parses the text format: a job count line followed by one `r p q` line per job.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (first_no, first) = lines
            .by_ref()
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| Error::Parse { line: 1, msg: "missing job count".into() })?;
        let n: usize = first
            .parse()
            .map_err(|_| Error::Parse { line: first_no, msg: format!("bad job count {first:?}") })?;
        let mut jobs = Vec::with_capacity(n.min(1 << 16));
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            if jobs.len() == n {
                return Err(Error::Parse { line: no, msg: format!("more than {n} job lines") });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let mut vals = [0 as Time; 3];
            for (k, name) in ["release", "processing", "delivery"].iter().enumerate() {
                let v: Time = fields[k]
                    .parse()
                    .map_err(|_| Error::Parse { line: no, msg: format!("bad {name} {:?}", fields[k]) })?;
                if v < 0 {
                    return Err(Error::Parse { line: no, msg: format!("negative {name}") });
                }
                if v > MAX_PARAM {
                    return Err(Error::Parse { line: no, msg: format!("{name} too large") });
                }
                vals[k] = v;
            }
            if vals[1] == 0 {
                return Err(Error::Parse { line: no, msg: "processing time must be at least 1".into() });
            }
            jobs.push(Job::new(vals[0], vals[1], vals[2]));
        }
        if jobs.len() != n {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                msg: format!("expected {n} job lines, found {}", jobs.len()),
            });
        }
        Instance::new(jobs)
    }

    /// Canonical text form. Round-trips through [`Instance::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.jobs.len());
        for j in &self.jobs {
            out.push_str(&format!("{} {} {}\n", j.release, j.processing, j.delivery));
        }
        out
    }

    /// Trivial lower bound on the optimal makespan.
    pub fn lower_bound(&self) -> Time {
        let total = self.total_processing();
        let single = self
            .jobs
            .iter()
            .map(|j| j.release + j.processing + j.delivery)
            .max()
            .unwrap_or(0);
        total.max(single)
    }

    /// Sub-instance on `ids`; job `k` of the result is `ids[k]` here.
    pub fn restrict(&self, ids: &[usize]) -> Instance {
        Instance { jobs: ids.iter().map(|&i| self.jobs[i]).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entry {
    pub job: usize,
    pub start: Time,
}

/// Jobs with start times, kept in start order. May be partial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub entries: Vec<Entry>,
}

impl Schedule {
    pub fn new(entries: Vec<Entry>) -> Self {
        Schedule { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn completion_at(&self, inst: &Instance, idx: usize) -> Time {
        let e = self.entries[idx];
        e.start + inst.p(e.job)
    }

    /// Full completion time (completion plus delivery) of the entry at `idx`.
    pub fn full_completion_at(&self, inst: &Instance, idx: usize) -> Time {
        let e = self.entries[idx];
        e.start + inst.p(e.job) + inst.q(e.job)
    }

    /// Maximum full completion time; 0 for an empty schedule.
    pub fn makespan(&self, inst: &Instance) -> Time {
        (0..self.entries.len())
            .map(|i| self.full_completion_at(inst, i))
            .max()
            .unwrap_or(0)
    }

    pub fn end(&self, inst: &Instance) -> Time {
        self.entries.last().map(|e| e.start + inst.p(e.job)).unwrap_or(0)
    }

    pub fn jobs(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.job).collect()
    }

    pub fn position(&self, job: usize) -> Option<usize> {
        self.entries.iter().position(|e| e.job == job)
    }

    pub fn start_of(&self, job: usize) -> Option<Time> {
        self.entries.iter().find(|e| e.job == job).map(|e| e.start)
    }

    pub fn contains(&self, job: usize) -> bool {
        self.entries.iter().any(|e| e.job == job)
    }

    pub fn is_complete(&self, inst: &Instance) -> bool {
        if self.entries.len() != inst.len() {
            return false;
        }
        let mut seen = vec![false; inst.len()];
        for e in &self.entries {
            if e.job >= inst.len() || seen[e.job] {
                return false;
            }
            seen[e.job] = true;
        }
        true
    }

    /// Semi-active schedule for a job sequence: each job starts as early as
    /// its release and its predecessor allow.
    pub fn from_sequence(inst: &Instance, seq: &[usize]) -> Self {
        Self::from_sequence_with(seq, |j| inst.r(j), |j| inst.p(j))
    }

    pub fn from_sequence_with(
        seq: &[usize],
        release: impl Fn(usize) -> Time,
        processing: impl Fn(usize) -> Time,
    ) -> Self {
        let mut t = Time::MIN;
        let mut entries = Vec::with_capacity(seq.len());
        for &j in seq {
            let start = t.max(release(j));
            entries.push(Entry { job: j, start });
            t = start + processing(j);
        }
        Schedule { entries }
    }

    /// Order-preserving left shift against original releases.
    pub fn left_compacted(&self, inst: &Instance) -> Self {
        Self::from_sequence(inst, &self.jobs())
    }

    /// Restriction to the jobs accepted by `keep`, times unchanged.
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> Self {
        Schedule { entries: self.entries.iter().copied().filter(|e| keep(e.job)).collect() }
    }

    /// Merges entries and re-sorts by start time (ties by job id).
    pub fn merged(parts: impl IntoIterator<Item = Entry>) -> Self {
        let mut entries: Vec<Entry> = parts.into_iter().collect();
        entries.sort_by_key(|e| (e.start, e.job));
        Schedule { entries }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| format!("j{}@{}", e.job, e.start)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    UnknownJob { job: usize },
    Duplicate { job: usize },
    EarlyStart { job: usize, start: Time, release: Time },
    Overlap { first: usize, second: usize },
    Unsorted { index: usize },
    Missing { job: usize },
}

/// Checks feasibility of a (possibly partial) schedule. Set `require_complete`
/// to also report jobs that are absent.
pub fn validate(inst: &Instance, s: &Schedule, require_complete: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = vec![false; inst.len()];
    for (i, e) in s.entries.iter().enumerate() {
        if e.job >= inst.len() {
            out.push(Violation::UnknownJob { job: e.job });
            continue;
        }
        if seen[e.job] {
            out.push(Violation::Duplicate { job: e.job });
        }
        seen[e.job] = true;
        if e.start < inst.r(e.job) {
            out.push(Violation::EarlyStart { job: e.job, start: e.start, release: inst.r(e.job) });
        }
        if i > 0 {
            let prev = s.entries[i - 1];
            if prev.start > e.start {
                out.push(Violation::Unsorted { index: i });
            } else if prev.job < inst.len() && prev.start + inst.p(prev.job) > e.start {
                out.push(Violation::Overlap { first: prev.job, second: e.job });
            }
        }
    }
    if require_complete {
        for (job, &ok) in seen.iter().enumerate() {
            if !ok {
                out.push(Violation::Missing { job });
            }
        }
    }
    out
}
