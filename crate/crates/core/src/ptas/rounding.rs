//! Short/long classification and release rounding.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Job, Time};

/// A job is long when `p * k > lb`. Compared in integers.
pub fn split_short_long(inst: &Instance, k: u64, lb: Time) -> Vec<bool> {
    inst.jobs().iter().map(|j| (j.processing as i128) * (k as i128) > lb as i128).collect()
}

/// Instance with releases rounded down to multiples of `lb / (2 permuted_long)`.
/// To stay integral every parameter is multiplied by `scale = 2 permuted_long`; the
/// rounding step is then `lb` in scaled units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rounded {
    pub instance: Instance,
    pub scale: Time,
    /// Rounding step in scaled units.
    pub step: Time,
}

impl Rounded {
    /// Rounding step in original units as a fraction `(num, den)`.
    pub fn grid_step(&self) -> (Time, Time) {
        (self.step, self.scale)
    }
}

pub fn round_releases(inst: &Instance, permuted_long: usize) -> Rounded {
    let scale = 2 * permuted_long.max(1) as Time;
    let lb = inst.lower_bound().max(1);
    let jobs = inst
        .jobs()
        .iter()
        .map(|j| {
            let r = j.release * scale;
            Job::new(r - r % lb, j.processing * scale, j.delivery * scale)
        })
        .collect();
    Rounded { instance: Instance::new(jobs).expect("scaled parameters stay valid"), scale, step: lb }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_example_rounds_to_zero() {
        let i2 = Instance::from_triples(&[(0, 10, 0), (2, 3, 6), (4, 2, 8)]).unwrap();
        let r = round_releases(&i2, 1);
        assert_eq!(r.grid_step(), (15, 2));
        assert!(r.instance.jobs().iter().all(|j| j.release == 0));
        assert_eq!(r.instance.p(0), 20);
    }

    #[test]
    fn classification_is_exact() {
        let inst = Instance::from_triples(&[(0, 5, 0), (0, 4, 0), (0, 1, 0)]).unwrap();
        assert_eq!(split_short_long(&inst, 2, 10), vec![false, false, false]);
        assert_eq!(split_short_long(&inst, 3, 10), vec![true, true, false]);
    }

    #[test]
    fn at_most_two_permuted_long_release_values() {
        let inst = Instance::from_triples(&[(0, 3, 1), (7, 2, 9), (13, 4, 0), (20, 1, 2), (25, 5, 5)]).unwrap();
        for permuted_long in 1..4 {
            let r = round_releases(&inst, permuted_long);
            let mut vals: Vec<Time> = r.instance.jobs().iter().map(|j| j.release).collect();
            vals.sort_unstable();
            vals.dedup();
            assert!(vals.len() <= 2 * permuted_long);
        }
    }
}
