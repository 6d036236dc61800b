//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Instance, Job, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Independent uniform `r in [0, rmax]`, `p in [1, pmax]`, `q in [0, qmax]`.
    Uniform,
    /// Mostly jobs with little slack between release and due date, plus about
    /// one in eight with a wide window and hence a small delivery time.
    TightTransit,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Family::Uniform),
            "tight-transit" => Ok(Family::TightTransit),
            other => Err(Error::Contract(format!("unknown family {other:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Uniform => "uniform",
            Family::TightTransit => "tight-transit",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub rmax: Time,
    pub pmax: Time,
    pub qmax: Time,
    pub family: Family,
}

impl GenParams {
    pub fn uniform(n: usize, max: Time) -> Self {
        GenParams { n, rmax: max, pmax: max, qmax: max, family: Family::Uniform }
    }
}

pub fn generate(params: &GenParams, seed: u64) -> Result<Instance> {
    if params.rmax < 0 || params.qmax < 0 || params.pmax < 1 {
        return Err(Error::Contract("need rmax >= 0, pmax >= 1, qmax >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs = match params.family {
        Family::Uniform => (0..params.n)
            .map(|_| {
                let r = rng.gen_range(0..=params.rmax);
                let p = rng.gen_range(1..=params.pmax);
                let q = rng.gen_range(0..=params.qmax);
                Job::new(r, p, q)
            })
            .collect(),
        Family::TightTransit => {
            // Delivery is the distance from the due date to a common horizon.
            let horizon = params.rmax + 2 * params.pmax + params.qmax;
            (0..params.n)
                .map(|_| {
                    let r = rng.gen_range(0..=params.rmax);
                    let p = rng.gen_range(1..=params.pmax);
                    let slack = if rng.gen_ratio(1, 8) {
                        rng.gen_range(params.pmax..=horizon)
                    } else {
                        rng.gen_range(0..=params.pmax / 2)
                    };
                    let q = (horizon - r - p - slack).max(0);
                    Job::new(r, p, q)
                })
                .collect()
        }
    };
    Instance::new(jobs)
}
