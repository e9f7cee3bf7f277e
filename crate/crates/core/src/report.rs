//! Torsion verdicts shared by the Delsarte and Fermat pipelines.

use std::time::Duration;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::linalg::group::{big_list, FiniteAbelianGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// full Smith normal form over the integers
    ExactSnf,
    /// ranks modulo the relevant primes compared with a known rank over Q
    RankComparison,
    /// ranks modulo random primes, or randomized lower bounds
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    /// invariant factors greater than one
    #[serde(with = "big_list")]
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
    pub certified: bool,
    pub primes_checked: Vec<u64>,
    pub method: Method,
    /// rank over Q of the relation matrix
    pub relation_rank: usize,
    /// wall-clock time; left out of records that must be reproducible
    #[serde(default, skip_serializing_if = "Option::is_none", with = "duration_ms")]
    pub timing: Option<Duration>,
}

impl TorsionReport {
    pub fn torsion(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_orders(&self.invariant_factors, 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.iter().all(One::is_one)
    }

    pub fn length(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn exponent(&self) -> BigInt {
        self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn without_timing(mut self) -> Self {
        self.timing = None;
        self
    }
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_f64(d.as_secs_f64() * 1e3),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.map(|ms| Duration::from_secs_f64(ms / 1e3)))
    }
}
