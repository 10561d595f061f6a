//! Fixtures shared by the benchmarks.

use paretail::second_order::RhoMode;
use paretail::study::{sample_distribution, SimDistribution};
use paretail::{hill, tau_hat, ExcessSet, PriorSpec, SortedSample};

pub struct Fixture {
    pub sample: SortedSample,
    pub excesses: ExcessSet,
    pub rho: f64,
    pub tau: f64,
    pub prior: PriorSpec,
}

/// A seeded Burr(0.75, -0.75) sample with its top-`k` excesses and the
/// practical prior.
pub fn burr_fixture(n: usize, k: usize, seed: u64) -> Fixture {
    let sample = sample_distribution(&SimDistribution::burr_default(), n, seed).expect("valid design");
    let (rho, _) = RhoMode::default().resolve(&sample).expect("rho resolves");
    let excesses = sample.excesses(k).expect("k in range");
    let tau = tau_hat(rho, hill(&excesses).xi).expect("positive Hill");
    let prior = PriorSpec::practical(k, n, rho, tau).expect("valid prior");
    Fixture { sample, excesses, rho, tau, prior }
}
