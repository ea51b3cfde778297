//! Seeded synthetic survival data for examples, tests and sample datasets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Uniform};

use crate::dataset::{Observation, SurvivalSample};
use crate::error::Result;

pub fn exponential_draws(n: usize, rate: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Exp::new(rate).expect("rate must be positive");
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

/// Inverse-CDF draws from GPD(ξ, σ).
pub fn gpd_draws(n: usize, shape: f64, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            if shape == 0.0 {
                -scale * (1.0 - u).ln()
            } else {
                scale / shape * ((1.0 - u).powf(-shape) - 1.0)
            }
        })
        .collect()
}

/// Draws `n` event times from `events` and independent censoring times from
/// `censoring`; records the minimum with its event flag.
pub fn censored_sample<E, C>(
    group: &str,
    n: usize,
    events: E,
    censoring: Option<C>,
    seed: u64,
) -> Result<SurvivalSample>
where
    E: Distribution<f64>,
    C: Distribution<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let obs = (0..n)
        .map(|_| {
            let t = events.sample(&mut rng);
            match &censoring {
                Some(c) => {
                    let c = c.sample(&mut rng);
                    Observation::new(t.min(c), t <= c, group)
                }
                None => Observation::new(t, true, group),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    SurvivalSample::new(group, obs)
}

/// Exponential event times with independent exponential censoring.
/// `censor_rate = 0` gives an uncensored sample. The expected censored
/// fraction is `censor_rate / (rate + censor_rate)`.
pub fn exponential_sample(
    group: &str,
    n: usize,
    rate: f64,
    censor_rate: f64,
    seed: u64,
) -> Result<SurvivalSample> {
    let events = Exp::new(rate).expect("rate must be positive");
    let censoring = (censor_rate > 0.0).then(|| Exp::new(censor_rate).expect("positive rate"));
    censored_sample(group, n, events, censoring, seed)
}

/// Uniform(0, b) event times, uncensored.
pub fn uniform_sample(group: &str, n: usize, upper: f64, seed: u64) -> Result<SurvivalSample> {
    let events = Uniform::new(0.0, upper).expect("upper bound must be positive");
    censored_sample::<_, Exp<f64>>(group, n, events, None, seed)
}
