use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::quadrature::{abs_pow, check_exponent};
use super::{LpEstimate, LpMethod, TorusFunction};
use crate::error::{Error, Result};

/// Samples per ChaCha stream. Chunk `i` always draws from stream `i`, so the
/// estimate does not depend on how chunks are scheduled.
const SAMPLES_PER_STREAM: usize = 4096;

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

/// Monte Carlo `L^p` norm with uniform angles drawn from a seeded ChaCha8 stream.
///
/// `error_bound` is the delta-method standard error of `mean^(1/p)`.
pub fn lp_norm_monte_carlo<F: TorusFunction + ?Sized>(f: &F, p: f64, samples: usize, seed: u64) -> Result<LpEstimate> {
    check_exponent(p)?;
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    let d = f.dim();
    let terms = f.frequency_terms();
    let chunks = samples.div_ceil(SAMPLES_PER_STREAM);

    let partials: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = SAMPLES_PER_STREAM.min(samples - chunk * SAMPLES_PER_STREAM);
            let mut theta = vec![0.0; d];
            let mut moments = Moments::default();
            for _ in 0..len {
                for t in theta.iter_mut() {
                    *t = TAU * rng.random::<f64>();
                }
                let value: Complex64 = terms
                    .iter()
                    .map(|(k, c)| {
                        let phase: f64 = k.iter().zip(&theta).map(|(&e, &t)| e as f64 * t).sum();
                        c * Complex64::cis(phase)
                    })
                    .sum();
                moments.push(abs_pow(value, p));
            }
            moments
        })
        .collect();

    let total = partials.into_iter().fold(Moments::default(), Moments::merge);
    let mean = total.mean.max(0.0);
    let variance = (total.m2 / (total.count - 1.0)).max(0.0);
    let standard_error = (variance / total.count).sqrt();
    let value = mean.powf(1.0 / p);
    let error_bound = if mean > 0.0 { value / (p * mean) * standard_error } else { 0.0 };
    Ok(LpEstimate { value, method: LpMethod::MonteCarlo, error_bound })
}
