//! Seeded noise for replicate studies.
//!
//! The stream is fully specified so other implementations can reproduce
//! it: a ChaCha8 generator keyed via `seed_from_u64`, uniform doubles
//! taken as the top 53 bits of each `u64`, and normal deviates from the
//! Box-Muller transform (cosine branch first, sine branch cached).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::real::{rf, Real};

#[derive(Debug, Clone)]
pub struct NoiseGen {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NoiseGen {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform deviate in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * 2f64.powi(-53)
    }

    /// Uniform deviate in (0, 1]; safe to feed into a logarithm.
    fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * 2f64.powi(-53)
    }

    /// Standard normal deviate via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let r = (-2.0 * self.uniform_open().ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.uniform();
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// `value * (1 + sigma * g)` with `g` standard normal.
    pub fn multiplicative<T: Real>(&mut self, value: T, sigma: T) -> T {
        value * (T::one() + sigma * rf(self.standard_normal()))
    }
}
