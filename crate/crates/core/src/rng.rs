//! Reproducible Gaussian streams.
//!
//! Each stream is ChaCha8 keyed by the master seed with the stream id as the
//! ChaCha stream selector, so any realization can be regenerated on its own
//! regardless of how work is scheduled. Normals come from the Box–Muller
//! transform; both outputs of each pair are used, in order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream id of dataset X in realization `r`.
pub fn x_stream(realization: u64) -> u64 {
    2 * realization
}

/// Stream id of dataset Y in realization `r`.
pub fn y_stream(realization: u64) -> u64 {
    2 * realization + 1
}

pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    fn uniform_open0(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = self.uniform_open0();
        let u2 = self.uniform_open0();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Fills `out` with `N(0, σ²)` draws. Consecutive calls continue the
    /// same sequence, so filling in blocks matches filling in one go.
    pub fn fill(&mut self, out: &mut [f64], sigma: f64) {
        for v in out {
            *v = sigma * self.next_standard();
        }
    }
}
