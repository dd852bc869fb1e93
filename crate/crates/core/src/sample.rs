//! Seeded sampling of configurations. ChaCha8 keeps streams reproducible
//! across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::potential::ModuliConfig;

/// Box for the puncture generator; keeps every straight path clear of the
/// punctures by more than the path guard.
pub const P_BOX: (f64, f64) = (0.3, 2.0);

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn p(&mut self) -> Complex64 {
        Complex64::new(self.uniform(P_BOX.0, P_BOX.1), self.uniform(P_BOX.0, P_BOX.1))
    }

    /// Standard complex Gaussian.
    pub fn normal(&mut self) -> Complex64 {
        // Box-Muller
        let a: f64 = self.rng.gen_range(f64::EPSILON..1.0);
        let b: f64 = self.rng.gen_range(0.0..1.0);
        Complex64::from_polar((-2.0 * a.ln()).sqrt(), 2.0 * std::f64::consts::PI * b) / std::f64::consts::SQRT_2
    }

    /// Uniform direction on the unit 3-sphere in C^2, scaled to a radius
    /// drawn uniformly from `[r_lo, r_hi]`.
    pub fn uv(&mut self, r_lo: f64, r_hi: f64) -> (Complex64, Complex64) {
        let (u, v) = (self.normal(), self.normal());
        let n = (u.norm_sqr() + v.norm_sqr()).sqrt();
        let r = self.uniform(r_lo, r_hi);
        (u * (r / n), v * (r / n))
    }

    pub fn config(&mut self, r_lo: f64, r_hi: f64) -> ModuliConfig {
        let p = self.p();
        let (u, v) = self.uv(r_lo, r_hi);
        ModuliConfig { p, u, v }
    }
}
