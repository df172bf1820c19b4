//! Small deterministic RNG for reproducible experiments.
//!
//! Trial campaigns promise bit-identical output for a given master seed, on
//! any platform and any worker layout. Rather than tie that promise to the
//! stream details of an external crate, we use splitmix64, which is trivial
//! to specify and fast. Trial `t` of a campaign gets its own generator seeded
//! from `(master_seed, t)`, so trials can run in any order.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Generator for trial `t`, decorrelated from the master stream.
    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        let mut g = Self::new(master_seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        g.next_u64(); // burn one output so trial 0 differs from the raw master
        g
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn uniform_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Standard normal via Box-Muller.
    pub fn next_normal(&mut self) -> f64 {
        loop {
            let u = self.next_f64();
            if u > 0.0 {
                let v = self.next_f64();
                return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
            }
        }
    }

    /// Start vector for a trial: uniform on [-1,1]^n, then normalized.
    pub fn unit_from_cube(&mut self, n: usize) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..n).map(|_| self.uniform_symmetric()).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-8 {
                return x.iter().map(|v| v / norm).collect();
            }
        }
    }

    /// Uniformly distributed point on the unit sphere (normalized Gaussian).
    pub fn unit_uniform_sphere(&mut self, n: usize) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..n).map(|_| self.next_normal()).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-8 {
                return x.iter().map(|v| v / norm).collect();
            }
        }
    }
}
