//! Counter-based, splittable 64-bit random number generator.
//!
//! Every draw is `mix64(key + (counter+1)·GOLDEN)`, so a stream is a pure
//! function of its key and position: replays are bit-identical and
//! sub-streams (fixed key offsets) can be handed to independent consumers
//! without any shared state. Standard normals come from the Box–Muller
//! transform on pairs of uniform draws.

use std::f64::consts::PI;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; bijective on u64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One random stream. Cloning forks the exact position.
#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
    cached_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ GOLDEN),
            counter: 0,
            cached_normal: None,
        }
    }

    /// Independent child stream for a fixed tag; derivation depends only on
    /// (key, tag), never on how much of this stream was consumed.
    pub fn substream(&self, tag: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(tag.wrapping_add(GOLDEN))),
            counter: 0,
            cached_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform on [0, 1), 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1]; never zero, safe under ln().
    #[inline]
    fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller; both halves of each pair are used.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Bernoulli(p) draw.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform on [lo, hi].
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal vector of length n.
    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.standard_normal()).collect()
    }

    /// Uniform point on the sphere of the given radius in ℝ^d. For d = 1
    /// this is ±radius. Degenerate (underflowing) directions are redrawn.
    pub fn on_sphere(&mut self, d: usize, radius: f64) -> Vec<f64> {
        loop {
            let v = self.normal_vec(d);
            let norm = crate::linalg::slice_norm(&v);
            if norm > 1e-12 {
                return v.into_iter().map(|x| x * radius / norm).collect();
            }
        }
    }
}

/// Fixed tags for the named sub-streams so consumers never collide.
pub mod tags {
    pub const HIDDEN_WEIGHTS: u64 = 1;
    pub const OUTPUT_WEIGHTS: u64 = 2;
    pub const DATA_INPUTS: u64 = 3;
    pub const DATA_TARGETS: u64 = 4;
    pub const DATA_RADII: u64 = 5;
    pub const GRAM_MC: u64 = 6;
    pub const TRIAL_BASE: u64 = 1 << 32;

    /// Tag for the i-th independent trial.
    pub fn trial(i: u64) -> u64 {
        TRIAL_BASE + i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_bit_identical() {
        let mut a = Stream::new(42);
        let xs: Vec<u64> = (0..100).map(|_| a.next_u64()).collect();
        let mut b = Stream::new(42);
        let ys: Vec<u64> = (0..100).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = Stream::new(42);
        let zs: Vec<f64> = (0..100).map(|_| c.standard_normal()).collect();
        let mut d = Stream::new(42);
        for z in zs {
            assert_eq!(z.to_bits(), d.standard_normal().to_bits());
        }
    }

    #[test]
    fn substreams_are_independent_of_consumption() {
        let mut a = Stream::new(7);
        for _ in 0..17 {
            a.next_u64();
        }
        let mut sub_late = a.substream(3);
        let mut sub_fresh = Stream::new(7).substream(3);
        for _ in 0..10 {
            assert_eq!(sub_late.next_u64(), sub_fresh.next_u64());
        }
    }

    #[test]
    fn distinct_tags_give_distinct_streams() {
        let base = Stream::new(1);
        let mut s1 = base.substream(1);
        let mut s2 = base.substream(2);
        let a: Vec<u64> = (0..8).map(|_| s1.next_u64()).collect();
        let b: Vec<u64> = (0..8).map(|_| s2.next_u64()).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn uniform_is_in_unit_interval() {
        let mut s = Stream::new(123);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn normal_moments_are_sane() {
        let mut s = Stream::new(99);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z = s.standard_normal();
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn sphere_points_have_requested_radius() {
        let mut s = Stream::new(5);
        for d in [1usize, 2, 5] {
            let x = s.on_sphere(d, 2.5);
            assert_eq!(x.len(), d);
            let n = crate::linalg::slice_norm(&x);
            assert!((n - 2.5).abs() < 1e-12);
        }
    }
}
