//! Seeded random channel realizations.
//!
//! Entries are i.i.d. circularly-symmetric complex Gaussian with zero
//! mean and unit variance, independent across channel uses, receivers
//! and transmitters. Everything is driven by a ChaCha stream so a seed
//! pins the whole experiment.

use crate::linalg::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// Channel coefficients of one channel use.
///
/// `f[m-1]` is DeNB -> relay m, `g[k-1]` is DeNB -> user k, and
/// `h[k-1][m-1]` is relay m -> user k.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    pub t: usize,
    pub f: Vec<C64>,
    pub g: Vec<C64>,
    pub h: Vec<Vec<C64>>,
}

impl ChannelState {
    pub fn g_of(&self, ue: usize) -> C64 {
        self.g[ue - 1]
    }

    pub fn f_of(&self, rn: usize) -> C64 {
        self.f[rn - 1]
    }

    pub fn h_of(&self, ue: usize, rn: usize) -> C64 {
        self.h[ue - 1][rn - 1]
    }

    /// Largest coefficient magnitude, the scale for degeneracy tests.
    pub fn scale(&self) -> f64 {
        self.f
            .iter()
            .chain(self.g.iter())
            .chain(self.h.iter().flatten())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Deterministic stream of channel states for a given seed.
pub struct ChannelSource {
    rng: ChaCha12Rng,
    k: usize,
    m: usize,
}

impl ChannelSource {
    pub fn new(seed: u64, k: usize, m: usize) -> Self {
        ChannelSource {
            rng: ChaCha12Rng::seed_from_u64(seed),
            k,
            m,
        }
    }

    /// Standard circularly-symmetric complex Gaussian sample.
    pub fn cscg(&mut self) -> C64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Unit-modulus factor with uniform phase.
    pub fn unit_phase(&mut self) -> C64 {
        use rand::Rng;
        let u = self.rng.next_u64() as f64 / u64::MAX as f64;
        let phi = u * std::f64::consts::TAU;
        C64::new(phi.cos(), phi.sin())
    }

    /// Next channel state, labeled with use index `t`.
    pub fn draw(&mut self, t: usize) -> ChannelState {
        let f = (0..self.m).map(|_| self.cscg()).collect();
        let g = (0..self.k).map(|_| self.cscg()).collect();
        let h = (0..self.k)
            .map(|_| (0..self.m).map(|_| self.cscg()).collect())
            .collect();
        ChannelState { t, f, g, h }
    }
}

/// `T` channel states for the given seed; same seed, same output.
pub fn draw_channels(seed: u64, t: usize, k: usize, m: usize) -> Vec<ChannelState> {
    let mut src = ChannelSource::new(seed, k, m);
    (1..=t).map(|i| src.draw(i)).collect()
}
