//! Network instance description and shared scheme-point types.
//!
//! The network has one base station (DeNB) holding a library of `N` files,
//! `M` full-duplex relays (RNs) each caching a `mu` fraction of the
//! library, and `K` cacheless users (UEs). Worst-case demands require
//! `N >= K + M` distinct files.

use crate::rational::{Rational, one, rat, zero};

/// One network instance: `M` relays, `K` users, `N` files, fractional
/// cache size `mu` in [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkConfig {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub mu: Rational,
}

impl NetworkConfig {
    /// Validated instance; `n` defaults to the minimum `k + m`.
    pub fn new(k: usize, m: usize, mu: Rational) -> Result<Self, InvalidConfig> {
        Self::with_library(k, m, k + m, mu)
    }

    pub fn with_library(k: usize, m: usize, n: usize, mu: Rational) -> Result<Self, InvalidConfig> {
        validate_config(NetworkConfig { m, k, n, mu })
    }

    /// mu * M as a rational.
    pub fn mu_m(&self) -> Rational {
        self.mu.clone() * crate::rational::rusize(self.m)
    }

    /// Integer cache level `m` when `mu = m / M`, else `None`.
    pub fn cache_level(&self) -> Option<usize> {
        let mm = self.mu_m();
        if mm.is_integer() {
            Some(crate::rational::floor_usize(&mm))
        } else {
            None
        }
    }
}

/// Which invariant a rejected configuration violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidConfig {
    /// `N < K + M`: worst-case distinct demands are not representable.
    LibraryTooSmall { n: usize, need: usize },
    /// `mu` outside [0, 1].
    MuOutOfRange(Rational),
    /// A zero participant count.
    EmptyNetwork,
}

impl std::fmt::Display for InvalidConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvalidConfig::LibraryTooSmall { n, need } => {
                write!(
                    f,
                    "invalid config: N = {n} but worst-case demands need N >= K + M = {need}"
                )
            }
            InvalidConfig::MuOutOfRange(mu) => {
                write!(f, "invalid config: mu = {mu} outside [0, 1]")
            }
            InvalidConfig::EmptyNetwork => write!(f, "invalid config: K, M and N must be positive"),
        }
    }
}

impl std::error::Error for InvalidConfig {}

/// Check the `NetworkConfig` invariants, returning the config unchanged.
pub fn validate_config(cfg: NetworkConfig) -> Result<NetworkConfig, InvalidConfig> {
    if cfg.k == 0 || cfg.m == 0 || cfg.n == 0 {
        return Err(InvalidConfig::EmptyNetwork);
    }
    if cfg.n < cfg.k + cfg.m {
        return Err(InvalidConfig::LibraryTooSmall {
            n: cfg.n,
            need: cfg.k + cfg.m,
        });
    }
    if cfg.mu < zero() || cfg.mu > one() {
        return Err(InvalidConfig::MuOutOfRange(cfg.mu));
    }
    Ok(cfg)
}

/// Cache sizes at which the one-shot scheme operates natively:
/// `0, 1/M, ..., (M-1)/M, 1`.
pub fn discrete_cache_grid(m: usize) -> Vec<Rational> {
    (0..=m).map(|i| rat(i as i64, m as i64)).collect()
}

/// Labels for achievable points entering envelope computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SchemeLabel {
    Unicast,
    FullZf,
    OneShot,
    Ia31,
    Ia22,
    Envelope,
}

/// An achievable (cache size, NDT) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemePoint {
    pub mu: Rational,
    pub ndt: Rational,
    pub label: SchemeLabel,
}

impl SchemePoint {
    pub fn new(mu: Rational, ndt: Rational, label: SchemeLabel) -> Self {
        debug_assert!(
            ndt >= one(),
            "no scheme beats the interference-free reference"
        );
        SchemePoint { mu, ndt, label }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_reference_instance() {
        // M = 2 relays, K = 2 users, library of N = 4 files, mu = 4/9
        let cfg = NetworkConfig::with_library(2, 2, 4, rat(4, 9)).unwrap();
        assert_eq!(cfg.n, 4);
    }

    #[test]
    fn rejects_small_library() {
        let err = NetworkConfig::with_library(3, 1, 3, rat(1, 2)).unwrap_err();
        assert!(matches!(
            err,
            InvalidConfig::LibraryTooSmall { n: 3, need: 4 }
        ));
    }

    #[test]
    fn rejects_mu_out_of_range() {
        let err = NetworkConfig::with_library(1, 1, 2, rat(3, 2)).unwrap_err();
        assert!(matches!(err, InvalidConfig::MuOutOfRange(_)));
    }

    #[test]
    fn grid_is_increasing_with_exact_endpoints() {
        assert_eq!(
            discrete_cache_grid(2),
            vec![rat(0, 1), rat(1, 2), rat(1, 1)]
        );
        assert_eq!(
            discrete_cache_grid(3),
            vec![rat(0, 1), rat(1, 3), rat(2, 3), rat(1, 1)]
        );
        assert_eq!(discrete_cache_grid(1), vec![rat(0, 1), rat(1, 1)]);
        for m in 1..=10 {
            let g = discrete_cache_grid(m);
            assert_eq!(g.len(), m + 1);
            assert_eq!(g[0], zero());
            assert_eq!(g[m], one());
            assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn cache_level_detects_grid_points() {
        let cfg = NetworkConfig::new(2, 4, rat(1, 2)).unwrap();
        assert_eq!(cfg.cache_level(), Some(2));
        let cfg = NetworkConfig::new(2, 2, rat(4, 9)).unwrap();
        assert_eq!(cfg.cache_level(), None);
    }
}
