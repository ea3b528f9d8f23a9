//! Depolarizing channel: priors and reproducible i.i.d. error sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf4::Gf4;
use crate::stabilizer::PauliString;

/// Per-qubit probability vector indexed by I, X, Z, Y (the GF(4) order 0, 1, ω, ω̄).
pub type Dist4 = [f64; 4];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("crossover probability {0} not in [0, 1]")]
    OutOfRange(f64),
}

/// Random stream used for everything stochastic in a simulation.
pub type StreamRng = ChaCha8Rng;

/// Independent random streams keyed by `(master seed, domain, key, index)`.
///
/// The draws of one stream depend only on its key, so blocks may be
/// processed in any order or on any number of threads.
pub fn rng_stream(master_seed: u64, domain: u64, key: u64, index: u64) -> StreamRng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&domain.to_le_bytes());
    seed[16..24].copy_from_slice(&key.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingChannel {
    p: f64,
}

impl DepolarizingChannel {
    pub fn new(p: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChannelError::OutOfRange(p));
        }
        Ok(DepolarizingChannel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Probability of no error, `1 - p`.
    pub fn p_identity(&self) -> f64 {
        1.0 - self.p
    }

    /// `(1 - p, p/3, p/3, p/3)`.
    pub fn prior(&self) -> Dist4 {
        let e = self.p / 3.0;
        [1.0 - self.p, e, e, e]
    }

    /// Priors for the `n_sent` transmitted qubits. Ebit columns get none.
    pub fn priors(&self, n_sent: usize) -> Vec<Dist4> {
        vec![self.prior(); n_sent]
    }

    fn sample_symbol<R: Rng + ?Sized>(&self, rng: &mut R) -> Gf4 {
        let u: f64 = rng.random();
        if u >= self.p {
            return Gf4::ZERO;
        }
        // u / p is uniform on [0, 1) given an error occurred
        let k = ((u / self.p) * 3.0) as u8;
        Gf4::from_bits(1 + k.min(2))
    }

    /// Independent errors on the first `n_sent` positions; the `n_ebits`
    /// receiver-held positions are always identity.
    pub fn sample_error<R: Rng + ?Sized>(
        &self,
        n_sent: usize,
        n_ebits: usize,
        rng: &mut R,
    ) -> PauliString {
        let mut symbols: Vec<Gf4> = (0..n_sent).map(|_| self.sample_symbol(rng)).collect();
        symbols.resize(n_sent + n_ebits, Gf4::ZERO);
        PauliString::from_symbols(symbols)
    }
}

/// Free-function form of [`DepolarizingChannel::prior`].
pub fn prior(p: f64) -> Result<Dist4, ChannelError> {
    Ok(DepolarizingChannel::new(p)?.prior())
}
