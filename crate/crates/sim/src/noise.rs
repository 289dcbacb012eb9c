//! Gaussian measurement noise at a given signal-to-noise ratio.
//!
//! The signal power of each channel is the running mean square of the clean
//! signal up to and including the current sample.

use flc_sldo_core::plant::PlantState;
use flc_sldo_core::scenario::{Measurement, NoiseChannels, NoiseConfig};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Standard deviation giving `snr_db` against `signal_power`.
pub fn noise_std(snr_db: f64, signal_power: f64) -> f64 {
    (signal_power / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// `y` plus zero-mean Gaussian noise of variance `P / 10^(snr/10)`.
pub fn inject_noise(y: f64, snr_db: f64, signal_power: f64, rng: &mut ChaCha8Rng) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    y + noise_std(snr_db, signal_power) * z
}

#[derive(Debug, Clone)]
pub struct GaussianNoise {
    rng: ChaCha8Rng,
    snr_db: f64,
    channels: NoiseChannels,
    sum_sq: [f64; 2],
    samples: usize,
}

impl GaussianNoise {
    pub fn new(config: &NoiseConfig) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            snr_db: config.snr_db,
            channels: config.channels,
            sum_sq: [0.0; 2],
            samples: 0,
        }
    }
}

impl Measurement for GaussianNoise {
    fn measure(&mut self, _k: usize, _t: f64, x: PlantState) -> PlantState {
        self.samples += 1;
        self.sum_sq[0] += x.x1 * x.x1;
        self.sum_sq[1] += x.x2 * x.x2;
        let n = self.samples as f64;
        let y1 = inject_noise(x.x1, self.snr_db, self.sum_sq[0] / n, &mut self.rng);
        let y2 = match self.channels {
            NoiseChannels::Both => inject_noise(x.x2, self.snr_db, self.sum_sq[1] / n, &mut self.rng),
            NoiseChannels::OutputOnly => x.x2,
        };
        PlantState::new(y1, y2)
    }
}
