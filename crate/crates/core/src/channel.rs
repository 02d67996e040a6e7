//! Path loss, fading samplers and per-trial channel realizations.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::geometry::{NetworkConfig, Tier};
use crate::scalar::Real;

/// Bounded path loss: `d^(−α)` beyond `r0`, `r0^(−α)` inside it.
pub fn path_loss<T: Real>(d: T, alpha: T, r0: T) -> Result<T> {
    if !(d > T::zero()) {
        return Err(domain!("distance must be positive, got {d}"));
    }
    if !(alpha > T::zero() && r0 > T::zero()) {
        return Err(domain!("path loss needs alpha > 0 and r0 > 0, got {alpha}, {r0}"));
    }
    Ok(if d > r0 { d.powf(-alpha) } else { r0.powf(-alpha) })
}

/// Exponential(1) power gain by inversion.
pub fn sample_rayleigh_power<T: Real>(u: T) -> T {
    -u.ln()
}

/// Unit-mean Gamma(m, 1/m) power gain: a sum of `m` exponentials over `m`.
pub fn sample_nakagami_power<T: Real, R: RngCore + ?Sized>(m: u32, rng: &mut R) -> Result<T> {
    if m < 1 {
        return Err(domain!("Nakagami parameter must be at least 1, got {m}"));
    }
    let sum: T = (0..m).map(|_| sample_rayleigh_power(open_uniform::<T, R>(rng))).sum();
    Ok(sum / T::lit(f64::from(m)))
}

/// Uniform draw on the open interval (0, 1) from 53 random bits.
pub fn open_uniform<T: Real, R: RngCore + ?Sized>(rng: &mut R) -> T {
    let bits = rng.next_u64() >> 11;
    let u = (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    // f32 rounding may land on an endpoint.
    let u = T::lit(u);
    u.max(T::min_positive_value()).min(T::one() - T::epsilon())
}

const WORDS_PER_SUBSTREAM: u128 = 1 << 16;
const DEVICES_PER_TIER: u128 = 1 << 20;

/// Independent generator for one `(trial, tier, device)` triple.
///
/// The seed selects the key, the trial the ChaCha stream and the tier/device
/// pair a disjoint block of the keystream, so draws never depend on how trials
/// are scheduled across threads.
pub fn substream(seed: u64, trial: u64, tier: Tier, device: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let tier_index: u128 = match tier {
        Tier::Terrestrial => 0,
        Tier::Aerial => 1,
    };
    rng.set_word_pos((tier_index * DEVICES_PER_TIER + device as u128) * WORDS_PER_SUBSTREAM);
    rng
}

/// Distances and small-scale power gains of all 2M devices in one trial.
/// Vectors are ordered nearest zone first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw<T> {
    pub d_g: Vec<T>,
    pub d_u: Vec<T>,
    pub g_g: Vec<T>,
    pub g_u: Vec<T>,
}

impl<T: Real> ChannelDraw<T> {
    /// Draws trial `trial` of the experiment seeded by `seed`.
    pub fn sample(cfg: &NetworkConfig<T>, seed: u64, trial: u64) -> Self {
        let m = cfg.devices();
        let mut draw = Self {
            d_g: Vec::with_capacity(m),
            d_u: Vec::with_capacity(m),
            g_g: Vec::with_capacity(m),
            g_u: Vec::with_capacity(m),
        };
        for (k, zone) in cfg.zones(Tier::Terrestrial).iter().enumerate() {
            let mut rng = substream(seed, trial, Tier::Terrestrial, k);
            draw.d_g.push(zone.sample_distance(open_uniform(&mut rng)));
            draw.g_g.push(sample_rayleigh_power(open_uniform(&mut rng)));
        }
        for (k, zone) in cfg.zones(Tier::Aerial).iter().enumerate() {
            let mut rng = substream(seed, trial, Tier::Aerial, k);
            draw.d_u.push(zone.sample_distance(open_uniform(&mut rng)));
            let m_k = cfg.nakagami()[k];
            draw.g_u.push(sample_nakagami_power(m_k, &mut rng).expect("validated Nakagami parameter"));
        }
        draw
    }

    pub fn distances(&self, tier: Tier) -> &[T] {
        match tier {
            Tier::Terrestrial => &self.d_g,
            Tier::Aerial => &self.d_u,
        }
    }

    pub fn gains(&self, tier: Tier) -> &[T] {
        match tier {
            Tier::Terrestrial => &self.g_g,
            Tier::Aerial => &self.g_u,
        }
    }

    /// Received powers `P·g·PL(d)` of one tier, nearest first.
    pub fn received(&self, cfg: &NetworkConfig<T>, tier: Tier) -> Vec<T> {
        let (p, alpha) = (cfg.power(tier), cfg.alpha(tier));
        self.distances(tier)
            .iter()
            .zip(self.gains(tier))
            .map(|(&d, &g)| p * g * path_loss(d, alpha, cfg.r0()).expect("sampled distances are positive"))
            .collect()
    }

    /// SINR of every device of `tier` under nearest-first SIC: farther devices
    /// of the same tier, the whole other tier and noise interfere.
    pub fn sinr(&self, cfg: &NetworkConfig<T>, tier: Tier) -> Vec<T> {
        let other = match tier {
            Tier::Terrestrial => Tier::Aerial,
            Tier::Aerial => Tier::Terrestrial,
        };
        let own = self.received(cfg, tier);
        let cross: T = self.received(cfg, other).into_iter().sum();
        let mut residual = T::zero();
        let mut out = vec![T::zero(); own.len()];
        for i in (0..own.len()).rev() {
            out[i] = own[i] / (residual + cross + cfg.sigma2());
            residual = residual + own[i];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss(0.5_f64, 3.0, 1.0).unwrap(), 1.0);
        assert_eq!(path_loss(0.5_f64, 4.0, 2.0).unwrap(), 2f64.powi(-4));
        assert!((path_loss(10.0_f64, 4.0, 1.0).unwrap() - 1e-4).abs() < 1e-20);
        assert!((path_loss(1000.0_f64, 3.0, 1.0).unwrap() - 1e-9).abs() < 1e-24);
        assert!(path_loss(0.0_f64, 3.0, 1.0).is_err());
    }

    #[test]
    fn rayleigh_inverse_cdf() {
        assert!((sample_rayleigh_power((-1.0_f64).exp()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a = substream(7, 3, Tier::Aerial, 1).next_u64();
        assert_eq!(a, substream(7, 3, Tier::Aerial, 1).next_u64());
        assert_ne!(a, substream(7, 3, Tier::Aerial, 0).next_u64());
        assert_ne!(a, substream(7, 4, Tier::Aerial, 1).next_u64());
        assert_ne!(a, substream(7, 3, Tier::Terrestrial, 1).next_u64());
        assert_ne!(a, substream(8, 3, Tier::Aerial, 1).next_u64());
    }

    #[test]
    fn draws_respect_zones() {
        let cfg = NetworkConfig::<f64>::builder().devices(3).nakagami(vec![1, 2, 3]).build().unwrap();
        for t in 0..200 {
            let d = ChannelDraw::sample(&cfg, 11, t);
            for tier in Tier::BOTH {
                for (z, &r) in cfg.zones(tier).iter().zip(d.distances(tier)) {
                    assert!(z.contains(r));
                }
                assert!(d.gains(tier).iter().all(|&g| g > 0.0));
            }
        }
        assert_eq!(ChannelDraw::sample(&cfg, 11, 5), ChannelDraw::sample(&cfg, 11, 5));
    }

    #[test]
    fn sic_sinr_by_hand() {
        let cfg = NetworkConfig::<f64>::builder().p_u(1e-3).sigma2(1e-12).build().unwrap();
        let d = ChannelDraw { d_g: vec![10.0, 600.0], d_u: vec![100.0, 700.0], g_g: vec![1.0, 2.0], g_u: vec![0.5, 1.5] };
        let s1 = 1e-3 * 1e-4;
        let s2 = 1e-3 * 2.0 * 600f64.powi(-4);
        let u = 1e-3 * (0.5 * 1e-6 + 1.5 * 700f64.powi(-3));
        let sinr = d.sinr(&cfg, Tier::Terrestrial);
        assert!((sinr[0] - s1 / (s2 + u + 1e-12)).abs() < 1e-9 * sinr[0]);
        assert!((sinr[1] - s2 / (u + 1e-12)).abs() < 1e-9 * sinr[1]);
    }
}
