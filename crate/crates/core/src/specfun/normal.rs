//! Gaussian tail function Q and its inverse.

use crate::error::{domain, Result};
use crate::scalar::Real;

use super::gamma::{lower_inc_gamma, upper_inc_gamma};

fn erfc_nonneg<T: Real>(z: T) -> Result<T> {
    let half = T::lit(0.5);
    let z2 = z * z;
    if z2 == T::zero() {
        return Ok(T::one());
    }
    let sqrt_pi = T::PI().sqrt();
    if z2 < T::lit(1.5) {
        Ok(T::one() - lower_inc_gamma(half, z2)? / sqrt_pi)
    } else {
        Ok(upper_inc_gamma(half, z2)? / sqrt_pi)
    }
}

/// Complementary error function.
pub fn erfc<T: Real>(z: T) -> Result<T> {
    if z >= T::zero() {
        erfc_nonneg(z)
    } else {
        Ok(T::lit(2.0) - erfc_nonneg(-z)?)
    }
}

/// Q(x) = P(N(0,1) > x).
pub fn q_function<T: Real>(x: T) -> Result<T> {
    Ok(T::lit(0.5) * erfc(x / T::SQRT_2())?)
}

// Acklam's rational approximation of the standard normal quantile.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn poly<T: Real>(coeffs: &[f64], x: T) -> T {
    coeffs.iter().fold(T::zero(), |acc, &c| acc * x + T::lit(c))
}

fn acklam<T: Real>(p: T) -> T {
    let low = T::lit(0.024_25);
    if p < low {
        let q = (T::lit(-2.0) * p.ln()).sqrt();
        poly(&C, q) / (poly(&D, q) * q + T::one())
    } else if p <= T::one() - low {
        let q = p - T::lit(0.5);
        let r = q * q;
        poly(&A, r) * q / (poly(&B, r) * r + T::one())
    } else {
        let q = (T::lit(-2.0) * (T::one() - p).ln()).sqrt();
        -poly(&C, q) / (poly(&D, q) * q + T::one())
    }
}

/// Q⁻¹(p): the x with Q(x) = p, for p in (0, 1).
///
/// Acklam's approximation (relative error ~1e-9) polished with two Halley
/// steps against the incomplete-gamma based Q.
pub fn inverse_q<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain!("inverse Q requires p in (0, 1), got {p}"));
    }
    // Q⁻¹(p) = -Φ⁻¹(p), and Φ(x) = Q(-x).
    let mut x = acklam(p);
    let sqrt_2pi = (T::lit(2.0) * T::PI()).sqrt();
    for _ in 0..2 {
        let e = q_function(-x)? - p;
        let u = e * sqrt_2pi * (x * x * T::lit(0.5)).exp();
        x = x - u / (T::one() + x * u * T::lit(0.5));
    }
    Ok(-x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_reference_values() {
        assert!((q_function(0.0_f64).unwrap() - 0.5).abs() < 1e-16);
        assert!((q_function(1.0_f64).unwrap() - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((q_function(-2.0_f64).unwrap() - 0.977_249_868_051_820_8).abs() < 1e-15);
        assert!((q_function(5.0_f64).unwrap() - 2.866_515_718_791_939e-7).abs() < 1e-20);
    }

    #[test]
    fn inverse_q_reference_values() {
        assert!(inverse_q(0.5_f64).unwrap().abs() < 1e-15);
        assert!((inverse_q(0.1_f64).unwrap() - 1.281_551_565_544_600_5).abs() < 1e-12);
        assert!((inverse_q(0.975_f64).unwrap() + 1.959_963_984_540_054).abs() < 1e-12);
        assert!((inverse_q(1e-9_f64).unwrap() - 5.997_807_015_007_686).abs() < 1e-9);
    }

    #[test]
    fn inverse_q_domain() {
        for p in [0.0_f64, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(inverse_q(p).is_err(), "p={p}");
        }
    }
}
