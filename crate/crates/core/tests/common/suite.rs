//! Every special function against a brute-force integral on 1000 random
//! inputs, plus frozen reference values computed at 30 digits. Shared by the
//! `oracles` test target and the acceptance run.

use super::*;
use nomacov::geometry::ZoneGeometry;
use nomacov::laplace::{annulus_factor, shell_factor, shell_factor_beta};
use nomacov::specfun::*;
use nomacov::Tier;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: usize = 1000;

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (r.random_range(lo.ln()..hi.ln())).exp()
}

#[track_caller]
fn check(what: &str, got: f64, want: f64, args: impl std::fmt::Debug) {
    assert!(close(got, want), "{what}{args:?}: got {got:e}, oracle {want:e}");
}

pub fn frozen_values() {
    let v1 = 1.785_398_163_397_448_3_f64;
    let v2 = 18.778_440_376_105_464_f64;
    let v3 = -5.339_540_875_419_142_f64;
    let v4 = 0.922_271_212_307_834_f64;
    assert!((gauss_2f1_neg(0.5, -1.0).unwrap() - v1).abs() < 1e-10 * v1);
    assert!((gauss_2f1_neg(0.75, -10.0).unwrap() - v2).abs() < 1e-10 * v2);
    assert!((inc_beta_gen(-0.5, -0.75, 0.0).unwrap() - v3).abs() < 1e-8 * v3.abs());
    assert!((lower_inc_gamma(2.5, 3.0).unwrap() - v4).abs() < 1e-10);
    // The oracles reproduce them too.
    assert!(close(hyper_oracle(0.5, 1.0), v1));
    assert!(close(hyper_oracle(0.75, 10.0), v2));
    assert!(close(inc_beta_oracle(-0.5, -0.75, 0.0), v3));
    assert!(close(lower_gamma_oracle(2.5, 3.0), v4));
}

pub fn hypergeometric() {
    let mut r = rng(1);
    for _ in 0..CASES {
        let delta = r.random_range(0.02..0.98);
        let w = if r.random_bool(0.1) { 0.0 } else { log_uniform(&mut r, 1e-6, 1e6) };
        check("2F1", gauss_2f1_neg(delta, -w).unwrap(), hyper_oracle(delta, w), (delta, w));
    }
    assert!(gauss_2f1_neg(1.0, -1.0).is_err());
    assert!(gauss_2f1_neg(0.5, 1.0).is_err());
}

pub fn incomplete_beta() {
    let mut r = rng(2);
    for _ in 0..CASES {
        let a = r.random_range(-0.95..-0.05);
        let b = if r.random_bool(0.5) { 1.0 - r.random_range(1..=4) as f64 } else { r.random_range(-3.0..1.0) };
        let x = if r.random_bool(0.7) { -log_uniform(&mut r, 1e-4, 1e3) } else { r.random_range(1e-4..0.9) };
        check("B", inc_beta_gen(x, a, b).unwrap(), inc_beta_oracle(x, a, b), (x, a, b));
    }
    assert_eq!(inc_beta_gen(0.0, 0.5, 0.0).unwrap(), 0.0);
    assert!(inc_beta_gen(-0.5, -1.0, 0.0).is_err());
}

pub fn incomplete_gamma() {
    let mut r = rng(3);
    for _ in 0..CASES {
        let s = log_uniform(&mut r, 0.1, 40.0);
        let x = log_uniform(&mut r, 1e-3, 80.0);
        let want = lower_gamma_oracle(s, x);
        check("lower gamma", lower_inc_gamma(s, x).unwrap(), want, (s, x));
        let total = gamma_oracle(s);
        let upper = upper_inc_gamma(s, x).unwrap();
        assert!((upper - (total - want)).abs() <= 1e-8 * total, "upper gamma({s}, {x})");
        check("scaled gamma", lower_inc_gamma_scaled(s, x).unwrap(), want / x.powf(s), (s, x));
        let p = regularized_lower_gamma(s, x).unwrap();
        assert!((p - want / total).abs() <= 1e-9, "regularized gamma({s}, {x})");
    }
    assert!((lower_inc_gamma(1.0, 2.0).unwrap() - (1.0 - (-2.0f64).exp())).abs() < 1e-14);
    assert!(lower_inc_gamma(0.0, 1.0).is_err());
}

pub fn gamma_and_pochhammer() {
    let mut r = rng(4);
    for _ in 0..CASES {
        let x = r.random_range(0.1..30.0);
        let g = gamma_oracle(x);
        check("gamma", gamma(x).unwrap(), g, x);
        assert!((ln_gamma(x).unwrap() - g.ln()).abs() <= 1e-9 * g.ln().abs().max(1.0), "ln_gamma({x})");
        let n = r.random_range(0..8usize);
        let y = r.random_range(0.1..10.0);
        check("pochhammer", pochhammer(y, n), gamma_oracle(y + n as f64) / gamma_oracle(y), (y, n));
    }
    assert_eq!(pochhammer(3.0, 0), 1.0);
    assert_eq!(pochhammer(1.0, 4), 24.0);
    assert_eq!(pochhammer(-0.5, 3), -0.375);
}

pub fn normal_tail_and_inverse() {
    let mut r = rng(5);
    for _ in 0..CASES {
        let x = r.random_range(-8.0..8.0);
        let q = q_oracle(x);
        check("Q", q_function(x).unwrap(), q, x);
        check("erfc", erfc(x / std::f64::consts::SQRT_2).unwrap(), 2.0 * q, x);
        let p = if r.random_bool(0.5) { log_uniform(&mut r, 1e-12, 0.5) } else { 1.0 - log_uniform(&mut r, 1e-9, 0.5) };
        let xi = inverse_q(p).unwrap();
        let back = q_oracle(xi);
        assert!((back - p).abs() <= 1e-9 * p.min(1.0 - p) + 1e-15, "inverse_q({p}) = {xi}, Q = {back}");
    }
    assert!(inverse_q(0.0f64).is_err());
    assert!(inverse_q(1.0f64).is_err());
}

pub fn chebyshev_rule_matches_weighted_integral() {
    let mut r = rng(6);
    for _ in 0..CASES {
        let n = r.random_range(1..40usize);
        let coeffs: Vec<f64> = (0..2 * n).map(|_| r.random_range(-1.0..1.0)).collect();
        let poly = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let rule = chebyshev_rule::<f64>(n).unwrap();
        assert_eq!(rule.nodes().len(), n);
        assert!(rule.weights().iter().all(|&w| w == std::f64::consts::PI / n as f64));
        let got: f64 = rule.nodes().iter().zip(rule.weights()).map(|(&x, &w)| w * poly(x)).sum();
        // ∫ g(x)/√(1−x²) dx over (−1, 1) = ∫₀^π g(cos θ) dθ.
        let want = tanh_sinh(|t, _, _| poly(t.cos()), 0.0, std::f64::consts::PI);
        let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
        assert!((got - want).abs() <= 1e-10 * scale, "N = {n}: {got} vs {want}");
    }
    let one = chebyshev_rule::<f64>(1).unwrap();
    assert_eq!((one.nodes()[0].abs() < 1e-16, one.weights()[0]), (true, std::f64::consts::PI));
    assert!(chebyshev_rule::<f64>(0).is_err());
}

pub fn adaptive_integrator() {
    let mut r = rng(7);
    let quad = Integrator::<f64>::new(1e-12, 1e-10);
    for _ in 0..CASES {
        let p = r.random_range(-0.9..3.0);
        let c = r.random_range(0.1..5.0);
        let b = r.random_range(0.5..10.0);
        let got = quad.integrate(|x: f64| x.powf(p) * (-c * x).exp(), 0.0, b).unwrap().value;
        let want = tanh_sinh(|_, xa, _| xa.powf(p) * (-c * xa).exp(), 0.0, b);
        check("integral", got, want, (p, c, b));
    }
}

// The Laplace factors are the quantities the special functions feed; check
// them against the radial average they stand for.
pub fn zone_factors_match_radial_average() {
    let mut r = rng(8);
    for _ in 0..CASES / 4 {
        let zones = r.random_range(1..6usize);
        let i = r.random_range(1..=zones);
        let k = log_uniform(&mut r, 1e-3, 1e15);
        let alpha = r.random_range(2.2..6.0);
        let z = ZoneGeometry::new(Tier::Terrestrial, i, zones, 1000.0, 1.0).unwrap();
        let (a, b) = (z.inner(), z.outer());
        // Split at the knee k^{1/α} where the integrand turns over.
        let knee = k.powf(1.0 / alpha).clamp(a, b);
        let f = |x: f64| 2.0 * x / (1.0 + k * x.powf(-alpha)) / (b * b - a * a);
        let want = tanh_sinh(|x, _, _| f(x), a, knee) + tanh_sinh(|x, _, _| f(x), knee, b);
        check("annulus", annulus_factor(k, &z, alpha).unwrap(), want, (i, zones, k, alpha));

        let m = r.random_range(1..=3u32);
        let alpha_u = r.random_range(3.2..5.0);
        let ks = log_uniform(&mut r, 1e-3, 1e12);
        let z = ZoneGeometry::new(Tier::Aerial, i, zones, 1000.0, 1.0).unwrap();
        let (a, b) = (z.inner(), z.outer());
        let knee = ks.powf(1.0 / alpha_u).clamp(a, b);
        let g = |x: f64| 3.0 * x * x * (1.0 + ks * x.powf(-alpha_u)).powi(-(m as i32)) / (b.powi(3) - a.powi(3));
        let want = tanh_sinh(|x, _, _| g(x), a, knee) + tanh_sinh(|x, _, _| g(x), knee, b);
        check("shell", shell_factor(ks, m, &z, alpha_u).unwrap(), want, (i, zones, ks, m, alpha_u));
        let beta = shell_factor_beta(ks, m, &z, alpha_u).unwrap();
        assert!((beta - want).abs() <= 1e-7 * want.max(1e-3), "Beta path {beta} vs {want} at {:?}", (i, zones, ks, m, alpha_u));
    }
}

pub fn zone_pdfs_integrate_to_one() {
    for tier in Tier::BOTH {
        for zones in [1, 2, 5] {
            for i in 1..=zones {
                let z = ZoneGeometry::new(tier, i, zones, 1000.0, 1.0).unwrap();
                let mass = tanh_sinh(|x, _, _| z.pdf(x), z.inner(), z.outer());
                assert!((mass - 1.0).abs() < 1e-9, "{tier} zone {i}/{zones}: {mass}");
            }
        }
    }
}

pub const SUITE: &[(&str, fn())] = &[
    ("frozen_values", frozen_values),
    ("hypergeometric", hypergeometric),
    ("incomplete_beta", incomplete_beta),
    ("incomplete_gamma", incomplete_gamma),
    ("gamma_and_pochhammer", gamma_and_pochhammer),
    ("normal_tail_and_inverse", normal_tail_and_inverse),
    ("chebyshev_rule_matches_weighted_integral", chebyshev_rule_matches_weighted_integral),
    ("adaptive_integrator", adaptive_integrator),
    ("zone_factors_match_radial_average", zone_factors_match_radial_average),
    ("zone_pdfs_integrate_to_one", zone_pdfs_integrate_to_one),
];
