//! Test-side oracles that share no code with the library.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::FRAC_PI_2;

pub mod suite;

/// Double-exponential (tanh-sinh) quadrature on a finite interval. Nodes are
/// measured from the nearer endpoint so integrable endpoint singularities
/// are sampled without cancellation. `f` receives `(x, x − a, b − x)`.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let c = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (c * c);
        if !(w > 0.0) || !w.is_finite() {
            return 0.0;
        }
        // Distance to the nearer end: 2·half/(1 + e^{2|u|}).
        let gap = 2.0 * half / (1.0 + (2.0 * u.abs()).exp());
        if gap == 0.0 {
            return 0.0;
        }
        let (x, da, db) = if t < 0.0 { (a + gap, gap, b - a - gap) } else { (b - gap, b - a - gap, gap) };
        w * f(x, da, db)
    };
    const T_MAX: f64 = 6.5;
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        sum += node(k as f64 * h) + node(-(k as f64) * h);
        k += 1;
    }
    let mut estimate = h * sum;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            sum += node(k as f64 * h) + node(-(k as f64) * h);
            k += 2;
        }
        let next = h * sum;
        let done = (next - estimate).abs() <= 1e-14 * next.abs().max(1e-300);
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Euler integral for Γ(x), x > 0.
pub fn gamma_oracle(x: f64) -> f64 {
    let top = 2.0 * x + 80.0;
    tanh_sinh(|t, ta, _| ((x - 1.0) * ta.ln() - t).exp(), 0.0, top)
}

/// ∫₀ˣ t^{s−1} e^{−t} dt.
pub fn lower_gamma_oracle(s: f64, x: f64) -> f64 {
    tanh_sinh(|t, ta, _| ((s - 1.0) * ta.ln() - t).exp(), 0.0, x)
}

/// ₂F₁(1, −δ; 1−δ; −w) = 1 + δ w ∫₀¹ u^{−δ}/(1 + w u) du, taken with
/// u = v^{1/(1−δ)} so the endpoint singularity disappears.
pub fn hyper_oracle(delta: f64, w: f64) -> f64 {
    let e = 1.0 / (1.0 - delta);
    let f = |v: f64| e / (1.0 + w * v.powf(e));
    let knee = w.powf(-1.0 / e).min(1.0);
    1.0 + delta * w * (tanh_sinh(|v, _, _| f(v), 0.0, knee) + tanh_sinh(|v, _, _| f(v), knee, 1.0))
}

/// Finite-part continuation of ∫₀ˣ t^{a−1}(1−t)^{b−1} dt for −1 < a < 0:
/// |x|^a·[1/a + ∫₀¹ s^{a−1}((1 − xs)^{b−1} − 1) ds], with s = v^{1/(1+a)}.
pub fn inc_beta_oracle(x: f64, a: f64, b: f64) -> f64 {
    let e = 1.0 / (1.0 + a);
    let body = tanh_sinh(
        |_, va, _| {
            let s = va.powf(e);
            let g = ((b - 1.0) * (-x * s).ln_1p()).exp_m1();
            if s == 0.0 { -(b - 1.0) * -x * e } else { g / s * e }
        },
        0.0,
        1.0,
    );
    x.abs().powf(a) * (1.0 / a + body)
}

/// Standard normal tail ∫ₓ^∞ φ(t) dt.
pub fn q_oracle(x: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if x >= 0.0 {
        tanh_sinh(|t, _, _| phi(t), x, x + 40.0)
    } else {
        1.0 - tanh_sinh(|t, _, _| phi(t), -x, -x + 40.0)
    }
}

/// Looser of absolute 1e−10 and relative 1e−8, the library-wide tolerance.
pub fn close(got: f64, want: f64) -> bool {
    (got - want).abs() <= f64::max(1e-10, 1e-8 * want.abs())
}
