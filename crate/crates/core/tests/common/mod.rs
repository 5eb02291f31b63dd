//! Reference computations for the integration tests. Nothing here calls into
//! the library's own quadrature or closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Tanh-sinh quadrature on `[a, b]`. Robust to integrable endpoint
/// singularities; the integrand is never evaluated at the endpoints.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let d = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let s = 0.5 * PI * t.sinh();
        let u = s.tanh();
        let w = 0.5 * PI * t.cosh() / (s.cosh() * s.cosh());
        // Distance to the nearest endpoint, computed without cancellation.
        let gap = d / ((s.abs()).exp() * s.cosh());
        if gap <= 0.0 || !w.is_finite() {
            return 0.0;
        }
        let x = if u >= 0.0 { b - gap } else { a + gap };
        if x <= a || x >= b {
            return 0.0;
        }
        f(x) * w
    };
    let t_max = 4.0;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h * d;
    for _ in 0..8 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let cur = sum * h * d;
        if (cur - prev).abs() <= 1e-14 * cur.abs().max(1e-300) {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * k as f64);
    }
    s * h / 3.0
}

pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

pub fn mp_density(alpha: f64, x: f64) -> f64 {
    let a = (1.0 - alpha.sqrt()).powi(2);
    let b = (1.0 + alpha.sqrt()).powi(2);
    if x <= a || x >= b {
        0.0
    } else {
        ((b - x) * (x - a)).sqrt() / (2.0 * PI * x)
    }
}

pub fn mp_edges(alpha: f64) -> (f64, f64) {
    ((1.0 - alpha.sqrt()).powi(2), (1.0 + alpha.sqrt()).powi(2))
}

/// `∫ f dπ_α` by tanh-sinh between the MP edges.
pub fn mp_integral<F: Fn(f64) -> f64>(alpha: f64, f: F) -> f64 {
    let (a, b) = mp_edges(alpha);
    tanh_sinh(|x| f(x) * mp_density(alpha, x), a, b)
}

pub fn semicircle_integral<F: Fn(f64) -> f64>(f: F) -> f64 {
    tanh_sinh(|x| f(x) * semicircle_density(x), -2.0, 2.0)
}

/// `∫ f dσ_w` from the pushforward of `π_α` under `λ ↦ ±√(λ/(1+α))`, plus the
/// atom `(α−1)/(α+1)` at 0.
pub fn block_integral<F: Fn(f64) -> f64>(alpha: f64, f: F) -> f64 {
    let s = 1.0 + alpha;
    let body = mp_integral(alpha, |lam| {
        let x = (lam / s).sqrt();
        0.5 * (f(x) + f(-x))
    });
    (alpha - 1.0) / s * f(0.0) + 2.0 / s * body
}

/// `(1/2)∫₂ˣ √(t² − 4) dt` by tanh-sinh.
pub fn wigner_rate_oracle(x: f64) -> f64 {
    0.5 * tanh_sinh(|t| (t * t - 4.0).sqrt(), 2.0, x)
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}
