//! Distances between empirical and limiting spectral laws, eigenvector
//! delocalization, and the off-diagonal resolvent block of the block ensemble.

use crate::ensemble::{top_eigenpair, EmpiricalMeasure, Hermitian, RectMatrix};
use crate::entry_law::Field;
use crate::error::{invalid, Error, Result};
use crate::quadrature::integrate;
use crate::spectral_law::SpectralLaw;
use crate::spherical::sample_sphere;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    /// Kolmogorov–Smirnov distance `sup |F_n − F|`.
    pub ks: f64,
    /// Wasserstein-1 distance `∫ |F_n − F|`.
    pub w1: f64,
    /// Lower bound on the bounded-Lipschitz distance from a finite family of
    /// hat and ramp functions `f` with `‖f‖_∞ + ‖f‖_L ≤ 1`.
    pub bl_lower: f64,
    pub n: usize,
}

fn ks_distance(atoms: &[f64], law: &SpectralLaw) -> f64 {
    let n = atoms.len() as f64;
    let mut best: f64 = 0.0;
    let mut check = |v: f64, below: usize, upto: usize| {
        best = best.max((upto as f64 / n - law.cdf(v)).abs());
        best = best.max((below as f64 / n - law.cdf_left(v)).abs());
    };
    let mut k = 0;
    while k < atoms.len() {
        let v = atoms[k];
        let mut j = k;
        while j < atoms.len() && atoms[j] == v {
            j += 1;
        }
        check(v, k, j);
        k = j;
    }
    if law.atom_at_zero() > 0.0 {
        let below = atoms.partition_point(|&a| a < 0.0);
        let upto = atoms.partition_point(|&a| a <= 0.0);
        check(0.0, below, upto);
    }
    best
}

/// `∫_a^b |c − F|` for a continuous nondecreasing `F` on `(a, b)`.
fn abs_gap_integral(law: &SpectralLaw, c: f64, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let fa = law.cdf(a) - c;
    let fb = law.cdf_left(b) - c;
    let mut split = None;
    if fa < 0.0 && fb > 0.0 {
        let (mut lo, mut hi) = (a, b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if law.cdf(mid) < c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        split = Some(0.5 * (lo + hi));
    }
    let g = |x: f64| (c - law.cdf(x)).abs();
    match split {
        Some(t) => Ok(integrate(g, a, t)? + integrate(g, t, b)?),
        None => integrate(g, a, b),
    }
}

fn w1_distance(atoms: &[f64], law: &SpectralLaw) -> Result<f64> {
    let n = atoms.len() as f64;
    let (lo, hi) = law.support();
    let mut breaks: Vec<f64> = atoms.to_vec();
    breaks.extend([lo, hi]);
    if law.atom_at_zero() > 0.0 {
        breaks.push(0.0);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let c = atoms.partition_point(|&v| v <= a) as f64 / n;
        total += abs_gap_integral(law, c, a, b)?;
    }
    Ok(total)
}

fn bl_lower_bound(atoms: &[f64], law: &SpectralLaw, grid_m: usize) -> Result<f64> {
    let n = atoms.len() as f64;
    let (lo, hi) = law.support();
    let a = lo.min(atoms[0]) - 0.5;
    let b = hi.max(atoms[atoms.len() - 1]) + 0.5;
    let m = grid_m.max(2);
    let mut best: f64 = 0.0;
    for &w in &[0.05, 0.2, 0.5, 1.0] {
        let h = w / (1.0 + w);
        for k in 0..m {
            let c = a + (b - a) * k as f64 / (m - 1) as f64;
            let hat = |x: f64| h * (1.0 - (x - c).abs() / w).max(0.0);
            let ramp = |x: f64| h * ((x - c) / w).clamp(0.0, 1.0);
            for f in [&hat as &dyn Fn(f64) -> f64, &ramp] {
                let emp = atoms.iter().map(|&x| f(x)).sum::<f64>() / n;
                let lim = law.integrate(f)?;
                best = best.max((emp - lim).abs());
            }
        }
    }
    Ok(best)
}

/// KS and W1 distances (exact given the closed-form CDF) and a lower bound on
/// the bounded-Lipschitz distance from `2·4·grid_m` test functions.
pub fn distances(esd: &EmpiricalMeasure, law: &SpectralLaw, grid_m: usize) -> Result<DistanceReport> {
    law.validate()?;
    if esd.atoms.is_empty() {
        return Err(invalid("empirical measure has no atoms"));
    }
    let mut atoms = esd.atoms.clone();
    if atoms.iter().any(|a| !a.is_finite()) {
        return Err(invalid("empirical measure has non-finite atoms"));
    }
    atoms.sort_by(f64::total_cmp);
    Ok(DistanceReport {
        ks: ks_distance(&atoms, law),
        w1: w1_distance(&atoms, law)?,
        bl_lower: bl_lower_bound(&atoms, law, grid_m)?,
        n: atoms.len(),
    })
}

/// `max_i |v_i|` for the top eigenvector `v`. A spectral gap below `1e-10`
/// leaves `v` undefined and is reported as [`Error::Degenerate`].
pub fn top_vector_deloc(matrix: &Hermitian) -> Result<f64> {
    let (_, gap, v) = top_eigenpair(matrix)?;
    if gap < 1e-10 {
        return Err(Error::Degenerate(format!("top eigenvalue is not simple (gap {gap:e})")));
    }
    Ok(v.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn complex_rect(g: &RectMatrix) -> DMatrix<Complex64> {
    match g {
        RectMatrix::Real(g) => g.map(|x| Complex64::new(x, 0.0)),
        RectMatrix::Complex(g) => g.clone(),
    }
}

/// `|⟨e2, R₂₁(z) e1⟩|` for given unit vectors `e1 ∈ C^L`, `e2 ∈ C^M`, where
/// `R₂₁(z) = A*(z² − AA*)⁻¹` is the lower-left block of `(z − X)⁻¹` for the block
/// matrix `X` with off-diagonal block `A = G/√N`, `N = L + M`.
///
/// Fails with [`Error::InsideSpectrum`] when `z² − AA*` is not positive definite.
pub fn resolvent_cross_block_with(g: &RectMatrix, z: f64, e1: &[Complex64], e2: &[Complex64]) -> Result<f64> {
    let (l, m) = g.shape();
    if e1.len() != l || e2.len() != m {
        return Err(invalid(format!("vectors must have lengths {l} and {m}")));
    }
    let a = complex_rect(g) / Complex64::new(((l + m) as f64).sqrt(), 0.0);
    let gram = &a * a.adjoint();
    if !Hermitian::Complex(gram.clone()).is_below(z * z) {
        return Err(Error::InsideSpectrum(format!("z = {z} is not above the block spectrum")));
    }
    let shifted = DMatrix::<Complex64>::identity(l, l) * Complex64::new(z * z, 0.0) - gram;
    let y = shifted
        .lu()
        .solve(&DVector::from_column_slice(e1))
        .ok_or_else(|| Error::InsideSpectrum(format!("z = {z}: singular resolvent")))?;
    let w = a.adjoint() * y;
    let value: Complex64 = e2.iter().zip(w.iter()).map(|(u, v)| u.conj() * v).sum();
    Ok(value.norm())
}

/// [`resolvent_cross_block_with`] for independent uniform unit vectors.
pub fn resolvent_cross_block<R: Rng + ?Sized>(g: &RectMatrix, z: f64, rng: &mut R) -> Result<f64> {
    let (l, m) = g.shape();
    let field = match g {
        RectMatrix::Real(_) => Field::Real,
        RectMatrix::Complex(_) => Field::Complex,
    };
    let e1 = sample_sphere(l, field, rng);
    let e2 = sample_sphere(m, field, rng);
    resolvent_cross_block_with(g, z, &e1.components, &e2.components)
}
