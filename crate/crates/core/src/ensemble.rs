//! Wigner, Wishart and block ensembles, spectra and empirical spectral distributions.
//!
//! Entries are drawn slot by slot in a fixed order (upper triangle column by
//! column for Wigner kinds, the `L×M` block column by column for block kinds),
//! so a seed determines the matrix regardless of how replicas are scheduled.
//! Dense storage costs `8N²` bytes for real and `16N²` for complex matrices.

use crate::entry_law::{sample_with, EntryLaw, Field};
use crate::error::{invalid, Error, Result};
use crate::spectral_law::SpectralLaw;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Wigner1,
    Wigner2,
    WishartBlock1,
    WishartBlock2,
}

impl EnsembleKind {
    pub fn beta(self) -> u8 {
        match self {
            EnsembleKind::Wigner1 | EnsembleKind::WishartBlock1 => 1,
            EnsembleKind::Wigner2 | EnsembleKind::WishartBlock2 => 2,
        }
    }

    pub fn field(self) -> Field {
        if self.beta() == 1 {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn is_block(self) -> bool {
        matches!(self, EnsembleKind::WishartBlock1 | EnsembleKind::WishartBlock2)
    }
}

impl FromStr for EnsembleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "wigner1" => Ok(EnsembleKind::Wigner1),
            "wigner2" => Ok(EnsembleKind::Wigner2),
            "wishart1" | "wishart_block1" | "block1" | "w1" => Ok(EnsembleKind::WishartBlock1),
            "wishart2" | "wishart_block2" | "block2" | "w2" => Ok(EnsembleKind::WishartBlock2),
            _ => Err(format!("unknown ensemble kind '{s}' (wigner1, wigner2, wishart1, wishart2)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dims {
    Square { n: usize },
    Rect { l: usize, m: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dims: Dims,
    pub law: EntryLaw,
}

impl EnsembleSpec {
    /// A Wigner ensemble of size `n`; the law is moved to the kind's field.
    pub fn wigner(kind: EnsembleKind, n: usize, law: EntryLaw) -> Result<Self> {
        if kind.is_block() {
            return Err(invalid("use EnsembleSpec::block for Wishart kinds"));
        }
        let spec = EnsembleSpec { kind, dims: Dims::Square { n }, law: law.with_field(kind.field()) };
        spec.validate()?;
        Ok(spec)
    }

    /// The `(L+M)×(L+M)` block ensemble built from an `L×M` matrix `G`.
    pub fn block(kind: EnsembleKind, l: usize, m: usize, law: EntryLaw) -> Result<Self> {
        if !kind.is_block() {
            return Err(invalid("use EnsembleSpec::wigner for Wigner kinds"));
        }
        let spec = EnsembleSpec { kind, dims: Dims::Rect { l, m }, law: law.with_field(kind.field()) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.law.validate()?;
        if (self.law.variance - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("off-diagonal variance must be 1, got {}", self.law.variance)));
        }
        if self.law.field != self.kind.field() {
            return Err(invalid("entry law field does not match the ensemble kind"));
        }
        match (self.kind.is_block(), self.dims) {
            (false, Dims::Square { n }) if n >= 2 => Ok(()),
            (true, Dims::Rect { l, m }) if l >= 1 && m >= l => Ok(()),
            _ => Err(invalid(format!("dimensions {:?} do not fit kind {:?} (need N ≥ 2 or M ≥ L ≥ 1)", self.dims, self.kind))),
        }
    }

    pub fn beta(&self) -> u8 {
        self.kind.beta()
    }

    /// Side length of the self-adjoint matrix (`N`, or `L + M` for block kinds).
    pub fn n(&self) -> usize {
        match self.dims {
            Dims::Square { n } => n,
            Dims::Rect { l, m } => l + m,
        }
    }

    /// `(L, M)` for block kinds.
    pub fn rect(&self) -> Option<(usize, usize)> {
        match self.dims {
            Dims::Rect { l, m } => Some((l, m)),
            Dims::Square { .. } => None,
        }
    }

    /// `α = M/L` for block kinds.
    pub fn alpha(&self) -> Option<f64> {
        self.rect().map(|(l, m)| m as f64 / l as f64)
    }

    /// The limiting spectral law of the sampled self-adjoint matrix.
    pub fn limit_law(&self) -> SpectralLaw {
        match self.alpha() {
            None => SpectralLaw::Semicircle,
            Some(alpha) => SpectralLaw::BlockLaw { alpha },
        }
    }
}

/// A dense self-adjoint matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Hermitian {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl Hermitian {
    pub fn n(&self) -> usize {
        match self {
            Hermitian::Real(m) => m.nrows(),
            Hermitian::Complex(m) => m.nrows(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self {
            Hermitian::Real(m) => Complex64::new(m[(i, j)], 0.0),
            Hermitian::Complex(m) => m[(i, j)],
        }
    }

    /// Largest deviation from self-adjointness relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for j in 0..n {
            for i in 0..=j {
                let a = self.get(i, j);
                let b = self.get(j, i);
                scale = scale.max(a.norm());
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst / scale
    }

    /// `Re ⟨v, X v⟩ = Σ v̄_i X_ij v_j`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for j in 0..n {
            let mut col = Complex64::new(0.0, 0.0);
            for i in 0..n {
                col += v[i].conj() * self.get(i, j);
            }
            acc += (col * v[j]).re;
        }
        acc
    }

    /// Whether `shift·I − X` is positive definite, by a real Cholesky
    /// factorization (complex matrices through their real `2N×2N` embedding).
    pub fn is_below(&self, shift: f64) -> bool {
        let n = self.n();
        let a = match self {
            Hermitian::Real(x) => DMatrix::<f64>::identity(n, n) * shift - x,
            Hermitian::Complex(x) => DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
                let z = x[(i % n, j % n)];
                let v = match (i < n, j < n) {
                    (true, true) | (false, false) => z.re,
                    (true, false) => -z.im,
                    (false, true) => z.im,
                };
                if i == j { shift - v } else { -v }
            }),
        };
        a.cholesky().is_some()
    }

    /// Spectral norm, from the eigenvalues.
    pub fn norm(&self) -> Result<f64> {
        let s = eigenvalues(self)?;
        Ok(s.lambda_max().abs().max(s.lambda_min().abs()))
    }
}

/// An `L×M` real or complex matrix (the `G` of the Wishart construction).
#[derive(Clone, Debug, PartialEq)]
pub enum RectMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl RectMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            RectMatrix::Real(g) => g.shape(),
            RectMatrix::Complex(g) => g.shape(),
        }
    }

    /// `G G*` divided by `scale`.
    pub fn gram(&self, scale: f64) -> Hermitian {
        match self {
            RectMatrix::Real(g) => Hermitian::Real(g * g.transpose() / scale),
            RectMatrix::Complex(g) => Hermitian::Complex(g * g.adjoint() / Complex64::new(scale, 0.0)),
        }
    }
}

/// Sorted (ascending) eigenvalues of a self-adjoint matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Spectrum { eigenvalues }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// The uniform measure on a spectrum's eigenvalues (atoms sorted, weight `1/n`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(mut atoms: Vec<f64>) -> Self {
        atoms.sort_by(f64::total_cmp);
        EmpiricalMeasure { atoms }
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.atoms.len() as f64
    }
}

pub fn esd(spectrum: &Spectrum) -> EmpiricalMeasure {
    EmpiricalMeasure { atoms: spectrum.eigenvalues.clone() }
}

pub fn eigenvalues(matrix: &Hermitian) -> Result<Spectrum> {
    let asym = matrix.asymmetry();
    if asym > 1e-12 {
        return Err(Error::NotSelfAdjoint(asym));
    }
    let values: Vec<f64> = match matrix {
        Hermitian::Real(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
        Hermitian::Complex(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
    };
    Ok(Spectrum::new(values))
}

/// Top eigenpair: `(λ_max, λ_max − λ_{N−1}, eigenvector)`.
pub fn top_eigenpair(matrix: &Hermitian) -> Result<(f64, f64, Vec<Complex64>)> {
    let asym = matrix.asymmetry();
    if asym > 1e-12 {
        return Err(Error::NotSelfAdjoint(asym));
    }
    fn pick(values: &[f64]) -> (usize, f64) {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let gap = if values.len() > 1 { values[order[0]] - values[order[1]] } else { f64::INFINITY };
        (order[0], gap)
    }
    match matrix {
        Hermitian::Real(m) => {
            let eig = m.clone().symmetric_eigen();
            let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let (k, gap) = pick(&vals);
            let v = eig.eigenvectors.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect();
            Ok((vals[k], gap, v))
        }
        Hermitian::Complex(m) => {
            let eig = m.clone().symmetric_eigen();
            let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            let (k, gap) = pick(&vals);
            Ok((vals[k], gap, eig.eigenvectors.column(k).iter().copied().collect()))
        }
    }
}

/// Per-slot tilt arguments for [`sample_matrix_tilted`]. `None` means no tilt.
pub(crate) type SlotTilt<'a> = Option<&'a dyn Fn(usize, usize) -> Complex64>;

/// Samples the ensemble with every entry drawn from its tilted law, returning the
/// matrix and `Σ_slots ln(dμ/dμ_t)(a)`.
pub(crate) fn sample_matrix_tilted<R: Rng + ?Sized>(spec: &EnsembleSpec, tilt: SlotTilt, rng: &mut R) -> (Hermitian, f64) {
    let n = spec.n();
    let inv = 1.0 / (n as f64).sqrt();
    let off = spec.law.component();
    let field = spec.kind.field();
    let diag_law = spec.law.diagonal(spec.beta());
    let diag = diag_law.component();
    let zero = Complex64::new(0.0, 0.0);
    let mut llr = 0.0;
    let mut draw = |law: &EntryLaw, comp, f: Field, t: Complex64, rng: &mut R| -> Complex64 {
        let a = sample_with(comp, f, t, rng);
        if t != zero {
            llr += -(t * a.conj()).re + law.lmgf_unchecked(comp, t);
        }
        a
    };
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    match spec.rect() {
        None => {
            for j in 0..n {
                for i in 0..=j {
                    let t = tilt.map_or(zero, |f| f(i, j));
                    if i == j {
                        let a = draw(&diag_law, &diag, Field::Real, Complex64::new(t.re, 0.0), rng);
                        x[(i, i)] = a * inv;
                    } else {
                        let a = draw(&spec.law, &off, field, t, rng) * inv;
                        x[(i, j)] = a;
                        x[(j, i)] = a.conj();
                    }
                }
            }
        }
        Some((l, m)) => {
            for j in 0..m {
                for i in 0..l {
                    let t = tilt.map_or(zero, |f| f(i, l + j));
                    let a = draw(&spec.law, &off, field, t, rng) * inv;
                    x[(i, l + j)] = a;
                    x[(l + j, i)] = a.conj();
                }
            }
        }
    }
    let matrix = match field {
        Field::Real => Hermitian::Real(x.map(|z| z.re)),
        Field::Complex => Hermitian::Complex(x),
    };
    (matrix, llr)
}

/// Samples the self-adjoint matrix `X` of the ensemble (entries `a_ij/√N`).
pub fn sample_matrix<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Hermitian {
    sample_matrix_tilted(spec, None, rng).0
}

/// Samples the unnormalized `L×M` matrix `G` of a block ensemble, drawing entries
/// in the same order as [`sample_matrix`].
pub fn sample_rect<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<RectMatrix> {
    let (l, m) = spec.rect().ok_or_else(|| invalid("sample_rect needs a block kind"))?;
    let comp = spec.law.component();
    let field = spec.kind.field();
    let zero = Complex64::new(0.0, 0.0);
    Ok(match field {
        Field::Real => RectMatrix::Real(DMatrix::from_fn(l, m, |_, _| sample_with(&comp, field, zero, rng).re)),
        Field::Complex => RectMatrix::Complex(DMatrix::from_fn(l, m, |_, _| sample_with(&comp, field, zero, rng))),
    })
}

/// The block matrix `[[0, G/√N], [G*/√N, 0]]` with `N = L + M`.
pub fn block_from_rect(g: &RectMatrix) -> Hermitian {
    let (l, m) = g.shape();
    let n = l + m;
    let s = 1.0 / (n as f64).sqrt();
    match g {
        RectMatrix::Real(g) => {
            let mut x = DMatrix::zeros(n, n);
            for j in 0..m {
                for i in 0..l {
                    x[(i, l + j)] = g[(i, j)] * s;
                    x[(l + j, i)] = g[(i, j)] * s;
                }
            }
            Hermitian::Real(x)
        }
        RectMatrix::Complex(g) => {
            let mut x = DMatrix::zeros(n, n);
            for j in 0..m {
                for i in 0..l {
                    x[(i, l + j)] = g[(i, j)] * s;
                    x[(l + j, i)] = g[(i, j)].conj() * s;
                }
            }
            Hermitian::Complex(x)
        }
    }
}

/// The `L×M` upper-right block of a block-kind matrix, times `√N`.
pub fn rect_from_block(x: &Hermitian, l: usize) -> RectMatrix {
    let n = x.n();
    let m = n - l;
    let s = (n as f64).sqrt();
    match x {
        Hermitian::Real(x) => RectMatrix::Real(DMatrix::from_fn(l, m, |i, j| x[(i, l + j)] * s)),
        Hermitian::Complex(x) => RectMatrix::Complex(DMatrix::from_fn(l, m, |i, j| x[(i, l + j)] * s)),
    }
}

/// Spectrum of the block matrix built from `G`, via the `L×L` Gram matrix:
/// `±σ_i/√N` for the singular values `σ_i` of `G`, plus `M − L` zeros.
pub fn block_spectrum_from_rect(g: &RectMatrix) -> Result<Spectrum> {
    let (l, m) = g.shape();
    let n = (l + m) as f64;
    let gram = eigenvalues(&g.gram(n))?;
    let mut values = Vec::with_capacity(l + m);
    for &v in &gram.eigenvalues {
        let s = v.max(0.0).sqrt();
        values.push(s);
        values.push(-s);
    }
    values.extend(std::iter::repeat(0.0).take(m - l));
    Ok(Spectrum::new(values))
}

/// Eigenvalues of `W = (1/L) G G*`.
pub fn wishart_spectrum(g: &RectMatrix) -> Result<Spectrum> {
    let (l, _) = g.shape();
    eigenvalues(&g.gram(l as f64))
}

/// Maps a block spectrum to the spectrum of `W = (1/L)GG*`: the `L` largest block
/// eigenvalues `λ` become `(N/L)·λ²`.
pub fn wishart_eigs_from_block(block: &Spectrum, l: usize, m: usize) -> Result<Spectrum> {
    let n = l + m;
    if block.n() != n {
        return Err(invalid(format!("block spectrum has {} values, expected {n}", block.n())));
    }
    let ev = &block.eigenvalues;
    let scale = ev.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let asym = (0..n).map(|k| (ev[k] + ev[n - 1 - k]).abs()).fold(0.0, f64::max);
    if asym > 1e-8 * scale {
        return Err(invalid(format!("block spectrum is not symmetric (defect {asym:e})")));
    }
    let ratio = n as f64 / l as f64;
    Ok(Spectrum::new(ev[n - l..].iter().map(|&v| ratio * v.max(0.0) * v.max(0.0)).collect()))
}
