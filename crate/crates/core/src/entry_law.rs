//! Centered entry distributions, their log-Laplace transforms, and exponential tilting.
//!
//! A law is a shape (Rademacher, uniform, Gaussian, a finite table, or a
//! rescaled copy of another law) together with its second moment and its
//! field. Built-in shapes are standardized and then scaled to `variance`; a
//! `DiscreteTable` is taken literally and its `variance` must match its second
//! moment. A complex law is a pair of independent copies of the real shape on
//! (Re, Im), each carrying half the variance, and its transform is
//! `T(z) = E exp(Re(a z̄))`.

use crate::error::{domain, invalid, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Default cap on `|t|·max|atom|` accepted by [`EntryLaw::log_mgf`].
pub const T_BOUND_NUMERATOR: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum LawKind {
    Rademacher,
    UniformSqrt3,
    StandardGaussian,
    DiscreteTable { atoms: Vec<(f64, f64)> },
    ScaledVariant { base: Box<EntryLaw> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryLaw {
    #[serde(flatten)]
    pub kind: LawKind,
    pub variance: f64,
    pub field: Field,
}

/// One real coordinate of a law, already scaled.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Component {
    Rademacher(f64),
    Uniform(f64),
    Gaussian(f64),
    Discrete(Vec<(f64, f64)>),
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a < 0.1 {
        // Truncation error below 3e-18 on this range.
        let y = a * a;
        return y * (0.5 - y * (1.0 / 12.0 - y * (1.0 / 45.0 - y * (17.0 / 2520.0 - y * (31.0 / 14175.0 - y * 691.0 / 935550.0)))));
    }
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln(sinh(u)/u)`, even in `u`, with the removable singularity at 0.
fn ln_sinhc(u: f64) -> f64 {
    let a = u.abs();
    if a < 0.2 {
        // Taylor series of ln(sinh u / u); truncation error below 1e-17 on this range.
        let y = a * a;
        y * (1.0 / 6.0 - y * (1.0 / 180.0 - y * (1.0 / 2835.0 - y * (1.0 / 37800.0 - y * (1.0 / 467775.0 - y * 691.0 / 3831077250.0)))))
    } else {
        a + (-(-2.0 * a).exp_m1()).ln() - std::f64::consts::LN_2 - a.ln()
    }
}

/// `coth(u) − 1/u`, odd in `u`.
fn langevin(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        let u2 = u * u;
        u * (1.0 / 3.0 - u2 / 45.0 + 2.0 * u2 * u2 / 945.0)
    } else {
        1.0 / u.tanh() - 1.0 / u
    }
}

/// Derivative of [`langevin`]: `1/u² − 1/sinh²(u)`.
fn langevin_prime(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        let u2 = u * u;
        1.0 / 3.0 - u2 / 15.0 + 2.0 * u2 * u2 / 189.0
    } else if u.abs() > 350.0 {
        1.0 / (u * u)
    } else {
        let s = u.sinh();
        1.0 / (u * u) - 1.0 / (s * s)
    }
}

impl Component {
    fn max_abs(&self) -> Option<f64> {
        match self {
            Component::Rademacher(s) => Some(*s),
            Component::Uniform(c) => Some(*c),
            Component::Gaussian(_) => None,
            Component::Discrete(atoms) => Some(atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max)),
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(invalid("tilt argument must be finite"));
        }
        if let Some(m) = self.max_abs() {
            if m > 0.0 && t.abs() > T_BOUND_NUMERATOR / m {
                return Err(domain(format!("|t| = {t} exceeds the admissible bound {}", T_BOUND_NUMERATOR / m)));
            }
        }
        Ok(())
    }

    fn log_weights(atoms: &[(f64, f64)], t: f64) -> Vec<f64> {
        atoms
            .iter()
            .map(|&(v, p)| if p > 0.0 { p.ln() + t * v } else { f64::NEG_INFINITY })
            .collect()
    }

    fn lmgf(&self, t: f64) -> f64 {
        match self {
            Component::Rademacher(s) => ln_cosh(s * t),
            Component::Uniform(c) => ln_sinhc(c * t),
            Component::Gaussian(s) => 0.5 * s * s * t * t,
            Component::Discrete(atoms) => crate::estimate::log_sum_exp(&Self::log_weights(atoms, t)),
        }
    }

    fn tilted_probs(atoms: &[(f64, f64)], t: f64) -> Vec<f64> {
        let lw = Self::log_weights(atoms, t);
        let z = crate::estimate::log_sum_exp(&lw);
        lw.iter().map(|w| (w - z).exp()).collect()
    }

    /// L′(t): the mean of the tilted law.
    fn d1(&self, t: f64) -> f64 {
        match self {
            Component::Rademacher(s) => s * (s * t).tanh(),
            Component::Uniform(c) => c * langevin(c * t),
            Component::Gaussian(s) => s * s * t,
            Component::Discrete(atoms) => {
                let p = Self::tilted_probs(atoms, t);
                atoms.iter().zip(&p).map(|(a, q)| a.0 * q).sum()
            }
        }
    }

    /// L″(t): the variance of the tilted law.
    fn d2(&self, t: f64) -> f64 {
        match self {
            Component::Rademacher(s) => {
                let th = (s * t).tanh();
                s * s * (1.0 - th * th)
            }
            Component::Uniform(c) => c * c * langevin_prime(c * t),
            Component::Gaussian(s) => s * s,
            Component::Discrete(atoms) => {
                let p = Self::tilted_probs(atoms, t);
                let m: f64 = atoms.iter().zip(&p).map(|(a, q)| a.0 * q).sum();
                atoms.iter().zip(&p).map(|(a, q)| (a.0 - m) * (a.0 - m) * q).sum()
            }
        }
    }

    fn sample_tilted<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> f64 {
        match self {
            Component::Rademacher(s) => {
                let p_plus = 1.0 / (1.0 + (-2.0 * s * t).exp());
                if rng.random::<f64>() < p_plus {
                    *s
                } else {
                    -s
                }
            }
            Component::Uniform(c) => {
                let u: f64 = rng.random();
                let k = c * t;
                if k.abs() < 1e-12 {
                    return c * (2.0 * u - 1.0);
                }
                // Inverse CDF of the truncated exponential, written to avoid overflow.
                let a = k.abs();
                let y = c + (u + (1.0 - u) * (-2.0 * a).exp()).ln() * c / a;
                let y = y.clamp(-c, *c);
                if k > 0.0 {
                    y
                } else {
                    -y
                }
            }
            Component::Gaussian(s) => {
                let z: f64 = rng.sample(StandardNormal);
                s * s * t + s * z
            }
            Component::Discrete(atoms) => {
                let p = Self::tilted_probs(atoms, t);
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (a, q) in atoms.iter().zip(&p) {
                    acc += q;
                    if u < acc {
                        return a.0;
                    }
                }
                atoms.iter().zip(&p).rev().find(|(_, q)| **q > 0.0).map(|(a, _)| a.0).unwrap_or(0.0)
            }
        }
    }
}

fn table_moments(atoms: &[(f64, f64)]) -> (f64, f64, f64) {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let mean: f64 = atoms.iter().map(|a| a.0 * a.1).sum();
    let m2: f64 = atoms.iter().map(|a| a.0 * a.0 * a.1).sum();
    (total, mean, m2)
}

fn scaled_component(kind: &LawKind, target_var: f64) -> Component {
    let v = target_var.max(0.0);
    match kind {
        LawKind::Rademacher => Component::Rademacher(v.sqrt()),
        LawKind::UniformSqrt3 => Component::Uniform((3.0 * v).sqrt()),
        LawKind::StandardGaussian => Component::Gaussian(v.sqrt()),
        LawKind::DiscreteTable { atoms } => {
            let (_, _, m2) = table_moments(atoms);
            if m2 == 0.0 || m2 == v {
                Component::Discrete(atoms.clone())
            } else {
                let scale = (v / m2).sqrt();
                Component::Discrete(atoms.iter().map(|&(x, p)| (x * scale, p)).collect())
            }
        }
        LawKind::ScaledVariant { base } => scaled_component(&base.kind, v),
    }
}

impl EntryLaw {
    pub fn rademacher() -> Self {
        EntryLaw { kind: LawKind::Rademacher, variance: 1.0, field: Field::Real }
    }

    pub fn uniform_sqrt3() -> Self {
        EntryLaw { kind: LawKind::UniformSqrt3, variance: 1.0, field: Field::Real }
    }

    pub fn gaussian() -> Self {
        EntryLaw { kind: LawKind::StandardGaussian, variance: 1.0, field: Field::Real }
    }

    /// A finite table of `(value, probability)` atoms; its variance is its second moment.
    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let (_, _, m2) = table_moments(&atoms);
        let law = EntryLaw { kind: LawKind::DiscreteTable { atoms }, variance: m2, field: Field::Real };
        law.validate()?;
        Ok(law)
    }

    /// `base` rescaled to second moment `variance`.
    pub fn scaled(base: EntryLaw, variance: f64) -> Self {
        let field = base.field;
        EntryLaw { kind: LawKind::ScaledVariant { base: Box::new(base) }, variance, field }
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    /// The same shape with a different second moment.
    pub fn with_variance(self, variance: f64) -> Self {
        match self.kind {
            LawKind::DiscreteTable { .. } => EntryLaw::scaled(self, variance),
            _ => EntryLaw { variance, ..self },
        }
    }

    /// The diagonal law paired with this off-diagonal law: real, variance `2/β`.
    pub fn diagonal(&self, beta: u8) -> EntryLaw {
        self.clone().with_field(Field::Real).with_variance(2.0 / beta as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.variance >= 0.0 && self.variance.is_finite()) {
            return Err(invalid(format!("variance must be finite and ≥ 0, got {}", self.variance)));
        }
        match &self.kind {
            LawKind::DiscreteTable { atoms } => {
                if atoms.is_empty() {
                    return Err(invalid("discrete table has no atoms"));
                }
                if atoms.iter().any(|a| !(a.1 >= 0.0) || !a.0.is_finite()) {
                    return Err(invalid("discrete table needs finite values and nonnegative probabilities"));
                }
                let (total, mean, m2) = table_moments(atoms);
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("probabilities sum to {total}, not 1")));
                }
                if mean.abs() >= 1e-12 {
                    return Err(invalid(format!("table is not centered (mean {mean:e})")));
                }
                if (m2 - self.variance).abs() > 1e-10 {
                    return Err(invalid(format!("second moment {m2} differs from variance {}", self.variance)));
                }
            }
            LawKind::ScaledVariant { base } => {
                base.validate()?;
                if let LawKind::DiscreteTable { atoms } = &base.kind {
                    if table_moments(atoms).2 == 0.0 && self.variance > 0.0 {
                        return Err(invalid("cannot rescale a point mass at 0 to positive variance"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub(crate) fn component(&self) -> Component {
        let v = match self.field {
            Field::Real => self.variance,
            Field::Complex => 0.5 * self.variance,
        };
        scaled_component(&self.kind, v)
    }

    /// `L(t) = ln E e^{t·a}` for a real argument; for complex laws this is the
    /// transform in the real direction.
    pub fn log_mgf(&self, t: f64) -> Result<f64> {
        let c = self.component();
        c.check(t)?;
        Ok(c.lmgf(t))
    }

    /// `L(z) = ln E exp(Re(a z̄))`; for real laws only `Re z` matters.
    pub fn log_mgf_complex(&self, t: Complex64) -> Result<f64> {
        let c = self.component();
        c.check(t.re)?;
        match self.field {
            Field::Real => Ok(c.lmgf(t.re)),
            Field::Complex => {
                c.check(t.im)?;
                Ok(c.lmgf(t.re) + c.lmgf(t.im))
            }
        }
    }

    /// Unchecked transform for hot loops whose arguments are already bounded.
    pub(crate) fn lmgf_unchecked(&self, c: &Component, t: Complex64) -> f64 {
        match self.field {
            Field::Real => c.lmgf(t.re),
            Field::Complex => c.lmgf(t.re) + c.lmgf(t.im),
        }
    }

    /// Gradient of `L` at `t`, i.e. the mean of the tilted law (as a complex number).
    pub fn tilted_mean(&self, t: Complex64) -> Complex64 {
        let c = self.component();
        match self.field {
            Field::Real => Complex64::new(c.d1(t.re), 0.0),
            Field::Complex => Complex64::new(c.d1(t.re), c.d1(t.im)),
        }
    }

    /// Variance of one real coordinate of the tilted law in the real direction, `L″`.
    pub fn tilted_variance(&self, t: f64) -> f64 {
        self.component().d2(t)
    }

    /// `sup_{|u| ≤ t_max} |L‴(u)|` of one real coordinate, by central differences on a grid.
    pub fn third_derivative_bound(&self, t_max: f64) -> f64 {
        let c = self.component();
        let h = 1e-4 * (1.0 + t_max);
        let n = 400;
        (0..=n)
            .map(|k| {
                let u = t_max * k as f64 / n as f64;
                ((c.d2(u + h) - c.d2(u - h)) / (2.0 * h)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn tilt(&self, t: Complex64) -> Result<TiltedLaw> {
        self.log_mgf_complex(t)?;
        let t = match self.field {
            Field::Real => Complex64::new(t.re, 0.0),
            Field::Complex => t,
        };
        Ok(TiltedLaw { component: self.component(), field: self.field, log_norm: self.log_mgf_complex(t)?, t })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let c = self.component();
        sample_with(&c, self.field, Complex64::new(0.0, 0.0), rng)
    }

    /// The first `n` even moments `E a^{2k}`, k = 1..=n, of a real law.
    pub fn even_moments(&self, n: usize) -> Vec<f64> {
        let c = scaled_component(&self.kind, self.variance);
        (1..=n)
            .map(|k| match &c {
                Component::Rademacher(s) => s.powi(2 * k as i32),
                Component::Uniform(w) => w.powi(2 * k as i32) / (2 * k + 1) as f64,
                Component::Gaussian(s) => s.powi(2 * k as i32) * double_factorial_odd(k),
                Component::Discrete(atoms) => atoms.iter().map(|a| a.1 * a.0.powi(2 * k as i32)).sum(),
            })
            .collect()
    }
}

pub(crate) fn sample_with<R: Rng + ?Sized>(c: &Component, field: Field, t: Complex64, rng: &mut R) -> Complex64 {
    match field {
        Field::Real => Complex64::new(c.sample_tilted(t.re, rng), 0.0),
        Field::Complex => {
            let re = c.sample_tilted(t.re, rng);
            let im = c.sample_tilted(t.im, rng);
            Complex64::new(re, im)
        }
    }
}

/// (2k−1)!! = (2k)!/(k!·2^k).
fn double_factorial_odd(k: usize) -> f64 {
    (1..=k).map(|j| (2 * j - 1) as f64).product()
}

/// The exponentially tilted law `e^{Re(t·ā)}/T(t) dμ(a)`.
#[derive(Clone, Debug)]
pub struct TiltedLaw {
    component: Component,
    field: Field,
    log_norm: f64,
    t: Complex64,
}

impl TiltedLaw {
    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn tilted_mean(&self) -> Complex64 {
        match self.field {
            Field::Real => Complex64::new(self.component.d1(self.t.re), 0.0),
            Field::Complex => Complex64::new(self.component.d1(self.t.re), self.component.d1(self.t.im)),
        }
    }

    /// `ln(dμ/dμ_t)(a) = −Re(t·ā) + L(t)`.
    pub fn log_likelihood_ratio(&self, a: Complex64) -> f64 {
        -(self.t * a.conj()).re + self.log_norm
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        sample_with(&self.component, self.field, self.t, rng)
    }

    /// Probability of the atom at `value` under a discrete or Rademacher tilt.
    pub fn atom_probability(&self, value: f64) -> Option<f64> {
        match &self.component {
            Component::Rademacher(s) => {
                let p_plus = 1.0 / (1.0 + (-2.0 * s * self.t.re).exp());
                if value == *s {
                    Some(p_plus)
                } else if value == -s {
                    Some(1.0 - p_plus)
                } else {
                    Some(0.0)
                }
            }
            Component::Discrete(atoms) => {
                let p = Component::tilted_probs(atoms, self.t.re);
                Some(atoms.iter().zip(&p).filter(|(a, _)| a.0 == value).map(|(_, q)| q).sum())
            }
            _ => None,
        }
    }
}

/// Outcome of a grid certification of `L(t) ≤ t²·var/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgaussReport {
    pub max_gap: f64,
    pub argmax_t: f64,
    /// Phase of the maximizing argument (0 for real laws).
    pub argmax_phase: f64,
    pub passed: bool,
    pub t_grid: String,
}

/// Tolerance on `max_gap` below which a law is certified.
pub const SUBGAUSS_TOL: f64 = 1e-12;

/// Evaluates `gap(t) = L(t) − t²·var/2` on a symmetric grid of `n_grid` points in
/// `[−t_max, t_max]`. Complex laws are scanned over `n_grid` moduli in `[0, t_max]`
/// times 8 phases against `|t|²·var/4`.
pub fn check_sharp_subgaussian(law: &EntryLaw, t_max: f64, n_grid: usize) -> Result<SubgaussReport> {
    if !(t_max > 0.0) || n_grid < 3 {
        return Err(invalid("need t_max > 0 and n_grid ≥ 3"));
    }
    law.validate()?;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let (t_grid, points): (String, Vec<Complex64>) = match law.field {
        Field::Real => {
            let pts = (0..n_grid)
                .map(|k| Complex64::new(-t_max + 2.0 * t_max * k as f64 / (n_grid - 1) as f64, 0.0))
                .collect();
            (format!("uniform, {n_grid} points on [-{t_max}, {t_max}]"), pts)
        }
        Field::Complex => {
            let mut pts = Vec::with_capacity(8 * n_grid);
            for k in 0..n_grid {
                let r = t_max * k as f64 / (n_grid - 1) as f64;
                for j in 0..8 {
                    pts.push(Complex64::from_polar(r, std::f64::consts::FRAC_PI_4 * j as f64));
                }
            }
            (format!("{n_grid} moduli on [0, {t_max}] x 8 phases"), pts)
        }
    };
    let quad = match law.field {
        Field::Real => 0.5 * law.variance,
        Field::Complex => 0.25 * law.variance,
    };
    for t in points {
        let gap = law.log_mgf_complex(t)? - quad * t.norm_sqr();
        if gap > best.0 {
            let (r, phase) = match law.field {
                Field::Real => (t.re, 0.0),
                Field::Complex => (t.norm(), t.arg()),
            };
            best = (gap, r, phase);
        }
    }
    Ok(SubgaussReport {
        max_gap: best.0,
        argmax_t: best.1,
        argmax_phase: best.2,
        passed: best.0 <= SUBGAUSS_TOL,
        t_grid,
    })
}

/// The even-moment sufficient condition `m_{2n} ≤ (2n)!/(n!·2^n)` for symmetric laws.
///
/// `even_moments[k]` is the moment of order `2(k+1)`; the first entry must be 1.
pub fn moment_criterion(even_moments: &[f64]) -> Result<bool> {
    let first = *even_moments.first().ok_or_else(|| invalid("moment list is empty"))?;
    if (first - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("second moment must be 1, got {first}")));
    }
    Ok(even_moments
        .iter()
        .enumerate()
        .all(|(k, &m)| m <= double_factorial_odd(k + 1) * (1.0 + 1e-12)))
}

impl FromStr for EntryLaw {
    type Err = String;

    /// `rademacher`, `uniform`, `gaussian`, `ternary`, `sparse:<p>`, or `table:v1:p1,v2:p2,...`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rademacher" => Ok(EntryLaw::rademacher()),
            "uniform" | "uniform_sqrt3" | "uniform-sqrt3" => Ok(EntryLaw::uniform_sqrt3()),
            "gaussian" | "standard_gaussian" => Ok(EntryLaw::gaussian()),
            "ternary" => Ok(ternary_law()),
            _ if s.starts_with("sparse:") => {
                let p: f64 = s["sparse:".len()..].trim().parse().map_err(|_| format!("bad sparsity in '{s}'"))?;
                sparse_rademacher(p).map_err(|e| e.to_string())
            }
            _ => {
                let body = s.strip_prefix("table:").ok_or_else(|| format!("unknown law '{s}'"))?;
                let atoms = body
                    .split(',')
                    .map(|pair| {
                        let (v, p) = pair.split_once(':').ok_or_else(|| format!("bad atom '{pair}'"))?;
                        let v: f64 = v.trim().parse().map_err(|_| format!("bad value '{v}'"))?;
                        let p: f64 = p.trim().parse().map_err(|_| format!("bad probability '{p}'"))?;
                        Ok((v, p))
                    })
                    .collect::<std::result::Result<Vec<_>, String>>()?;
                EntryLaw::discrete(atoms).map_err(|e| e.to_string())
            }
        }
    }
}

/// The three-atom table `{(−√2, 1/4), (0, 1/2), (√2, 1/4)}`.
///
/// This is the law of `(r₁ + r₂)/√2` for independent Rademacher signs, and
/// `T(t) = cosh²(t/√2)`, so it satisfies the sharp bound with equality only at 0.
pub fn ternary_law() -> EntryLaw {
    let r = std::f64::consts::SQRT_2;
    EntryLaw::discrete(vec![(-r, 0.25), (0.0, 0.5), (r, 0.25)]).expect("valid table")
}

/// Sparse Rademacher `b·r/√p` with `P(b = 1) = p`: a ternary law whose
/// kurtosis `1/p` exceeds 3 when `p < 1/3`, which breaks the sharp bound near 0.
pub fn sparse_rademacher(p: f64) -> Result<EntryLaw> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("sparsity must lie in (0, 1]"));
    }
    let v = 1.0 / p.sqrt();
    let mut atoms = vec![(-v, 0.5 * p), (v, 0.5 * p)];
    if p < 1.0 {
        atoms.insert(1, (0.0, 1.0 - p));
    }
    EntryLaw::discrete(atoms)
}
