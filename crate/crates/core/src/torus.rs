//! Genus one: the flat torus spectrum, its modular covariance, a
//! finite-difference check of the eigenvalue equation and the Dedekind η
//! function.
//!
//! The Laplacian is Δ = -2∂_z∂_z̄, so h_{n,m} = exp(c z - c̄ z̄) has
//! eigenvalue λ = 2|c|². The conical-metric operator -|h|⁻²∂∂̄ differs by
//! that factor of 2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::siegel::{modular_transform_charge, modular_transform_tau, LatticeCharge, ModularMatrix};

/// Default number of factors in the η product.
pub const ETA_TERMS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusSpectrumEntry {
    pub n: i64,
    pub m: i64,
    pub c: Complex64,
    pub lambda: f64,
    pub mu: f64,
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Im τ = {} must be positive", tau.im)))
    }
}

/// c_{n,m} = π(m - nτ̄)/τ⁽²⁾.
pub fn torus_coefficient(tau: Complex64, n: i64, m: i64) -> Complex64 {
    (Complex64::new(m as f64, 0.0) - tau.conj() * n as f64) * (PI / tau.im)
}

/// λ_{n,m} = 2π²(m - nτ)(m - nτ̄)/(τ⁽²⁾)² and μ_{n,m} = τ⁽²⁾λ_{n,m}.
pub fn torus_eigenvalue(tau: Complex64, n: i64, m: i64) -> Result<TorusSpectrumEntry> {
    check_tau(tau)?;
    let w = Complex64::new(m as f64, 0.0) - tau * n as f64;
    let lambda = 2.0 * PI * PI * w.norm_sqr() / (tau.im * tau.im);
    Ok(TorusSpectrumEntry {
        n,
        m,
        c: torus_coefficient(tau, n, m),
        lambda,
        mu: tau.im * lambda,
    })
}

/// All charges with |n|, |m| <= `max`, ordered by (n² + m², n, m).
pub fn torus_spectrum(tau: Complex64, max: i64) -> Result<Vec<TorusSpectrumEntry>> {
    check_tau(tau)?;
    let mut charges: Vec<(i64, i64)> = (-max..=max)
        .flat_map(|n| (-max..=max).map(move |m| (n, m)))
        .collect();
    charges.sort_by_key(|&(n, m)| (n * n + m * m, n, m));
    charges
        .into_iter()
        .map(|(n, m)| torus_eigenvalue(tau, n, m))
        .collect()
}

/// |μ_{γ(n,m)}(γ·τ) - μ_{n,m}(τ)|.
pub fn mu_covariance_residual(tau: Complex64, gamma: &ModularMatrix, n: i64, m: i64) -> Result<f64> {
    let moved = modular_transform_charge(gamma, &LatticeCharge::scalar(n, m));
    let lhs = torus_eigenvalue(modular_transform_tau(gamma, tau)?, moved.n[0], moved.m[0])?.mu;
    let rhs = torus_eigenvalue(tau, n, m)?.mu;
    Ok((lhs - rhs).abs())
}

/// Samples of a function on the unit cell x + τy, x, y ∈ [0, 1), at
/// (j/N, k/N). Index (j, k) is stored at `j * N + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub resolution: usize,
    pub samples: Vec<Complex64>,
}

impl GridField {
    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        let n = self.resolution;
        self.samples[(j % n) * n + (k % n)]
    }

    /// Periodic neighbour lookup with signed offsets.
    fn shifted(&self, j: usize, k: usize, dj: isize, dk: isize) -> Complex64 {
        let n = self.resolution as isize;
        let jj = (j as isize + dj).rem_euclid(n) as usize;
        let kk = (k as isize + dk).rem_euclid(n) as usize;
        self.samples[jj * self.resolution + kk]
    }

    /// Trapezoid quadrature of f·ḡ over the cell with the normalized flat
    /// measure.
    pub fn inner(&self, other: &GridField) -> Complex64 {
        assert_eq!(self.resolution, other.resolution);
        let sum: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum();
        sum / (self.samples.len() as f64)
    }
}

/// h_{n,m}(x + τy) = exp(c z - c̄ z̄); the exponent is 2i·Im(c z).
pub fn eigenfunction_value(tau: Complex64, n: i64, m: i64, x: f64, y: f64) -> Complex64 {
    let z = tau * y + x;
    let phase = 2.0 * (torus_coefficient(tau, n, m) * z).im;
    Complex64::from_polar(1.0, phase)
}

pub fn sample_eigenfunction(tau: Complex64, n: i64, m: i64, resolution: usize) -> Result<GridField> {
    check_tau(tau)?;
    if resolution == 0 {
        return Err(Error::Shape("grid resolution must be positive".into()));
    }
    let step = 1.0 / resolution as f64;
    let samples = (0..resolution)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..resolution).map(move |k| eigenfunction_value(tau, n, m, j as f64 * step, k as f64 * step))
        })
        .collect();
    Ok(GridField { resolution, samples })
}

/// Largest deviation between the stored samples and the analytic function
/// evaluated one period over in x or in y.
pub fn wrap_mismatch(tau: Complex64, n: i64, m: i64, field: &GridField) -> f64 {
    let size = field.resolution;
    let step = 1.0 / size as f64;
    let mut worst: f64 = 0.0;
    for j in 0..size {
        for k in 0..size {
            let (x, y) = (j as f64 * step, k as f64 * step);
            let stored = field.at(j, k);
            worst = worst
                .max((eigenfunction_value(tau, n, m, x + 1.0, y) - stored).norm())
                .max((eigenfunction_value(tau, n, m, x, y + 1.0) - stored).norm());
        }
    }
    worst
}

/// Second-order finite-difference Δ = -(1/2τ₂²)(|τ|²∂²_x - 2τ₁∂_x∂_y + ∂²_y)
/// on the periodic grid: the 5-point stencil plus the four diagonal points
/// for the mixed derivative, which vanishes when Re τ = 0.
pub fn apply_fd_laplacian(tau: Complex64, field: &GridField) -> GridField {
    let size = field.resolution;
    let inv_h2 = (size * size) as f64;
    let scale = -0.5 / (tau.im * tau.im);
    let xx = tau.norm_sqr();
    let xy = -2.0 * tau.re;
    let samples = (0..size)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..size).map(move |k| {
                let center = field.at(j, k);
                let d_xx = field.shifted(j, k, 1, 0) - center * 2.0 + field.shifted(j, k, -1, 0);
                let d_yy = field.shifted(j, k, 0, 1) - center * 2.0 + field.shifted(j, k, 0, -1);
                let d_xy = (field.shifted(j, k, 1, 1) - field.shifted(j, k, 1, -1) - field.shifted(j, k, -1, 1)
                    + field.shifted(j, k, -1, -1))
                    * 0.25;
                (d_xx * xx + d_xy * xy + d_yy) * (scale * inv_h2)
            })
        })
        .collect();
    GridField {
        resolution: size,
        samples,
    }
}

/// Returns (λ, ‖Δ_FD h - λh‖₂ / ‖λh‖₂); the residual is defined as 0 for
/// the zero charge.
pub fn fd_eigen_residual(tau: Complex64, n: i64, m: i64, resolution: usize) -> Result<(f64, f64)> {
    if resolution < 16 {
        return Err(Error::Shape(format!("grid resolution {resolution} is below 16")));
    }
    let lambda = torus_eigenvalue(tau, n, m)?.lambda;
    if n == 0 && m == 0 {
        return Ok((0.0, 0.0));
    }
    let field = sample_eigenfunction(tau, n, m, resolution)?;
    let applied = apply_fd_laplacian(tau, &field);
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (lap, h) in applied.samples.iter().zip(&field.samples) {
        diff += (lap - h * lambda).norm_sqr();
        norm += (h * lambda).norm_sqr();
    }
    Ok((lambda, (diff / norm).sqrt()))
}

/// Number of product terms bringing the tail of the η product below `eps`.
pub fn eta_terms_for(tau: Complex64, eps: f64) -> usize {
    let decay = 2.0 * PI * tau.im;
    let needed = (-eps.ln() / decay).ceil();
    (needed.max(1.0) as usize).max(ETA_TERMS)
}

/// η(τ) = q^{1/24} ∏_{k=1}^{terms} (1 - q^k), q = e^{2πiτ}.
pub fn dedekind_eta(tau: Complex64, terms: usize) -> Result<Complex64> {
    check_tau(tau)?;
    if terms == 0 {
        return Err(Error::Shape("η needs at least one product term".into()));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let q = (two_pi_i * tau).exp();
    let mut value = (two_pi_i * tau / 24.0).exp();
    let mut qk = q;
    for _ in 0..terms {
        value *= Complex64::new(1.0, 0.0) - qk;
        qk *= q;
    }
    Ok(value)
}

/// ln|η(τ)| summed in logarithms, so it stays finite where |η| underflows.
pub fn log_abs_eta(tau: Complex64, terms: usize) -> Result<f64> {
    check_tau(tau)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let q = (two_pi_i * tau).exp();
    let mut acc = -PI * tau.im / 12.0;
    let mut qk = q;
    for _ in 0..terms {
        // ln|1 - w| = ½ ln(1 - 2 Re w + |w|²)
        acc += 0.5 * (qk.norm_sqr() - 2.0 * qk.re).ln_1p();
        qk *= q;
    }
    Ok(acc)
}

/// ln(τ⁽²⁾ |η(τ)|⁴), with the number of product terms chosen from Im τ.
pub fn log_eta_invariant(tau: Complex64) -> Result<f64> {
    let terms = eta_terms_for(tau, 1e-17);
    Ok(tau.im.ln() + 4.0 * log_abs_eta(tau, terms)?)
}
