//! Scalar products built from periods of primitive differentials, monodromy
//! factors, surface integrals via the Riemann bilinear relations, areas and
//! the duality coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::differentials::{beta_periods, primitive_coeffs};
use crate::error::{Error, Result};
use crate::siegel::{dot, CVector, CyclePair, LatticeCharge, PeriodMatrix, RMatrix};

pub mod identities;

/// Distance from πZ beyond which a monodromy exponent is rejected.
pub const SNAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairingValue {
    /// ⟨⟨n,m|q,p⟩⟩
    pub herm: Complex64,
    /// ⟨n,m|q,p⟩
    pub real_sp: f64,
    /// p·n + q·m
    pub integer_defect: i64,
}

/// ⟨⟨n,m|q,p⟩⟩ = π Σ_{j,k} (p_j + Σ_i q_i Ω_ij) (Ω⁽²⁾⁻¹)_jk (m_k - Σ_l Ω̄_kl n_l),
/// the period of ω_{n,m} over γ_{p,q}.
pub fn herm_product(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> Complex64 {
    let h = omega.genus();
    let inv = omega.imag_inverse();
    let left: Vec<Complex64> = (0..h)
        .map(|j| {
            let mut w = Complex64::new(qp.p[j] as f64, 0.0);
            for i in 0..h {
                w += omega.get(i, j) * qp.q[i] as f64;
            }
            w
        })
        .collect();
    let right: Vec<Complex64> = (0..h)
        .map(|k| {
            let mut w = Complex64::new(nm.m[k] as f64, 0.0);
            for l in 0..h {
                w -= omega.get(k, l).conj() * nm.n[l] as f64;
            }
            w
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..h {
        for k in 0..h {
            acc += left[j] * inv[(j, k)] * right[k];
        }
    }
    acc * PI
}

/// ⟨n,m|q,p⟩ = π Σ_{j,k} [(p_j - Σ_i q_i Ω⁽¹⁾_ij)(Ω⁽²⁾⁻¹)_jk(m_k - Σ_l Ω⁽¹⁾_kl n_l) + q_j Ω⁽²⁾_jk n_k].
pub fn real_product(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let h = omega.genus();
    let re = omega.real_part();
    let im = omega.imag_part();
    let inv = omega.imag_inverse();
    let left: Vec<f64> = (0..h)
        .map(|j| qp.p[j] as f64 - (0..h).map(|i| qp.q[i] as f64 * re[(i, j)]).sum::<f64>())
        .collect();
    let right: Vec<f64> = (0..h)
        .map(|k| nm.m[k] as f64 - (0..h).map(|l| re[(k, l)] * nm.n[l] as f64).sum::<f64>())
        .collect();
    let mut acc = 0.0;
    for j in 0..h {
        for k in 0..h {
            acc += left[j] * inv[(j, k)] * right[k] + qp.q[j] as f64 * im[(j, k)] * nm.n[k] as f64;
        }
    }
    PI * acc
}

pub fn pairing(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> PairingValue {
    PairingValue {
        herm: herm_product(omega, nm, qp),
        real_sp: real_product(omega, nm, qp),
        integer_defect: dot(&qp.p, &nm.n) + dot(&qp.q, &nm.m),
    }
}

/// (n,m|q,p) = exp ⟨⟨n,m|q,p⟩⟩, with the imaginary part of the exponent
/// snapped onto πZ so the result is exactly real.
pub fn monodromy_factor(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> Result<f64> {
    let exponent = herm_product(omega, nm, qp);
    let turns = (exponent.im / PI).round();
    let distance = (exponent.im - turns * PI).abs();
    if distance > SNAP_TOL {
        return Err(Error::Snap {
            imag: exponent.im,
            distance,
        });
    }
    let sign = if (turns as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * exponent.re.exp())
}

/// ∫_Σ ω_{n,m} ∧ ω̄_{q,p} by the Riemann bilinear relations, summing
/// α-period times conjugate β-period minus the reverse.
pub fn wedge_integral(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &LatticeCharge) -> Complex64 {
    let c_nm = primitive_coeffs(omega, nm).c;
    let c_qp = primitive_coeffs(omega, qp).c;
    wedge_of_coeffs(omega, &c_nm, &c_qp)
}

/// ∫_Σ (Σ x_k ω_k) ∧ conj(Σ y_k ω_k).
pub fn wedge_of_coeffs(omega: &PeriodMatrix, x: &CVector, y: &CVector) -> Complex64 {
    let bx = beta_periods(omega, x);
    let by = beta_periods(omega, y);
    (0..omega.genus())
        .map(|j| x[j] * by[j].conj() - y[j].conj() * bx[j])
        .sum()
}

/// Area of Σ in the metric |ω_{n,m}|²: (π²/2)(m - nΩ)·Ω⁽²⁾⁻¹·(m - nΩ̄).
pub fn area(omega: &PeriodMatrix, nm: &LatticeCharge) -> Result<f64> {
    if nm.is_degenerate() {
        return Err(Error::DegenerateCharge);
    }
    let v = omega.charge_vector(nm);
    let inv = omega.imag_inverse();
    let h = omega.genus();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..h {
        for k in 0..h {
            acc += v[j] * inv[(j, k)] * v[k].conj();
        }
    }
    Ok(0.5 * PI * PI * acc.re)
}

/// Real symmetric tensors (E, F, G) fixing the duality coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityTensors {
    pub e: RMatrix,
    pub f: RMatrix,
    pub g: RMatrix,
}

impl DualityTensors {
    /// E = π Ω⁽²⁾⁻¹, F = 0, G = π I.
    pub fn canonical(omega: &PeriodMatrix) -> Self {
        let h = omega.genus();
        DualityTensors {
            e: omega.imag_inverse() * PI,
            f: RMatrix::zeros(h, h),
            g: RMatrix::identity(h, h) * PI,
        }
    }

    pub fn asymmetry(&self) -> f64 {
        [&self.e, &self.f, &self.g]
            .iter()
            .map(|t| (*t - t.transpose()).camax())
            .fold(0.0, f64::max)
    }
}

/// Returns (d⁽¹⁾_{n,m}, d⁽²⁾_{n,m}).
pub fn duality_coeffs(
    omega: &PeriodMatrix,
    nm: &LatticeCharge,
    tensors: &DualityTensors,
) -> Result<(CVector, CVector)> {
    let tol = 1e-12 * (1.0 + tensors.e.camax() + tensors.f.camax() + tensors.g.camax());
    if tensors.asymmetry() > tol {
        return Err(Error::Shape("duality tensors must be symmetric".into()));
    }
    let h = omega.genus();
    let re = omega.real_part();
    let im = omega.imag_part();
    let i = Complex64::new(0.0, 1.0);
    let n_re: Vec<f64> = (0..h).map(|j| (0..h).map(|l| nm.n[l] as f64 * re[(l, j)]).sum()).collect();
    let n_im: Vec<f64> = (0..h).map(|j| (0..h).map(|l| nm.n[l] as f64 * im[(l, j)]).sum()).collect();
    let mut d1 = CVector::zeros(h);
    let mut d2 = CVector::zeros(h);
    for k in 0..h {
        let mut x1 = Complex64::new(0.0, 0.0);
        let mut x2 = Complex64::new(0.0, 0.0);
        for j in 0..h {
            let m = nm.m[j] as f64;
            let f_term = (i * m + n_im[j]) * tensors.f[(j, k)];
            x1 += (m + n_re[j]) * tensors.e[(j, k)] - f_term;
            x2 += (m - n_re[j]) * tensors.e[(j, k)] + f_term;
            let g_term = i * (nm.n[j] as f64 * tensors.g[(j, k)]);
            x1 += g_term;
            x2 += g_term;
        }
        d1[k] = x1;
        d2[k] = x2;
    }
    Ok((d1, d2))
}

/// Residuals of the two duality conditions for the given tensors:
/// ∮_{γ_{p,q}} ρ⁽¹⁾_{n,m} = ∮_{γ_{m,n}} ρ⁽¹⁾_{q,p} and
/// ∮_{γ_{p,-q}} ρ⁽²⁾_{n,m} = ∮_{γ_{m,-n}} ρ⁽²⁾_{q,p}.
pub fn duality_residuals(
    omega: &PeriodMatrix,
    tensors: &DualityTensors,
    nm: &LatticeCharge,
    qp: &LatticeCharge,
) -> Result<(f64, f64)> {
    use crate::differentials::period_of;
    let (d1_nm, d2_nm) = duality_coeffs(omega, nm, tensors)?;
    let (d1_qp, d2_qp) = duality_coeffs(omega, qp, tensors)?;
    let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    let first = period_of(omega, &d1_nm, &CyclePair::new(qp.n.clone(), qp.m.clone())).re
        - period_of(omega, &d1_qp, &CyclePair::new(nm.n.clone(), nm.m.clone())).re;
    let second = period_of(omega, &d2_nm, &CyclePair::new(neg(&qp.n), qp.m.clone())).re
        - period_of(omega, &d2_qp, &CyclePair::new(neg(&nm.n), nm.m.clone())).re;
    Ok((first.abs(), second.abs()))
}
