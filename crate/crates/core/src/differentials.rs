//! Primitive differentials ω_{n,m} = Σ_k c_{n,m;k} ω_k in the normalized
//! basis, the D-matrix, and the η⁽¹⁾/η⁽²⁾ bases.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::siegel::{CMatrix, CVector, CyclePair, LatticeCharge, PeriodMatrix};

/// Coefficients of a primitive differential, split into real (`a`) and
/// imaginary (`b`) parts. The imaginary part is exactly π·n.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialCoeffs {
    pub charge: LatticeCharge,
    pub c: CVector,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl DifferentialCoeffs {
    pub fn is_degenerate(&self) -> bool {
        self.charge.is_degenerate()
    }
}

/// c_k = π Σ_j (m_j - Σ_l n_l Ω̄_lj) (Ω⁽²⁾⁻¹)_jk.
///
/// The real part is evaluated as π (m - n Ω⁽¹⁾) Ω⁽²⁾⁻¹ and the imaginary
/// part is set to π n_k, which is what the expansion reduces to.
pub fn primitive_coeffs(omega: &PeriodMatrix, charge: &LatticeCharge) -> DifferentialCoeffs {
    let h = omega.genus();
    assert_eq!(charge.genus(), h, "charge genus does not match period matrix");
    let re = omega.real_part();
    let inv = omega.imag_inverse();
    let row: Vec<f64> = (0..h)
        .map(|j| charge.m[j] as f64 - (0..h).map(|l| charge.n[l] as f64 * re[(l, j)]).sum::<f64>())
        .collect();
    let a: Vec<f64> = (0..h)
        .map(|k| PI * (0..h).map(|j| row[j] * inv[(j, k)]).sum::<f64>())
        .collect();
    let b: Vec<f64> = charge.n.iter().map(|&n| PI * n as f64).collect();
    let c = CVector::from_fn(h, |k, _| Complex64::new(a[k], b[k]));
    DifferentialCoeffs {
        charge: charge.clone(),
        c,
        a,
        b,
    }
}

/// Direct complex evaluation of c_{n,m} with the conjugated period matrix,
/// kept separate from [`primitive_coeffs`] so the two can check each other.
pub fn primitive_coeffs_direct(omega: &PeriodMatrix, charge: &LatticeCharge) -> CVector {
    let h = omega.genus();
    let inv = omega.imag_inverse();
    CVector::from_fn(h, |k, _| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..h {
            let mut w = Complex64::new(charge.m[j] as f64, 0.0);
            for l in 0..h {
                w -= omega.get(l, j).conj() * charge.n[l] as f64;
            }
            acc += w * inv[(j, k)];
        }
        acc * PI
    })
}

/// D_kj = m_k δ_kj - n_k Ω̄_kj.
#[derive(Clone, Debug, PartialEq)]
pub struct DMatrix {
    pub entries: CMatrix,
}

impl DMatrix {
    /// c_k = π Σ_{j,l} D_jl (Ω⁽²⁾⁻¹)_lk.
    pub fn contract(&self, omega: &PeriodMatrix) -> CVector {
        let h = self.entries.nrows();
        let inv = omega.imag_inverse();
        CVector::from_fn(h, |k, _| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..h {
                for l in 0..h {
                    acc += self.entries[(j, l)] * inv[(l, k)];
                }
            }
            acc * PI
        })
    }
}

pub fn d_matrix(omega: &PeriodMatrix, charge: &LatticeCharge) -> DMatrix {
    let h = omega.genus();
    let entries = CMatrix::from_fn(h, h, |k, j| {
        let diag = if k == j { charge.m[k] as f64 } else { 0.0 };
        Complex64::new(diag, 0.0) - omega.get(k, j).conj() * charge.n[k] as f64
    });
    DMatrix { entries }
}

/// Row j of `eta1` (`eta2`) holds the coefficients of η⁽¹⁾_j (η⁽²⁾_j) in the
/// basis ω_1..ω_h.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaBasis {
    pub eta1: CMatrix,
    pub eta2: CMatrix,
}

impl EtaBasis {
    /// Σ_k m_k η⁽¹⁾_k + n_k η⁽²⁾_k.
    pub fn combine(&self, charge: &LatticeCharge) -> CVector {
        let h = self.eta1.nrows();
        CVector::from_fn(h, |l, _| {
            (0..h)
                .map(|k| self.eta1[(k, l)] * charge.m[k] as f64 + self.eta2[(k, l)] * charge.n[k] as f64)
                .sum()
        })
    }
}

/// η⁽¹⁾ = π Ω⁽²⁾⁻¹ and η⁽²⁾ = π (i·I - Ω⁽¹⁾ Ω⁽²⁾⁻¹).
pub fn eta_bases(omega: &PeriodMatrix) -> EtaBasis {
    let h = omega.genus();
    let inv = omega.imag_inverse();
    let prod = omega.real_part() * inv;
    let eta1 = CMatrix::from_fn(h, h, |j, k| Complex64::new(PI * inv[(j, k)], 0.0));
    let eta2 = CMatrix::from_fn(h, h, |j, k| {
        let diag = if j == k { PI } else { 0.0 };
        Complex64::new(-PI * prod[(j, k)], diag)
    });
    EtaBasis { eta1, eta2 }
}

/// ∮_{γ_{p,q}} Σ_k coeffs_k ω_k = Σ_k coeffs_k (p_k + Σ_j q_j Ω_jk).
pub fn period_of(omega: &PeriodMatrix, coeffs: &CVector, cycle: &CyclePair) -> Complex64 {
    let h = omega.genus();
    assert_eq!(coeffs.len(), h);
    assert_eq!(cycle.genus(), h);
    (0..h)
        .map(|k| {
            let mut w = Complex64::new(cycle.p[k] as f64, 0.0);
            for j in 0..h {
                w += omega.get(j, k) * cycle.q[j] as f64;
            }
            coeffs[k] * w
        })
        .sum()
}

/// The β-periods (Ω c)_j of a differential with α-periods `coeffs`.
pub fn beta_periods(omega: &PeriodMatrix, coeffs: &CVector) -> CVector {
    omega.entries() * coeffs
}

/// max_{k} |η⁽²⁾_k + Σ_j Ω̄_kj η⁽¹⁾_j|.
pub fn eta_row_identity_residual(omega: &PeriodMatrix, basis: &EtaBasis) -> f64 {
    let conj = omega.entries().map(|z| z.conj());
    (&basis.eta2 + conj * &basis.eta1).camax()
}
