//! Residuals of the algebraic identities satisfied by the scalar products,
//! surface integrals and η-bases. Each function returns the absolute
//! deviation of one identity; zero means it holds exactly.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{area, herm_product, real_product, wedge_integral};
use crate::differentials::{eta_bases, period_of, primitive_coeffs};
use crate::siegel::{dot, CyclePair, LatticeCharge, PeriodMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

/// conj⟨⟨n,m|q,p⟩⟩ = ⟨⟨-q,p|-n,m⟩⟩ = ⟨⟨n,m|q,p⟩⟩ - 2iπ(p·n + q·m).
pub fn conjugation(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let herm = herm_product(omega, nm, qp);
    let swapped = herm_product(
        omega,
        &LatticeCharge::new(neg(&qp.q), qp.p.clone()),
        &CyclePair::new(neg(&nm.n), nm.m.clone()),
    );
    let defect = (dot(&qp.p, &nm.n) + dot(&qp.q, &nm.m)) as f64;
    let shifted = herm - I * (2.0 * PI * defect);
    (herm.conj() - swapped).norm().max((herm.conj() - shifted).norm())
}

/// Im⟨⟨n,m|q,p⟩⟩ = Im⟨⟨m,n|p,q⟩⟩.
pub fn imag_swap(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let lhs = herm_product(omega, nm, qp).im;
    let rhs = herm_product(
        omega,
        &LatticeCharge::new(nm.m.clone(), nm.n.clone()),
        &CyclePair::new(qp.p.clone(), qp.q.clone()),
    )
    .im;
    (lhs - rhs).abs()
}

/// ⟨⟨n,m|q,p⟩⟩ = (1/2πi) Σ_j (⟨⟨n,m|ĵ,0⟩⟩⟨⟨0,ĵ|q,p⟩⟩ + ⟨⟨n,m|0,ĵ⟩⟩⟨⟨ĵ,0|q,p⟩⟩).
pub fn factorization(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let h = omega.genus();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..h {
        sum += herm_product(omega, nm, &CyclePair::beta(h, j))
            * herm_product(omega, &LatticeCharge::unit_m(h, j), qp);
        sum += herm_product(omega, nm, &CyclePair::alpha(h, j))
            * herm_product(omega, &LatticeCharge::unit_n(h, j), qp);
    }
    let rhs = sum / (2.0 * PI * I);
    (herm_product(omega, nm, qp) - rhs).norm()
}

/// ⟨n,m|q,p⟩ = Re⟨⟨n,m|-q,p⟩⟩ = -Re⟨⟨n,m|q,-p⟩⟩.
pub fn real_from_herm(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let real = real_product(omega, nm, qp);
    let a = herm_product(omega, nm, &CyclePair::new(neg(&qp.q), qp.p.clone())).re;
    let b = -herm_product(omega, nm, &CyclePair::new(qp.q.clone(), neg(&qp.p))).re;
    (real - a).abs().max((real - b).abs())
}

/// ⟨n,m|q,p⟩ = ⟨q,p|n,m⟩.
pub fn symmetry(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let lhs = real_product(omega, nm, qp);
    let rhs = real_product(omega, &qp.as_charge(), &nm.as_cycle());
    (lhs - rhs).abs()
}

/// ⟨n,m|q,p⟩ = ⟨⟨n,m|-q,p⟩⟩ - iπ(p·n - q·m), as a complex identity.
pub fn complex_relation(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let real = real_product(omega, nm, qp);
    let herm = herm_product(omega, nm, &CyclePair::new(neg(&qp.q), qp.p.clone()));
    let defect = (dot(&qp.p, &nm.n) - dot(&qp.q, &nm.m)) as f64;
    (Complex64::new(real, 0.0) - (herm - I * (PI * defect))).norm()
}

/// ⟨n,m|n,m⟩ = ⟨⟨n,m|-n,m⟩⟩, which is real.
pub fn diagonal(omega: &PeriodMatrix, nm: &LatticeCharge) -> f64 {
    let real = real_product(omega, nm, &nm.as_cycle());
    let herm = herm_product(omega, nm, &CyclePair::new(neg(&nm.n), nm.m.clone()));
    (Complex64::new(real, 0.0) - herm).norm()
}

/// ⟨n,m|q,p⟩ = π⁻¹ Σ_{j,k} (a_{n,m;j} Ω⁽²⁾_jk a_{q,p;k} + b_{q,p;j} Ω⁽²⁾_jk b_{n,m;k}),
/// together with a_{n,m;k} = ⟨n,m|0,k̂⟩.
pub fn coefficient_form(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let h = omega.genus();
    let im = omega.imag_part();
    let x = primitive_coeffs(omega, nm);
    let y = primitive_coeffs(omega, &qp.as_charge());
    let mut acc = 0.0;
    for j in 0..h {
        for k in 0..h {
            acc += x.a[j] * im[(j, k)] * y.a[k] + y.b[j] * im[(j, k)] * x.b[k];
        }
    }
    let mut residual = (real_product(omega, nm, qp) - acc / PI).abs();
    for k in 0..h {
        let a_k = real_product(omega, nm, &CyclePair::alpha(h, k));
        residual = residual.max((a_k - x.a[k]).abs());
    }
    residual
}

/// (i/2)∫ω_{n,m}∧ω̄_{q,p} = π⟨⟨n,m|-q,p⟩⟩ = π⟨n,m|q,p⟩ + iπ²(p·n - q·m).
pub fn bilinear(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let lhs = wedge_integral(omega, nm, &qp.as_charge()) * (I * 0.5);
    let herm = herm_product(omega, nm, &CyclePair::new(neg(&qp.q), qp.p.clone())) * PI;
    let defect = (dot(&qp.p, &nm.n) - dot(&qp.q, &nm.m)) as f64;
    let real = Complex64::new(PI * real_product(omega, nm, qp), PI * PI * defect);
    (lhs - herm).norm().max((lhs - real).norm())
}

/// f_{n,m}(z + γ_{p,-q}) = exp[(1/2πi) ∫ ω̄_{q,p} ∧ ω_{n,m}] f_{n,m}(z), at the
/// level of exponents.
pub fn monodromy_surface(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let exponent = herm_product(omega, nm, &CyclePair::new(neg(&qp.q), qp.p.clone()));
    let surface = -wedge_integral(omega, nm, &qp.as_charge()) / (2.0 * PI * I);
    (exponent - surface).norm()
}

/// ∫ω_{n,m}∧ω̄_{q,p} = ∫ω_{q,p}∧ω̄_{n,m} + 4π²(p·n - q·m).
pub fn wedge_defect(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let qp = qp.as_charge();
    let lhs = wedge_integral(omega, nm, &qp);
    let rhs = wedge_integral(omega, &qp, nm);
    let defect = (dot(&qp.m, &nm.n) - dot(&qp.n, &nm.m)) as f64;
    (lhs - rhs - Complex64::new(4.0 * PI * PI * defect, 0.0)).norm()
}

/// Im (i/2)∫ω_{n,m}∧ω̄_{q,p} = Im (i/2)∫ω_{m,n}∧ω̄_{p,q}, with both sides
/// taken literally.
pub fn wedge_imag_swap(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let (lhs, rhs) = wedge_imag_swap_sides(omega, nm, qp);
    (lhs - rhs).abs()
}

/// Im (i/2)∫ω_{n,m}∧ω̄_{q,p} = -Im (i/2)∫ω_{m,n}∧ω̄_{p,q}. Both sides equal
/// ±π²(p·n - q·m), so this is the form of the swap relation that holds for
/// every pair of charges.
pub fn wedge_imag_antiswap(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> f64 {
    let (lhs, rhs) = wedge_imag_swap_sides(omega, nm, qp);
    (lhs + rhs).abs()
}

fn wedge_imag_swap_sides(omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) -> (f64, f64) {
    let half_i = I * 0.5;
    let lhs = (wedge_integral(omega, nm, &qp.as_charge()) * half_i).im;
    let swapped_nm = LatticeCharge::new(nm.m.clone(), nm.n.clone());
    let swapped_qp = LatticeCharge::new(qp.p.clone(), qp.q.clone());
    let rhs = (wedge_integral(omega, &swapped_nm, &swapped_qp) * half_i).im;
    (lhs, rhs)
}

/// ω_{n,m} = Σ_k (m_k η⁽¹⁾_k + n_k η⁽²⁾_k).
pub fn eta_decomposition(omega: &PeriodMatrix, nm: &LatticeCharge) -> f64 {
    let basis = eta_bases(omega);
    (basis.combine(nm) - primitive_coeffs(omega, nm).c).camax()
}

/// Im∮_{α_k}η⁽¹⁾_j = 0, Im∮_{β_k}η⁽¹⁾_j = πδ_jk, Im∮_{α_k}η⁽²⁾_j = πδ_jk,
/// Im∮_{β_k}η⁽²⁾_j = 0.
pub fn eta_periods(omega: &PeriodMatrix) -> f64 {
    let h = omega.genus();
    let basis = eta_bases(omega);
    let mut residual: f64 = 0.0;
    for j in 0..h {
        let eta1 = basis.eta1.row(j).transpose();
        let eta2 = basis.eta2.row(j).transpose();
        for k in 0..h {
            let delta = if j == k { PI } else { 0.0 };
            let alpha = CyclePair::alpha(h, k);
            let beta = CyclePair::beta(h, k);
            residual = residual
                .max(period_of(omega, &eta1, &alpha).im.abs())
                .max((period_of(omega, &eta1, &beta).im - delta).abs())
                .max((period_of(omega, &eta2, &alpha).im - delta).abs())
                .max(period_of(omega, &eta2, &beta).im.abs());
        }
    }
    residual
}

/// Winding around γ with (q,p) = (n,-m) multiplies f_{n,m} by
/// exp(-2A_{n,m}/π): the exponent is real and equals -(2/π)A_{n,m}.
pub fn winding_area(omega: &PeriodMatrix, nm: &LatticeCharge) -> f64 {
    if nm.is_degenerate() {
        return 0.0;
    }
    let exponent = herm_product(omega, nm, &CyclePair::new(nm.n.clone(), neg(&nm.m)));
    let a = area(omega, nm).expect("non-degenerate charge");
    let via_real = (a - 0.5 * PI * real_product(omega, nm, &nm.as_cycle())).abs();
    (exponent - Complex64::new(-2.0 * a / PI, 0.0)).norm().max(via_real)
}

/// Named residual of one identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub residual: f64,
}

pub type PairIdentity = fn(&PeriodMatrix, &LatticeCharge, &CyclePair) -> f64;
pub type ChargeIdentity = fn(&PeriodMatrix, &LatticeCharge) -> f64;

/// Identities involving a charge and a cycle.
pub const PAIR_IDENTITIES: &[(&str, PairIdentity)] = &[
    ("conjugation", conjugation),
    ("imag-swap", imag_swap),
    ("factorization", factorization),
    ("real-from-herm", real_from_herm),
    ("symmetry", symmetry),
    ("complex-relation", complex_relation),
    ("coefficient-form", coefficient_form),
    ("bilinear", bilinear),
    ("monodromy-surface", monodromy_surface),
    ("wedge-defect", wedge_defect),
    ("wedge-imag-swap", wedge_imag_swap),
    ("wedge-imag-antiswap", wedge_imag_antiswap),
];

/// Identities involving a single charge.
pub const CHARGE_IDENTITIES: &[(&str, ChargeIdentity)] = &[
    ("diagonal", diagonal),
    ("eta-decomposition", eta_decomposition),
    ("winding-area", winding_area),
];

/// Accumulates per-identity maxima over many evaluations.
#[derive(Clone, Debug, Default)]
pub struct ResidualTable {
    rows: Vec<IdentityResidual>,
}

impl ResidualTable {
    pub fn record(&mut self, name: &'static str, residual: f64) {
        match self.rows.iter_mut().find(|r| r.name == name) {
            Some(row) => row.residual = row.residual.max(residual),
            None => self.rows.push(IdentityResidual { name, residual }),
        }
    }

    /// Evaluates every identity at one (Ω, charge, cycle) triple.
    pub fn record_all(&mut self, omega: &PeriodMatrix, nm: &LatticeCharge, qp: &CyclePair) {
        for (name, f) in PAIR_IDENTITIES {
            self.record(name, f(omega, nm, qp));
        }
        for (name, f) in CHARGE_IDENTITIES {
            self.record(name, f(omega, nm));
        }
    }

    pub fn record_matrix(&mut self, omega: &PeriodMatrix) {
        self.record("eta-periods", eta_periods(omega));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.name == name).map(|r| r.residual)
    }

    pub fn rows(&self) -> &[IdentityResidual] {
        &self.rows
    }
}
