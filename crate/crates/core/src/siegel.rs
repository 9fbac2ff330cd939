//! Points of the Siegel upper half space, integer charges and cycles, and
//! the genus-one modular action.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

/// Default tolerance on |Ω_jk - Ω_kj| accepted by [`PeriodMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A validated Riemann period matrix: symmetric, with positive definite
/// imaginary part. The inverse of the imaginary part is cached.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    entries: CMatrix,
    real_part: RMatrix,
    imag_part: RMatrix,
    imag_inverse: RMatrix,
}

impl PeriodMatrix {
    pub fn new(raw: CMatrix) -> Result<Self> {
        Self::validate(raw, SYMMETRY_TOL)
    }

    /// Checks symmetry within `tol`, stores the exact symmetrization and
    /// verifies positivity of the imaginary part through its spectrum.
    pub fn validate(raw: CMatrix, tol: f64) -> Result<Self> {
        let h = raw.nrows();
        if h == 0 || raw.ncols() != h {
            return Err(Error::Shape(format!(
                "period matrix must be square and non-empty, got {}x{}",
                raw.nrows(),
                raw.ncols()
            )));
        }
        if !(tol > 0.0) {
            return Err(Error::Shape(format!("tolerance must be positive, got {tol}")));
        }
        for j in 0..h {
            for k in (j + 1)..h {
                let deviation = (raw[(j, k)] - raw[(k, j)]).norm();
                if !(deviation <= tol) {
                    return Err(Error::Asymmetry {
                        row: j,
                        col: k,
                        deviation,
                        tol,
                    });
                }
            }
        }
        let entries = (&raw + raw.transpose()) * Complex64::new(0.5, 0.0);
        let real_part = entries.map(|z| z.re);
        let imag_part = entries.map(|z| z.im);

        let eigen = SymmetricEigen::new(imag_part.clone());
        let min_eigenvalue = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        let imag_inverse = imag_part
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue })?
            .inverse();
        // Cholesky inverse is symmetric up to rounding; make it exact.
        let imag_inverse = (&imag_inverse + imag_inverse.transpose()) * 0.5;

        Ok(PeriodMatrix {
            entries,
            real_part,
            imag_part,
            imag_inverse,
        })
    }

    /// Genus-one period matrix `[[τ]]`.
    pub fn from_tau(tau: Complex64) -> Result<Self> {
        Self::new(CMatrix::from_element(1, 1, tau))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let h = rows.len();
        if rows.iter().any(|r| r.len() != h) {
            return Err(Error::Shape("rows must all have length h".into()));
        }
        Self::new(CMatrix::from_fn(h, h, |j, k| rows[j][k]))
    }

    pub fn genus(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    pub fn real_part(&self) -> &RMatrix {
        &self.real_part
    }

    pub fn imag_part(&self) -> &RMatrix {
        &self.imag_part
    }

    pub fn imag_inverse(&self) -> &RMatrix {
        &self.imag_inverse
    }

    pub fn imag_det(&self) -> f64 {
        self.imag_part.determinant()
    }

    pub fn imag_eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.imag_part.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// The genus-one modulus τ. Panics for h ≠ 1.
    pub fn tau(&self) -> Complex64 {
        assert_eq!(self.genus(), 1, "tau() requires a genus-one period matrix");
        self.entries[(0, 0)]
    }

    /// v = m - Ω n, the vector whose proportionality classes label the
    /// solution spaces of the special-surface condition.
    pub fn charge_vector(&self, charge: &LatticeCharge) -> CVector {
        let h = self.genus();
        assert_eq!(charge.genus(), h, "charge genus does not match period matrix");
        CVector::from_fn(h, |j, _| {
            let mut v = Complex64::new(charge.m[j] as f64, 0.0);
            for k in 0..h {
                v -= self.entries[(j, k)] * charge.n[k] as f64;
            }
            v
        })
    }
}

/// Integer charge (n, m) ∈ Z^{2h} labeling a primitive differential.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeCharge {
    pub n: Vec<i64>,
    pub m: Vec<i64>,
}

impl LatticeCharge {
    pub fn new(n: Vec<i64>, m: Vec<i64>) -> Self {
        assert_eq!(n.len(), m.len(), "n and m must have the same length");
        LatticeCharge { n, m }
    }

    pub fn zero(h: usize) -> Self {
        LatticeCharge::new(vec![0; h], vec![0; h])
    }

    /// Genus-one charge.
    pub fn scalar(n: i64, m: i64) -> Self {
        LatticeCharge::new(vec![n], vec![m])
    }

    /// The unit charge with n = ê_j, m = 0.
    pub fn unit_n(h: usize, j: usize) -> Self {
        let mut n = vec![0; h];
        n[j] = 1;
        LatticeCharge::new(n, vec![0; h])
    }

    /// The unit charge with n = 0, m = ê_j.
    pub fn unit_m(h: usize, j: usize) -> Self {
        let mut m = vec![0; h];
        m[j] = 1;
        LatticeCharge::new(vec![0; h], m)
    }

    pub fn genus(&self) -> usize {
        self.n.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.n.iter().chain(&self.m).all(|&x| x == 0)
    }

    pub fn negated(&self) -> Self {
        LatticeCharge::new(
            self.n.iter().map(|x| -x).collect(),
            self.m.iter().map(|x| -x).collect(),
        )
    }

    pub fn scaled(&self, k: i64) -> Self {
        LatticeCharge::new(
            self.n.iter().map(|x| k * x).collect(),
            self.m.iter().map(|x| k * x).collect(),
        )
    }

    /// The same integers read as a cycle γ_{p,q} with q = n and p = m.
    pub fn as_cycle(&self) -> CyclePair {
        CyclePair::new(self.n.clone(), self.m.clone())
    }

    /// Uniform charge in [-bound, bound]^{2h}.
    pub fn random<R: Rng>(rng: &mut R, h: usize, bound: i64) -> Self {
        let n = (0..h).map(|_| rng.gen_range(-bound..=bound)).collect();
        let m = (0..h).map(|_| rng.gen_range(-bound..=bound)).collect();
        LatticeCharge::new(n, m)
    }
}

/// Homology class γ_{p,q} = p·α + q·β.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclePair {
    pub q: Vec<i64>,
    pub p: Vec<i64>,
}

impl CyclePair {
    pub fn new(q: Vec<i64>, p: Vec<i64>) -> Self {
        assert_eq!(q.len(), p.len(), "q and p must have the same length");
        CyclePair { q, p }
    }

    pub fn zero(h: usize) -> Self {
        CyclePair::new(vec![0; h], vec![0; h])
    }

    /// α_k.
    pub fn alpha(h: usize, k: usize) -> Self {
        let mut p = vec![0; h];
        p[k] = 1;
        CyclePair::new(vec![0; h], p)
    }

    /// β_k.
    pub fn beta(h: usize, k: usize) -> Self {
        let mut q = vec![0; h];
        q[k] = 1;
        CyclePair::new(q, vec![0; h])
    }

    pub fn genus(&self) -> usize {
        self.q.len()
    }

    /// The 2h basis cycles α_1..α_h, β_1..β_h.
    pub fn basis(h: usize) -> Vec<CyclePair> {
        (0..h)
            .map(|k| CyclePair::alpha(h, k))
            .chain((0..h).map(|k| CyclePair::beta(h, k)))
            .collect()
    }

    /// The same integers read as a charge with n = q and m = p.
    pub fn as_charge(&self) -> LatticeCharge {
        LatticeCharge::new(self.q.clone(), self.p.clone())
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An element of SL(2, Z), acting on the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModularMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl ModularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Domain(format!(
                "modular matrix ({a}, {b}, {c}, {d}) has determinant {}",
                a * d - b * c
            )));
        }
        Ok(ModularMatrix { a, b, c, d })
    }

    pub const IDENTITY: ModularMatrix = ModularMatrix { a: 1, b: 0, c: 0, d: 1 };
    /// τ ↦ τ + 1.
    pub const T: ModularMatrix = ModularMatrix { a: 1, b: 1, c: 0, d: 1 };
    /// τ ↦ -1/τ.
    pub const S: ModularMatrix = ModularMatrix { a: 0, b: -1, c: 1, d: 0 };

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn compose(&self, other: &ModularMatrix) -> ModularMatrix {
        ModularMatrix {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> ModularMatrix {
        ModularMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Random element with entries bounded by `max_entry` in absolute value.
    pub fn random<R: Rng>(rng: &mut R, max_entry: i64) -> ModularMatrix {
        loop {
            let c = rng.gen_range(-max_entry..=max_entry);
            let d = rng.gen_range(-max_entry..=max_entry);
            if let Some((a, b)) = complete_row(c, d, max_entry, rng) {
                return ModularMatrix { a, b, c, d };
            }
        }
    }
}

// Finds (a, b) with a·d - b·c = 1 and |a|, |b| <= bound, choosing among the
// admissible shifts at random.
fn complete_row<R: Rng>(c: i64, d: i64, bound: i64, rng: &mut R) -> Option<(i64, i64)> {
    let mut candidates = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            if a * d - b * c == 1 {
                candidates.push((a, b));
            }
        }
    }
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.gen_range(0..candidates.len())])
    }
}

/// Free-function form of [`PeriodMatrix::validate`].
pub fn validate_period_matrix(raw: CMatrix, tol: f64) -> Result<PeriodMatrix> {
    PeriodMatrix::validate(raw, tol)
}

/// Möbius action γ·τ = (aτ + b)/(cτ + d).
pub fn modular_transform_tau(gamma: &ModularMatrix, tau: Complex64) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::Domain(format!("Im τ = {} must be positive", tau.im)));
    }
    let (a, b, c, d) = gamma.entries();
    let num = tau * a as f64 + b as f64;
    let den = tau * c as f64 + d as f64;
    Ok(num / den)
}

/// Charge action (m̃, ñ)ᵀ = γ (m, n)ᵀ, under which μ_{γ(n,m)}(γ·τ) = μ_{n,m}(τ).
pub fn modular_transform_charge(gamma: &ModularMatrix, charge: &LatticeCharge) -> LatticeCharge {
    assert_eq!(charge.genus(), 1, "modular action on charges is genus one only");
    let (a, b, c, d) = gamma.entries();
    let (n, m) = (charge.n[0], charge.m[0]);
    LatticeCharge::scalar(c * m + d * n, a * m + b * n)
}

/// Deterministic pseudo-random period matrix with Ω⁽²⁾ = AᵀA + h·I.
pub fn random_siegel_point(h: usize, seed: u64) -> PeriodMatrix {
    assert!(h >= 1, "genus must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = RMatrix::from_fn(h, h, |_, _| rng.gen_range(-1.0..1.0));
    let mut real = RMatrix::from_fn(h, h, |_, _| rng.gen_range(-1.0..1.0));
    real = (&real + real.transpose()) * 0.5;
    let imag = a.transpose() * &a + RMatrix::identity(h, h) * h as f64;
    let raw = CMatrix::from_fn(h, h, |j, k| Complex64::new(real[(j, k)], imag[(j, k)]));
    PeriodMatrix::new(raw).expect("construction guarantees a valid period matrix")
}
