//! Special genus-2 period matrices with Ω₂₂ = N₁Ω₁₁ + N₂Ω₁₂ + N₃, where
//! N₁ = M N₂ + M², and the two lattices Γ± of base charges they carry.
//!
//! Membership in Γ± is an exact divisibility question, so everything up to
//! the final complex entries is done in rationals.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::pairings::area;
use crate::siegel::{LatticeCharge, PeriodMatrix};
use crate::special::{solution_record, special_eigenvalue};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// N = N₊ = N₂ + M.
    Plus,
    /// N = N₋ = -M.
    Minus,
}

impl Branch {
    pub fn symbol(&self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Genus2Params {
    pub omega11: Complex64,
    pub omega12: Complex64,
    pub m: Rational64,
    pub n2: Rational64,
    pub n3: Rational64,
    pub n4hat: i64,
}

fn in_lattice(x: Rational64, n4hat: i64) -> bool {
    (x * Rational64::from_integer(n4hat)).is_integer()
}

fn to_f64(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

impl Genus2Params {
    /// N₁ = M N₂ + M².
    pub fn n1(&self) -> Rational64 {
        self.m * self.n2 + self.m * self.m
    }

    pub fn n_plus(&self) -> Rational64 {
        self.n2 + self.m
    }

    pub fn n_minus(&self) -> Rational64 {
        -self.m
    }

    /// The branch multiplier N with v₂ = N v₁.
    pub fn multiplier(&self, branch: Branch) -> Rational64 {
        match branch {
            Branch::Plus => self.n_plus(),
            Branch::Minus => self.n_minus(),
        }
    }

    /// Parameters describing the same Ω₂₂ with M replaced by -N₂ - M.
    pub fn conjugate(&self) -> Genus2Params {
        Genus2Params {
            m: -self.n2 - self.m,
            ..self.clone()
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.n4hat == 0 {
            return Err(Error::DegenerateParameter("N̂₄ must be nonzero".into()));
        }
        if self.m.is_zero() {
            return Err(Error::DegenerateParameter("M = 0 leaves n₂ = n₁/M undefined".into()));
        }
        if self.n_plus().is_zero() {
            return Err(Error::DegenerateParameter(
                "N₂ + M = 0 leaves n₂ = -n₁/(N₂ + M) undefined".into(),
            ));
        }
        for (name, value) in [("N₁", self.n1()), ("N₂", self.n2), ("N₃", self.n3)] {
            if !in_lattice(value, self.n4hat) {
                return Err(Error::BadRationality(format!(
                    "{name} = {value} is not in Z/{}",
                    self.n4hat
                )));
            }
        }
        Ok(())
    }

    /// Ω₂₂ = N₁Ω₁₁ + N₂Ω₁₂ + N₃.
    pub fn omega22(&self) -> Complex64 {
        self.omega11 * to_f64(self.n1()) + self.omega12 * to_f64(self.n2) + to_f64(self.n3)
    }
}

/// Ω = [[Ω₁₁, Ω₁₂], [Ω₁₂, N₁Ω₁₁ + N₂Ω₁₂ + N₃]], positivity checked through
/// det Ω⁽²⁾ > 0 and Ω⁽²⁾₁₁ > 0.
pub fn build_special_genus2(params: &Genus2Params) -> Result<PeriodMatrix> {
    params.check()?;
    let omega22 = params.omega22();
    let det = params.omega11.im * omega22.im - params.omega12.im * params.omega12.im;
    if !(det > 0.0) || !(params.omega11.im > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: det.min(params.omega11.im),
        });
    }
    PeriodMatrix::from_rows(&[vec![params.omega11, params.omega12], vec![params.omega12, omega22]])
}

/// Completes (n₁, m₁) to a genus-2 charge on the given branch:
/// Γ⁺: n₂ = n₁/M, m₂ = (N₂+M)m₁ + N₃n₁/M;
/// Γ⁻: n₂ = -n₁/(N₂+M), m₂ = -Mm₁ - N₃n₁/(N₂+M).
pub fn gamma_complete(params: &Genus2Params, branch: Branch, n1: i64, m1: i64) -> Result<LatticeCharge> {
    params.check()?;
    let k = Rational64::from_integer(n1);
    let j = Rational64::from_integer(m1);
    let (n2, m2) = match branch {
        Branch::Plus => {
            let n2 = k / params.m;
            (n2, params.n_plus() * j + params.n3 * n2)
        }
        Branch::Minus => {
            let q = k / params.n_plus();
            (-q, -params.m * j - params.n3 * q)
        }
    };
    if !n2.is_integer() || !m2.is_integer() {
        return Err(Error::NotInGamma {
            k: n1,
            j: m1,
            branch: branch.symbol(),
        });
    }
    Ok(LatticeCharge::new(vec![n1, n2.to_integer()], vec![m1, m2.to_integer()]))
}

pub fn gamma_contains(params: &Genus2Params, branch: Branch, n1: i64, m1: i64) -> bool {
    gamma_complete(params, branch, n1, m1).is_ok()
}

/// A basis {(k₀, j₀), (0, j₁)} of Γ± in Hermite normal form.
pub fn gamma_basis(params: &Genus2Params, branch: Branch) -> Result<[(i64, i64); 2]> {
    params.check()?;
    // Smallest positive j with (0, j) in the lattice.
    let coefficient = match branch {
        Branch::Plus => params.n_plus(),
        Branch::Minus => params.m,
    };
    let j1 = *coefficient.abs().denom();
    let divisor = match branch {
        Branch::Plus => params.m,
        Branch::Minus => params.n_plus(),
    };
    // k must make k/divisor integral; search the allowed k for a matching j.
    let step = divisor.numer().abs();
    let mut k = step;
    let limit = step.saturating_mul(j1.max(1)).saturating_mul(*params.n3.denom()).max(step);
    while k <= limit {
        if let Some(j) = (0..j1).find(|&j| gamma_contains(params, branch, k, j)) {
            return Ok([(k, j), (0, j1)]);
        }
        k += step;
    }
    Err(Error::DegenerateParameter(format!("no Γ{branch} generator found up to k = {limit}")))
}

/// Γ⁺ or Γ⁻ for a fixed parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaLattice {
    pub branch: Branch,
    pub params: Genus2Params,
}

impl GammaLattice {
    pub fn new(params: &Genus2Params, branch: Branch) -> Result<Self> {
        params.check()?;
        Ok(GammaLattice {
            branch,
            params: params.clone(),
        })
    }

    pub fn contains(&self, k: i64, j: i64) -> bool {
        gamma_contains(&self.params, self.branch, k, j)
    }

    pub fn complete(&self, k: i64, j: i64) -> Result<LatticeCharge> {
        gamma_complete(&self.params, self.branch, k, j)
    }

    pub fn basis(&self) -> Result<[(i64, i64); 2]> {
        gamma_basis(&self.params, self.branch)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyEigenvalue {
    /// λ from the closed form in (n₁, m₁), (n₁', m₁').
    pub lambda: f64,
    /// 2 A_{n,m} |c|² from the solved ratio.
    pub direct: f64,
}

/// λ_c^{(±)} for base and probe given by their first components.
pub fn genus2_eigenvalue_family(
    omega: &PeriodMatrix,
    params: &Genus2Params,
    branch: Branch,
    base1: (i64, i64),
    probe1: (i64, i64),
) -> Result<FamilyEigenvalue> {
    let base = gamma_complete(params, branch, base1.0, base1.1)?;
    let probe = gamma_complete(params, branch, probe1.0, probe1.1)?;
    let (o11, o12) = (omega.get(0, 0), omega.get(0, 1));
    // Numerators of the closed forms; each is a nonzero multiple of v₁.
    let numerator = |(n1, m1): (i64, i64)| -> Complex64 {
        match branch {
            Branch::Plus => {
                let m = to_f64(params.m);
                Complex64::new(m * m1 as f64, 0.0) - (o11 * m + o12) * n1 as f64
            }
            Branch::Minus => {
                let s = to_f64(params.n_plus());
                Complex64::new(s * m1 as f64, 0.0) - (o11 * s - o12) * n1 as f64
            }
        }
    };
    let record = solution_record(omega, &base, &probe, 1, 1e-9)?;
    let (direct, _) = special_eigenvalue(omega, &base, &record)?;
    let a = area(omega, &base)?;
    let lambda = 2.0 * a * numerator(probe1).norm_sqr() / numerator(base1).norm_sqr();
    Ok(FamilyEigenvalue { lambda, direct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn worked() -> Genus2Params {
        Genus2Params {
            omega11: Complex64::new(0.0, 1.0),
            omega12: Complex64::new(0.0, 0.5),
            m: r(1),
            n2: r(1),
            n3: r(0),
            n4hat: 1,
        }
    }

    #[test]
    fn worked_construction() {
        let params = worked();
        assert_eq!(params.n1(), r(2));
        assert_eq!(params.n_plus(), r(2));
        assert_eq!(params.n_minus(), r(-1));
        let omega = build_special_genus2(&params).unwrap();
        assert_eq!(omega.get(1, 1), Complex64::new(0.0, 2.5));
    }

    #[test]
    fn roots_of_the_compatibility_quadratic() {
        for (m, n2) in [(r(1), r(1)), (Rational64::new(1, 2), Rational64::new(3, 2)), (r(-3), r(2))] {
            let params = Genus2Params { m, n2, ..worked() };
            for root in [params.n_plus(), params.n_minus()] {
                assert!((root * root - params.n2 * root - params.n1()).is_zero());
            }
        }
    }

    #[test]
    fn conjugate_parameter_gives_same_matrix() {
        let params = Genus2Params {
            m: Rational64::new(3, 2),
            n2: Rational64::new(1, 2),
            n4hat: 4,
            omega12: Complex64::new(0.2, 0.3),
            ..worked()
        };
        let other = params.conjugate();
        assert_eq!(params.n1(), other.n1());
        assert_eq!(params.omega22(), other.omega22());
    }

    #[test]
    fn rejected_parameters() {
        let zero_m = Genus2Params { m: r(0), ..worked() };
        assert!(matches!(build_special_genus2(&zero_m), Err(Error::DegenerateParameter(_))));
        let flat = Genus2Params {
            omega12: Complex64::new(0.0, 2.0),
            ..worked()
        };
        assert!(matches!(build_special_genus2(&flat), Err(Error::NotPositiveDefinite { .. })));
        let bad = Genus2Params {
            m: Rational64::new(1, 2),
            n2: r(1),
            n4hat: 2,
            ..worked()
        };
        // N₁ = 1/2 + 1/4 = 3/4 is not in Z/2.
        assert!(matches!(build_special_genus2(&bad), Err(Error::BadRationality(_))));
    }

    #[test]
    fn completion_examples() {
        let params = worked();
        assert_eq!(
            gamma_complete(&params, Branch::Plus, 1, 1).unwrap(),
            LatticeCharge::new(vec![1, 1], vec![1, 2])
        );
        assert!(matches!(
            gamma_complete(&params, Branch::Minus, 1, 1),
            Err(Error::NotInGamma { branch: '-', .. })
        ));
        assert_eq!(
            gamma_complete(&params, Branch::Minus, 2, 1).unwrap(),
            LatticeCharge::new(vec![2, -1], vec![1, -1])
        );
    }

    #[test]
    fn basis_of_worked_lattices() {
        let params = worked();
        assert_eq!(gamma_basis(&params, Branch::Plus).unwrap(), [(1, 0), (0, 1)]);
        assert_eq!(gamma_basis(&params, Branch::Minus).unwrap(), [(2, 0), (0, 1)]);
        let params = Genus2Params {
            m: Rational64::new(1, 2),
            n2: Rational64::new(1, 2),
            n3: Rational64::new(1, 2),
            n4hat: 2,
            ..worked()
        };
        for branch in [Branch::Plus, Branch::Minus] {
            for (k, j) in gamma_basis(&params, branch).unwrap() {
                assert!(gamma_contains(&params, branch, k, j));
            }
        }
    }

    #[test]
    fn family_matches_direct_eigenvalue() {
        let params = worked();
        let omega = build_special_genus2(&params).unwrap();
        let fam = genus2_eigenvalue_family(&omega, &params, Branch::Plus, (1, 1), (0, 1)).unwrap();
        assert!((fam.lambda - 2.0 * PI * PI).abs() < 1e-10);
        assert!((fam.direct - fam.lambda).abs() < 1e-10);
        let same = genus2_eigenvalue_family(&omega, &params, Branch::Plus, (1, 1), (1, 1)).unwrap();
        let a = area(&omega, &LatticeCharge::new(vec![1, 1], vec![1, 2])).unwrap();
        assert!((same.lambda - 2.0 * a).abs() < 1e-10);
        let minus = genus2_eigenvalue_family(&omega, &params, Branch::Minus, (2, 1), (0, 1)).unwrap();
        assert!((minus.lambda - minus.direct).abs() < 1e-10 * minus.lambda);
    }
}
