//! Special period matrices: probes (n', m') with ω_{n',m'} = c·ω_{n,m}.
//!
//! Writing v = m - Ωn and v' = m' - Ωn', a probe solves the problem iff
//! v' = c̄ v. For non-real c̄ the differential ω̂ = (c̄n - n')·ω integrates to
//! a branched cover of the torus with modulus c̄.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::differentials::{d_matrix, period_of};
use crate::error::{Error, Result};
use crate::pairings::area;
use crate::siegel::{dot, CVector, CyclePair, LatticeCharge, PeriodMatrix};

/// |v_j| below which a base charge is rejected.
pub const DEGENERATE_V: f64 = 1e-14;
/// Tolerance on cover-monodromy lattice coordinates.
pub const LATTICE_TOL: f64 = 1e-9;
/// Tolerance on the integrality of the cover degree.
pub const DEGREE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    /// c is a rational number: the probe is a rational multiple of the base.
    CollinearRational,
    /// Im c̄ > 0: a genuine branched cover of a torus.
    SpecialComplex,
    /// c is real but not a small-denominator rational; the target torus
    /// degenerates.
    Degenerate,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::CollinearRational => "collinear-rational",
            Classification::SpecialComplex => "special-complex",
            Classification::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An accepted probe. `probe` is the enumerated charge; `orientation` is
/// the sign (±1) that makes Im c̄ > 0, so that ω_{orientation·probe} = c·ω_base.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord {
    pub probe: LatticeCharge,
    pub orientation: i64,
    pub c: Complex64,
    pub lambda_c: f64,
    pub lambda_c_dual: f64,
    pub degree: Option<u64>,
    pub classification: Classification,
}

impl SolutionRecord {
    pub fn oriented_probe(&self) -> LatticeCharge {
        self.probe.scaled(self.orientation)
    }

    pub fn c_bar(&self) -> Complex64 {
        self.c.conj()
    }
}

fn base_vector(omega: &PeriodMatrix, base: &LatticeCharge) -> Result<CVector> {
    let v = omega.charge_vector(base);
    for (index, z) in v.iter().enumerate() {
        if z.norm() < DEGENERATE_V {
            return Err(Error::DegenerateBase {
                index,
                modulus: z.norm(),
            });
        }
    }
    Ok(v)
}

/// r_j = (m'_j - Σ_k Ω_jk n'_k) / (m_j - Σ_k Ω_jk n_k).
pub fn consistency_ratios(omega: &PeriodMatrix, base: &LatticeCharge, probe: &LatticeCharge) -> Result<CVector> {
    let v = base_vector(omega, base)?;
    let w = omega.charge_vector(probe);
    Ok(w.component_div(&v))
}

/// Spread of the ratios, max_j |r_j - r_ref|, scaled by max_j |v_j| so the
/// threshold is measured in units of the probe vector. The reference ratio
/// is taken at the largest |v_j|.
fn ratio_mismatch(ratios: &CVector, v: &CVector) -> (f64, usize) {
    let (reference, vmax) = v
        .iter()
        .enumerate()
        .map(|(j, z)| (j, z.norm()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let spread = ratios
        .iter()
        .map(|r| (r - ratios[reference]).norm())
        .fold(0.0, f64::max);
    (spread * vmax, reference)
}

/// Solves v' = c̄ v. Returns (c, orientation) with the probe sign flipped
/// when needed so that Im c̄ >= 0.
pub fn solve_c(omega: &PeriodMatrix, base: &LatticeCharge, probe: &LatticeCharge, tol: f64) -> Result<(Complex64, i64)> {
    let v = base_vector(omega, base)?;
    if probe.is_degenerate() {
        return Err(Error::DegenerateCharge);
    }
    let ratios = omega.charge_vector(probe).component_div(&v);
    let (mismatch, reference) = ratio_mismatch(&ratios, &v);
    if !(mismatch <= tol) {
        return Err(Error::NotASolution { mismatch });
    }
    let c_bar = ratios[reference];
    if c_bar.im < -tol {
        Ok((-c_bar.conj(), -1))
    } else {
        Ok((c_bar.conj(), 1))
    }
}

/// Rational iff within `tol` of p/q for some q <= max_den.
fn is_small_rational(x: f64, max_den: i64, tol: f64) -> bool {
    (1..=max_den.max(1)).any(|q| {
        let p = (x * q as f64).round();
        (x - p / q as f64).abs() <= tol
    })
}

pub fn classify(c: Complex64, bound: i64, tol: f64) -> Classification {
    if c.im.abs() > tol {
        Classification::SpecialComplex
    } else if is_small_rational(c.re, 2 * bound * bound, tol) {
        Classification::CollinearRational
    } else {
        Classification::Degenerate
    }
}

/// λ_c = 2 A_{n,m} |c|² and λ'_c = 4 A_{n,m} A_{n',m'} / λ_c.
pub fn special_eigenvalue(omega: &PeriodMatrix, base: &LatticeCharge, record: &SolutionRecord) -> Result<(f64, f64)> {
    let a_base = area(omega, base)?;
    let a_probe = area(omega, &record.probe)?;
    let lambda = 2.0 * a_base * record.c.norm_sqr();
    Ok((lambda, 4.0 * a_base * a_probe / lambda))
}

fn make_record(
    omega: &PeriodMatrix,
    base: &LatticeCharge,
    probe: LatticeCharge,
    c: Complex64,
    orientation: i64,
    bound: i64,
    tol: f64,
) -> Result<SolutionRecord> {
    let mut record = SolutionRecord {
        probe,
        orientation,
        c,
        lambda_c: 0.0,
        lambda_c_dual: 0.0,
        degree: None,
        classification: classify(c, bound, tol),
    };
    let (lambda, dual) = special_eigenvalue(omega, base, &record)?;
    record.lambda_c = lambda;
    record.lambda_c_dual = dual;
    if record.classification == Classification::SpecialComplex {
        record.degree = cover_degree(omega, base, &record).ok();
    }
    Ok(record)
}

/// Builds the full record for a single probe, or rejects it.
pub fn solution_record(
    omega: &PeriodMatrix,
    base: &LatticeCharge,
    probe: &LatticeCharge,
    bound: i64,
    tol: f64,
) -> Result<SolutionRecord> {
    let (c, orientation) = solve_c(omega, base, probe, tol)?;
    make_record(omega, base, probe.clone(), c, orientation, bound, tol)
}

/// Enumerates [-B, B]^{2h}, zero charge included, lexicographic in (n', m').
pub fn box_charges(h: usize, bound: i64) -> impl IndexedParallelIterator<Item = LatticeCharge> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow(2 * h as u32);
    (0..total).into_par_iter().map(move |mut index| {
        let mut digits = vec![0_i64; 2 * h];
        for slot in digits.iter_mut().rev() {
            *slot = (index % side) as i64 - bound;
            index /= side;
        }
        let m = digits.split_off(h);
        LatticeCharge::new(digits, m)
    })
}

/// All probes in the box solving the proportionality condition, sorted by
/// (n', m'). Runs on the current rayon pool.
pub fn search_solutions(omega: &PeriodMatrix, base: &LatticeCharge, bound: i64, tol: f64) -> Result<Vec<SolutionRecord>> {
    if bound < 1 {
        return Err(Error::Shape(format!("search bound must be at least 1, got {bound}")));
    }
    base_vector(omega, base)?;
    let found: Result<Vec<SolutionRecord>> = box_charges(omega.genus(), bound)
        .filter(|probe| !probe.is_degenerate())
        .filter_map(|probe| match solve_c(omega, base, &probe, tol) {
            Ok((c, orientation)) => Some(make_record(omega, base, probe, c, orientation, bound, tol)),
            Err(Error::NotASolution { .. }) => None,
            Err(other) => Some(Err(other)),
        })
        .collect();
    let mut records = found?;
    records.sort_by(|a, b| a.probe.cmp(&b.probe));
    Ok(records)
}

/// [`search_solutions`] on a dedicated pool of `threads` workers.
pub fn search_solutions_with_threads(
    omega: &PeriodMatrix,
    base: &LatticeCharge,
    bound: i64,
    tol: f64,
    threads: usize,
) -> Result<Vec<SolutionRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("failed to build thread pool");
    pool.install(|| search_solutions(omega, base, bound, tol))
}

/// max_{j,k} |v_j v'_k - v_k v'_j|.
pub fn cm_wedge_residual(omega: &PeriodMatrix, base: &LatticeCharge, probe: &LatticeCharge) -> f64 {
    let v = omega.charge_vector(base);
    let w = omega.charge_vector(probe);
    let h = v.len();
    let mut worst: f64 = 0.0;
    for j in 0..h {
        for k in (j + 1)..h {
            worst = worst.max((v[j] * w[k] - v[k] * w[j]).norm());
        }
    }
    worst
}

/// The branched cover w = ∫ω̂ attached to an accepted record.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverData {
    /// Coefficients of ω̂ = (c̄n - n')·ω.
    pub u: CVector,
    /// uᵀΩ⁽²⁾ū / Im c̄ before rounding.
    pub degree: f64,
    /// Periods over α_1..α_h, β_1..β_h with their (a, b) in a + b·c̄.
    pub monodromy_table: Vec<(CyclePair, Complex64, (i64, i64))>,
}

fn cover_coefficients(base: &LatticeCharge, record: &SolutionRecord) -> CVector {
    let c_bar = record.c_bar();
    let probe = record.oriented_probe();
    CVector::from_fn(base.genus(), |k, _| c_bar * base.n[k] as f64 - probe.n[k] as f64)
}

/// ∮_{γ_{p,q}} ω̂, checked against -p·n' - q·m' + c̄(p·n + q·m); returns the
/// value and its coordinates in Z + c̄Z.
pub fn cover_monodromy(
    omega: &PeriodMatrix,
    base: &LatticeCharge,
    record: &SolutionRecord,
    cycle: &CyclePair,
) -> Result<(Complex64, (i64, i64))> {
    if record.classification != Classification::SpecialComplex {
        return Err(Error::RealRatio(record.c.re));
    }
    let u = cover_coefficients(base, record);
    let value = period_of(omega, &u, cycle);
    let probe = record.oriented_probe();
    let integral = -dot(&cycle.p, &probe.n) - dot(&cycle.q, &probe.m);
    let modular = dot(&cycle.p, &base.n) + dot(&cycle.q, &base.m);
    let expected = record.c_bar() * modular as f64 + integral as f64;
    let defect = (value - expected).norm();
    if defect > LATTICE_TOL {
        return Err(Error::LatticeDefect { defect });
    }
    Ok((value, (integral, modular)))
}

pub fn cover_data(omega: &PeriodMatrix, base: &LatticeCharge, record: &SolutionRecord) -> Result<CoverData> {
    if record.classification != Classification::SpecialComplex {
        return Err(Error::RealRatio(record.c.re));
    }
    let u = cover_coefficients(base, record);
    let im = omega.imag_part();
    let h = omega.genus();
    let mut area = 0.0;
    for j in 0..h {
        for k in 0..h {
            area += (u[j] * im[(j, k)] * u[k].conj()).re;
        }
    }
    let degree = area / record.c_bar().im;
    let monodromy_table = CyclePair::basis(h)
        .into_iter()
        .map(|cycle| {
            let (value, coords) = cover_monodromy(omega, base, record, &cycle)?;
            Ok((cycle, value, coords))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverData {
        u,
        degree,
        monodromy_table,
    })
}

/// Number of sheets: the area of Σ in |ω̂|² divided by the area Im c̄ of the
/// target torus.
pub fn cover_degree(omega: &PeriodMatrix, base: &LatticeCharge, record: &SolutionRecord) -> Result<u64> {
    let data = cover_data(omega, base, record)?;
    let rounded = data.degree.round();
    if (data.degree - rounded).abs() > DEGREE_TOL || rounded < 1.0 {
        return Err(Error::NotIntegralDegree { degree: data.degree });
    }
    Ok(rounded as u64)
}

/// Integer vectors (M', M, N', N) of a cover relation with modulus τ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmWitness {
    pub m_prime: Vec<i64>,
    pub m: Vec<i64>,
    pub n_prime: Vec<i64>,
    pub n: Vec<i64>,
}

impl CmWitness {
    /// M' = -m', M = m, N' = -n', N = n for the oriented probe.
    pub fn from_record(base: &LatticeCharge, record: &SolutionRecord) -> Self {
        let probe = record.oriented_probe();
        CmWitness {
            m_prime: probe.m.iter().map(|x| -x).collect(),
            m: base.m.clone(),
            n_prime: probe.n.iter().map(|x| -x).collect(),
            n: base.n.clone(),
        }
    }
}

/// max_k |M'_k + τM_k - Σ_j (N'_j + τN_j) Ω_jk|.
pub fn cm_relation_check(omega: &PeriodMatrix, tau: Complex64, witness: &CmWitness) -> f64 {
    let h = omega.genus();
    (0..h)
        .map(|k| {
            let mut value = tau * witness.m[k] as f64 + witness.m_prime[k] as f64;
            for j in 0..h {
                value -= (tau * witness.n[j] as f64 + witness.n_prime[j] as f64) * omega.get(j, k);
            }
            value.norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsfCheck {
    pub d: Complex64,
    pub d_prime: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Σ_{|n| <= trunc} exp(-n²πx).
pub fn theta_sum(x: Complex64, trunc: i64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for n in 1..=trunc {
        acc += (-x * (std::f64::consts::PI * (n * n) as f64)).exp() * 2.0;
    }
    acc
}

/// D_j = Σ_k conj(D^{mn}_kj), with the roles of n and m exchanged in the
/// D-matrix.
pub fn psf_coefficient(omega: &PeriodMatrix, charge: &LatticeCharge, j: usize) -> Complex64 {
    let swapped = LatticeCharge::new(charge.m.clone(), charge.n.clone());
    let d = d_matrix(omega, &swapped);
    (0..omega.genus()).map(|k| d.entries[(k, j)].conj()).sum()
}

/// Σ e^{-n²πD'/D} against √(D/D') Σ e^{-n²πD/D'}, both truncated at |n| <= trunc.
pub fn psf_check(omega: &PeriodMatrix, base: &LatticeCharge, probe: &LatticeCharge, j: usize, trunc: i64) -> Result<PsfCheck> {
    if j >= omega.genus() {
        return Err(Error::Shape(format!("index {j} out of range for genus {}", omega.genus())));
    }
    let d = psf_coefficient(omega, base, j);
    let d_prime = psf_coefficient(omega, probe, j);
    let x = d_prime / d;
    if !(x.re > 0.0) {
        return Err(Error::ConvergenceDomain(x.re));
    }
    let lhs = theta_sum(x, trunc);
    let rhs = (d / d_prime).sqrt() * theta_sum(x.inv(), trunc);
    Ok(PsfCheck {
        d,
        d_prime,
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}
