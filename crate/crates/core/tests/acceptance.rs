//! Acceptance gate. Runs as a plain binary and prints one PASS/FAIL line per
//! criterion, with indented detail lines. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::iter::ParallelIterator;

use special_surfaces::cli::{run, Command, RunConfig};
use special_surfaces::genus2::{build_special_genus2, Genus2Params};
use special_surfaces::pairings::identities::ResidualTable;
use special_surfaces::pairings::{area, real_product};
use special_surfaces::siegel::{modular_transform_charge, modular_transform_tau, random_siegel_point};
use special_surfaces::special::{
    box_charges, cm_relation_check, cm_wedge_residual, cover_degree, psf_check, search_solutions, solution_record,
    special_eigenvalue, Classification, CmWitness,
};
use special_surfaces::torus::{fd_eigen_residual, log_eta_invariant, mu_covariance_residual, torus_eigenvalue};
use special_surfaces::{CyclePair, Error, LatticeCharge, ModularMatrix, PeriodMatrix};

const IDENTITY_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-12;
const WINDING_TOL: f64 = 1e-10;
const COVARIANCE_TOL: f64 = 1e-10;
const ETA_REL_TOL: f64 = 1e-8;
const FD_RESIDUAL_MAX: f64 = 5e-3;
const FD_RATIO_MIN: f64 = 3.5;
const WORKED_TOL: f64 = 1e-10;
const SEARCH_TOL: f64 = 1e-9;
const PSF_TOL: f64 = 1e-10;
const PSF_TRUNC: i64 = 30;
/// Both Re x and Re(1/x) at least this large, so |n| <= 30 covers the sums.
const PSF_MIN_REAL: f64 = 0.02;
const CM_TOL: f64 = 1e-10;

struct Criterion {
    label: &'static str,
    details: Vec<(bool, String)>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Criterion {
            label,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.details.push((ok, detail.into()));
    }

    fn passed(&self) -> bool {
        self.details.iter().all(|(ok, _)| *ok)
    }

    fn print(&self) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        println!("{status} {}", self.label);
        for (ok, detail) in &self.details {
            println!("    {} {detail}", if *ok { "ok  " } else { "FAIL" });
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn worked_params() -> Genus2Params {
    Genus2Params {
        omega11: c(0.0, 1.0),
        omega12: c(0.0, 0.5),
        m: Rational64::from_integer(1),
        n2: Rational64::from_integer(1),
        n3: Rational64::from_integer(0),
        n4hat: 1,
    }
}

fn worked_base() -> LatticeCharge {
    LatticeCharge::new(vec![1, 1], vec![1, 2])
}

fn identity_suite() -> Criterion {
    let mut crit = Criterion::new("1 identity suite: 200 random cases, h in 1..=4, charges in [-5,5]");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut table = ResidualTable::default();
    for case in 0..200u64 {
        let h = 1 + (case % 4) as usize;
        let omega = random_siegel_point(h, 1000 + case);
        let nm = LatticeCharge::random(&mut rng, h, 5);
        let qp = LatticeCharge::random(&mut rng, h, 5);
        table.record_all(&omega, &nm, &CyclePair::new(qp.n, qp.m));
        table.record_matrix(&omega);
    }
    for row in table.rows() {
        crit.check(
            row.residual <= IDENTITY_TOL,
            format!("{:<20} max residual {:.3e} (tol {IDENTITY_TOL:e})", row.name, row.residual),
        );
    }
    crit
}

fn positivity() -> Criterion {
    let mut crit = Criterion::new("2 positivity of <n,m|n,m> on the full box [-3,3]^{2h}, h <= 3");
    for h in 1..=3usize {
        for (label, omega) in [
            ("random", random_siegel_point(h, 7 + h as u64)),
            ("skewed", random_siegel_point(h, 70 + h as u64)),
        ] {
            let mut min_nonzero = f64::INFINITY;
            let mut zero_value = f64::NAN;
            let mut count = 0usize;
            for charge in box_charges(h, 3).collect::<Vec<_>>() {
                let value = real_product(&omega, &charge, &charge.as_cycle());
                if charge.is_degenerate() {
                    zero_value = value;
                } else {
                    min_nonzero = min_nonzero.min(value);
                    count += 1;
                }
            }
            crit.check(
                min_nonzero > 0.0 && zero_value == 0.0,
                format!("h={h} {label}: {count} nonzero charges, min {min_nonzero:.3e}, zero charge {zero_value:e}"),
            );
        }
    }
    crit
}

fn torus_spectrum() -> Criterion {
    let mut crit = Criterion::new("3 torus spectrum at tau=i and winding relation on 200 random cases");
    let mut worst: f64 = 0.0;
    for n in -3i64..=3 {
        for m in -3i64..=3 {
            if n * n + m * m > 8 {
                continue;
            }
            let e = torus_eigenvalue(c(0.0, 1.0), n, m).unwrap();
            worst = worst.max((e.lambda - 2.0 * PI * PI * (n * n + m * m) as f64).abs());
        }
    }
    crit.check(
        worst <= SPECTRUM_TOL,
        format!("lambda(i) = 2pi^2(n^2+m^2), n^2+m^2 <= 8: max error {worst:.3e} (tol {SPECTRUM_TOL:e})"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let tau = c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
        let (n, m) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6));
        let lambda = torus_eigenvalue(tau, n, m).unwrap().lambda;
        let omega = PeriodMatrix::from_tau(tau).unwrap();
        let charge = LatticeCharge::scalar(n, m);
        let via_product = 2.0 * PI * real_product(&omega, &charge, &charge.as_cycle()) / tau.im;
        worst = worst.max((lambda - via_product).abs());
    }
    crit.check(
        worst <= WINDING_TOL,
        format!("lambda = 2pi<n,m|n,m>/Im tau: max error {worst:.3e} (tol {WINDING_TOL:e})"),
    );
    crit
}

fn modular_covariance() -> Criterion {
    let mut crit = Criterion::new("4 modular covariance of mu and invariance of Im(tau)|eta|^4");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let gamma = ModularMatrix::random(&mut rng, 10);
        let tau = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0));
        let (n, m) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
        worst = worst.max(mu_covariance_residual(tau, &gamma, n, m).unwrap());
        // Independent route through the transformed torus.
        let moved = modular_transform_charge(&gamma, &LatticeCharge::scalar(n, m));
        let mu_moved = torus_eigenvalue(modular_transform_tau(&gamma, tau).unwrap(), moved.n[0], moved.m[0])
            .unwrap()
            .mu;
        worst = worst.max((mu_moved - torus_eigenvalue(tau, n, m).unwrap().mu).abs());
    }
    crit.check(
        worst <= COVARIANCE_TOL,
        format!("mu covariance, 100 random gamma: max residual {worst:.3e} (tol {COVARIANCE_TOL:e})"),
    );
    let mut worst: f64 = 0.0;
    let mut smallest_im = f64::INFINITY;
    for _ in 0..100 {
        let gamma = ModularMatrix::random(&mut rng, 10);
        let tau = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0));
        let moved = modular_transform_tau(&gamma, tau).unwrap();
        smallest_im = smallest_im.min(moved.im);
        let diff = log_eta_invariant(moved).unwrap() - log_eta_invariant(tau).unwrap();
        worst = worst.max(diff.exp_m1().abs());
    }
    crit.check(
        worst <= ETA_REL_TOL,
        format!(
            "Im(tau)|eta|^4 invariance, 100 random gamma: max relative error {worst:.3e} (tol {ETA_REL_TOL:e}; smallest Im(gamma tau) {smallest_im:.2e})"
        ),
    );
    crit
}

fn finite_differences() -> Criterion {
    let mut crit = Criterion::new("5 finite-difference eigen-residual at N=64 with second-order convergence");
    for tau in [c(0.0, 1.0), c(0.5, 1.0)] {
        for n in -1i64..=1 {
            for m in -1i64..=1 {
                if n == 0 && m == 0 {
                    continue;
                }
                let (_, r64) = fd_eigen_residual(tau, n, m, 64).unwrap();
                let (_, r128) = fd_eigen_residual(tau, n, m, 128).unwrap();
                let ratio = r64 / r128;
                crit.check(
                    r64 < FD_RESIDUAL_MAX && ratio >= FD_RATIO_MIN,
                    format!("tau={tau} (n,m)=({n},{m}): residual {r64:.3e}, ratio {ratio:.3}"),
                );
            }
        }
    }
    crit
}

fn genus2_worked_case() -> Criterion {
    let mut crit = Criterion::new("6 genus-2 worked case");
    let params = worked_params();
    let omega = build_special_genus2(&params).unwrap();
    crit.check(omega.get(1, 1) == c(0.0, 2.5), format!("Omega22 = {}", omega.get(1, 1)));
    crit.check(
        params.n_plus() == Rational64::from_integer(2) && params.n_minus() == Rational64::from_integer(-1),
        format!("N+ = {}, N- = {}", params.n_plus(), params.n_minus()),
    );
    let base = worked_base();
    let records = search_solutions(&omega, &base, 2, SEARCH_TOL).unwrap();
    let shaped = records
        .iter()
        .all(|r| r.probe.n[0] == r.probe.n[1] && r.probe.m[1] == 2 * r.probe.m[0]);
    crit.check(records.len() == 14 && shaped, format!("{} records, all ((a,a),(b,2b)): {shaped}", records.len()));

    // Hand-derived oracle: v = (1 - 1.5i)(1, 2), v' = (1, 2) for the probe.
    let probe = LatticeCharge::new(vec![0, 0], vec![1, 2]);
    let v0 = c(1.0, -1.5);
    let c_bar_oracle = c(1.0, 0.0) / v0;
    let record = solution_record(&omega, &base, &probe, 2, SEARCH_TOL).unwrap();
    let c_bar = record.c_bar();
    let expected = c(4.0 / 13.0, 6.0 / 13.0);
    crit.check(
        (c_bar - expected).norm() <= WORKED_TOL && (c_bar_oracle - expected).norm() <= WORKED_TOL,
        format!("c_bar = {c_bar} (expected (4+6i)/13)"),
    );
    let a = area(&omega, &base).unwrap();
    // A = (pi^2/2) v Omega2^{-1} conj(v) with Omega2^{-1} = [[10/9, -2/9], [-2/9, 4/9]].
    let a_oracle = 0.5 * PI * PI * v0.norm_sqr() * (10.0 - 2.0 * 2.0 * 2.0 + 4.0 * 4.0) / 9.0;
    crit.check(
        (a - 3.25 * PI * PI).abs() <= WORKED_TOL && (a_oracle - 3.25 * PI * PI).abs() <= WORKED_TOL,
        format!("A = {:.12} pi^2", a / (PI * PI)),
    );
    let (lambda, dual) = special_eigenvalue(&omega, &base, &record).unwrap();
    crit.check(
        (lambda - 2.0 * PI * PI).abs() <= WORKED_TOL && (dual - 6.5 * PI * PI).abs() <= WORKED_TOL,
        format!("lambda_c = {:.12} pi^2, lambda'_c = {:.12} pi^2", lambda / (PI * PI), dual / (PI * PI)),
    );
    let degree = cover_degree(&omega, &base, &record);
    crit.check(matches!(degree, Ok(3)), format!("cover degree {degree:?}"));
    crit
}

fn genericity() -> Criterion {
    let mut crit = Criterion::new("7 genericity: random genus-2 matrices, B=3, no special-complex records");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut special = 0usize;
    let mut non_multiples = 0usize;
    let mut total = 0usize;
    for k in 0..20u64 {
        let omega = random_siegel_point(2, 500 + k);
        let base = loop {
            let b = LatticeCharge::random(&mut rng, 2, 2);
            if omega.charge_vector(&b).iter().all(|z| z.norm() > 1e-6) {
                break b;
            }
        };
        for r in search_solutions(&omega, &base, 3, SEARCH_TOL).unwrap() {
            total += 1;
            if r.classification == Classification::SpecialComplex {
                special += 1;
            }
            // Integer vectors are parallel iff every 2x2 minor vanishes.
            let x: Vec<i64> = r.probe.n.iter().chain(&r.probe.m).copied().collect();
            let y: Vec<i64> = base.n.iter().chain(&base.m).copied().collect();
            let parallel = (0..x.len()).all(|i| (0..x.len()).all(|j| x[i] * y[j] == x[j] * y[i]));
            if !parallel {
                non_multiples += 1;
            }
        }
    }
    crit.check(special == 0, format!("{special} special-complex records among {total}"));
    crit.check(non_multiples == 0, format!("{non_multiples} records not proportional to the base"));
    crit
}

fn fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/genus2_worked.txt")
}

fn search_output(matrix: &std::path::Path, base: &str, bound: i64, threads: usize) -> (i32, String) {
    let config = RunConfig {
        command: Command::Search {
            matrix: matrix.to_path_buf(),
            base: base.to_string(),
        },
        tol: SEARCH_TOL,
        bound,
        threads: Some(threads),
    };
    let outcome = run(&config);
    (outcome.code, outcome.stdout)
}

fn determinism() -> Criterion {
    let mut crit = Criterion::new("8 search determinism across 1, 2 and 8 threads");
    if std::env::var_os("THREADS").is_some() {
        crit.check(false, "THREADS is set in the environment and would override the thread counts");
        return crit;
    }
    let dir = tempfile::tempdir().unwrap();
    let genus3 = dir.path().join("genus3.txt");
    std::fs::write(&genus3, special_surfaces::cli::write_matrix(&random_siegel_point(3, 88))).unwrap();
    for (matrix, base, bound) in [(fixture_path(), "1,1;1,2", 2), (genus3, "1,0,-1;2,1,1", 2)] {
        let outputs: Vec<(i32, String)> = [1, 2, 8].iter().map(|&t| search_output(&matrix, base, bound, t)).collect();
        let same = outputs.iter().all(|o| o == &outputs[0]) && outputs[0].0 == 0;
        crit.check(
            same,
            format!(
                "{}: {} output lines, identical: {same}",
                matrix.file_name().unwrap().to_string_lossy(),
                outputs[0].1.lines().count()
            ),
        );
    }
    crit
}

fn poisson_summation() -> Criterion {
    let mut crit = Criterion::new("9 Poisson summation identity at truncation 30");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    let mut domain_errors = 0usize;
    let mut domain_missed = 0usize;
    let mut draws = 0usize;
    while accepted < 50 {
        draws += 1;
        let h = rng.gen_range(1..=3usize);
        let omega = random_siegel_point(h, 900 + draws as u64);
        let base = LatticeCharge::random(&mut rng, h, 3);
        let probe = LatticeCharge::random(&mut rng, h, 3);
        let j = rng.gen_range(0..h);
        let d = special_surfaces::special::psf_coefficient(&omega, &base, j);
        let d_prime = special_surfaces::special::psf_coefficient(&omega, &probe, j);
        if d.norm() < 1e-6 || d_prime.norm() < 1e-6 {
            continue;
        }
        let x = d_prime / d;
        match psf_check(&omega, &base, &probe, j, PSF_TRUNC) {
            Err(Error::ConvergenceDomain(_)) => {
                domain_errors += 1;
                if x.re > 0.0 {
                    domain_missed += 1;
                }
            }
            Err(e) => panic!("unexpected error {e}"),
            Ok(check) => {
                if x.re <= 0.0 {
                    domain_missed += 1;
                } else if x.re >= PSF_MIN_REAL && x.inv().re >= PSF_MIN_REAL {
                    worst = worst.max(check.residual);
                    accepted += 1;
                }
            }
        }
    }
    crit.check(
        worst <= PSF_TOL,
        format!("50 in-domain cases ({draws} draws): max residual {worst:.3e} (tol {PSF_TOL:e})"),
    );
    // A pair with D'/D = -1 lies outside the domain.
    let omega = PeriodMatrix::from_tau(c(0.0, 1.0)).unwrap();
    let flipped = psf_check(&omega, &LatticeCharge::scalar(1, 0), &LatticeCharge::scalar(-1, 0), 0, PSF_TRUNC);
    crit.check(
        domain_missed == 0 && domain_errors > 0 && matches!(flipped, Err(Error::ConvergenceDomain(_))),
        format!("ConvergenceDomain raised exactly when Re(D'/D) <= 0 ({domain_errors} random cases)"),
    );
    crit
}

fn complex_multiplication() -> Criterion {
    let mut crit = Criterion::new("10 complex-multiplication witness and wedge/search equivalence");
    let omega = build_special_genus2(&worked_params()).unwrap();
    let base = worked_base();
    let probe = LatticeCharge::new(vec![0, 0], vec![1, 2]);
    let record = solution_record(&omega, &base, &probe, 2, SEARCH_TOL).unwrap();
    let residual = cm_relation_check(&omega, record.c_bar(), &CmWitness::from_record(&base, &record));
    crit.check(residual <= CM_TOL, format!("CM relation with tau = c_bar: residual {residual:.3e} (tol {CM_TOL:e})"));
    let accepted: Vec<LatticeCharge> = search_solutions(&omega, &base, 2, SEARCH_TOL)
        .unwrap()
        .into_iter()
        .map(|r| r.probe)
        .collect();
    let mut disagreements = 0usize;
    let mut probes = 0usize;
    for probe in box_charges(2, 2).collect::<Vec<_>>() {
        if probe.is_degenerate() {
            continue;
        }
        probes += 1;
        let by_wedge = cm_wedge_residual(&omega, &base, &probe) <= SEARCH_TOL;
        if by_wedge != accepted.contains(&probe) {
            disagreements += 1;
        }
    }
    crit.check(
        disagreements == 0,
        format!("{probes} probes in the B=2 box, {disagreements} disagreements with the search"),
    );
    crit
}

fn main() {
    let start = Instant::now();
    let criteria: Vec<fn() -> Criterion> = vec![
        identity_suite,
        positivity,
        torus_spectrum,
        modular_covariance,
        finite_differences,
        genus2_worked_case,
        genericity,
        determinism,
        poisson_summation,
        complex_multiplication,
    ];
    let mut failed = 0;
    for criterion in criteria {
        let result = criterion();
        result.print();
        if !result.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {failed} failed, {:.1}s", start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
