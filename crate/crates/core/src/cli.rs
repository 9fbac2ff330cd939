//! Command-line front end. [`run`] does all the work and returns the text
//! and exit status, so the binary is a thin wrapper.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genus2::{build_special_genus2, gamma_basis, Branch, Genus2Params};
use crate::pairings::identities::ResidualTable;
use crate::siegel::{CyclePair, LatticeCharge, PeriodMatrix};
use crate::special::{
    cm_relation_check, cm_wedge_residual, psf_check, search_solutions_with_threads, solution_record, CmWitness,
};
use crate::torus::{fd_eigen_residual, torus_spectrum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ssurf", version, about = "Spectra of primitive differentials and special period matrices")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Acceptance tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Half-width B of the search box [-B, B]^{2h}.
    #[arg(long, global = true, default_value_t = 2)]
    pub bound: i64,
    /// Worker threads for the search; THREADS in the environment wins.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a matrix file holds a valid period matrix.
    Validate { matrix: PathBuf },
    /// Flat-torus spectrum over the box |n|, |m| <= max.
    Torus {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: Complex64,
        #[arg(long, default_value_t = 3)]
        max: i64,
    },
    /// Finite-difference eigen-residual of one torus eigenfunction at N and 2N.
    TorusFd {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: Complex64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Enumerate probe charges proportional to a base charge.
    Search {
        matrix: PathBuf,
        /// Base charge as "n1,..,nh;m1,..,mh".
        #[arg(long, allow_hyphen_values = true)]
        base: String,
    },
    /// Build a special genus-2 period matrix.
    #[command(name = "construct-g2")]
    ConstructG2 {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        omega11: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        omega12: Complex64,
        #[arg(long = "M", value_parser = parse_rational, allow_hyphen_values = true)]
        m: Rational64,
        #[arg(long = "N2", value_parser = parse_rational, allow_hyphen_values = true)]
        n2: Rational64,
        #[arg(long = "N3", value_parser = parse_rational, allow_hyphen_values = true)]
        n3: Rational64,
        #[arg(long = "N4", allow_hyphen_values = true)]
        n4: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complex-multiplication relation for a base/probe pair.
    CmCheck {
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        probe: String,
    },
    /// Poisson-summation check for a base/probe pair.
    PsfCheck {
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        probe: String,
        /// One-based column index j.
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[arg(long, default_value_t = 30)]
        trunc: i64,
    },
    /// Maximum residual of every identity over random charges and cycles.
    Report {
        matrix: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        range: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    match execute(config) {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(Failure::Usage(message)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        },
        Err(Failure::Run(e)) => Outcome {
            code: match e {
                Error::Parse { .. } | Error::Io { .. } => EXIT_USAGE,
                _ => EXIT_FAILURE,
            },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(config: &RunConfig) -> std::result::Result<String, Failure> {
    if !(config.tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", config.tol)));
    }
    if config.bound < 1 {
        return Err(Failure::Usage(format!("--bound must be at least 1, got {}", config.bound)));
    }
    let mut out = String::new();
    match &config.command {
        Command::Validate { matrix } => {
            let omega = parse_matrix_file(matrix)?;
            let eigen = omega.imag_eigenvalues();
            let min = eigen.iter().cloned().fold(f64::INFINITY, f64::min);
            writeln!(out, "genus {}", omega.genus()).unwrap();
            writeln!(out, "min_imag_eigenvalue {}", num(min)).unwrap();
            writeln!(out, "imag_det {}", num(omega.imag_det())).unwrap();
            writeln!(out, "ok").unwrap();
        }
        Command::Torus { tau, max } => {
            if *max < 0 {
                return Err(Failure::Usage(format!("--max must be non-negative, got {max}")));
            }
            writeln!(out, "# n m re_c im_c lambda mu").unwrap();
            for e in torus_spectrum(*tau, *max)? {
                writeln!(
                    out,
                    "{} {} {} {} {} {}",
                    e.n,
                    e.m,
                    num(e.c.re),
                    num(e.c.im),
                    num(e.lambda),
                    num(e.mu)
                )
                .unwrap();
            }
        }
        Command::TorusFd { tau, n, m, resolution } => {
            let (lambda, coarse) = fd_eigen_residual(*tau, *n, *m, *resolution)?;
            let (_, fine) = fd_eigen_residual(*tau, *n, *m, 2 * resolution)?;
            writeln!(out, "# lambda {}", num(lambda)).unwrap();
            writeln!(out, "# resolution residual").unwrap();
            writeln!(out, "{} {}", resolution, num(coarse)).unwrap();
            writeln!(out, "{} {}", 2 * resolution, num(fine)).unwrap();
            if fine > 0.0 {
                writeln!(out, "# ratio {}", num(coarse / fine)).unwrap();
            }
        }
        Command::Search { matrix, base } => {
            let omega = parse_matrix_file(matrix)?;
            let base = parse_charge(base, omega.genus()).map_err(Failure::Usage)?;
            let threads = thread_count(config)?;
            let records = search_solutions_with_threads(&omega, &base, config.bound, config.tol, threads)?;
            writeln!(out, "# n' m' re_c im_c lambda_c degree classification").unwrap();
            for r in records {
                let degree = r.degree.map_or_else(|| "-".to_string(), |d| d.to_string());
                writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    join(&r.probe.n),
                    join(&r.probe.m),
                    num(r.c.re),
                    num(r.c.im),
                    num(r.lambda_c),
                    degree,
                    r.classification
                )
                .unwrap();
            }
        }
        Command::ConstructG2 {
            omega11,
            omega12,
            m,
            n2,
            n3,
            n4,
            out: path,
        } => {
            let params = Genus2Params {
                omega11: *omega11,
                omega12: *omega12,
                m: *m,
                n2: *n2,
                n3: *n3,
                n4hat: *n4,
            };
            let omega = build_special_genus2(&params)?;
            let mut sidecar = String::new();
            writeln!(sidecar, "# N1 = {}", params.n1()).unwrap();
            writeln!(sidecar, "# N+ = {}", params.n_plus()).unwrap();
            writeln!(sidecar, "# N- = {}", params.n_minus()).unwrap();
            for branch in [Branch::Plus, Branch::Minus] {
                let [(k0, j0), (k1, j1)] = gamma_basis(&params, branch)?;
                writeln!(sidecar, "# Gamma{branch} basis ({k0},{j0}) ({k1},{j1})").unwrap();
            }
            let text = format!("{sidecar}{}", write_matrix(&omega));
            match path {
                Some(path) => {
                    std::fs::write(path, &text).map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    out.push_str(&sidecar);
                }
                None => out.push_str(&text),
            }
        }
        Command::CmCheck { matrix, base, probe } => {
            let omega = parse_matrix_file(matrix)?;
            let base = parse_charge(base, omega.genus()).map_err(Failure::Usage)?;
            let probe = parse_charge(probe, omega.genus()).map_err(Failure::Usage)?;
            let record = solution_record(&omega, &base, &probe, config.bound, config.tol)?;
            let tau = record.c_bar();
            let witness = CmWitness::from_record(&base, &record);
            writeln!(out, "tau {} {}", num(tau.re), num(tau.im)).unwrap();
            writeln!(out, "classification {}", record.classification).unwrap();
            writeln!(out, "cm_relation_residual {}", num(cm_relation_check(&omega, tau, &witness))).unwrap();
            writeln!(out, "wedge_residual {}", num(cm_wedge_residual(&omega, &base, &probe))).unwrap();
        }
        Command::PsfCheck {
            matrix,
            base,
            probe,
            index,
            trunc,
        } => {
            let omega = parse_matrix_file(matrix)?;
            let base = parse_charge(base, omega.genus()).map_err(Failure::Usage)?;
            let probe = parse_charge(probe, omega.genus()).map_err(Failure::Usage)?;
            if *index == 0 {
                return Err(Failure::Usage("--index is one-based".into()));
            }
            let check = psf_check(&omega, &base, &probe, index - 1, *trunc)?;
            for (name, z) in [("d", check.d), ("d_prime", check.d_prime), ("lhs", check.lhs), ("rhs", check.rhs)] {
                writeln!(out, "{name} {} {}", num(z.re), num(z.im)).unwrap();
            }
            writeln!(out, "residual {}", num(check.residual)).unwrap();
        }
        Command::Report {
            matrix,
            samples,
            range,
            seed,
        } => {
            let omega = parse_matrix_file(matrix)?;
            let h = omega.genus();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut table = ResidualTable::default();
            table.record_matrix(&omega);
            for _ in 0..*samples {
                let nm = LatticeCharge::random(&mut rng, h, *range);
                let qp = LatticeCharge::random(&mut rng, h, *range);
                table.record_all(&omega, &nm, &CyclePair::new(qp.n, qp.m));
            }
            writeln!(out, "# identity max_residual status").unwrap();
            for row in table.rows() {
                let status = if row.residual <= config.tol { "PASS" } else { "FAIL" };
                writeln!(out, "{} {} {}", row.name, num(row.residual), status).unwrap();
            }
        }
    }
    Ok(out)
}

fn thread_count(config: &RunConfig) -> std::result::Result<usize, Failure> {
    if let Ok(value) = std::env::var("THREADS") {
        return match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::Usage(format!("THREADS must be a positive integer, got '{value}'"))),
        };
    }
    Ok(config
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

/// 15 significant digits, with -0 printed as 0.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

fn join(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses `a+bi`, `a-bi`, a bare real `a` or a bare imaginary `bi`.
pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let bad = || format!("malformed complex literal '{text}'");
    let real = |s: &str| -> std::result::Result<f64, String> {
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() && !s.is_empty() => Ok(x),
            _ => Err(bad()),
        }
    };
    let t = text.trim();
    let Some(body) = t.strip_suffix('i') else {
        return real(t).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => real(s)?,
    };
    Ok(Complex64::new(real(re_text)?, im))
}

/// Shortest round-tripping `a+bi` form.
pub fn format_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{re}{sign}{}i", im.abs())
}

pub fn parse_rational(text: &str) -> std::result::Result<Rational64, String> {
    Rational64::from_str(text.trim()).map_err(|_| format!("malformed rational '{text}'"))
}

/// Parses "n1,..,nh;m1,..,mh".
pub fn parse_charge(text: &str, h: usize) -> std::result::Result<LatticeCharge, String> {
    let parts: Vec<&str> = text.split(';').collect();
    let [n, m] = parts.as_slice() else {
        return Err(format!("charge '{text}' must look like 'n1,..,nh;m1,..,mh'"));
    };
    let ints = |s: &str| -> std::result::Result<Vec<i64>, String> {
        s.split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad integer '{x}' in charge '{text}'")))
            .collect()
    };
    let (n, m) = (ints(n)?, ints(m)?);
    if n.len() != h || m.len() != h {
        return Err(format!("charge '{text}' has wrong length for genus {h}"));
    }
    Ok(LatticeCharge::new(n, m))
}

/// Reads `genus h` followed by h rows of h complex entries; `#` starts a comment.
pub fn parse_matrix(text: &str) -> Result<PeriodMatrix> {
    let mut genus: Option<usize> = None;
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut last_line = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(h) = genus else {
            match tokens.as_slice() {
                ["genus", value] => match value.parse::<usize>() {
                    Ok(h) if h > 0 => genus = Some(h),
                    _ => return Err(Error::parse(line, format!("bad genus '{value}'"))),
                },
                _ => return Err(Error::parse(line, "expected 'genus <h>'")),
            }
            continue;
        };
        if rows.len() == h {
            return Err(Error::parse(line, "unexpected content after the last row"));
        }
        if tokens.len() != h {
            return Err(Error::parse(line, format!("expected {h} entries, found {}", tokens.len())));
        }
        let row = tokens
            .iter()
            .map(|t| parse_complex(t).map_err(|e| Error::parse(line, e)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    match genus {
        None => Err(Error::parse(last_line.max(1), "missing 'genus <h>' header")),
        Some(h) if rows.len() < h => Err(Error::parse(
            last_line.max(1),
            format!("expected {h} rows, found {}", rows.len()),
        )),
        Some(_) => PeriodMatrix::from_rows(&rows),
    }
}

pub fn parse_matrix_file(path: &Path) -> Result<PeriodMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: Some(path.to_path_buf()),
            line,
            message,
        },
        other => other,
    })
}

pub fn write_matrix(omega: &PeriodMatrix) -> String {
    let h = omega.genus();
    let mut out = format!("genus {h}\n");
    for j in 0..h {
        let row: Vec<String> = (0..h).map(|k| format_complex(omega.get(j, k))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("1.5-2i").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_complex("-1e-3+2.5e2i").unwrap(), Complex64::new(-1e-3, 250.0));
        assert_eq!(parse_complex("2e-3i").unwrap(), Complex64::new(0.0, 2e-3));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        for bad in ["1+i2", "", "i+1", "1+2", "nan+1i", "1++2i", "a+bi"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_round_trip() {
        for z in [Complex64::new(0.1, -0.7), Complex64::new(-0.0, 2.5), Complex64::new(1e-300, 1e300)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z + Complex64::new(0.0, 0.0));
        }
        assert_eq!(format_complex(Complex64::new(-0.0, -0.0)), "0+0i");
    }

    #[test]
    fn matrix_files() {
        let omega = parse_matrix("genus 1\n0+1i\n").unwrap();
        assert_eq!(omega.tau(), Complex64::new(0.0, 1.0));
        let text = "# worked\ngenus 2\n0+1i 0+0.5i\n0+0.5i 0+2.5i\n";
        let omega = parse_matrix(text).unwrap();
        assert_eq!(parse_matrix(&write_matrix(&omega)).unwrap(), omega);
        assert!(matches!(
            parse_matrix("genus 2\n0+1i 1+i2\n0+0i 0+1i\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_matrix("genus 2\n0+1i 0+0i\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_matrix("0+1i\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn charges() {
        assert_eq!(parse_charge("1,1;1,2", 2).unwrap(), LatticeCharge::new(vec![1, 1], vec![1, 2]));
        assert_eq!(parse_charge("-1;0", 1).unwrap(), LatticeCharge::scalar(-1, 0));
        assert!(parse_charge("1,1;1", 2).is_err());
        assert!(parse_charge("1,1", 2).is_err());
    }

    #[test]
    fn numbers_have_fifteen_digits() {
        assert_eq!(num(-0.0), "0.00000000000000e0");
        assert_eq!(num(std::f64::consts::PI), "3.14159265358979e0");
    }
}
