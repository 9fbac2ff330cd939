//! Ratio matrices N_ij = v_i / v_j and exact checks of the structured
//! ansatz Ω_ik = Σ_l N_{ik,j}^l Ω_jl + M_ik.

use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::siegel::{CMatrix, CVector, LatticeCharge, PeriodMatrix};
use crate::special::DEGENERATE_V;

#[derive(Clone, Debug, PartialEq)]
pub struct RatioMatrix {
    pub entries: CMatrix,
}

impl RatioMatrix {
    pub fn from_vector(v: &CVector) -> Result<Self> {
        if let Some((index, z)) = v.iter().enumerate().find(|(_, z)| z.norm() <= DEGENERATE_V) {
            return Err(Error::DegenerateBase {
                index,
                modulus: z.norm(),
            });
        }
        let h = v.len();
        Ok(RatioMatrix {
            entries: CMatrix::from_fn(h, h, |i, j| v[i] / v[j]),
        })
    }

    pub fn genus(&self) -> usize {
        self.entries.nrows()
    }

    /// max |N_ij N_jk - N_ik|.
    pub fn cocycle_residual(&self) -> f64 {
        let h = self.genus();
        let n = &self.entries;
        let mut worst = 0.0f64;
        for i in 0..h {
            for j in 0..h {
                for k in 0..h {
                    worst = worst.max((n[(i, j)] * n[(j, k)] - n[(i, k)]).norm());
                }
            }
        }
        worst
    }

    /// max |N_ij N_ji - 1|.
    pub fn inverse_residual(&self) -> f64 {
        let h = self.genus();
        let n = &self.entries;
        let mut worst = 0.0f64;
        for i in 0..h {
            for j in 0..h {
                worst = worst.max((n[(i, j)] * n[(j, i)] - Complex64::new(1.0, 0.0)).norm());
            }
        }
        worst
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.entries
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Largest entrywise distance to another ratio matrix.
    pub fn distance(&self, other: &RatioMatrix) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn ratio_matrix(omega: &PeriodMatrix, base: &LatticeCharge) -> Result<RatioMatrix> {
    RatioMatrix::from_vector(&omega.charge_vector(base))
}

/// Rational tensors N_{ik,j}^l and M_ik, stored zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzTensors {
    h: usize,
    n4: Vec<BigRational>,
    m2: DMatrix<BigRational>,
}

impl AnsatzTensors {
    pub fn zeros(h: usize) -> Self {
        AnsatzTensors {
            h,
            n4: vec![BigRational::zero(); h.pow(4)],
            m2: DMatrix::from_element(h, h, BigRational::zero()),
        }
    }

    pub fn genus(&self) -> usize {
        self.h
    }

    fn index(&self, i: usize, k: usize, j: usize, l: usize) -> usize {
        ((i * self.h + k) * self.h + j) * self.h + l
    }

    pub fn n(&self, i: usize, k: usize, j: usize, l: usize) -> &BigRational {
        &self.n4[self.index(i, k, j, l)]
    }

    pub fn set_n(&mut self, i: usize, k: usize, j: usize, l: usize, value: BigRational) {
        let idx = self.index(i, k, j, l);
        self.n4[idx] = value;
    }

    pub fn m(&self, i: usize, k: usize) -> &BigRational {
        &self.m2[(i, k)]
    }

    pub fn set_m(&mut self, i: usize, k: usize, value: BigRational) {
        self.m2[(i, k)] = value;
    }

    /// Reads `h <int>` followed by `i k j l value` and `i k value` lines
    /// (one-based indices, values `p` or `p/q`). Missing entries are zero.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tensors: Option<AnsatzTensors> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some(t) = tensors.as_mut() else {
                match tokens.as_slice() {
                    ["h", value] => {
                        let h: usize = value
                            .parse()
                            .map_err(|_| Error::parse(line, format!("bad genus '{value}'")))?;
                        if h == 0 {
                            return Err(Error::parse(line, "genus must be positive"));
                        }
                        tensors = Some(AnsatzTensors::zeros(h));
                        continue;
                    }
                    _ => return Err(Error::parse(line, "expected header 'h <int>'")),
                }
            };
            let (indices, value) = tokens.split_at(tokens.len() - 1);
            let value = BigRational::from_str(value[0])
                .map_err(|_| Error::parse(line, format!("bad rational '{}'", value[0])))?;
            let mut idx = Vec::with_capacity(indices.len());
            for token in indices {
                let i: usize = token
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad index '{token}'")))?;
                if i == 0 || i > t.h {
                    return Err(Error::parse(line, format!("index {i} outside 1..={}", t.h)));
                }
                idx.push(i - 1);
            }
            match idx.as_slice() {
                [i, k, j, l] => t.set_n(*i, *k, *j, *l, value),
                [i, k] => t.set_m(*i, *k, value),
                _ => return Err(Error::parse(line, format!("expected 3 or 5 fields, got {}", tokens.len()))),
            }
        }
        tensors.ok_or_else(|| Error::parse(0, "empty tensor file"))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                message,
            },
            other => other,
        })
    }

    /// Whether N_{ik,j}^l is symmetric under i ↔ k and M_ik under i ↔ k.
    pub fn is_symmetric(&self) -> bool {
        let h = self.h;
        (0..h).all(|i| {
            (0..h).all(|k| {
                self.m(i, k) == self.m(k, i)
                    && (0..h).all(|j| (0..h).all(|l| self.n(i, k, j, l) == self.n(k, i, j, l)))
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzResiduals {
    /// max |Σ_l N_{ik,j}^l N_{jl,n}^m - N_{ik,n}^m|.
    pub cocycle: BigRational,
    /// max |Σ_l N_{ik,j}^l M_jl|.
    pub m: BigRational,
}

impl AnsatzResiduals {
    pub fn as_f64(&self) -> (f64, f64) {
        (
            self.cocycle.to_f64().unwrap_or(f64::INFINITY),
            self.m.to_f64().unwrap_or(f64::INFINITY),
        )
    }
}

pub fn verify_ansatz_tensors(t: &AnsatzTensors) -> AnsatzResiduals {
    let h = t.h;
    let mut cocycle = BigRational::zero();
    let mut m_res = BigRational::zero();
    for i in 0..h {
        for k in 0..h {
            for j in 0..h {
                let mut row = BigRational::zero();
                for l in 0..h {
                    row += t.n(i, k, j, l) * t.m(j, l);
                }
                m_res = m_res.max(row.abs());
                for n in 0..h {
                    for m in 0..h {
                        let mut sum = -t.n(i, k, n, m).clone();
                        for l in 0..h {
                            sum += t.n(i, k, j, l) * t.n(j, l, n, m);
                        }
                        cocycle = cocycle.max(sum.abs());
                    }
                }
            }
        }
    }
    AnsatzResiduals { cocycle, m: m_res }
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
