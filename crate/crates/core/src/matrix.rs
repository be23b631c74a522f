use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square matrix stored row-major.
///
/// Used for the multicut metric `x` and for raw distance data. Symmetry is
/// not enforced by the type; [`SquareMatrix::set_sym`] writes both halves.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Symmetric matrix with zero diagonal and `value` elsewhere.
    pub fn filled_off_diagonal(n: usize, value: f64) -> Self {
        let mut m = Self::zeros(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    m.data[u * n + v] = value;
                }
            }
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                data.push(f(u, v));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        self.data[u * self.n + v] = value;
    }

    #[inline]
    pub fn set_sym(&mut self, u: usize, v: usize, value: f64) {
        self.data[u * self.n + v] = value;
        self.data[v * self.n + u] = value;
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Largest `|a_uv - a_vu|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                worst = worst.max((self.get(u, v) - self.get(v, u)).abs());
            }
        }
        worst
    }

    /// Entry-wise `self <= other + tol`.
    pub fn dominated_by(&self, other: &SquareMatrix, tol: f64) -> bool {
        self.n == other.n
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| *a <= *b + tol)
    }
}

impl Serialize for SquareMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SquareMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SquareMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let m = SquareMatrix::from_fn(3, |u, v| (u * 3 + v) as f64);
        assert_eq!(SquareMatrix::from_rows(&m.to_rows()).unwrap(), m);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(SquareMatrix::from_rows(&rows).is_err());
    }

    #[test]
    fn empty_matrix() {
        let m = SquareMatrix::zeros(0);
        assert!(m.to_rows().is_empty());
    }
}
