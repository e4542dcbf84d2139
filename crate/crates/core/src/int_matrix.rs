//! Dense integer matrices for multiplicity and K0 data.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{qi, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Column vector.
    pub fn column(v: &[i64]) -> Self {
        IntMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0)
    }

    /// `self · rhs`, failing on dimension mismatch or overflow.
    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let term = self
                        .get(r, k)
                        .checked_mul(rhs.get(k, c))
                        .ok_or_else(|| Error::Overflow("matrix product".into()))?;
                    acc = acc
                        .checked_add(term)
                        .ok_or_else(|| Error::Overflow("matrix product".into()))?;
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// `self · v` for a vector of nonnegative sizes.
    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<i64>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        (0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(v).try_fold(0i64, |acc, (&a, &b)| {
                    i64::try_from(b)
                        .ok()
                        .and_then(|b| a.checked_mul(b))
                        .and_then(|t| acc.checked_add(t))
                        .ok_or_else(|| Error::Overflow("matrix-vector product".into()))
                })
            })
            .collect()
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        rank_of(self.to_rows())
    }

    /// Every row of `other` is a rational combination of rows of `self`.
    pub fn row_space_contains(&self, other: &IntMatrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let mut rows = self.to_rows();
        rows.extend(other.to_rows());
        rank_of(rows) == self.rank()
    }
}

fn rank_of(rows: Vec<Vec<i64>>) -> usize {
    let mut m: Vec<Vec<Q>> = rows.into_iter().map(|r| r.into_iter().map(qi).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[rank][c];
            let (top, rest) = m.split_at_mut(r);
            for (x, p) in rest[0][c..].iter_mut().zip(&top[rank][c..]) {
                *x -= &f * p;
            }
        }
        rank += 1;
    }
    rank
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (c, x) in self.row(r).iter().enumerate() {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
