//! Small dense matrices: determinants by LU with partial pivoting, minors and cofactors.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Copy with the listed rows and columns removed.
    pub fn without(&self, drop_rows: &[usize], drop_cols: &[usize]) -> Matrix {
        let keep_r: Vec<usize> = (0..self.rows).filter(|i| !drop_rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|j| !drop_cols.contains(j)).collect();
        let mut m = Matrix::zeros(keep_r.len(), keep_c.len());
        for (a, &i) in keep_r.iter().enumerate() {
            for (b, &j) in keep_c.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn minor(&self, i: usize, j: usize) -> f64 {
        self.without(&[i], &[j]).determinant().value
    }

    pub fn cofactor(&self, i: usize, j: usize) -> f64 {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.minor(i, j)
    }

    pub fn determinant(&self) -> Determinant {
        lu_determinant(self)
    }

    /// Exact determinant of the stored entries, rounded once to f64.
    ///
    /// Every finite f64 is an integer times a power of two, so the matrix is
    /// lifted to integers and reduced by fraction-free (Bareiss) elimination.
    /// Needed where minors are many decades below the entries and any
    /// floating-point elimination returns noise.
    pub fn determinant_exact(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        assert!(self.data.iter().all(|v| v.is_finite()), "determinant of non-finite entries");
        let n = self.rows;
        if n == 0 {
            return 1.0;
        }
        let parts: Vec<(BigInt, i64)> = self.data.iter().map(|&v| dyadic(v)).collect();
        let e_min = parts.iter().filter(|(m, _)| !m.is_zero()).map(|&(_, e)| e).min().unwrap_or(0);
        let mut a: Vec<BigInt> = parts.into_iter().map(|(m, e)| m << (e - e_min) as usize).collect();
        let mut sign = 1i8;
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                    Some(p) => {
                        for j in 0..n {
                            a.swap(k * n + j, p * n + j);
                        }
                        sign = -sign;
                    }
                    None => return 0.0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        let det = &a[n * n - 1] * i64::from(sign);
        big_to_f64(&det, e_min * n as i64)
    }

    pub fn cofactor_exact(&self, i: usize, j: usize) -> f64 {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.without(&[i], &[j]).determinant_exact()
    }

    /// Solves `A x = b` for square `A`; `None` when a pivot is exactly zero.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let p = pivot_row(&a, n, k);
            if a[p * n + k] == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                x.swap(k, p);
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k * n + j] * x[j]).sum();
            x[k] = (x[k] - s) / a[k * n + k];
        }
        Some(x)
    }

    /// Row and column power-of-two scale factors bringing every row and column
    /// maximum into `[0.5, 1)`. Exact in floating point; zero rows/columns get 1.
    pub fn equilibration(&self) -> (Vec<f64>, Vec<f64>) {
        let pow2 = |m: f64| {
            if m > 0.0 && m.is_finite() {
                (-(m.log2().floor() + 1.0)).exp2()
            } else {
                1.0
            }
        };
        let rs: Vec<f64> = (0..self.rows)
            .map(|i| pow2(self.row(i).iter().fold(0.0f64, |m, v| m.max(v.abs()))))
            .collect();
        let cs: Vec<f64> = (0..self.cols)
            .map(|j| pow2((0..self.rows).map(|i| (self.get(i, j) * rs[i]).abs()).fold(0.0, f64::max)))
            .collect();
        (rs, cs)
    }

    /// `diag(rs) · self · diag(cs)`.
    pub fn scaled(&self, rs: &[f64], cs: &[f64]) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j) * rs[i] * cs[j]);
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Determinant together with the smallest pivot magnitude met during elimination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Determinant {
    pub value: f64,
    pub min_pivot: f64,
}

fn pivot_row(a: &[f64], n: usize, k: usize) -> usize {
    (k..n)
        .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
        .unwrap_or(k)
}

fn lu_determinant(m: &Matrix) -> Determinant {
    assert_eq!(m.rows, m.cols, "determinant needs a square matrix");
    let n = m.rows;
    if n == 0 {
        return Determinant {
            value: 1.0,
            min_pivot: f64::INFINITY,
        };
    }
    let mut a = m.data.clone();
    let mut det = 1.0;
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let p = pivot_row(&a, n, k);
        let piv = a[p * n + k];
        min_pivot = min_pivot.min(piv.abs());
        if piv == 0.0 {
            return Determinant {
                value: 0.0,
                min_pivot: 0.0,
            };
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        det *= piv;
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    Determinant { value: det, min_pivot }
}

/// `v = m · 2^e` with integer `m`.
fn dyadic(v: f64) -> (BigInt, i64) {
    if v == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = v.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let m = BigInt::from(m);
    (if v < 0.0 { -m } else { m }, e)
}

/// `v · 2^shift` rounded to f64.
fn big_to_f64(v: &BigInt, shift: i64) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let bits = v.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (v.abs() >> drop as usize).to_u64().expect("fits in 64 bits") as f64;
    let mag = scale_pow2(top, shift + drop);
    if v.is_negative() {
        -mag
    } else {
        mag
    }
}

fn scale_pow2(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
    }
    x * 2f64.powi(k as i32)
}
