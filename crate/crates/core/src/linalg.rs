//! Small dense solves with complete pivoting.

use crate::dd::Dd;

pub(crate) struct Factored {
    lu: Vec<Vec<Dd>>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    #[cfg_attr(not(test), allow(dead_code))]
    parity_odd: bool,
}

/// Gaussian elimination with complete pivoting. Returns `None` when a pivot
/// vanishes (singular matrix).
pub(crate) fn factor(mut a: Vec<Vec<Dd>>) -> Option<Factored> {
    let n = a.len();
    let mut row_perm: Vec<usize> = (0..n).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut parity_odd = false;
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, -1.0);
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().skip(k) {
                let m = v.abs().to_f64();
                if m > best {
                    best = m;
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= 0.0 {
            return None;
        }
        if pr != k {
            a.swap(pr, k);
            row_perm.swap(pr, k);
            parity_odd = !parity_odd;
        }
        if pc != k {
            for row in a.iter_mut() {
                row.swap(pc, k);
            }
            col_perm.swap(pc, k);
            parity_odd = !parity_odd;
        }
        let pivot = a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / pivot;
            a[i][k] = f;
            let (top, rest) = a.split_at_mut(i);
            for (x, &t) in rest[0].iter_mut().zip(&top[k]).skip(k + 1) {
                *x = *x - f * t;
            }
        }
    }
    Some(Factored {
        lu: a,
        row_perm,
        col_perm,
        parity_odd,
    })
}

impl Factored {
    /// Ratio of the largest to the smallest pivot magnitude; a cheap lower
    /// bound on the condition number.
    pub fn pivot_ratio(&self) -> f64 {
        let mags = self.lu.iter().enumerate().map(|(i, r)| r[i].abs().to_f64());
        let (lo, hi) = mags.fold((f64::INFINITY, 0.0f64), |(lo, hi), m| {
            (lo.min(m), hi.max(m))
        });
        if self.lu.is_empty() {
            1.0
        } else {
            hi / lo
        }
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn det(&self) -> Dd {
        let mut d = self
            .lu
            .iter()
            .enumerate()
            .fold(Dd::ONE, |acc, (i, r)| acc * r[i]);
        if self.parity_odd {
            d = -d;
        }
        d
    }

    pub fn solve(&self, b: &[Dd]) -> Vec<Dd> {
        let n = self.lu.len();
        let mut y: Vec<Dd> = self.row_perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[i][j] * y[j];
                y[i] = y[i] - t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[i][j] * y[j];
                y[i] = y[i] - t;
            }
            y[i] = y[i] / self.lu[i][i];
        }
        let mut x = vec![Dd::ZERO; n];
        for (k, &c) in self.col_perm.iter().enumerate() {
            x[c] = y[k];
        }
        x
    }
}

/// Determinant of a small real matrix.
#[cfg(test)]
pub(crate) fn determinant(a: &[Vec<f64>]) -> f64 {
    let m = a
        .iter()
        .map(|r| r.iter().map(|&v| Dd::from(v)).collect())
        .collect();
    factor(m).map_or(0.0, |f| f.det().to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_solve() {
        let a = vec![
            vec![0.0, 2.0, 1.0],
            vec![1.0, 1.0, 0.0],
            vec![3.0, 0.0, 1.0],
        ];
        assert!((determinant(&a) - (-5.0)).abs() < 1e-14);
        let f = factor(
            a.iter()
                .map(|r| r.iter().map(|&v| Dd::from(v)).collect())
                .collect(),
        )
        .unwrap();
        let x = f.solve(&[Dd::from(3.0), Dd::from(2.0), Dd::from(4.0)]);
        let x: Vec<f64> = x.iter().map(|v| v.to_f64()).collect();
        for (xi, want) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - want).abs() < 1e-14);
        }
        assert_eq!(determinant(&[vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
    }
}
