//! Row-rank with a witness basis.
//!
//! Rows are scanned in order and kept when independent of the rows kept so
//! far, so the witness is the lexicographically earliest maximal independent
//! subset. Exact rows use Gaussian elimination over the rationals; any float
//! entry switches the whole matrix to Gram-Schmidt with a relative threshold.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::expr::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Floating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    /// Indices of the accepted rows, ascending.
    pub pivots: Vec<usize>,
    pub arithmetic: Arithmetic,
    /// Smallest accepted residual norm relative to the largest row norm.
    /// Only reported on the floating path.
    pub min_pivot: Option<f64>,
}

/// Greedy row rank. `eps` is the relative residual threshold used on the
/// floating path; the exact path ignores it.
pub fn greedy_rank(rows: &[Vec<Value>], eps: f64) -> RankResult {
    if rows.iter().all(|r| r.iter().all(Value::is_exact)) {
        let exact: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v.as_exact().unwrap().clone()).collect())
            .collect();
        exact_greedy_rank(&exact)
    } else {
        let float: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(Value::to_f64).collect()).collect();
        float_greedy_rank(&float, eps)
    }
}

pub fn exact_greedy_rank(rows: &[Vec<BigRational>]) -> RankResult {
    // basis rows in echelon form, each paired with its pivot column
    let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut pivots = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (col, b) in &basis {
            if !r[*col].is_zero() {
                let factor = r[*col].clone() / &b[*col];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &factor * y;
                }
            }
        }
        if let Some(col) = r.iter().position(|x| !x.is_zero()) {
            basis.push((col, r));
            pivots.push(idx);
        }
    }
    RankResult {
        rank: pivots.len(),
        pivots,
        arithmetic: Arithmetic::Exact,
        min_pivot: None,
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn float_greedy_rank(rows: &[Vec<f64>], eps: f64) -> RankResult {
    let scale = rows.iter().map(|r| norm(r)).fold(0.0, f64::max);
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let mut pivots = Vec::new();
    let mut min_pivot: Option<f64> = None;
    if scale > 0.0 && scale.is_finite() {
        for (idx, row) in rows.iter().enumerate() {
            let mut r = row.clone();
            // two rounds of classical Gram-Schmidt
            for _ in 0..2 {
                for q in &ortho {
                    let c = dot(&r, q);
                    for (x, y) in r.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
            }
            let res = norm(&r);
            if res > eps * scale {
                let rel = res / scale;
                min_pivot = Some(min_pivot.map_or(rel, |m: f64| m.min(rel)));
                for x in r.iter_mut() {
                    *x /= res;
                }
                ortho.push(r);
                pivots.push(idx);
            }
        }
    }
    RankResult {
        rank: pivots.len(),
        pivots,
        arithmetic: Arithmetic::Floating,
        min_pivot: Some(min_pivot.unwrap_or(0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<Value>> {
        v.iter().map(|r| r.iter().map(|&x| Value::int(x)).collect()).collect()
    }

    #[test]
    fn exact_rank_and_witness() {
        let r = greedy_rank(&rows(&[&[1, 0], &[0, 0], &[2, 0], &[0, 1]]), 1e-9);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 3]);
        assert_eq!(r.arithmetic, Arithmetic::Exact);
    }

    #[test]
    fn zero_and_empty() {
        assert_eq!(greedy_rank(&rows(&[&[0, 0], &[0, 0]]), 1e-9).rank, 0);
        assert_eq!(greedy_rank(&[], 1e-9).rank, 0);
        let f = greedy_rank(&[vec![Value::Float(0.0), Value::Float(0.0)]], 1e-9);
        assert_eq!(f.rank, 0);
    }

    #[test]
    fn float_threshold_is_relative() {
        let big = vec![
            vec![Value::Float(1e6), Value::Float(0.0)],
            vec![Value::Float(1e6), Value::Float(1e-6)],
        ];
        assert_eq!(greedy_rank(&big, 1e-9).rank, 1);
        assert_eq!(greedy_rank(&big, 1e-15).rank, 2);
    }

    #[test]
    fn exact_and_float_agree_on_rational_rows() {
        let m = rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1], &[0, 2, 2], &[5, 5, 5]]);
        let exact = greedy_rank(&m, 1e-9);
        let float: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(Value::to_f64).collect()).collect();
        let fl = float_greedy_rank(&float, 1e-9);
        assert_eq!(exact.rank, 3);
        assert_eq!(exact.pivots, vec![0, 2, 4]);
        assert_eq!(exact.rank, fl.rank);
        assert_eq!(exact.pivots, fl.pivots);
    }
}
