//! Perron–Frobenius data of nonnegative irreducible matrices.
//!
//! Power iteration is run on `A^d` restricted to one cyclic class, where `d` is the period, so
//! periodic matrices converge as fast as primitive ones. The other classes are filled in from
//! `A v = λ v`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::shift::FiniteGraph;

/// A nonnegative square matrix stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn adjacency(g: &FiniteGraph) -> Self {
        SparseMatrix { rows: (0..g.len()).map(|v| g.successors(v).iter().map(|&w| (w, 1.0)).collect()).collect() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                rows[j].push((i, a));
            }
        }
        SparseMatrix { rows }
    }

    fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(j, a)| a * x[j]).sum();
        }
    }

    fn reach(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, a) in &self.rows[v] {
                if a > 0.0 && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_irreducible(&self) -> bool {
        !self.is_empty()
            && self.rows.iter().any(|r| !r.is_empty())
            && self.reach(0).iter().all(|&b| b)
            && self.transpose().reach(0).iter().all(|&b| b)
    }
}

/// Perron eigenvalue, right/left eigenvectors (normalized to unit maximum) and period.
#[derive(Clone, Debug, PartialEq)]
pub struct Perron {
    pub lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub period: usize,
    /// `max_i |(A v)_i - λ v_i|` for the right vector.
    pub residual: f64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period and cyclic class of each vertex (BFS level modulo the period).
fn cyclic_classes(m: &SparseMatrix) -> (usize, Vec<usize>) {
    let n = m.len();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &m.rows[v] {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut d = 0;
    for (v, row) in m.rows.iter().enumerate() {
        for &(w, _) in row {
            d = gcd(d, (level[v] + 1).abs_diff(level[w]));
        }
    }
    let d = d.max(1);
    (d, level.iter().map(|l| l % d).collect())
}

const TOL: f64 = 1e-13;
const MAX_ITER: usize = 200_000;

fn right_vector(m: &SparseMatrix, d: usize, class: &[usize]) -> (f64, Vec<f64>) {
    let n = m.len();
    let mut x: Vec<f64> = class.iter().map(|&c| if c == 0 { 1.0 } else { 0.0 }).collect();
    let mut y = vec![0.0; n];
    let mut mu = 0.0;
    for _ in 0..MAX_ITER {
        let prev = x.clone();
        let before: f64 = x.iter().sum();
        for _ in 0..d {
            m.mul(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
        }
        mu = x.iter().sum::<f64>() / before;
        let scale = x.iter().cloned().fold(0.0, f64::max);
        x.iter_mut().for_each(|v| *v /= scale);
        if x.iter().zip(&prev).all(|(a, b)| (a - b).abs() <= TOL) {
            break;
        }
    }
    let lambda = mu.powf(1.0 / d as f64);
    // fill classes d-1, d-2, …, 1 from class 0
    let mut v: Vec<f64> = x.iter().zip(class).map(|(&a, &c)| if c == 0 { a } else { 0.0 }).collect();
    for c in (1..d).rev() {
        for i in (0..n).filter(|&i| class[i] == c) {
            v[i] = m.rows[i].iter().map(|&(j, a)| a * v[j]).sum::<f64>() / lambda;
        }
    }
    let scale = v.iter().cloned().fold(0.0, f64::max);
    v.iter_mut().for_each(|a| *a /= scale);
    (lambda, v)
}

pub fn perron(m: &SparseMatrix) -> Result<Perron> {
    if !m.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    let (d, class) = cyclic_classes(m);
    let (lambda, right) = right_vector(m, d, &class);
    let t = m.transpose();
    let (d_t, class_t) = cyclic_classes(&t);
    let (_, left) = right_vector(&t, d_t, &class_t);
    let mut av = vec![0.0; m.len()];
    m.mul(&right, &mut av);
    let residual = av.iter().zip(&right).map(|(a, v)| (a - lambda * v).abs()).fold(0.0, f64::max);
    Ok(Perron { lambda, right, left, period: d, residual })
}

/// Spectral radius of the strongly connected component of `v`; `0` when it carries no cycle.
pub fn component_radius(g: &FiniteGraph, v: usize) -> f64 {
    let comp = g.component_of(v);
    let sub = g.induced(&comp);
    if sub.edge_count() == 0 {
        return 0.0;
    }
    perron(&SparseMatrix::adjacency(&sub)).map(|p| p.lambda).unwrap_or(0.0)
}
