//! Oracles shared by the integration tests, written independently of the library code they check.

#![allow(dead_code)]

use multunit::groups::{build_group_unitary, GroupTable};
use multunit::mu_core::MultiplicativeUnitary;
use multunit::tensorlin::{ComplexMatrix, C64};

pub const TOL: f64 = 1e-9;

pub fn group(name: &str) -> GroupTable {
    GroupTable::small_groups()
        .into_iter()
        .find(|(n, _)| n == name)
        .unwrap_or_else(|| panic!("no group named {name}"))
        .1
}

pub fn unitary(name: &str) -> MultiplicativeUnitary {
    build_group_unitary(&group(name), TOL).unwrap()
}

/// Groups of order at most 8 plus S3, D4 and Q8, as listed by the library.
pub fn groups() -> Vec<(String, GroupTable)> {
    GroupTable::small_groups()
}

/// `V(δ_u⊗δ_v) = δ_{uv⁻¹}⊗δ_v`, straight from the table.
pub fn group_v(g: &GroupTable) -> ComplexMatrix {
    let n = g.order();
    let t = g.table();
    let inv = |v: usize| (0..n).find(|&w| t[v][w] == 0).unwrap();
    let mut m = ComplexMatrix::zeros(n * n, n * n);
    for u in 0..n {
        for v in 0..n {
            m[(t[u][inv(v)] * n + v, u * n + v)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// All subgroups by brute force over subsets, sorted by (order, elements).
pub fn subgroups(g: &GroupTable) -> Vec<Vec<usize>> {
    let n = g.order();
    assert!(n <= 16, "brute force is exponential");
    let t = g.table();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask & 1 == 0 {
            continue;
        }
        let elems: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if elems.iter().all(|&a| elems.iter().all(|&b| mask >> t[a][b] & 1 == 1)) {
            out.push(elems);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

pub fn is_normal(g: &GroupTable, sub: &[usize], sup: &[usize]) -> bool {
    let t = g.table();
    let n = g.order();
    let inv = |v: usize| (0..n).find(|&w| t[v][w] == 0).unwrap();
    sup.iter().all(|&x| sub.iter().all(|&h| sub.contains(&t[t[x][h]][inv(x)])))
}

pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

/// The smallest subgroup containing `a ∪ b`.
pub fn generated(g: &GroupTable, a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    all.push(0);
    all.sort_unstable();
    all.dedup();
    loop {
        let t = g.table();
        let mut next = all.clone();
        for &x in &all {
            for &y in &all {
                next.push(t[x][y]);
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.len() == all.len() {
            return next;
        }
        all = next;
    }
}

/// `χ_Γ/√|Γ|`.
pub fn indicator(n: usize, sub: &[usize]) -> Vec<C64> {
    let s = 1.0 / (sub.len() as f64).sqrt();
    (0..n).map(|i| C64::new(if sub.contains(&i) { s } else { 0.0 }, 0.0)).collect()
}

pub fn vec_close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() <= tol
}

pub fn delta(n: usize, i: usize) -> Vec<C64> {
    (0..n).map(|k| C64::new(if k == i { 1.0 } else { 0.0 }, 0.0)).collect()
}
