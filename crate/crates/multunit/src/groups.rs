//! Finite groups from multiplication tables, their multiplicative unitaries,
//! and combinatorial oracles (subgroups, normality, matched pairs).
//!
//! Elements are indices `0..order` with the identity at 0.

use std::collections::BTreeSet;

use crate::error::{MuError, Result};
use crate::mu_core::MultiplicativeUnitary;
use crate::tensorlin::{ComplexMatrix, C64};

/// Default bound on the order for subgroup enumeration.
pub const MAX_ENUMERATION_ORDER: usize = 24;

/// A validated finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

/// A subgroup as a sorted list of element indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup { elements: self.elements.iter().copied().filter(|&g| other.contains(g)).collect() }
    }

    /// Indicator mask over `0..order`.
    pub fn mask(&self, order: usize) -> Vec<bool> {
        let mut m = vec![false; order];
        for &g in &self.elements {
            m[g] = true;
        }
        m
    }
}

impl GroupTable {
    /// Validates a square table (identity at index 0).
    pub fn validate(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(MuError::GroupTable("empty table".into()));
        }
        for (s, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(MuError::GroupTable(format!("row {s} has {} entries, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(MuError::GroupTable(format!("entry {bad} in row {s} is out of range")));
            }
        }
        for s in 0..n {
            if table[0][s] != s || table[s][0] != s {
                return Err(MuError::GroupTable(format!("index 0 is not an identity (fails at {s})")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(MuError::GroupTable(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for (s, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&t| table[s][t] == 0 && table[t][s] == 0)
                .ok_or_else(|| MuError::GroupTable(format!("element {s} has no inverse")))?;
        }
        Ok(GroupTable { order: n, table, inverse })
    }

    /// Parses the text format: the order, then `order` rows of products; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut numbers = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                numbers.push(tok.parse::<usize>().map_err(|_| MuError::Parse(format!("bad integer {tok:?}")))?);
            }
        }
        let (&n, rest) = numbers.split_first().ok_or_else(|| MuError::Parse("missing order".into()))?;
        if rest.len() != n * n {
            return Err(MuError::Parse(format!("expected {} table entries, found {}", n * n, rest.len())));
        }
        Self::validate(rest.chunks(n).map(|r| r.to_vec()).collect())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.order);
        for row in &self.table {
            let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&r.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// `g a g⁻¹`.
    pub fn conjugate(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Cyclic group `ℤ/n`.
    pub fn cyclic(n: usize) -> Self {
        Self::validate((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).expect("cyclic table")
    }

    /// Dihedral group of order `2m`; element `r^a s^b` has index `a + m·b`.
    pub fn dihedral(m: usize) -> Self {
        let idx = |a: usize, b: usize| a % m + m * (b % 2);
        let table = (0..2 * m)
            .map(|x| {
                let (a, b) = (x % m, x / m);
                (0..2 * m)
                    .map(|y| {
                        let (c, d) = (y % m, y / m);
                        let rot = if b == 0 { a + c } else { a + m - c };
                        idx(rot, b + d)
                    })
                    .collect()
            })
            .collect();
        Self::validate(table).expect("dihedral table")
    }

    /// Quaternion group `Q8`; indices `1, −1, i, −i, j, −j, k, −k`.
    pub fn quaternion() -> Self {
        // Units 1, i, j, k as 0..4; product table of units with signs.
        let unit = [[(0, 1), (1, 1), (2, 1), (3, 1)], [(1, 1), (0, -1), (3, 1), (2, -1)], [(2, 1), (3, -1), (0, -1), (1, 1)], [(3, 1), (2, 1), (1, -1), (0, -1)]];
        let decode = |x: usize| (x / 2, if x % 2 == 0 { 1 } else { -1 });
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let ((ux, sx), (uy, sy)) = (decode(x), decode(y));
                        let (u, s) = unit[ux][uy];
                        2 * u + usize::from(s * sx * sy < 0)
                    })
                    .collect()
            })
            .collect();
        Self::validate(table).expect("quaternion table")
    }

    /// Symmetric group on `k` letters, permutations in lexicographic order.
    pub fn symmetric(k: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = vec![(0..k).collect()];
        let mut p: Vec<usize> = (0..k).collect();
        while next_permutation(&mut p) {
            perms.push(p.clone());
        }
        let index = |q: &[usize]| perms.iter().position(|r| r == q).expect("permutation");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index(&b.iter().map(|&i| a[i]).collect::<Vec<_>>())).collect())
            .collect();
        Self::validate(table).expect("symmetric table")
    }

    /// Direct product; `(a, b)` has index `a·|H| + b`.
    pub fn direct_product(g: &GroupTable, h: &GroupTable) -> Self {
        let m = h.order;
        let table = (0..g.order * m)
            .map(|x| (0..g.order * m).map(|y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m)).collect())
            .collect();
        Self::validate(table).expect("product table")
    }

    /// The fourteen groups of order at most 8, up to isomorphism.
    pub fn small_groups() -> Vec<(String, GroupTable)> {
        let z = Self::cyclic;
        vec![
            ("Z1".into(), z(1)),
            ("Z2".into(), z(2)),
            ("Z3".into(), z(3)),
            ("Z4".into(), z(4)),
            ("Z2xZ2".into(), Self::direct_product(&z(2), &z(2))),
            ("Z5".into(), z(5)),
            ("Z6".into(), z(6)),
            ("S3".into(), Self::symmetric(3)),
            ("Z7".into(), z(7)),
            ("Z8".into(), z(8)),
            ("Z4xZ2".into(), Self::direct_product(&z(4), &z(2))),
            ("Z2xZ2xZ2".into(), Self::direct_product(&Self::direct_product(&z(2), &z(2)), &z(2))),
            ("D4".into(), Self::dihedral(4)),
            ("Q8".into(), Self::quaternion()),
        ]
    }

    /// Subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> Subgroup {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier: Vec<usize> = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Subgroup { elements: set.into_iter().collect() }
    }

    /// Checks closure under product and inverse.
    pub fn subgroup_from(&self, elements: &[usize]) -> Result<Subgroup> {
        let s: BTreeSet<usize> = elements.iter().copied().collect();
        if !s.contains(&0) {
            return Err(MuError::GroupTable("subset misses the identity".into()));
        }
        for &a in &s {
            if !s.contains(&self.inv(a)) || s.iter().any(|&b| !s.contains(&self.mul(a, b))) {
                return Err(MuError::GroupTable("subset is not closed".into()));
            }
        }
        Ok(Subgroup { elements: s.into_iter().collect() })
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { elements: vec![0] }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elements: (0..self.order).collect() }
    }

    /// All subgroups, sorted by order then elements.
    ///
    /// Closure of generating sets of size at most two, then joins of pairs to a fixpoint.
    pub fn enumerate_subgroups(&self) -> Result<Vec<Subgroup>> {
        self.enumerate_subgroups_bounded(MAX_ENUMERATION_ORDER)
    }

    pub fn enumerate_subgroups_bounded(&self, bound: usize) -> Result<Vec<Subgroup>> {
        if self.order > bound {
            return Err(MuError::GroupTable(format!("order {} exceeds enumeration bound {bound}", self.order)));
        }
        let n = self.order;
        let mut found: BTreeSet<Subgroup> = BTreeSet::new();
        for a in 0..n {
            for b in a..n {
                found.insert(self.generate(&[a, b]));
            }
        }
        loop {
            let current: Vec<Subgroup> = found.iter().cloned().collect();
            let mut grew = false;
            for (i, x) in current.iter().enumerate() {
                for y in &current[i + 1..] {
                    let mut gens = x.elements.clone();
                    gens.extend_from_slice(&y.elements);
                    if found.insert(self.generate(&gens)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut out: Vec<Subgroup> = found.into_iter().collect();
        out.sort_by(|x, y| x.order().cmp(&y.order()).then(x.elements.cmp(&y.elements)));
        Ok(out)
    }

    /// `Γ' ⊴ Γ`: `Γ'` is a subgroup of `Γ` stable under conjugation by `Γ`.
    pub fn is_normal_in(&self, sub: &Subgroup, sup: &Subgroup) -> bool {
        sub.is_subset_of(sup) && sup.elements.iter().all(|&g| sub.elements.iter().all(|&a| sub.contains(self.conjugate(g, a))))
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        self.is_normal_in(sub, &self.whole())
    }

    /// Normal subgroups, by conjugation closure of each subgroup.
    pub fn normal_subgroups(&self) -> Result<Vec<Subgroup>> {
        Ok(self.enumerate_subgroups()?.into_iter().filter(|s| self.is_normal(s)).collect())
    }

    /// `N_G(Γ) = {g : gΓg⁻¹ = Γ}`.
    pub fn normalizer(&self, sub: &Subgroup) -> Subgroup {
        let elems: Vec<usize> = (0..self.order)
            .filter(|&g| sub.elements.iter().all(|&a| sub.contains(self.conjugate(g, a))))
            .collect();
        Subgroup { elements: elems }
    }

    /// Ordered pairs `(Γ₁, Γ₂)` with `Γ₁ ∩ Γ₂ = {1}` and `Γ₁Γ₂ = G`.
    pub fn matched_pairs(&self) -> Result<Vec<(Subgroup, Subgroup)>> {
        let subs = self.enumerate_subgroups()?;
        let mut out = Vec::new();
        for a in &subs {
            for b in &subs {
                if a.intersection(b).order() != 1 {
                    continue;
                }
                let products: BTreeSet<usize> =
                    a.elements.iter().flat_map(|&x| b.elements.iter().map(move |&y| (x, y))).map(|(x, y)| self.mul(x, y)).collect();
                if products.len() == self.order {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        Ok(out)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The permutation `V(δ_u⊗δ_v) = δ_{uv⁻¹}⊗δ_v`, i.e. `(Vξ)(s,t) = ξ(st,t)`.
pub fn group_unitary_matrix(g: &GroupTable) -> ComplexMatrix {
    let n = g.order;
    let mut v = ComplexMatrix::zeros(n * n, n * n);
    for u in 0..n {
        for w in 0..n {
            v[(g.mul(u, g.inv(w)) * n + w, u * n + w)] = C64::new(1.0, 0.0);
        }
    }
    v
}

/// Canonicalized group unitary.
pub fn build_group_unitary(g: &GroupTable, tol: f64) -> Result<MultiplicativeUnitary> {
    MultiplicativeUnitary::canonicalize(group_unitary_matrix(g), tol)
}

/// `f_Γ = |Γ|^{-1/2} χ_Γ`.
pub fn subgroup_to_presub(g: &GroupTable, sub: &Subgroup) -> Vec<C64> {
    let w = 1.0 / (sub.order() as f64).sqrt();
    (0..g.order)
        .map(|x| if sub.contains(x) { C64::new(w, 0.0) } else { C64::new(0.0, 0.0) })
        .collect()
}
