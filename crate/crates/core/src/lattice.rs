//! Curve-class lattices with a simplicial effective cone.
//!
//! Classes are integer vectors in an ambient coordinate system. A [`Lattice`]
//! is spanned by linearly independent effective generators, each carrying a
//! grading weight; a class is effective when its coordinates in the generator
//! basis are nonnegative integers.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn zero(rank: usize) -> Self {
        CurveClass(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        CurveClass(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        CurveClass(self.0.iter().map(|a| a * k).collect())
    }

    /// `self / r` when every coordinate is divisible.
    pub fn div_exact(&self, r: i64) -> Option<Self> {
        if r == 0 || self.0.iter().any(|a| a % r != 0) {
            return None;
        }
        Some(CurveClass(self.0.iter().map(|a| a / r).collect()))
    }
}

impl From<Vec<i64>> for CurveClass {
    fn from(v: Vec<i64>) -> Self {
        CurveClass(v)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Integer linear functional on ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearFunctional(pub Vec<i64>);

impl LinearFunctional {
    pub fn zero(rank: usize) -> Self {
        LinearFunctional(vec![0; rank])
    }

    pub fn eval(&self, beta: &CurveClass) -> i64 {
        self.0.iter().zip(&beta.0).map(|(a, b)| a * b).sum()
    }

    pub fn compose(&self, map: &LatticeMap) -> LinearFunctional {
        LinearFunctional(
            (0..map.source_rank()).map(|j| self.0.iter().zip(&map.rows).map(|(a, row)| a * row[j]).sum()).collect(),
        )
    }
}

/// Integer matrix acting on ambient coordinates (columns are images of the
/// coordinate vectors).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeMap {
    rows: Vec<Vec<i64>>,
}

impl LatticeMap {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLattice("ragged matrix".into()));
        }
        Ok(LatticeMap { rows })
    }

    pub fn identity(n: usize) -> Self {
        LatticeMap { rows: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect() }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn source_rank(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn target_rank(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, beta: &CurveClass) -> CurveClass {
        CurveClass(self.rows.iter().map(|row| row.iter().zip(&beta.0).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn compose(&self, inner: &LatticeMap) -> LatticeMap {
        let n = inner.source_rank();
        LatticeMap {
            rows: self
                .rows
                .iter()
                .map(|row| (0..n).map(|j| row.iter().zip(&inner.rows).map(|(a, r)| a * r[j]).sum()).collect())
                .collect(),
        }
    }

    pub fn determinant(&self) -> Option<i64> {
        if self.target_rank() != self.source_rank() {
            return None;
        }
        Some(determinant(&self.rows))
    }

    /// Inverse of a unimodular square matrix.
    pub fn inverse(&self) -> Result<LatticeMap> {
        match self.determinant() {
            Some(d @ (1 | -1)) => {
                let adj = adjugate(&self.rows);
                Ok(LatticeMap { rows: adj.into_iter().map(|r| r.into_iter().map(|x| x * d).collect()).collect() })
            }
            _ => Err(Error::InvalidFlop("map is not a lattice isomorphism".into())),
        }
    }
}

fn determinant(m: &[Vec<i64>]) -> i64 {
    // Bareiss fraction-free elimination.
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c]).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = s * determinant(&minor);
        }
    }
    adj
}

/// A rank-`k` lattice inside an ambient `Z^n`, with effective cone spanned by
/// `k` independent generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient: usize,
    generators: Vec<CurveClass>,
    weights: Vec<u32>,
    pivots: Vec<usize>,
    adj: Vec<Vec<i64>>,
    det: i64,
}

impl Lattice {
    pub fn new(generators: Vec<Vec<i64>>, weights: Vec<u32>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidLattice("no generators".into()));
        }
        if generators.len() != weights.len() {
            return Err(Error::InvalidLattice("one weight per generator required".into()));
        }
        let ambient = generators[0].len();
        if generators.iter().any(|g| g.len() != ambient) {
            return Err(Error::InvalidLattice("generators of different lengths".into()));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(Error::InvalidLattice(format!("generator {i} has weight 0")));
        }
        for (i, g) in generators.iter().enumerate() {
            let gcd = g.iter().fold(0i64, |acc, &x| acc.gcd(&x));
            if gcd != 1 {
                return Err(Error::InvalidLattice(format!("generator {i} is not primitive")));
            }
        }
        let k = generators.len();
        let pivots = pivot_rows(&generators, ambient)
            .ok_or_else(|| Error::InvalidLattice("generators are linearly dependent".into()))?;
        let sub: Vec<Vec<i64>> = pivots.iter().map(|&r| (0..k).map(|c| generators[c][r]).collect()).collect();
        let det = determinant(&sub);
        let adj = adjugate(&sub);
        Ok(Lattice {
            ambient,
            generators: generators.into_iter().map(CurveClass).collect(),
            weights,
            pivots,
            adj,
            det,
        })
    }

    /// `Z^k` with the coordinate vectors as generators.
    pub fn standard(weights: Vec<u32>) -> Result<Self> {
        let k = weights.len();
        Self::new((0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect(), weights)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[CurveClass] {
        &self.generators
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn zero(&self) -> CurveClass {
        CurveClass::zero(self.ambient)
    }

    /// Coordinates in the generator basis, if `beta` lies in the lattice.
    pub fn cone_coords(&self, beta: &CurveClass) -> Option<Vec<i64>> {
        if beta.rank() != self.ambient {
            return None;
        }
        let k = self.rank();
        let rhs: Vec<i128> = self.pivots.iter().map(|&r| beta.0[r] as i128).collect();
        let mut coords = Vec::with_capacity(k);
        for row in &self.adj {
            let num: i128 = row.iter().zip(&rhs).map(|(&a, b)| a as i128 * b).sum();
            if num % self.det as i128 != 0 {
                return None;
            }
            coords.push((num / self.det as i128) as i64);
        }
        (self.from_cone(&coords) == *beta).then_some(coords)
    }

    pub fn from_cone(&self, coords: &[i64]) -> CurveClass {
        let mut out = vec![0; self.ambient];
        for (g, &a) in self.generators.iter().zip(coords) {
            for (o, x) in out.iter_mut().zip(&g.0) {
                *o += a * x;
            }
        }
        CurveClass(out)
    }

    pub fn contains(&self, beta: &CurveClass) -> bool {
        self.cone_coords(beta).is_some()
    }

    pub fn is_effective(&self, beta: &CurveClass) -> bool {
        self.cone_coords(beta).is_some_and(|a| a.iter().all(|&x| x >= 0))
    }

    /// Weighted coordinate sum; defined on the whole lattice.
    pub fn degree(&self, beta: &CurveClass) -> Option<i64> {
        self.cone_coords(beta).map(|a| self.degree_of_coords(&a))
    }

    fn degree_of_coords(&self, a: &[i64]) -> i64 {
        a.iter().zip(&self.weights).map(|(x, &w)| x * w as i64).sum()
    }

    /// All effective classes of degree at most `bound`, ordered by degree and
    /// then lexicographically.
    pub fn effective_classes(&self, bound: u32) -> Vec<CurveClass> {
        let mut out = Vec::new();
        let mut a = vec![0i64; self.rank()];
        self.enumerate(0, bound as i64, &mut a, &mut out);
        out.sort_by(|x, y| self.order_key(x).cmp(&self.order_key(y)));
        out
    }

    fn enumerate(&self, i: usize, budget: i64, a: &mut Vec<i64>, out: &mut Vec<CurveClass>) {
        if i == a.len() {
            out.push(self.from_cone(a));
            return;
        }
        let w = self.weights[i] as i64;
        for x in 0..=budget / w {
            a[i] = x;
            self.enumerate(i + 1, budget - x * w, a, out);
        }
        a[i] = 0;
    }

    /// Sort key: degree first, then coordinates.
    pub fn order_key<'a>(&self, beta: &'a CurveClass) -> (i64, &'a [i64]) {
        (self.degree(beta).unwrap_or(i64::MAX), beta.coords())
    }

    /// Positive integers `r` with `beta / r` a lattice class.
    pub fn divisors(&self, beta: &CurveClass) -> Result<Vec<u32>> {
        let a = self.cone_coords(beta).ok_or_else(|| Error::NotEffective(beta.0.clone()))?;
        if a.iter().all(|&x| x == 0) {
            return Err(Error::ZeroClass);
        }
        let g = a.iter().fold(0i64, |acc, &x| acc.gcd(&x)) as u32;
        Ok((1..=g).filter(|r| g.is_multiple_of(*r)).collect())
    }

    /// `beta / r` as a lattice class.
    pub fn divide(&self, beta: &CurveClass, r: u32) -> Option<CurveClass> {
        let a = self.cone_coords(beta)?;
        let r = r as i64;
        if a.iter().any(|x| x % r != 0) {
            return None;
        }
        Some(self.from_cone(&a.iter().map(|x| x / r).collect::<Vec<_>>()))
    }
}

fn pivot_rows(generators: &[Vec<i64>], ambient: usize) -> Option<Vec<usize>> {
    let k = generators.len();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut pivots = Vec::new();
    for r in 0..ambient {
        chosen.push((0..k).map(|c| generators[c][r]).collect());
        if rank(&chosen) == chosen.len() {
            pivots.push(r);
            if pivots.len() == k {
                return Some(pivots);
            }
        } else {
            chosen.pop();
        }
    }
    None
}

fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            if a[i][c] != 0 {
                let (x, y) = (a[rank][c], a[i][c]);
                let row: Vec<i128> = a[i].iter().zip(&a[rank]).map(|(&u, &v)| u * x - v * y).collect();
                let g = row.iter().fold(0i128, |acc, &v| acc.gcd(&v)).max(1);
                a[i] = row.into_iter().map(|v| v / g).collect();
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cls(v: &[i64]) -> CurveClass {
        CurveClass(v.to_vec())
    }

    #[test]
    fn standard_lattice_divisors() {
        let l = Lattice::standard(vec![1]).unwrap();
        assert_eq!(l.divisors(&cls(&[1])).unwrap(), vec![1]);
        assert_eq!(l.divisors(&cls(&[6])).unwrap(), vec![1, 2, 3, 6]);
        let l2 = Lattice::standard(vec![1, 1]).unwrap();
        assert_eq!(l2.divisors(&cls(&[2, 3])).unwrap(), vec![1]);
        assert_eq!(l2.divisors(&cls(&[0, 0])), Err(Error::ZeroClass));
    }

    #[test]
    fn face_lattice_coordinates() {
        // generators (1,1,0) and (0,1,1) in Z^3
        let l = Lattice::new(vec![vec![1, 1, 0], vec![0, 1, 1]], vec![1, 2]).unwrap();
        assert_eq!(l.cone_coords(&cls(&[2, 5, 3])), Some(vec![2, 3]));
        assert_eq!(l.degree(&cls(&[2, 5, 3])), Some(8));
        assert_eq!(l.cone_coords(&cls(&[1, 0, 0])), None);
        assert!(!l.is_effective(&cls(&[-1, 0, 1])));
        assert!(l.contains(&cls(&[-1, 0, 1])));
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(Lattice::new(vec![vec![1, 0], vec![2, 0]], vec![1, 1]).is_err());
        assert!(Lattice::new(vec![vec![2, 0]], vec![1]).is_err());
        assert!(Lattice::new(vec![vec![1, 0]], vec![0]).is_err());
    }

    #[test]
    fn effective_enumeration_is_ordered() {
        let l = Lattice::standard(vec![1, 2]).unwrap();
        let cs = l.effective_classes(3);
        let expect: Vec<CurveClass> =
            [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [3, 0]].iter().map(|v| cls(v)).collect();
        assert_eq!(cs, expect);
    }

    #[test]
    fn unimodular_inverse() {
        let f = LatticeMap::from_rows(vec![vec![-1, 1], vec![0, 1]]).unwrap();
        assert_eq!(f.determinant(), Some(-1));
        let g = f.inverse().unwrap();
        assert_eq!(g.compose(&f), LatticeMap::identity(2));
        let skew = LatticeMap::from_rows(vec![vec![2, 0], vec![0, 1]]).unwrap();
        assert!(skew.inverse().is_err());
    }

    #[test]
    fn determinant_three_by_three() {
        let m = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(determinant(&m), 4);
    }

    #[test]
    fn functional_pullback() {
        let c1 = LinearFunctional(vec![0, 1]);
        let f = LatticeMap::from_rows(vec![vec![-1, 1], vec![0, 1]]).unwrap();
        let pulled = c1.compose(&f);
        let b = cls(&[3, 2]);
        assert_eq!(pulled.eval(&b), c1.eval(&f.apply(&b)));
    }
}
