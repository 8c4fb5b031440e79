//! Reid's tower of blow-ups along the center curves, and the effectivity
//! models for the curve classes of the first blow-up lying over the center.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::CurveClass;

/// Exceptional surface type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceType {
    /// `P^1 x P^1`, the fiber over a curve of the current level's last blow-up.
    F0,
    /// The Hirzebruch surface `F_2`, blown up again at the next level.
    F2,
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceType::F0 => "F0",
            SurfaceType::F2 => "F2",
        })
    }
}

/// One level `X_d` of the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub d: u32,
    /// `k_d`, the number of curves blown up to reach this level.
    pub k: usize,
    /// Types of `E_{d,1}, ..., E_{d,k_d}`.
    pub surfaces: Vec<SurfaceType>,
    /// Ambient rank of `H_2(X_d)` in the tower coordinates.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReidTower {
    widths: Vec<u32>,
    base_rank: usize,
    levels: Vec<Level>,
}

/// `build_reid_tower`: levels `1..=w` for widths sorted widest first.
///
/// Coordinates of `H_2(X_d)` are those of `H_2(X)` followed by one fiber
/// coordinate per exceptional surface of levels `1..=d`.
pub fn build_reid_tower(widths: &[u32], base_rank: usize) -> Result<ReidTower> {
    if widths.is_empty() {
        return Err(Error::InvalidWidths("at least one center curve is required".into()));
    }
    if widths.contains(&0) || widths.windows(2).any(|p| p[0] < p[1]) {
        return Err(Error::InvalidWidths("widths must be positive and sorted widest first".into()));
    }
    let k = |d: u32| widths.iter().filter(|&&w| w >= d).count();
    let mut levels = Vec::new();
    let mut rank = base_rank;
    for d in 1..=widths[0] {
        let (kd, next) = (k(d), k(d + 1));
        rank += kd;
        let surfaces = (1..=kd).map(|i| if i <= next { SurfaceType::F2 } else { SurfaceType::F0 }).collect();
        levels.push(Level { d, k: kd, surfaces, rank });
    }
    Ok(ReidTower { widths: widths.to_vec(), base_rank, levels })
}

impl ReidTower {
    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    pub fn depth(&self) -> u32 {
        self.widths[0]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, d: u32) -> Option<&Level> {
        if d == 0 {
            return None;
        }
        self.levels.get(d as usize - 1)
    }

    /// `k_d`; `k_0` is the number of center curves.
    pub fn k(&self, d: u32) -> usize {
        self.widths.iter().filter(|&&w| w >= d.max(1)).count()
    }

    /// Ambient rank of `H_2(X_d)`.
    pub fn rank(&self, d: u32) -> usize {
        match self.level(d) {
            Some(l) => l.rank,
            None => self.base_rank,
        }
    }

    /// Widths of the center of the flop `f_d: X_d --> X'_d`.
    pub fn level_widths(&self, d: u32) -> Vec<u32> {
        self.widths.iter().filter(|&&w| w > d).map(|&w| w - d).collect()
    }

    fn check_rank(&self, d: u32, beta: &CurveClass) -> Result<()> {
        if beta.rank() != self.rank(d) {
            return Err(Error::LatticeMismatch);
        }
        Ok(())
    }

    /// `phi_{d+1}^!`: `H_2(X_d) -> H_2(X_{d+1})`.
    pub fn pullback_class(&self, d: u32, beta: &CurveClass) -> Result<CurveClass> {
        self.check_rank(d, beta)?;
        if d >= self.depth() {
            return Err(Error::Invalid(format!("level {d} is the top of the tower")));
        }
        let mut c = beta.0.clone();
        c.resize(self.rank(d + 1), 0);
        Ok(CurveClass(c))
    }

    /// `phi_{d+1*}`: `H_2(X_{d+1}) -> H_2(X_d)`.
    pub fn pushforward(&self, d: u32, beta: &CurveClass) -> Result<CurveClass> {
        if d >= self.depth() {
            return Err(Error::Invalid(format!("level {d} is the top of the tower")));
        }
        self.check_rank(d + 1, beta)?;
        Ok(CurveClass(beta.0[..self.rank(d)].to_vec()))
    }

    /// The cone of level-1 curve classes over the center, as a [`ConeModel`]
    /// in the coordinates `(a_1, b_1, ..., a_l, b_l)` where `a_i` counts
    /// `phi^! C_i` and `b_i` the fiber of `E_{1,i}`.
    pub fn level1_cone(&self) -> ConeModel {
        let surfaces = &self.levels[0].surfaces;
        let l = surfaces.len();
        let mut generators = Vec::new();
        let mut grading = vec![0; 2 * l];
        for (i, s) in surfaces.iter().enumerate() {
            let unit = |a: i64, b: i64| {
                let mut v = vec![0; 2 * l];
                v[2 * i] = a;
                v[2 * i + 1] = b;
                v
            };
            generators.push(unit(0, 1));
            generators.push(match s {
                SurfaceType::F2 => unit(1, 0),
                SurfaceType::F0 => unit(1, 1),
            });
            grading[2 * i] = 2;
            grading[2 * i + 1] = 1;
        }
        ConeModel::new(generators, grading).expect("grading is positive on the surface cones")
    }

    /// `phi^! beta` in [`ReidTower::level1_cone`] coordinates, for `beta`
    /// given in center coordinates.
    pub fn center_pullback(&self, center_coords: &[i64]) -> Result<Vec<i64>> {
        if center_coords.len() != self.widths.len() {
            return Err(Error::LatticeMismatch);
        }
        Ok(center_coords.iter().flat_map(|&a| [a, 0]).collect())
    }
}

/// Verdict of a bounded effectivity search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Effectivity {
    Effective,
    NotEffective,
    /// The search budget ran out.
    Unknown,
}

/// A finitely generated cone with a grading strictly positive on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeModel {
    generators: Vec<Vec<i64>>,
    grading: Vec<i64>,
}

impl ConeModel {
    pub fn new(generators: Vec<Vec<i64>>, grading: Vec<i64>) -> Result<Self> {
        for g in &generators {
            if g.len() != grading.len() {
                return Err(Error::LatticeMismatch);
            }
            if dot(g, &grading) <= 0 {
                return Err(Error::Invalid(format!("grading is not positive on generator {g:?}")));
            }
        }
        Ok(ConeModel { generators, grading })
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn grading(&self) -> &[i64] {
        &self.grading
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `effectivity_test`: is `beta` a non-negative integer combination of the
/// generators? Visits at most `node_bound` search nodes.
pub fn effectivity_test(cone: &ConeModel, beta: &[i64], node_bound: usize) -> Result<Effectivity> {
    if beta.len() != cone.grading.len() {
        return Err(Error::LatticeMismatch);
    }
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![beta.to_vec()];
    let mut nodes = 0usize;
    while let Some(rest) = stack.pop() {
        if rest.iter().all(|&x| x == 0) {
            return Ok(Effectivity::Effective);
        }
        if dot(&rest, &cone.grading) <= 0 || !seen.insert(rest.clone()) {
            continue;
        }
        nodes += 1;
        if nodes > node_bound {
            return Ok(Effectivity::Unknown);
        }
        for g in &cone.generators {
            stack.push(rest.iter().zip(g).map(|(x, y)| x - y).collect());
        }
    }
    Ok(Effectivity::NotEffective)
}

/// Nonzero center coordinate vectors with entries in `0..=bound`.
pub fn center_box(l: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..l {
        out = out.into_iter().flat_map(|v| (0..=bound).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    out.retain(|v| v.iter().any(|&a| a != 0));
    out
}

/// Outcome of a lemma check over a coordinate box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub checked: usize,
    /// Classes (center coordinates) contradicting the lemma, with the verdict found.
    pub failures: Vec<(Vec<i64>, Effectivity)>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For width-one centers: `phi^! beta` is never effective for `0 != beta` in
/// `Cen(f)`, so the level-1 center series is `1`.
pub fn check_width_one_lemma(tower: &ReidTower, coord_bound: i64, node_bound: usize) -> Result<LemmaReport> {
    if tower.depth() != 1 {
        return Err(Error::InvalidWidths("all widths must equal one".into()));
    }
    check_support_lemma(tower, coord_bound, node_bound)
}

/// `phi^! beta` is effective exactly when `beta` lies in the span of the
/// center curves of width at least two.
pub fn check_support_lemma(tower: &ReidTower, coord_bound: i64, node_bound: usize) -> Result<LemmaReport> {
    let cone = tower.level1_cone();
    let wide = tower.k(2);
    let mut report = LemmaReport { checked: 0, failures: Vec::new() };
    for beta in center_box(tower.widths().len(), coord_bound) {
        let pulled = tower.center_pullback(&beta)?;
        let verdict = effectivity_test(&cone, &pulled, node_bound)?;
        let expected = if beta[wide..].iter().all(|&a| a == 0) { Effectivity::Effective } else { Effectivity::NotEffective };
        report.checked += 1;
        if verdict != expected {
            report.failures.push((beta, verdict));
        }
    }
    Ok(report)
}

/// `H = sum_i (2 a_i + b_i)` on level-1 cone coordinates.
pub fn grading_witness(coords: &[i64]) -> i64 {
    coords.chunks(2).map(|c| 2 * c[0] + c.get(1).copied().unwrap_or(0)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use SurfaceType::*;

    #[test]
    fn tower_shapes() {
        let t = build_reid_tower(&[1], 1).unwrap();
        assert_eq!(t.levels().len(), 1);
        assert_eq!(t.levels()[0].surfaces, vec![F0]);
        let t = build_reid_tower(&[2], 1).unwrap();
        assert_eq!(t.levels()[0].surfaces, vec![F2]);
        assert_eq!(t.levels()[1].surfaces, vec![F0]);
        let t = build_reid_tower(&[3, 2, 1], 3).unwrap();
        let types: Vec<_> = t.levels().iter().map(|l| l.surfaces.clone()).collect();
        assert_eq!(types, vec![vec![F2, F2, F0], vec![F2, F0], vec![F0]]);
        assert_eq!(t.rank(3), 3 + 3 + 2 + 1);
        assert_eq!(t.level_widths(1), vec![2, 1]);
        assert!(build_reid_tower(&[1, 2], 2).is_err());
        assert!(build_reid_tower(&[], 0).is_err());
    }

    #[test]
    fn pullback_pushforward() {
        let t = build_reid_tower(&[2, 1], 2).unwrap();
        let b = CurveClass(vec![3, -1]);
        let up = t.pullback_class(0, &b).unwrap();
        assert_eq!(up.rank(), 4);
        assert_eq!(t.pushforward(0, &up).unwrap(), b);
        assert!(t.pullback_class(2, &CurveClass(vec![0; 5])).is_err());
    }

    #[test]
    fn lemmas_hold_on_small_boxes() {
        let t = build_reid_tower(&[1, 1], 2).unwrap();
        assert!(check_width_one_lemma(&t, 3, 10_000).unwrap().passed());
        let t = build_reid_tower(&[2, 1], 2).unwrap();
        assert!(check_width_one_lemma(&t, 3, 10_000).is_err());
        assert!(check_support_lemma(&t, 3, 10_000).unwrap().passed());
    }

    #[test]
    fn effectivity_budget() {
        let cone = ConeModel::new(vec![vec![1, 0], vec![0, 1]], vec![1, 1]).unwrap();
        assert_eq!(effectivity_test(&cone, &[2, 3], 100).unwrap(), Effectivity::Effective);
        assert_eq!(effectivity_test(&cone, &[2, -1], 100).unwrap(), Effectivity::NotEffective);
        assert_eq!(effectivity_test(&cone, &[40, 40], 3).unwrap(), Effectivity::Unknown);
        assert!(ConeModel::new(vec![vec![1, -1]], vec![1, 1]).is_err());
        assert_eq!(grading_witness(&[1, 1, 0, 1]), 4);
    }
}
