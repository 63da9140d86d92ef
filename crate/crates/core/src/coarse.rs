//! Finite metric spaces and their coarse separations.
//!
//! Conventions follow the usual ones: the open neighbourhood
//! `N_R(A) = {x : d(x, A) < R}` is strict while the `r`-boundary
//! `∂_r C = {x not in C : d(x, C) <= r}` is not. Distances to the empty set
//! are infinite and are represented by `None`.
//!
//! Graph metrics are never tabulated: distances come from (multi-source,
//! possibly radius-bounded) Dijkstra runs on demand.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::cmp::Reverse;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bass_serre::TreeBall;

/// Largest number of points a space may have.
pub const POINT_CAP: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoarseError {
    EmptyDims,
    ZeroSide,
    TooLarge { points: usize, cap: usize },
    PointOutOfRange(usize),
    NonPositiveWeight { u: usize, v: usize },
    NotMetric(String),
    /// The default deep threshold needs every point at finite distance from `A`.
    InfiniteDiameter,
    Precondition(String),
}

impl fmt::Display for CoarseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoarseError::EmptyDims => write!(f, "grid needs at least one side"),
            CoarseError::ZeroSide => write!(f, "grid sides must be at least 1"),
            CoarseError::TooLarge { points, cap } => write!(f, "{points} points exceed the cap of {cap}"),
            CoarseError::PointOutOfRange(p) => write!(f, "point {p} is not in the space"),
            CoarseError::NonPositiveWeight { u, v } => write!(f, "edge {u}-{v} has a non-positive weight"),
            CoarseError::NotMetric(m) => write!(f, "not a metric: {m}"),
            CoarseError::InfiniteDiameter => write!(f, "some point is unreachable from A; give the deep threshold explicitly"),
            CoarseError::Precondition(m) => write!(f, "precondition violated: {m}"),
        }
    }
}

impl core::error::Error for CoarseError {}

#[derive(Clone, Debug)]
enum Metric {
    Graph(Vec<Vec<(usize, BigRational)>>),
    Explicit(Vec<Vec<BigRational>>),
}

/// A finite metric space on the points `0..len`.
#[derive(Clone, Debug)]
pub struct FiniteCoarseSpace {
    len: usize,
    metric: Metric,
    /// Filled in closed form for grids, balls and products, else on first
    /// use; `None` inside means infinite.
    diameter: OnceCell<Option<BigRational>>,
}

fn rat(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn check_len(len: usize) -> Result<(), CoarseError> {
    if len > POINT_CAP {
        return Err(CoarseError::TooLarge { points: len, cap: POINT_CAP });
    }
    Ok(())
}

/// Integer box `[0, d1) x ... x [0, dk)` with unit edges (the `L^1` metric).
/// Points are numbered row-major, last coordinate fastest.
pub fn build_grid(dims: &[usize]) -> Result<FiniteCoarseSpace, CoarseError> {
    if dims.is_empty() {
        return Err(CoarseError::EmptyDims);
    }
    if dims.contains(&0) {
        return Err(CoarseError::ZeroSide);
    }
    let len = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    check_len(len)?;
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len() - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut adj = vec![Vec::new(); len];
    for (p, nbrs) in adj.iter_mut().enumerate() {
        for (axis, &d) in dims.iter().enumerate() {
            let coord = (p / strides[axis]) % d;
            if coord > 0 {
                nbrs.push((p - strides[axis], BigRational::one()));
            }
            if coord + 1 < d {
                nbrs.push((p + strides[axis], BigRational::one()));
            }
        }
    }
    let diam = dims.iter().map(|d| d - 1).sum::<usize>();
    Ok(FiniteCoarseSpace {
        len,
        metric: Metric::Graph(adj),
        diameter: OnceCell::from(Some(rat(diam as i64))),
    })
}

/// The tree ball as a graph with unit edges.
pub fn tree_space(ball: &TreeBall) -> FiniteCoarseSpace {
    let adj = (0..ball.len())
        .map(|v| ball.neighbors(v).iter().map(|(u, _)| (*u, BigRational::one())).collect())
        .collect();
    // the base vertex has at least two neighbours, so two leaves meet only there
    let diam = if ball.radius() == 0 || ball.neighbors(0).len() < 2 { None } else { Some(rat(2 * ball.radius() as i64)) };
    let diameter = diam.map(|d| OnceCell::from(Some(d))).unwrap_or_default();
    FiniteCoarseSpace { len: ball.len(), metric: Metric::Graph(adj), diameter }
}

/// `ball x box` with the sum metric. Point `(v, p)` has id `v * box.len() + p`.
pub fn build_tree_product(ball: &TreeBall, factor: &FiniteCoarseSpace) -> Result<FiniteCoarseSpace, CoarseError> {
    product(&tree_space(ball), factor)
}

/// Product with the sum (`L^1`) metric; point `(x, y)` has id `x * b.len() + y`.
pub fn product(a: &FiniteCoarseSpace, b: &FiniteCoarseSpace) -> Result<FiniteCoarseSpace, CoarseError> {
    let len = a.len.saturating_mul(b.len);
    check_len(len)?;
    let diameter = match (a.diameter.get(), b.diameter.get()) {
        (Some(Some(x)), Some(Some(y))) => OnceCell::from(Some(x + y)),
        _ => OnceCell::new(),
    };
    let metric = match (&a.metric, &b.metric) {
        (Metric::Graph(ga), Metric::Graph(gb)) => {
            let mut adj = vec![Vec::new(); len];
            for x in 0..a.len {
                for y in 0..b.len {
                    let id = x * b.len + y;
                    for (x2, w) in &ga[x] {
                        adj[id].push((x2 * b.len + y, w.clone()));
                    }
                    for (y2, w) in &gb[y] {
                        adj[id].push((x * b.len + y2, w.clone()));
                    }
                }
            }
            Metric::Graph(adj)
        }
        _ => {
            let da = a.distance_matrix();
            let db = b.distance_matrix();
            let mut d = vec![vec![BigRational::zero(); len]; len];
            for (i, row) in d.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    let (x1, y1) = (i / b.len, i % b.len);
                    let (x2, y2) = (j / b.len, j % b.len);
                    match (&da[x1][x2], &db[y1][y2]) {
                        (Some(p), Some(q)) => *entry = p + q,
                        _ => return Err(CoarseError::NotMetric("product of disconnected explicit spaces".into())),
                    }
                }
            }
            Metric::Explicit(d)
        }
    };
    Ok(FiniteCoarseSpace { len, metric, diameter })
}

impl FiniteCoarseSpace {
    /// Shortest-path metric of an undirected graph with positive weights.
    pub fn from_graph(points: usize, edges: &[(usize, usize, BigRational)]) -> Result<Self, CoarseError> {
        check_len(points)?;
        let mut adj = vec![Vec::new(); points];
        for (u, v, w) in edges {
            for &p in [u, v] {
                if p >= points {
                    return Err(CoarseError::PointOutOfRange(p));
                }
            }
            if !w.is_positive() {
                return Err(CoarseError::NonPositiveWeight { u: *u, v: *v });
            }
            adj[*u].push((*v, w.clone()));
            adj[*v].push((*u, w.clone()));
        }
        Ok(FiniteCoarseSpace { len: points, metric: Metric::Graph(adj), diameter: OnceCell::new() })
    }

    /// An explicit distance matrix; the metric axioms are checked exactly.
    pub fn from_matrix(d: Vec<Vec<BigRational>>) -> Result<Self, CoarseError> {
        let n = d.len();
        check_len(n)?;
        if d.iter().any(|r| r.len() != n) {
            return Err(CoarseError::NotMetric("matrix is not square".into()));
        }
        for i in 0..n {
            if !d[i][i].is_zero() {
                return Err(CoarseError::NotMetric(alloc::format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                if d[i][j] != d[j][i] {
                    return Err(CoarseError::NotMetric(alloc::format!("d({i},{j}) != d({j},{i})")));
                }
                if i != j && !d[i][j].is_positive() {
                    return Err(CoarseError::NotMetric(alloc::format!("d({i},{j}) <= 0")));
                }
                for k in 0..n {
                    if d[i][k] > &d[i][j] + &d[j][k] {
                        return Err(CoarseError::NotMetric(alloc::format!("triangle inequality fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(FiniteCoarseSpace { len: n, metric: Metric::Explicit(d), diameter: OnceCell::new() })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Edge list of a graph space (each edge once), `None` for explicit metrics.
    pub fn graph_edges(&self) -> Option<Vec<(usize, usize, BigRational)>> {
        match &self.metric {
            Metric::Graph(adj) => Some(
                adj.iter()
                    .enumerate()
                    .flat_map(|(u, nb)| nb.iter().filter(move |(v, _)| u < *v).map(move |(v, w)| (u, *v, w.clone())))
                    .collect(),
            ),
            Metric::Explicit(_) => None,
        }
    }

    fn mask(&self, set: &[usize]) -> Result<Vec<bool>, CoarseError> {
        let mut m = vec![false; self.len];
        for &p in set {
            if p >= self.len {
                return Err(CoarseError::PointOutOfRange(p));
            }
            m[p] = true;
        }
        Ok(m)
    }

    /// `d(x, sources)` for every `x`, exploring no farther than `bound`.
    fn dist_from(&self, sources: &[bool], bound: Option<&BigRational>) -> Vec<Option<BigRational>> {
        match &self.metric {
            Metric::Explicit(d) => (0..self.len)
                .map(|x| {
                    (0..self.len)
                        .filter(|&a| sources[a])
                        .map(|a| d[x][a].clone())
                        .min()
                        .filter(|v| bound.is_none_or(|b| v <= b))
                })
                .collect(),
            Metric::Graph(adj) => {
                let mut dist: Vec<Option<BigRational>> = vec![None; self.len];
                let mut heap = BinaryHeap::new();
                for (p, _) in sources.iter().enumerate().filter(|(_, s)| **s) {
                    dist[p] = Some(BigRational::zero());
                    heap.push(Reverse((BigRational::zero(), p)));
                }
                while let Some(Reverse((d, u))) = heap.pop() {
                    if dist[u].as_ref().is_some_and(|best| &d > best) {
                        continue;
                    }
                    for (v, w) in &adj[u] {
                        let nd = &d + w;
                        if bound.is_some_and(|b| &nd > b) {
                            continue;
                        }
                        if dist[*v].as_ref().is_none_or(|cur| &nd < cur) {
                            dist[*v] = Some(nd.clone());
                            heap.push(Reverse((nd, *v)));
                        }
                    }
                }
                dist
            }
        }
    }

    /// `d(x, set)` for every point; `None` is infinite.
    pub fn distances_to(&self, set: &[usize]) -> Result<Vec<Option<BigRational>>, CoarseError> {
        Ok(self.dist_from(&self.mask(set)?, None))
    }

    pub fn distance(&self, x: usize, y: usize) -> Result<Option<BigRational>, CoarseError> {
        Ok(self.distances_to(&[x])?[y].take())
    }

    fn distance_matrix(&self) -> Vec<Vec<Option<BigRational>>> {
        (0..self.len)
            .map(|x| {
                let mut src = vec![false; self.len];
                src[x] = true;
                self.dist_from(&src, None)
            })
            .collect()
    }

    /// Largest distance; `None` when the space is disconnected or empty.
    pub fn diameter(&self) -> Option<BigRational> {
        self.diameter.get_or_init(|| self.compute_diameter()).clone()
    }

    fn compute_diameter(&self) -> Option<BigRational> {
        let mut best = BigRational::zero();
        for row in self.distance_matrix() {
            for d in row {
                let d = d?;
                if d > best {
                    best = d;
                }
            }
        }
        if self.len == 0 {
            return None;
        }
        Some(best)
    }

    /// `N_r(A) = {x : d(x, A) < r}`.
    pub fn neighborhood(&self, a: &[usize], r: &BigRational) -> Result<Vec<usize>, CoarseError> {
        let d = self.dist_from(&self.mask(a)?, Some(r));
        Ok(collect_where(&d, |v| v.as_ref().is_some_and(|v| v < r)))
    }

    /// `∂_r C = {x not in C : d(x, C) <= r}`.
    pub fn boundary(&self, c: &[usize], r: &BigRational) -> Result<Vec<usize>, CoarseError> {
        let mask = self.mask(c)?;
        let d = self.dist_from(&mask, Some(r));
        Ok((0..self.len)
            .filter(|&x| !mask[x] && d[x].as_ref().is_some_and(|v| v <= r))
            .collect())
    }

    /// Maximal `s`-path connected pieces of `set` (distances measured in the
    /// whole space). Components are sorted, and listed by smallest point.
    pub fn s_components(&self, set: &[usize], s: &BigRational) -> Result<Vec<Vec<usize>>, CoarseError> {
        let mask = self.mask(set)?;
        let mut uf = UnionFind::new(self.len);
        let members: Vec<usize> = (0..self.len).filter(|&p| mask[p]).collect();
        match &self.metric {
            Metric::Explicit(d) => {
                for (i, &x) in members.iter().enumerate() {
                    for &y in &members[i + 1..] {
                        if &d[x][y] <= s {
                            uf.union(x, y);
                        }
                    }
                }
            }
            Metric::Graph(_) => {
                let mut src = vec![false; self.len];
                for &x in &members {
                    src[x] = true;
                    let d = self.dist_from(&src, Some(s));
                    src[x] = false;
                    for (y, dy) in d.iter().enumerate() {
                        if mask[y] && dy.is_some() {
                            uf.union(x, y);
                        }
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &x in &members {
            groups.entry(uf.find(x)).or_default().push(x);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        Ok(comps)
    }

    pub fn is_s_connected(&self, s: &BigRational) -> bool {
        let all: Vec<usize> = (0..self.len).collect();
        self.s_components(&all, s).map(|c| c.len() <= 1).unwrap_or(false)
    }

    /// For `r = 1..=r_max`, the least integer `ρ >= 0` with `∂_r C ⊆ N_ρ(A)`.
    pub fn coarse_complement_profile(
        &self,
        c: &[usize],
        a: &[usize],
        r_max: usize,
    ) -> Result<Vec<Profile>, CoarseError> {
        let c_mask = self.mask(c)?;
        let to_c = self.dist_from(&c_mask, None);
        let to_a = self.dist_from(&self.mask(a)?, None);
        let diam = self.diameter();
        let mut out = Vec::with_capacity(r_max);
        for r in 1..=r_max {
            let r = rat(r as i64);
            let mut worst: Option<Option<BigRational>> = None;
            for x in 0..self.len {
                if c_mask[x] || to_c[x].as_ref().is_none_or(|d| d > &r) {
                    continue;
                }
                let dx = to_a[x].clone();
                worst = Some(match (worst, dx) {
                    (None, d) => d,
                    (Some(None), _) | (_, None) => None,
                    (Some(Some(w)), Some(d)) => Some(if d > w { d } else { w }),
                });
            }
            out.push(match worst {
                None => Profile::Bounded(BigInt::zero()),
                Some(None) => Profile::Unbounded,
                Some(Some(w)) if diam.as_ref().is_some_and(|dm| &w >= dm) => Profile::Unbounded,
                Some(Some(w)) => Profile::Bounded(w.floor().to_integer() + 1),
            });
        }
        Ok(out)
    }

    /// Components of `X - N_r(A)` under `s`-paths, tagged deep when some
    /// point lies farther than `r_deep` from `A`. Without an explicit
    /// threshold, `r_deep` is half the largest distance from `A`, rounded
    /// down (0 when `A` is empty).
    pub fn separation_analysis(
        &self,
        a: &[usize],
        r: &BigRational,
        s: &BigRational,
        r_deep: Option<BigRational>,
    ) -> Result<SeparationAnalysis, CoarseError> {
        let to_a = self.distances_to(a)?;
        let r_deep = match r_deep {
            Some(v) => v,
            None if a.is_empty() => BigRational::zero(),
            None => {
                let mut reach = BigRational::zero();
                for d in &to_a {
                    match d {
                        Some(d) if d > &reach => reach = d.clone(),
                        Some(_) => {}
                        None => return Err(CoarseError::InfiniteDiameter),
                    }
                }
                (reach / rat(2)).floor()
            }
        };
        let near: Vec<bool> = to_a.iter().map(|d| d.as_ref().is_some_and(|d| d < r)).collect();
        let rest: Vec<usize> = (0..self.len).filter(|&x| !near[x]).collect();
        let components: Vec<Component> = self
            .s_components(&rest, s)?
            .into_iter()
            .map(|points| {
                let depth = points.iter().map(|&p| to_a[p].clone()).try_fold(BigRational::zero(), |acc, d| {
                    d.map(|d| if d > acc { d } else { acc })
                });
                let deep = depth.as_ref().is_none_or(|d| d > &r_deep);
                Component { points, depth, deep }
            })
            .collect();
        let deep_count = components.iter().filter(|c| c.deep).count();
        let mut subset = a.to_vec();
        subset.sort_unstable();
        subset.dedup();
        Ok(SeparationAnalysis {
            subset,
            r: r.clone(),
            s: s.clone(),
            r_deep,
            space_s_connected: self.is_s_connected(s),
            class_dimension: deep_count.saturating_sub(1),
            deep_count,
            components,
        })
    }

    /// Checks that an `s`-path connected `M` avoiding `N_p(A)` lies on one
    /// side of `C`.
    pub fn one_sided_containment_check(
        &self,
        m: &[usize],
        a: &[usize],
        c: &[usize],
        s: &BigRational,
        p: &BigRational,
    ) -> Result<Side, CoarseError> {
        if m.is_empty() {
            return Err(CoarseError::Precondition("M is empty".into()));
        }
        if self.s_components(m, s)?.len() != 1 {
            return Err(CoarseError::Precondition("M is not s-path connected".into()));
        }
        let near = self.neighborhood(a, p)?;
        let m_mask = self.mask(m)?;
        if near.iter().any(|&x| m_mask[x]) {
            return Err(CoarseError::Precondition("M meets N_p(A)".into()));
        }
        let c_mask = self.mask(c)?;
        let inside = m.iter().filter(|&&x| c_mask[x]).count();
        let outside = m.len() - inside;
        Ok(match (inside, outside) {
            (_, 0) => Side::Inside,
            (0, _) => Side::Outside,
            _ => Side::Straddles { inside, outside },
        })
    }
}

fn collect_where(d: &[Option<BigRational>], pred: impl Fn(&Option<BigRational>) -> bool) -> Vec<usize> {
    d.iter().enumerate().filter(|(_, v)| pred(v)).map(|(i, _)| i).collect()
}

/// One value of a coarse complement profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Profile {
    Bounded(BigInt),
    /// `∂_r C` is not inside `N_diam(A)` (or `A` is empty).
    Unbounded,
}

impl Profile {
    pub fn bounded_by(&self, limit: i64) -> bool {
        matches!(self, Profile::Bounded(v) if v <= &BigInt::from(limit))
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Profile::Bounded(v) => v.to_i64(),
            Profile::Unbounded => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub points: Vec<usize>,
    /// Largest distance from `A` over the component (`None`: infinite).
    pub depth: Option<BigRational>,
    pub deep: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationAnalysis {
    pub subset: Vec<usize>,
    pub r: BigRational,
    pub s: BigRational,
    pub r_deep: BigRational,
    pub components: Vec<Component>,
    pub deep_count: usize,
    /// Dimension of the deep separations modulo shallow ones over `Z/2`.
    pub class_dimension: usize,
    pub space_s_connected: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Inside,
    Outside,
    Straddles { inside: usize, outside: usize },
}

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Least common multiple helper for callers that size grids by periods.
pub fn lcm_usize(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        rat(n)
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(build_grid(&[5]).unwrap().len(), 5);
        let g = build_grid(&[3, 3]).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.diameter(), Some(q(4)));
        assert_eq!(build_grid(&[]).unwrap_err(), CoarseError::EmptyDims);
        assert_eq!(build_grid(&[3, 0]).unwrap_err(), CoarseError::ZeroSide);
        assert!(matches!(build_grid(&[1000, 1000]), Err(CoarseError::TooLarge { .. })));
    }

    #[test]
    fn path_neighbourhood_and_boundary() {
        let p = build_grid(&[5]).unwrap();
        assert_eq!(p.neighborhood(&[2], &q(2)).unwrap(), vec![1, 2, 3]);
        assert_eq!(p.neighborhood(&[0, 1, 2, 3, 4], &q(1)).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(p.boundary(&[0, 1], &q(1)).unwrap(), vec![2]);
        assert!(p.boundary(&[0, 1, 2, 3, 4], &q(3)).unwrap().is_empty());
        assert_eq!(p.neighborhood(&[7], &q(1)), Err(CoarseError::PointOutOfRange(7)));
    }

    #[test]
    fn components_of_empty_set() {
        let p = build_grid(&[5]).unwrap();
        assert!(p.s_components(&[], &q(1)).unwrap().is_empty());
        assert_eq!(p.s_components(&[0, 1, 3, 4], &q(1)).unwrap(), vec![vec![0, 1], vec![3, 4]]);
        assert_eq!(p.s_components(&[0, 1, 3, 4], &q(2)).unwrap(), vec![vec![0, 1, 3, 4]]);
    }

    #[test]
    fn empty_profile_is_zero() {
        let p = build_grid(&[6]).unwrap();
        let prof = p.coarse_complement_profile(&[], &[2], 3).unwrap();
        assert_eq!(prof, vec![Profile::Bounded(BigInt::zero()); 3]);
        let prof = p.coarse_complement_profile(&[0, 1], &[], 2).unwrap();
        assert_eq!(prof, vec![Profile::Unbounded; 2]);
    }

    #[test]
    fn explicit_metric_checks() {
        let ok = FiniteCoarseSpace::from_matrix(vec![
            vec![q(0), q(1), q(2)],
            vec![q(1), q(0), q(1)],
            vec![q(2), q(1), q(0)],
        ])
        .unwrap();
        assert_eq!(ok.s_components(&[0, 2], &q(1)).unwrap().len(), 2);
        let bad = FiniteCoarseSpace::from_matrix(vec![
            vec![q(0), q(1), q(5)],
            vec![q(1), q(0), q(1)],
            vec![q(5), q(1), q(0)],
        ]);
        assert!(matches!(bad, Err(CoarseError::NotMetric(_))));
    }

    #[test]
    fn weighted_graph_distances() {
        let half = BigRational::new(1.into(), 2.into());
        let g = FiniteCoarseSpace::from_graph(3, &[(0, 1, half.clone()), (1, 2, half), (0, 2, q(3))]).unwrap();
        assert_eq!(g.distance(0, 2).unwrap(), Some(q(1)));
        assert_eq!(g.diameter(), Some(q(1)));
        assert!(matches!(
            FiniteCoarseSpace::from_graph(2, &[(0, 1, q(0))]),
            Err(CoarseError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn containment_preconditions() {
        let p = build_grid(&[7]).unwrap();
        // M = {0, 1} avoids N_2({3}) = {2, 3, 4}
        assert_eq!(p.one_sided_containment_check(&[0, 1], &[3], &[0, 1, 2], &q(1), &q(2)), Ok(Side::Inside));
        assert_eq!(p.one_sided_containment_check(&[5, 6], &[3], &[0, 1, 2], &q(1), &q(2)), Ok(Side::Outside));
        assert_eq!(p.one_sided_containment_check(&[0], &[3], &[0], &q(1), &q(2)), Ok(Side::Inside));
        assert!(matches!(
            p.one_sided_containment_check(&[0, 6], &[3], &[0], &q(1), &q(2)),
            Err(CoarseError::Precondition(_))
        ));
        assert!(matches!(
            p.one_sided_containment_check(&[1, 2], &[3], &[0], &q(1), &q(2)),
            Err(CoarseError::Precondition(_))
        ));
    }
}
