//! On-disk JSON formats and their conversions to core types.
//!
//! Integers are JSON numbers when they fit in `i64` and decimal strings
//! otherwise; rationals are strings such as `"-4/5"` (plain integers are
//! accepted on input).

use hnntree::bass_serre::StabilizationReport;
use hnntree::coarse::{build_grid, FiniteCoarseSpace};
use hnntree::cyclic::{CyclicConstraintSet, CyclicOrder, Triple, TripleSet};
use hnntree::hnn::{GroupData, Sign, Word};
use hnntree::linalg::{parse_rational, FactorVerdict, Lattice, MatrixClassification, MatrixOrder, Poly, RationalMatrix};
use hnntree::{BigInt, BigRational, ZVec};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Int {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for Int {
    fn from(x: &BigInt) -> Self {
        x.to_i64().map(Int::Small).unwrap_or_else(|| Int::Big(x.to_string()))
    }
}

impl Int {
    pub fn to_bigint(&self) -> Result<BigInt, CliError> {
        match self {
            Int::Small(v) => Ok(BigInt::from(*v)),
            Int::Big(s) => s.trim().parse().map_err(|_| CliError::Parse(format!("not an integer: {s:?}"))),
        }
    }
}

pub fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().map(Int::from).collect()
}

pub fn to_zvec(v: &[Int]) -> Result<ZVec, CliError> {
    v.iter().map(Int::to_bigint).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rat {
    Int(i64),
    Text(String),
}

impl From<&BigRational> for Rat {
    fn from(q: &BigRational) -> Self {
        Rat::Text(q.to_string())
    }
}

impl Rat {
    pub fn to_rational(&self) -> Result<BigRational, CliError> {
        match self {
            Rat::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            Rat::Text(s) => parse_rational(s).ok_or_else(|| CliError::Parse(format!("not a rational: {s:?}"))),
        }
    }
}

pub fn matrix_from_json(rows: &[Vec<Rat>]) -> Result<RationalMatrix, CliError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(Rat::to_rational).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    RationalMatrix::new(rows).map_err(|e| CliError::Parse(format!("matrix: {e}")))
}

pub fn matrix_to_json(a: &RationalMatrix) -> Vec<Vec<Rat>> {
    a.rows().iter().map(|r| r.iter().map(Rat::from).collect()).collect()
}

/// A matrix file is either a bare list of rows or `{"A": rows}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixFile {
    Wrapped {
        #[serde(rename = "A")]
        a: Vec<Vec<Rat>>,
    },
    Bare(Vec<Vec<Rat>>),
}

impl MatrixFile {
    pub fn rows(&self) -> &[Vec<Rat>] {
        match self {
            MatrixFile::Wrapped { a } | MatrixFile::Bare(a) => a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Rat>>,
    #[serde(rename = "L_prime")]
    pub l_prime: Vec<Vec<Int>>,
}

impl GroupJson {
    pub fn generators(&self) -> Result<Vec<ZVec>, CliError> {
        self.l_prime.iter().map(|v| to_zvec(v)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<Int>>,
}

impl From<&Lattice> for LatticeJson {
    fn from(l: &Lattice) -> Self {
        LatticeJson { ambient_dim: l.ambient_dim(), basis: l.basis().iter().map(|b| ints(b)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderJson {
    Finite(u64),
    Infinite,
}

impl From<MatrixOrder> for OrderJson {
    fn from(o: MatrixOrder) -> Self {
        match o {
            MatrixOrder::Finite(m) => OrderJson::Finite(m),
            MatrixOrder::Infinite => OrderJson::Infinite,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    /// Lowest degree first.
    pub coeffs: Vec<Rat>,
    pub text: String,
}

impl From<&Poly> for PolyJson {
    fn from(p: &Poly) -> Self {
        PolyJson { coeffs: p.coeffs().iter().map(Rat::from).collect(), text: p.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub factor: PolyJson,
    pub multiplicity: usize,
    pub unit_circle: bool,
    pub cyclotomic_index: Option<u64>,
}

impl From<&FactorVerdict> for FactorJson {
    fn from(f: &FactorVerdict) -> Self {
        FactorJson {
            factor: PolyJson::from(&f.factor),
            multiplicity: f.multiplicity,
            unit_circle: f.unit_circle,
            cyclotomic_index: f.cyclotomic_index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationJson {
    pub orthogonal_conjugate: bool,
    pub order: OrderJson,
    pub minimal_polynomial: PolyJson,
    pub squarefree: bool,
    pub factors: Vec<FactorJson>,
}

impl From<&MatrixClassification> for ClassificationJson {
    fn from(c: &MatrixClassification) -> Self {
        ClassificationJson {
            orthogonal_conjugate: c.orthogonal_conjugate,
            order: c.order.into(),
            minimal_polynomial: PolyJson::from(&c.minimal_polynomial),
            squarefree: c.squarefree,
            factors: c.factors.iter().map(FactorJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Rat>>,
    #[serde(rename = "L_prime")]
    pub l_prime: LatticeJson,
    #[serde(rename = "L_doubleprime")]
    pub l_doubleprime: LatticeJson,
    pub index_prime: Int,
    pub index_doubleprime: Int,
    pub degree: Int,
}

impl From<&GroupData> for GroupSummary {
    fn from(g: &GroupData) -> Self {
        GroupSummary {
            n: g.dim(),
            a: matrix_to_json(g.matrix()),
            l_prime: g.l_prime().into(),
            l_doubleprime: g.l_doubleprime().into(),
            index_prime: g.index_prime().into(),
            index_doubleprime: g.index_doubleprime().into(),
            degree: (&(g.index_prime() + g.index_doubleprime())).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterJson {
    pub eps: i32,
    pub c: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordJson {
    pub head: Vec<Int>,
    pub tail: Vec<LetterJson>,
}

impl From<&Word> for WordJson {
    fn from(w: &Word) -> Self {
        WordJson {
            head: ints(&w.head),
            tail: w.tail.iter().map(|(s, c)| LetterJson { eps: s.as_i32(), c: ints(c) }).collect(),
        }
    }
}

impl WordJson {
    pub fn to_word(&self) -> Result<Word, CliError> {
        let tail = self
            .tail
            .iter()
            .map(|l| {
                let s = Sign::from_i32(l.eps).ok_or_else(|| CliError::Parse(format!("eps must be 1 or -1, got {}", l.eps)))?;
                Ok((s, to_zvec(&l.c)?))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Word { head: to_zvec(&self.head)?, tail })
    }
}

/// Reads `[0,0] t [1,3] t^-1 [3,-1]`. Missing entries between letters are
/// zero; `n` fixes their length.
pub fn parse_word_text(s: &str, n: usize) -> Result<Word, CliError> {
    let bad = |m: &str| CliError::Parse(format!("word {s:?}: {m}"));
    let zero = || vec![BigInt::from(0); n];
    let mut entries: Vec<Option<ZVec>> = vec![None];
    let mut signs = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix('[') {
            let close = after.find(']').ok_or_else(|| bad("unclosed ["))?;
            let v: ZVec = after[..close]
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<BigInt>().map_err(|_| bad("bad integer")))
                .collect::<Result<_, _>>()?;
            if v.len() != n {
                return Err(bad(&format!("entry has {} coordinates, expected {n}", v.len())));
            }
            let slot = entries.last_mut().expect("nonempty");
            match slot {
                Some(prev) => {
                    for (p, x) in prev.iter_mut().zip(&v) {
                        *p += x;
                    }
                }
                None => *slot = Some(v),
            }
            rest = after[close + 1..].trim_start();
        } else if let Some(after) = rest.strip_prefix("t^-1") {
            signs.push(Sign::Neg);
            entries.push(None);
            rest = after.trim_start();
        } else if let Some(after) = rest.strip_prefix("t^1").or_else(|| rest.strip_prefix('t')) {
            signs.push(Sign::Pos);
            entries.push(None);
            rest = after.trim_start();
        } else {
            return Err(bad("expected [..], t or t^-1"));
        }
    }
    let mut it = entries.into_iter().map(|e| e.unwrap_or_else(zero));
    let head = it.next().expect("head slot");
    Ok(Word { head, tail: signs.into_iter().zip(it).collect() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationJson {
    pub element: Vec<Int>,
    pub depth: usize,
    pub n: Vec<Int>,
    #[serde(rename = "K")]
    pub k: Vec<LatticeJson>,
    pub strictly_growing: bool,
}

impl From<&StabilizationReport> for StabilizationJson {
    fn from(r: &StabilizationReport) -> Self {
        StabilizationJson {
            element: ints(&r.element),
            depth: r.depth,
            n: ints(&r.n),
            k: r.k.iter().map(LatticeJson::from).collect(),
            strictly_growing: r.is_strictly_growing(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceJson {
    Grid { grid: Vec<usize> },
    Graph { points: usize, edges: Vec<(usize, usize, Rat)> },
}

impl SpaceJson {
    pub fn build(&self) -> Result<FiniteCoarseSpace, CliError> {
        match self {
            SpaceJson::Grid { grid } => build_grid(grid).map_err(|e| CliError::Precondition(e.to_string())),
            SpaceJson::Graph { points, edges } => {
                let edges = edges
                    .iter()
                    .map(|(u, v, w)| Ok((*u, *v, w.to_rational()?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                FiniteCoarseSpace::from_graph(*points, &edges).map_err(|e| CliError::Precondition(e.to_string()))
            }
        }
    }
}

/// Explicit point ids, or (for grids) the points whose coordinates match
/// every `[axis, value]` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubsetJson {
    Points(Vec<usize>),
    Fix { fix: Vec<(usize, usize)> },
}

impl SubsetJson {
    pub fn resolve(&self, space: &SpaceJson) -> Result<Vec<usize>, CliError> {
        match (self, space) {
            (SubsetJson::Points(p), _) => Ok(p.clone()),
            (SubsetJson::Fix { fix }, SpaceJson::Grid { grid }) => {
                for &(axis, value) in fix {
                    if axis >= grid.len() || value >= grid[axis] {
                        return Err(CliError::Precondition(format!("fix [{axis}, {value}] is outside the grid")));
                    }
                }
                Ok(grid_points_where(grid, fix))
            }
            (SubsetJson::Fix { .. }, _) => Err(CliError::Precondition("\"fix\" subsets need a grid space".into())),
        }
    }
}

pub fn grid_points_where(dims: &[usize], fix: &[(usize, usize)]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    (0..total)
        .filter(|&p| {
            let mut rest = p;
            let mut coords = vec![0; dims.len()];
            for i in (0..dims.len()).rev() {
                coords[i] = rest % dims[i];
                rest /= dims[i];
            }
            fix.iter().all(|&(axis, value)| coords[axis] == value)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseJob {
    pub space: SpaceJson,
    pub subset: SubsetJson,
    pub r: Rat,
    pub s: Rat,
    #[serde(default)]
    pub r_deep: Option<Rat>,
    /// Profiles are computed for scales `1..=profile_max`.
    #[serde(default)]
    pub profile_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicOrderJson {
    pub ground: usize,
    pub triples: Vec<Triple>,
}

impl From<&CyclicOrder> for CyclicOrderJson {
    fn from(o: &CyclicOrder) -> Self {
        CyclicOrderJson { ground: o.ground(), triples: o.triples() }
    }
}

impl CyclicOrderJson {
    pub fn relation(&self) -> Result<TripleSet, CliError> {
        TripleSet::from_triples(self.ground, &self.triples).map_err(|e| CliError::Precondition(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermsJson {
    pub ground: usize,
    pub generators: Vec<Vec<usize>>,
    #[serde(default)]
    pub asserted: Vec<Triple>,
}

impl PermsJson {
    pub fn constraints(&self) -> Result<CyclicConstraintSet, CliError> {
        CyclicConstraintSet::new(self.ground, self.asserted.clone()).map_err(|e| CliError::Precondition(e.to_string()))
    }
}

pub fn from_str<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}
