//! Cyclic orders on `0..m`: axiom checks, intervals, deduction closure with
//! derivation traces, and a backtracking search for orders left invariant
//! by a set of permutations.
//!
//! `[a, b, c]` reads "after `a`, one reaches `b` before `c`".

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bass_serre::TreeBall;
use crate::hnn::NormalForm;

pub type Triple = [usize; 3];

/// Ground sets are capped so the `m^3` bitset stays small.
pub const MAX_GROUND: usize = 300;
/// Respect mode enumerates up to `2^k` sign vectors.
pub const MAX_RESPECT_GENERATORS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclicError {
    GroundTooSmall(usize),
    GroundTooLarge(usize),
    OutOfRange { point: usize, ground: usize },
    RepeatedEntry(Triple),
    EqualEndpoints(usize),
    NotBijection,
    PermutationLength { expected: usize, found: usize },
    TooManyGenerators(usize),
    SphereOutOfRange { depth: usize, radius: usize },
    /// The element has positive t-length, so it moves the base vertex.
    MovesBase,
}

impl fmt::Display for CyclicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyclicError::GroundTooSmall(m) => write!(f, "ground set of size {m} is smaller than 3"),
            CyclicError::GroundTooLarge(m) => write!(f, "ground set of size {m} exceeds {MAX_GROUND}"),
            CyclicError::OutOfRange { point, ground } => write!(f, "point {point} outside ground set of size {ground}"),
            CyclicError::RepeatedEntry(t) => write!(f, "triple {t:?} repeats an entry"),
            CyclicError::EqualEndpoints(a) => write!(f, "interval endpoints coincide at {a}"),
            CyclicError::NotBijection => write!(f, "map is not a bijection"),
            CyclicError::PermutationLength { expected, found } => {
                write!(f, "permutation has {found} entries, expected {expected}")
            }
            CyclicError::TooManyGenerators(k) => {
                write!(f, "{k} generators exceed the respect-mode limit of {MAX_RESPECT_GENERATORS}")
            }
            CyclicError::SphereOutOfRange { depth, radius } => write!(f, "sphere {depth} lies outside ball of radius {radius}"),
            CyclicError::MovesBase => write!(f, "element does not fix the base vertex"),
        }
    }
}

impl core::error::Error for CyclicError {}

fn check_ground(m: usize) -> Result<(), CyclicError> {
    if m > MAX_GROUND {
        return Err(CyclicError::GroundTooLarge(m));
    }
    Ok(())
}

fn check_triple(m: usize, t: Triple) -> Result<(), CyclicError> {
    for &p in &t {
        if p >= m {
            return Err(CyclicError::OutOfRange { point: p, ground: m });
        }
    }
    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
        return Err(CyclicError::RepeatedEntry(t));
    }
    Ok(())
}

fn rotate(t: Triple) -> Triple {
    [t[1], t[2], t[0]]
}

/// The triple asymmetry forbids alongside `t`.
fn reverse(t: Triple) -> Triple {
    [t[2], t[1], t[0]]
}

/// Ternary relation on `0..m` stored as a bitset over `m^3` indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TripleSet {
    m: usize,
    bits: Vec<u64>,
    count: usize,
}

impl TripleSet {
    pub fn new(m: usize) -> Result<Self, CyclicError> {
        check_ground(m)?;
        Ok(TripleSet { m, bits: vec![0; (m * m * m).div_ceil(64)], count: 0 })
    }

    pub fn from_triples(m: usize, triples: &[Triple]) -> Result<Self, CyclicError> {
        let mut s = TripleSet::new(m)?;
        for &t in triples {
            check_triple(m, t)?;
            s.insert(t);
        }
        Ok(s)
    }

    pub fn ground(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn slot(&self, t: Triple) -> usize {
        (t[0] * self.m + t[1]) * self.m + t[2]
    }

    pub fn contains(&self, t: Triple) -> bool {
        if t.iter().any(|&p| p >= self.m) {
            return false;
        }
        let i = self.slot(t);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Entries must be distinct and in range. Returns false if present.
    fn insert(&mut self, t: Triple) -> bool {
        let i = self.slot(t);
        let (w, b) = (i / 64, 1u64 << (i % 64));
        if self.bits[w] & b != 0 {
            return false;
        }
        self.bits[w] |= b;
        self.count += 1;
        true
    }

    fn remove(&mut self, t: Triple) {
        let i = self.slot(t);
        let (w, b) = (i / 64, 1u64 << (i % 64));
        if self.bits[w] & b != 0 {
            self.bits[w] &= !b;
            self.count -= 1;
        }
    }

    /// Members in lexicographic order.
    pub fn triples(&self) -> Vec<Triple> {
        let m = self.m;
        let mut out = Vec::with_capacity(self.count);
        for (w, &word) in self.bits.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let i = w * 64 + rest.trailing_zeros() as usize;
                out.push([i / (m * m), (i / m) % m, i % m]);
                rest &= rest - 1;
            }
        }
        out
    }
}

impl fmt::Debug for TripleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripleSet").field("ground", &self.m).field("triples", &self.triples()).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Cyclicity,
    Asymmetry,
    Transitivity,
    Connectedness,
}

/// First violated axiom. For cyclicity and transitivity the last triple is
/// the missing consequence; for connectedness both listed triples are
/// missing; for asymmetry both are present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub triples: Vec<Triple>,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} violated at {:?}", self.axiom, self.triples)
    }
}

/// Checks cyclicity, asymmetry, connectedness and transitivity, in that order.
pub fn check_axioms(rel: &TripleSet) -> Result<(), AxiomViolation> {
    let m = rel.m;
    let present = rel.triples();
    for &t in &present {
        if !rel.contains(rotate(t)) {
            return Err(AxiomViolation { axiom: Axiom::Cyclicity, triples: vec![t, rotate(t)] });
        }
    }
    for &t in &present {
        if rel.contains(reverse(t)) {
            return Err(AxiomViolation { axiom: Axiom::Asymmetry, triples: vec![t, reverse(t)] });
        }
    }
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if a != b && b != c && a != c && !rel.contains([a, b, c]) && !rel.contains([a, c, b]) {
                    return Err(AxiomViolation { axiom: Axiom::Connectedness, triples: vec![[a, b, c], [a, c, b]] });
                }
            }
        }
    }
    for &[a, b, c] in &present {
        for d in 0..m {
            if d != b && rel.contains([a, c, d]) && !rel.contains([a, b, d]) {
                return Err(AxiomViolation { axiom: Axiom::Transitivity, triples: vec![[a, b, c], [a, c, d], [a, b, d]] });
            }
        }
    }
    Ok(())
}

/// A total cyclic order; construction checks every axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicOrder {
    rel: TripleSet,
}

impl CyclicOrder {
    pub fn new(rel: TripleSet) -> Result<Self, AxiomViolation> {
        check_axioms(&rel)?;
        Ok(CyclicOrder { rel })
    }

    /// The order of points met going around `seq` (a permutation of `0..m`).
    pub fn from_arrangement(seq: &[usize]) -> Result<Self, CyclicError> {
        let m = seq.len();
        check_ground(m)?;
        let mut pos = vec![usize::MAX; m];
        for (i, &p) in seq.iter().enumerate() {
            if p >= m || pos[p] != usize::MAX {
                return Err(CyclicError::NotBijection);
            }
            pos[p] = i;
        }
        let mut rel = TripleSet::new(m)?;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let (db, dc) = ((pos[b] + m - pos[a]) % m, (pos[c] + m - pos[a]) % m);
                    if db != 0 && dc != 0 && db < dc {
                        rel.insert([a, b, c]);
                    }
                }
            }
        }
        Ok(CyclicOrder { rel })
    }

    pub fn ground(&self) -> usize {
        self.rel.m
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.rel.contains(t)
    }

    pub fn relation(&self) -> &TripleSet {
        &self.rel
    }

    pub fn triples(&self) -> Vec<Triple> {
        self.rel.triples()
    }

    /// The points in circular order starting from 0.
    pub fn arrangement(&self) -> Vec<usize> {
        let m = self.rel.m;
        if m == 0 {
            return Vec::new();
        }
        // x comes before y (after 0) iff [0, x, y]
        let mut rest: Vec<usize> = (1..m).collect();
        rest.sort_by(|&x, &y| {
            if self.rel.contains([0, x, y]) {
                core::cmp::Ordering::Less
            } else if x == y {
                core::cmp::Ordering::Equal
            } else {
                core::cmp::Ordering::Greater
            }
        });
        let mut seq = vec![0];
        seq.extend(rest);
        seq
    }

    /// The same points read counter-clockwise.
    pub fn reversed(&self) -> CyclicOrder {
        let mut rel = TripleSet::new(self.rel.m).expect("same ground");
        for t in self.rel.triples() {
            rel.insert(reverse(t));
        }
        CyclicOrder { rel }
    }
}

/// Clockwise order of `m` points: `[i, j, k]` iff `0 < j - i < k - i (mod m)`.
pub fn standard_order(m: usize) -> Result<CyclicOrder, CyclicError> {
    if m < 3 {
        return Err(CyclicError::GroundTooSmall(m));
    }
    CyclicOrder::from_arrangement(&(0..m).collect::<Vec<_>>())
}

/// `(a, b) = {x : [a, x, b]}`.
pub fn interval(order: &CyclicOrder, a: usize, b: usize) -> Result<Vec<usize>, CyclicError> {
    let m = order.ground();
    for p in [a, b] {
        if p >= m {
            return Err(CyclicError::OutOfRange { point: p, ground: m });
        }
    }
    if a == b {
        return Err(CyclicError::EqualEndpoints(a));
    }
    Ok((0..m).filter(|&x| order.contains([a, x, b])).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RespectType {
    Preserves,
    Reverses,
    Neither,
}

pub fn check_permutation(m: usize, f: &[usize]) -> Result<(), CyclicError> {
    if f.len() != m {
        return Err(CyclicError::PermutationLength { expected: m, found: f.len() });
    }
    let mut seen = vec![false; m];
    for &y in f {
        if y >= m || seen[y] {
            return Err(CyclicError::NotBijection);
        }
        seen[y] = true;
    }
    Ok(())
}

/// Whether `f` preserves, reverses, or does neither. An order on at least
/// three points cannot be both preserved and reversed.
pub fn respect_type(order: &CyclicOrder, f: &[usize]) -> Result<RespectType, CyclicError> {
    check_permutation(order.ground(), f)?;
    let triples = order.triples();
    if triples.iter().all(|&[a, b, c]| order.contains([f[a], f[b], f[c]])) {
        return Ok(RespectType::Preserves);
    }
    if triples.iter().all(|&[a, b, c]| order.contains([f[c], f[b], f[a]])) {
        return Ok(RespectType::Reverses);
    }
    Ok(RespectType::Neither)
}

/// `(f ∘ g)(x) = f(g(x))`.
pub fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

pub fn invert_permutation(f: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; f.len()];
    for (x, &y) in f.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

pub fn is_identity_permutation(f: &[usize]) -> bool {
    f.iter().enumerate().all(|(x, &y)| x == y)
}

/// Cycle lengths, largest first (fixed points included as 1s).
pub fn cycle_type(f: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; f.len()];
    let mut lens = Vec::new();
    for start in 0..f.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = f[x];
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

/// Asserted triples on `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicConstraintSet {
    ground: usize,
    asserted: Vec<Triple>,
}

impl CyclicConstraintSet {
    pub fn new(ground: usize, asserted: Vec<Triple>) -> Result<Self, CyclicError> {
        check_ground(ground)?;
        for &t in &asserted {
            check_triple(ground, t)?;
        }
        Ok(CyclicConstraintSet { ground, asserted })
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn asserted(&self) -> &[Triple] {
        &self.asserted
    }

    pub fn push(&mut self, t: Triple) -> Result<(), CyclicError> {
        check_triple(self.ground, t)?;
        self.asserted.push(t);
        Ok(())
    }
}

/// How a trace step was obtained; parents are earlier step indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Asserted,
    /// `[a,b,c] ⊢ [b,c,a]`
    Cyclic(usize),
    /// `[a,b,c], [a,c,d] ⊢ [a,b,d]`
    Transitive(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub triple: Triple,
    pub rule: Rule,
}

#[derive(Clone, Debug)]
pub struct Closure {
    pub triples: TripleSet,
    pub trace: Vec<TraceStep>,
    index: TripleIndex,
}

impl Closure {
    pub fn contains(&self, t: Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn step_of(&self, t: Triple) -> Option<usize> {
        self.index.get(t)
    }

    /// Indices of the steps `t` depends on (itself included), increasing.
    pub fn proof_of(&self, t: Triple) -> Option<Vec<usize>> {
        Some(ancestors(&self.trace, &[self.step_of(t)?]))
    }
}

/// Two derived triples `[a,b,c]` and `[c,b,a]`.
#[derive(Clone, Debug)]
pub struct Inconsistency {
    pub trace: Vec<TraceStep>,
    pub clash: (usize, usize),
}

impl Inconsistency {
    pub fn clash_triples(&self) -> (Triple, Triple) {
        (self.trace[self.clash.0].triple, self.trace[self.clash.1].triple)
    }

    pub fn proof(&self) -> Vec<usize> {
        ancestors(&self.trace, &[self.clash.0, self.clash.1])
    }
}

#[derive(Clone, Debug)]
pub enum ClosureOutcome {
    Closed(Closure),
    Inconsistent(Inconsistency),
}

fn ancestors(trace: &[TraceStep], roots: &[usize]) -> Vec<usize> {
    let mut keep = vec![false; trace.len()];
    let mut stack = roots.to_vec();
    while let Some(i) = stack.pop() {
        if keep[i] {
            continue;
        }
        keep[i] = true;
        match trace[i].rule {
            Rule::Asserted => {}
            Rule::Cyclic(p) => stack.push(p),
            Rule::Transitive(p, q) => stack.extend([p, q]),
        }
    }
    (0..trace.len()).filter(|&i| keep[i]).collect()
}

/// Trace position of each known triple: a flat table for small grounds,
/// a map above `DENSE_INDEX_MAX` points.
#[derive(Clone, Debug)]
enum TripleIndex {
    Dense { m: usize, slots: Vec<u32> },
    Sparse(BTreeMap<Triple, usize>),
}

const DENSE_INDEX_MAX: usize = 128;

impl TripleIndex {
    fn new(m: usize) -> Self {
        if m <= DENSE_INDEX_MAX {
            TripleIndex::Dense { m, slots: vec![u32::MAX; m * m * m] }
        } else {
            TripleIndex::Sparse(BTreeMap::new())
        }
    }

    fn get(&self, t: Triple) -> Option<usize> {
        match self {
            TripleIndex::Dense { m, slots } => {
                let v = slots[(t[0] * m + t[1]) * m + t[2]];
                (v != u32::MAX).then_some(v as usize)
            }
            TripleIndex::Sparse(map) => map.get(&t).copied(),
        }
    }

    fn insert(&mut self, t: Triple, i: usize) {
        match self {
            TripleIndex::Dense { m, slots } => slots[(t[0] * *m + t[1]) * *m + t[2]] = i as u32,
            TripleIndex::Sparse(map) => {
                map.insert(t, i);
            }
        }
    }
}

struct TraceBuilder {
    set: TripleSet,
    trace: Vec<TraceStep>,
    index: TripleIndex,
}

impl TraceBuilder {
    /// Records `t` unless known; a clash with its reverse is returned.
    fn add(&mut self, t: Triple, rule: Rule, queue: &mut Vec<usize>) -> Result<(), (usize, usize)> {
        if self.set.contains(t) {
            return Ok(());
        }
        let i = self.trace.len();
        self.trace.push(TraceStep { triple: t, rule });
        if let Some(j) = self.index.get(reverse(t)) {
            return Err((j, i));
        }
        self.set.insert(t);
        self.index.insert(t, i);
        queue.push(i);
        Ok(())
    }
}

/// Least fixpoint of the asserted triples under cyclicity and transitivity,
/// or the first asymmetry clash met while building it.
pub fn closure(cs: &CyclicConstraintSet) -> ClosureOutcome {
    let m = cs.ground;
    let mut b = TraceBuilder { set: TripleSet::new(m).expect("ground checked"), trace: Vec::new(), index: TripleIndex::new(m) };
    let mut queue = Vec::new();
    let clash = (|| {
        for &t in &cs.asserted {
            b.add(t, Rule::Asserted, &mut queue)?;
        }
        let mut head = 0;
        while head < queue.len() {
            let i = queue[head];
            head += 1;
            let [x, y, z] = b.trace[i].triple;
            b.add([y, z, x], Rule::Cyclic(i), &mut queue)?;
            for d in 0..m {
                // as first premise [x,y,z], [x,z,d]
                if d != y {
                    if let Some(j) = b.index.get([x, z, d]) {
                        b.add([x, y, d], Rule::Transitive(i, j), &mut queue)?;
                    }
                }
                // as second premise [x,d,y], [x,y,z]
                if d != z {
                    if let Some(j) = b.index.get([x, d, y]) {
                        b.add([x, d, z], Rule::Transitive(j, i), &mut queue)?;
                    }
                }
            }
        }
        Ok(())
    })();
    match clash {
        Ok(()) => ClosureOutcome::Closed(Closure { triples: b.set, trace: b.trace, index: b.index }),
        Err(clash) => ClosureOutcome::Inconsistent(Inconsistency { trace: b.trace, clash }),
    }
}

/// A step of a trace that does not follow from its claimed rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceError {
    pub step: usize,
}

/// Replays a trace: every step must be asserted or follow from earlier
/// steps by its rule.
pub fn verify_trace(cs: &CyclicConstraintSet, trace: &[TraceStep]) -> Result<(), TraceError> {
    for (i, s) in trace.iter().enumerate() {
        let bad = TraceError { step: i };
        if check_triple(cs.ground, s.triple).is_err() {
            return Err(bad);
        }
        let ok = match s.rule {
            Rule::Asserted => cs.asserted.contains(&s.triple),
            Rule::Cyclic(p) => p < i && rotate(trace[p].triple) == s.triple,
            Rule::Transitive(p, q) => {
                let ([a, b, c], [a2, c2, d]) = (trace[p].triple, trace[q].triple);
                p < i && q < i && a == a2 && c == c2 && s.triple == [a, b, d]
            }
        };
        if !ok {
            return Err(bad);
        }
    }
    Ok(())
}

/// Checks an inconsistency certificate: a valid trace ending in a clash.
pub fn verify_inconsistency(cs: &CyclicConstraintSet, inc: &Inconsistency) -> Result<(), TraceError> {
    verify_trace(cs, &inc.trace)?;
    let (p, q) = inc.clash_triples();
    if reverse(p) != q {
        return Err(TraceError { step: inc.clash.1 });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    PreserveOnly,
    Respect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable(CyclicOrder),
    Unsatisfiable { nodes_explored: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverResult {
    pub verdict: Verdict,
    /// For a witness, how each generator acts on it.
    pub signs: Option<Vec<RespectType>>,
    pub nodes_explored: u64,
    pub sign_vectors_tried: usize,
}

impl SolverResult {
    pub fn witness(&self) -> Option<&CyclicOrder> {
        match &self.verdict {
            Verdict::Satisfiable(o) => Some(o),
            Verdict::Unsatisfiable { .. } => None,
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        self.witness().is_some()
    }
}

/// Sign vectors compatible with the relations visible among the
/// generators: equal generators share a sign, the identity preserves, and
/// `g_i g_j = g_k` forces `sign_k = sign_i sign_j`. All-preserve comes first.
pub fn consistent_sign_vectors(generators: &[Vec<usize>]) -> Vec<Vec<RespectType>> {
    let k = generators.len();
    let mut out = Vec::new();
    'masks: for mask in 0u32..(1u32 << k) {
        let rev = |i: usize| mask >> i & 1 == 1;
        for i in 0..k {
            if rev(i) && is_identity_permutation(&generators[i]) {
                continue 'masks;
            }
            for j in 0..k {
                if generators[i] == generators[j] && rev(i) != rev(j) {
                    continue 'masks;
                }
                let prod = compose(&generators[i], &generators[j]);
                for l in 0..k {
                    if generators[l] == prod && rev(l) != (rev(i) != rev(j)) {
                        continue 'masks;
                    }
                }
            }
        }
        out.push((0..k).map(|i| if rev(i) { RespectType::Reverses } else { RespectType::Preserves }).collect());
    }
    out
}

/// Search for a total cyclic order invariant under `generators` (each an
/// image array on `0..m`).
pub fn search_invariant_order(m: usize, generators: &[Vec<usize>], mode: SearchMode) -> Result<SolverResult, CyclicError> {
    check_ground(m)?;
    search_invariant_order_with(&CyclicConstraintSet::new(m, Vec::new())?, generators, mode)
}

/// As [`search_invariant_order`], additionally containing the asserted triples.
pub fn search_invariant_order_with(
    cs: &CyclicConstraintSet,
    generators: &[Vec<usize>],
    mode: SearchMode,
) -> Result<SolverResult, CyclicError> {
    let m = cs.ground;
    if m < 3 {
        return Err(CyclicError::GroundTooSmall(m));
    }
    for g in generators {
        check_permutation(m, g)?;
    }
    let sign_vectors = match mode {
        SearchMode::PreserveOnly => vec![vec![RespectType::Preserves; generators.len()]],
        SearchMode::Respect => {
            if generators.len() > MAX_RESPECT_GENERATORS {
                return Err(CyclicError::TooManyGenerators(generators.len()));
            }
            consistent_sign_vectors(generators)
        }
    };
    let branch_order = branching_order(m, generators);
    let mut nodes = 0u64;
    for (tried, signs) in sign_vectors.iter().enumerate() {
        let mut s = Search {
            set: TripleSet::new(m)?,
            trail: Vec::new(),
            gens: generators.iter().cloned().zip(signs.iter().copied()).collect(),
            nodes: 0,
        };
        let found = s.assert_all(&cs.asserted) && s.dfs(&branch_order, 0, cs.asserted.is_empty());
        nodes += s.nodes;
        if found {
            let order = CyclicOrder::new(s.set).expect("search leaves satisfy every axiom");
            for ((g, _), sign) in s.gens.iter().zip(signs) {
                assert_eq!(respect_type(&order, g)?, *sign, "witness respects the chosen signs");
            }
            return Ok(SolverResult {
                verdict: Verdict::Satisfiable(order),
                signs: Some(signs.clone()),
                nodes_explored: nodes,
                sign_vectors_tried: tried + 1,
            });
        }
    }
    Ok(SolverResult {
        verdict: Verdict::Unsatisfiable { nodes_explored: nodes },
        signs: None,
        nodes_explored: nodes,
        sign_vectors_tried: sign_vectors.len(),
    })
}

/// Unordered triples `a < b < c`, those with larger orbits under the
/// generators first (a decision there propagates to the whole orbit).
fn branching_order(m: usize, generators: &[Vec<usize>]) -> Vec<Triple> {
    let mut triples = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                triples.push([a, b, c]);
            }
        }
    }
    let sorted = |t: Triple| {
        let mut t = t;
        t.sort_unstable();
        t
    };
    let mut orbit_size: BTreeMap<Triple, usize> = BTreeMap::new();
    for &t in &triples {
        if orbit_size.contains_key(&t) {
            continue;
        }
        let mut orbit = vec![t];
        let mut seen = alloc::collections::BTreeSet::from([t]);
        let mut head = 0;
        while head < orbit.len() {
            let [a, b, c] = orbit[head];
            head += 1;
            for g in generators {
                let img = sorted([g[a], g[b], g[c]]);
                if seen.insert(img) {
                    orbit.push(img);
                }
            }
        }
        for u in &orbit {
            orbit_size.insert(*u, orbit.len());
        }
    }
    triples.sort_by_key(|t| core::cmp::Reverse(orbit_size[t]));
    triples
}

struct Search {
    set: TripleSet,
    trail: Vec<Triple>,
    gens: Vec<(Vec<usize>, RespectType)>,
    nodes: u64,
}

impl Search {
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let t = self.trail.pop().expect("above mark");
            self.set.remove(t);
        }
    }

    fn assert_all(&mut self, ts: &[Triple]) -> bool {
        let mut queue = Vec::new();
        ts.iter().all(|&t| self.push(t, &mut queue)) && self.propagate(queue)
    }

    fn push(&mut self, t: Triple, queue: &mut Vec<Triple>) -> bool {
        if self.set.contains(t) {
            return true;
        }
        if self.set.contains(reverse(t)) {
            return false;
        }
        self.set.insert(t);
        self.trail.push(t);
        queue.push(t);
        true
    }

    /// Closes under cyclicity, transitivity and the generator images.
    fn propagate(&mut self, mut queue: Vec<Triple>) -> bool {
        let m = self.set.m;
        while let Some([x, y, z]) = queue.pop() {
            if !self.push([y, z, x], &mut queue) {
                return false;
            }
            for d in 0..m {
                if d != y && self.set.contains([x, z, d]) && !self.push([x, y, d], &mut queue) {
                    return false;
                }
                if d != z && self.set.contains([x, d, y]) && !self.push([x, d, z], &mut queue) {
                    return false;
                }
            }
            for i in 0..self.gens.len() {
                let g = &self.gens[i].0;
                let img = match self.gens[i].1 {
                    RespectType::Reverses => [g[z], g[y], g[x]],
                    _ => [g[x], g[y], g[z]],
                };
                if !self.push(img, &mut queue) {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(&mut self, order: &[Triple], mut pos: usize, break_reversal: bool) -> bool {
        while pos < order.len() {
            let [a, b, c] = order[pos];
            if !self.set.contains([a, b, c]) && !self.set.contains([a, c, b]) {
                break;
            }
            pos += 1;
        }
        let Some(&[a, b, c]) = order.get(pos) else {
            return true;
        };
        // Reversing an invariant order keeps it invariant with the same
        // signs, so without asserted triples the first choice is free.
        let choices: &[Triple] = if break_reversal { &[[a, b, c]] } else { &[[a, b, c], [a, c, b]] };
        for &t in choices {
            self.nodes += 1;
            let mark = self.trail.len();
            if self.assert_all(&[t]) && self.dfs(order, pos + 1, false) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

/// Brute force: every circular arrangement of `0..m` with 0 first.
pub fn all_cyclic_orders(m: usize) -> Vec<CyclicOrder> {
    let mut out = Vec::new();
    let mut rest: Vec<usize> = (1..m).collect();
    permute(&mut rest, 0, &mut |p| {
        let mut seq = vec![0];
        seq.extend_from_slice(p);
        out.push(CyclicOrder::from_arrangement(&seq).expect("permutation of the ground"));
    });
    out
}

fn permute(v: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// The action of an element of `L` on one sphere of a tree ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpherePermutation {
    pub depth: usize,
    /// Ball vertex ids of the sphere; local point `i` is `vertices[i]`.
    pub vertices: Vec<usize>,
    pub permutation: Vec<usize>,
    pub cycle_type: Vec<usize>,
}

pub fn sphere_permutation(ball: &TreeBall, w: &NormalForm, depth: usize) -> Result<SpherePermutation, CyclicError> {
    if w.t_length() != 0 {
        return Err(CyclicError::MovesBase);
    }
    if depth > ball.radius() {
        return Err(CyclicError::SphereOutOfRange { depth, radius: ball.radius() });
    }
    let vertices = ball.sphere(depth);
    let local: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let images = ball.act_indices(w);
    let permutation: Vec<usize> = vertices
        .iter()
        .map(|&v| {
            let img = images[v].expect("elements of L preserve every sphere");
            local[&img]
        })
        .collect();
    let cycle_type = cycle_type(&permutation);
    Ok(SpherePermutation { depth, vertices, permutation, cycle_type })
}

/// The chain `[x_i, x_{i+1}, z]` for `0 <= i < m` on `x_i = i`, `z = m + 1`.
#[derive(Clone, Debug)]
pub struct ChainInstance {
    pub constraints: CyclicConstraintSet,
    pub length: usize,
    pub z: usize,
}

impl ChainInstance {
    pub fn new(length: usize) -> Result<Self, CyclicError> {
        let z = length + 1;
        let asserted = (0..length).map(|i| [i, i + 1, z]).collect();
        Ok(ChainInstance { constraints: CyclicConstraintSet::new(length + 2, asserted)?, length, z })
    }

    /// Adds `x_0 ∈ (z, x_1)`, i.e. `[z, x_0, x_1]`.
    pub fn with_side_condition(mut self) -> Self {
        let z = self.z;
        if self.length >= 1 {
            self.constraints.asserted.push([z, 0, 1]);
        }
        self
    }

    /// Adds `x_i ∈ (z, x_1)`, which contradicts the chain for `i >= 2`.
    pub fn with_recurrence(mut self, i: usize) -> Result<Self, CyclicError> {
        let z = self.z;
        self.constraints.push([z, i, 1])?;
        Ok(self)
    }

    /// `[x_1, x_i, z]` for `2 <= i <= length`.
    pub fn expected_consequences(&self) -> Vec<Triple> {
        (2..=self.length).map(|i| [1, i, self.z]).collect()
    }
}
