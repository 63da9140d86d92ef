//! Finite balls in the Bass-Serre tree of `G(A, L')`.
//!
//! Vertices are the cosets `gL`. Because normal forms are left-pushed, the
//! coset `gL` is determined by the normal form of `g` with its final abelian
//! entry dropped; that truncated form is the [`VertexKey`]. The neighbours of
//! `hL` are `h c t L` for `c` ranging over the residues of `L` mod `L''` and
//! `h c t^-1 L` for `c` over the residues mod `L'`, so every vertex has degree
//! `[L : L''] + [L : L']`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::hnn::{fmt_letter, GroupData, NormalForm, Sign, Word};
use crate::linalg::Lattice;
use crate::ZVec;

/// Canonical name of a coset `gL`: `c0 t^e1 c1 ... c(k-1) t^ek`, stored as the
/// steps `(c(i-1), ei)`. The base vertex `L` has no steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexKey(Vec<(ZVec, Sign)>);

impl VertexKey {
    pub fn base() -> VertexKey {
        VertexKey(Vec::new())
    }

    pub fn from_normal_form(nf: &NormalForm) -> VertexKey {
        let w = nf.as_word();
        let mut steps = Vec::with_capacity(w.tail.len());
        let mut prev = &w.head;
        for (s, c) in &w.tail {
            steps.push((prev.clone(), *s));
            prev = c;
        }
        VertexKey(steps)
    }

    /// Distance from the base vertex.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn steps(&self) -> &[(ZVec, Sign)] {
        &self.0
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.0.iter().map(|(_, s)| *s).collect()
    }

    /// The step list as `(sign, digit)` pairs.
    pub fn path(&self) -> Vec<(Sign, ZVec)> {
        self.0.iter().map(|(c, s)| (*s, c.clone())).collect()
    }

    /// A coset representative with zero final entry.
    pub fn to_word(&self, n: usize) -> Word {
        let mut head = crate::hnn::zero(n);
        let mut tail: Vec<(Sign, ZVec)> = Vec::with_capacity(self.0.len());
        for (i, (c, s)) in self.0.iter().enumerate() {
            if i == 0 {
                head = c.clone();
            } else {
                tail.last_mut().unwrap().1 = c.clone();
            }
            tail.push((*s, crate::hnn::zero(n)));
        }
        Word { head, tail }
    }
}

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "base");
        }
        for (i, (c, s)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "[")?;
            for (j, x) in c.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
            fmt_letter(f, *s)?;
        }
        Ok(())
    }
}

/// Label of the edge from `v` to `v digit t^sign`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabel {
    pub sign: Sign,
    pub digit: ZVec,
}

/// The ball of radius `radius` around the base vertex.
#[derive(Clone, Debug)]
pub struct TreeBall {
    group: GroupData,
    radius: usize,
    vertices: Vec<VertexKey>,
    index: BTreeMap<VertexKey, usize>,
    adjacency: Vec<Vec<(usize, EdgeLabel)>>,
}

/// Breadth-first expansion of the ball of radius `r` around `L`.
///
/// Vertices are numbered in BFS order, children in the order: `t`-type
/// digits then `t^-1`-type digits, each in lexicographic residue order.
pub fn expand_ball(g: &GroupData, r: usize) -> TreeBall {
    let n = g.dim();
    let digits_pos = g.l_doubleprime().residues();
    let digits_neg = g.l_prime().residues();
    let mut ball = TreeBall {
        group: g.clone(),
        radius: r,
        vertices: alloc::vec![VertexKey::base()],
        index: BTreeMap::new(),
        adjacency: alloc::vec![Vec::new()],
    };
    ball.index.insert(VertexKey::base(), 0);
    let mut frontier = alloc::vec![0usize];
    for _ in 0..r {
        let mut next = Vec::new();
        for &v in &frontier {
            let word = ball.vertices[v].to_word(n);
            let labels = digits_pos
                .iter()
                .map(|d| (Sign::Pos, d))
                .chain(digits_neg.iter().map(|d| (Sign::Neg, d)));
            for (sign, digit) in labels {
                let step = Word { head: digit.clone(), tail: alloc::vec![(sign, crate::hnn::zero(n))] };
                let nf = g.normalize(&word.concat(&step)).expect("dimension fixed by group");
                let key = VertexKey::from_normal_form(&nf);
                let label = EdgeLabel { sign, digit: digit.clone() };
                if let Some(&u) = ball.index.get(&key) {
                    // only the parent can already be present in a tree
                    debug_assert!(key.depth() + 1 == ball.vertices[v].depth());
                    ball.adjacency[v].push((u, label));
                    continue;
                }
                let u = ball.vertices.len();
                ball.vertices.push(key.clone());
                ball.index.insert(key, u);
                ball.adjacency.push(Vec::new());
                ball.adjacency[v].push((u, label));
                next.push(u);
            }
        }
        frontier = next;
    }
    // frontier vertices only know their parent
    for &v in &frontier {
        if let Some((parent, back)) = ball.parent_link(v) {
            ball.adjacency[v].push((parent, back));
        }
    }
    ball
}

impl TreeBall {
    pub fn group(&self) -> &GroupData {
        &self.group
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexKey] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &VertexKey {
        &self.vertices[i]
    }

    pub fn index_of(&self, key: &VertexKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn depth(&self, i: usize) -> usize {
        self.vertices[i].depth()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, EdgeLabel)] {
        &self.adjacency[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Vertex ids of the sphere of radius `i`, in BFS order.
    pub fn sphere(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.depth(v) == i).collect()
    }

    /// Vertex counts of the spheres of radius `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0usize; self.radius + 1];
        for v in &self.vertices {
            sizes[v.depth()] += 1;
        }
        sizes
    }

    /// The parent of `v` and the label of the edge from `v` back to it: the
    /// last step `(c, e)` of `v` is undone by the label `(-e, 0)`.
    fn parent_link(&self, v: usize) -> Option<(usize, EdgeLabel)> {
        let key = &self.vertices[v];
        let (_, last_sign) = key.0.last()?;
        let parent = VertexKey(key.0[..key.0.len() - 1].to_vec());
        let p = self.index[&parent];
        Some((p, EdgeLabel { sign: last_sign.flip(), digit: crate::hnn::zero(self.group.dim()) }))
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent_link(v).map(|(p, _)| p)
    }

    /// The geodesic through the base vertex made of `t^k L` for
    /// `-radius <= k <= radius`, listed by increasing `k`.
    pub fn axis(&self) -> Vec<usize> {
        let n = self.group.dim();
        let r = self.radius as i64;
        (-r..=r)
            .map(|k| {
                let sign = if k < 0 { Sign::Neg } else { Sign::Pos };
                let key = VertexKey(alloc::vec![(crate::hnn::zero(n), sign); k.unsigned_abs() as usize]);
                self.index[&key]
            })
            .collect()
    }

    /// Key of `w h L` for every vertex `h L` of the ball, in vertex order.
    /// The images lie in the ball of radius `radius + t_length(w)`.
    pub fn act(&self, w: &NormalForm) -> Vec<VertexKey> {
        (0..self.len()).map(|v| self.image_of(w, v)).collect()
    }

    /// Key of `w h L` for the single vertex `v = h L`.
    pub fn image_of(&self, w: &NormalForm, v: usize) -> VertexKey {
        let n = self.group.dim();
        let h = &self.vertices[v];
        let nf = self.group.normalize(&w.as_word().concat(&h.to_word(n))).expect("dimension fixed by group");
        VertexKey::from_normal_form(&nf)
    }

    /// [`Self::act`] resolved to vertex ids; `None` where the image leaves
    /// this ball.
    pub fn act_indices(&self, w: &NormalForm) -> Vec<Option<usize>> {
        self.act(w).iter().map(|k| self.index_of(k)).collect()
    }

    /// Whether `w` fixes every vertex of the ball.
    pub fn fixes_pointwise(&self, w: &NormalForm) -> bool {
        self.act(w).iter().zip(&self.vertices).all(|(img, v)| img == v)
    }
}

/// Partial vertex map of `w` on the ball; see [`TreeBall::act`].
pub fn act_on_ball(ball: &TreeBall, w: &NormalForm) -> Vec<VertexKey> {
    ball.act(w)
}

/// `Stab(hL) ∩ L` for the vertex reached from the base by `path`.
///
/// Backward recursion over the steps, with `S(empty) = Z^n`:
/// a `t` step gives `L'' ∩ A(S ∩ L')`, a `t^-1` step gives
/// `L' ∩ A^-1(S ∩ L'')`. Digits do not enter since `L` is abelian.
pub fn stabilizer_lattice(g: &GroupData, path: &[(Sign, ZVec)]) -> Lattice {
    let signs: Vec<Sign> = path.iter().map(|(s, _)| *s).collect();
    stabilizer_for_signs(g, &signs)
}

fn stabilizer_for_signs(g: &GroupData, signs: &[Sign]) -> Lattice {
    signs.iter().rev().fold(Lattice::integer(g.dim()), |s, &sign| prepend_step(g, &s, sign))
}

fn prepend_step(g: &GroupData, rest: &Lattice, sign: Sign) -> Lattice {
    match sign {
        Sign::Pos => {
            let inner = rest.intersect(g.l_prime()).image(g.matrix()).expect("A maps L' into Z^n");
            g.l_doubleprime().intersect(&inner)
        }
        Sign::Neg => {
            let inner = rest
                .intersect(g.l_doubleprime())
                .image(g.matrix_inverse())
                .expect("A^-1 maps L'' into Z^n");
            g.l_prime().intersect(&inner)
        }
    }
}

/// Whether the step sign `next` may follow `prev` along a reduced path:
/// backtracking `t t^-1` needs a nonzero digit mod `L'`, `t^-1 t` one mod `L''`.
fn step_allowed(g: &GroupData, prev: Sign, next: Sign) -> bool {
    if prev != next.flip() {
        return true;
    }
    match next {
        Sign::Neg => !g.index_prime().is_one(),
        Sign::Pos => !g.index_doubleprime().is_one(),
    }
}

/// `K_1 ⊇ ... ⊇ K_d` and the orders `n_1 | ... | n_d` of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationReport {
    pub element: ZVec,
    pub depth: usize,
    /// `K[i-1]` is the pointwise stabilizer in `L` of the ball of radius `i`.
    pub k: Vec<Lattice>,
    /// `n[i-1]` is the least `m >= 1` with `m a` in `K_i`.
    pub n: Vec<BigInt>,
}

impl StabilizationReport {
    pub fn is_strictly_growing(&self) -> bool {
        self.n.windows(2).all(|w| w[0] < w[1])
    }

    pub fn grows(&self) -> bool {
        match (self.n.first(), self.n.last()) {
            (Some(a), Some(b)) => b > a,
            _ => false,
        }
    }
}

/// Pointwise stabilizers in `L` of the balls of radius `1..=d`.
///
/// The stabilizer of a vertex depends only on the sign pattern of its path,
/// so the intersection runs over the realizable sign sequences of each length.
pub fn ball_stabilizers(g: &GroupData, d: usize) -> Vec<Lattice> {
    let mut k = Lattice::integer(g.dim());
    let mut level: Vec<(Vec<Sign>, Lattice)> = alloc::vec![(Vec::new(), Lattice::integer(g.dim()))];
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        let mut next = Vec::new();
        for (seq, s) in &level {
            for sign in [Sign::Pos, Sign::Neg] {
                if seq.first().is_some_and(|&first| !step_allowed(g, sign, first)) {
                    continue;
                }
                let lat = prepend_step(g, s, sign);
                k = k.intersect(&lat);
                let mut longer = alloc::vec![sign];
                longer.extend(seq.iter().copied());
                next.push((longer, lat));
            }
        }
        level = next;
        out.push(k.clone());
    }
    out
}

pub fn stabilization_sequence(g: &GroupData, a: &[BigInt], d: usize) -> StabilizationReport {
    assert_eq!(a.len(), g.dim(), "element dimension differs from group");
    let k = ball_stabilizers(g, d);
    let n = k.iter().map(|lat| lat.order_of(a).expect("ball stabilizers have full rank")).collect();
    StabilizationReport { element: a.to_vec(), depth: d, k, n }
}

/// Outcome of the search for an element whose orders `n_i` keep growing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericElement {
    pub element: ZVec,
    pub report: StabilizationReport,
    /// `n_d > n_1`.
    pub growth: bool,
}

/// Nonzero vectors of sup-norm at most 2, one per `±` pair (first nonzero
/// coordinate positive): standard basis vectors first, then the rest in
/// lexicographic order.
pub fn candidate_elements(n: usize) -> Vec<ZVec> {
    let mut out: Vec<ZVec> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut v: ZVec = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(BigInt::from((c % 5) as i64 - 2));
            c /= 5;
        }
        v.reverse();
        let first = v.iter().find(|x| !x.is_zero());
        if first.is_some_and(|f| f > &BigInt::zero()) && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// The candidate maximizing `n_d` (first one wins ties).
pub fn find_generic_element(g: &GroupData, d: usize) -> GenericElement {
    let k = ball_stabilizers(g, d);
    let mut best: Option<(ZVec, Vec<BigInt>)> = None;
    for cand in candidate_elements(g.dim()) {
        let n: Vec<BigInt> = k.iter().map(|lat| lat.order_of(&cand).expect("full rank")).collect();
        let better = match &best {
            None => true,
            Some((_, bn)) => n.last() > bn.last(),
        };
        if better {
            best = Some((cand, n));
        }
    }
    let (element, n) = best.expect("at least one candidate");
    let report = StabilizationReport { element: element.clone(), depth: d, k, n };
    let growth = report.grows();
    GenericElement { element, report, growth }
}
