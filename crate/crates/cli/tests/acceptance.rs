//! Acceptance criteria 1-8. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! criterion does.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use hnntree::bass_serre::{expand_ball, find_generic_element, stabilization_sequence};
use hnntree::coarse::{build_grid, build_tree_product, FiniteCoarseSpace, Side};
use hnntree::cyclic::{
    check_axioms, closure, cycle_type, respect_type, search_invariant_order, standard_order, verify_inconsistency,
    verify_trace, ChainInstance, ClosureOutcome, RespectType, SearchMode,
};
use hnntree::hnn::presets::{baumslag_solitar, flagship, quarter_turn};
use hnntree::hnn::{GroupData, Sign, Word};
use hnntree::linalg::{classify_matrix, Lattice, MatrixOrder, RationalMatrix};
use hnntree::{zvec, BigInt, BigRational, ZVec};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Time limits, from the acceptance criteria.
const CLASSIFY_LIMIT: Duration = Duration::from_secs(1);
const WORD_LIMIT: Duration = Duration::from_secs(60);
const STABILIZE_LIMIT: Duration = Duration::from_secs(120);
const CHAIN_LIMIT: Duration = Duration::from_secs(5);
const COARSE_LIMIT: Duration = Duration::from_secs(120);
const SELFTEST_LIMIT: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = RationalMatrix::from_i64(&[&[3, -4], &[4, 3]], 5).map_err(|e| e.to_string())?;
    let c = classify_matrix(&a).map_err(|e| e.to_string())?;
    let t = within(start, CLASSIFY_LIMIT, "flagship classification")?;
    ensure(c.orthogonal_conjugate && c.order == MatrixOrder::Infinite, || format!("flagship: {c:?}"))?;
    let rot = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]], 1).map_err(|e| e.to_string())?;
    let c = classify_matrix(&rot).map_err(|e| e.to_string())?;
    ensure(c.order == MatrixOrder::Finite(4), || format!("quarter turn order {:?}", c.order))?;
    for p in 1..=10 {
        for qq in 1..=10 {
            let c = classify_matrix(&RationalMatrix::from_i64(&[&[qq]], p).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(c.orthogonal_conjugate == (p == qq), || format!("[{qq}/{p}] misclassified"))?;
        }
    }
    Ok(format!("flagship infinite orthogonal in {t:.2?}; quarter turn order 4; 100 rank-one cases"))
}

/// Pinch rewriting explored in every order, with membership in `L'` and `L''`
/// tested through inverse generator matrices.
struct PinchOracle {
    a: RationalMatrix,
    a_inv: RationalMatrix,
    lp_inv: RationalMatrix,
    lpp_inv: RationalMatrix,
}

impl PinchOracle {
    fn new(a: RationalMatrix, lp: &[ZVec]) -> Self {
        let lpp: Vec<ZVec> = lp.iter().map(|c| a.apply_integral(c).expect("integral image")).collect();
        PinchOracle {
            a_inv: a.inverse().expect("invertible"),
            lp_inv: RationalMatrix::from_columns(lp).unwrap().inverse().unwrap(),
            lpp_inv: RationalMatrix::from_columns(&lpp).unwrap().inverse().unwrap(),
            a,
        }
    }

    fn terminals(&self, w: &Word) -> BTreeSet<(Vec<ZVec>, Vec<Sign>)> {
        let mut entries = vec![w.head.clone()];
        let mut signs = Vec::new();
        for (s, c) in &w.tail {
            signs.push(*s);
            entries.push(c.clone());
        }
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        let mut stack = vec![(entries, signs)];
        while let Some((e, s)) = stack.pop() {
            if !seen.insert((e.clone(), s.clone())) {
                continue;
            }
            let mut reducible = false;
            for i in 0..s.len().saturating_sub(1) {
                let c = &e[i + 1];
                let image = match (s[i], s[i + 1]) {
                    (Sign::Pos, Sign::Neg) if self.lp_inv.apply_integral(c).is_some() => self.a.apply_integral(c),
                    (Sign::Neg, Sign::Pos) if self.lpp_inv.apply_integral(c).is_some() => self.a_inv.apply_integral(c),
                    _ => None,
                };
                let Some(image) = image else { continue };
                reducible = true;
                let merged: ZVec = e[i].iter().zip(&image).zip(&e[i + 2]).map(|((x, y), z)| x + y + z).collect();
                let mut e2 = e[..i].to_vec();
                e2.push(merged);
                e2.extend_from_slice(&e[i + 3..]);
                let mut s2 = s[..i].to_vec();
                s2.extend_from_slice(&s[i + 2..]);
                stack.push((e2, s2));
            }
            if !reducible {
                out.insert((e, s));
            }
        }
        out
    }

    fn agrees(&self, g: &GroupData, w: &Word) -> Result<(), String> {
        let nf = g.normalize(w).map_err(|e| e.to_string())?;
        let signs: Vec<Sign> = nf.tail().iter().map(|(s, _)| *s).collect();
        for (e, s) in self.terminals(w) {
            ensure(s == signs, || format!("{w}: reduced sign pattern differs from {nf}"))?;
            if s.is_empty() {
                ensure(&e[0] == nf.head(), || format!("{w}: reduces to {:?}, normal form {nf}", e[0]))?;
            }
            let reduced = Word { head: e[0].clone(), tail: s.iter().copied().zip(e[1..].iter().cloned()).collect() };
            let again = g.normalize(&reduced).map_err(|e| e.to_string())?;
            ensure(again == nf, || format!("{w}: pinch order changes the normal form"))?;
        }
        Ok(())
    }
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, max_t: usize, bound: i64) -> Word {
    let entry = |rng: &mut ChaCha8Rng| -> ZVec { (0..n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect() };
    let head = entry(rng);
    let k = rng.gen_range(0..=max_t);
    let tail = (0..k).map(|_| (if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg }, entry(rng))).collect();
    Word { head, tail }
}

/// Calls `f` on every word of t-length at most `max_t` with entries in
/// `[-bound, bound]^n`.
fn for_all_words(n: usize, max_t: usize, bound: i64, f: &mut dyn FnMut(&Word) -> Result<(), String>) -> Result<usize, String> {
    let vectors: Vec<ZVec> = {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: ZVec| {
                    (-bound..=bound).map(move |c| {
                        let mut v = v.clone();
                        v.push(BigInt::from(c));
                        v
                    })
                })
                .collect();
        }
        out
    };
    let mut count = 0;
    let mut layer: Vec<Word> = vectors.iter().map(|v| Word::abelian(v.clone())).collect();
    for len in 0..=max_t {
        for w in &layer {
            f(w)?;
            count += 1;
        }
        if len == max_t {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * 2 * vectors.len());
        for w in &layer {
            for s in [Sign::Pos, Sign::Neg] {
                for v in &vectors {
                    let mut w2 = w.clone();
                    w2.tail.push((s, v.clone()));
                    next.push(w2);
                }
            }
        }
        layer = next;
    }
    Ok(count)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let groups = [flagship(), baumslag_solitar(1, 2).unwrap(), baumslag_solitar(2, 3).unwrap(), quarter_turn()];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..10_000 {
        let g = &groups[i % groups.len()];
        let (u, v) = (random_word(&mut rng, g.dim(), 8, 20), random_word(&mut rng, g.dim(), 8, 20));
        let nu = g.normalize(&u).map_err(|e| e.to_string())?;
        let nv = g.normalize(&v).map_err(|e| e.to_string())?;
        ensure(g.normalize(nu.as_word()).map_err(|e| e.to_string())? == nu, || format!("idempotence fails on {u}"))?;
        let id = g.multiply(&nu, &g.invert(&nu)).map_err(|e| e.to_string())?;
        ensure(id.is_identity(), || format!("{u} times its inverse is {id}"))?;
        let whole = g.normalize(&u.concat(&v)).map_err(|e| e.to_string())?;
        ensure(whole == g.multiply(&nu, &nv).map_err(|e| e.to_string())?, || format!("product of {u} and {v}"))?;
    }
    let mut exhaustive = 0;
    for (p, qq) in [(1, 2), (2, 3)] {
        let g = baumslag_solitar(p, qq).map_err(|e| e.to_string())?;
        let oracle = PinchOracle::new(RationalMatrix::from_i64(&[&[qq]], p).unwrap(), &[zvec(&[p])]);
        exhaustive += for_all_words(1, 4, 3, &mut |w| oracle.agrees(&g, w))?;
    }
    let g = flagship();
    let oracle = PinchOracle::new(RationalMatrix::from_i64(&[&[3, -4], &[4, 3]], 5).unwrap(), &[zvec(&[2, -1]), zvec(&[1, 2])]);
    let flagship_exhaustive = for_all_words(2, 2, 3, &mut |w| oracle.agrees(&g, w))?;
    for _ in 0..30_000 {
        let mut w = random_word(&mut rng, 2, 4, 3);
        while w.t_length() < 3 {
            w = random_word(&mut rng, 2, 4, 3);
        }
        oracle.agrees(&g, &w)?;
    }
    let t = within(start, WORD_LIMIT, "word problem checks")?;
    Ok(format!(
        "10000 random words; pinch oracle on {exhaustive} BS words (t-length <= 4), {flagship_exhaustive} flagship words (t-length <= 2) plus 30000 sampled at t-length 3-4; {t:.1?}"
    ))
}

fn criterion_3() -> Outcome {
    let g = flagship();
    let mut sizes = Vec::new();
    for r in 0..=4u32 {
        let want = 1 + 10 * (9usize.pow(r) - 1) / 8;
        let ball = expand_ball(&g, r as usize);
        ensure(ball.len() == want, || format!("radius {r}: {} vertices, expected {want}", ball.len()))?;
        for v in 0..ball.len() {
            let deg = ball.neighbors(v).len();
            let want = if ball.depth(v) < r as usize { 10 } else if v == 0 { 0 } else { 1 };
            ensure(deg == want, || format!("radius {r}: vertex {v} has degree {deg}"))?;
        }
        sizes.push(ball.len());
    }
    let bs = baumslag_solitar(1, 2).map_err(|e| e.to_string())?;
    let ball = expand_ball(&bs, 6);
    for v in 0..ball.len() {
        if ball.depth(v) < 6 {
            ensure(ball.neighbors(v).len() == 3, || format!("BS(1,2) vertex {v} has degree {}", ball.neighbors(v).len()))?;
        }
    }
    ensure(ball.len() == 1 + 3 * 63, || format!("BS(1,2) radius-6 ball has {} vertices", ball.len()))?;
    Ok(format!("flagship ball sizes {sizes:?}; BS(1,2) 3-regular to radius 6"))
}

fn primes_dividing(n: &BigInt) -> Vec<u64> {
    let mut n = n.to_u64().expect("small order");
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Orders `n_i`, checked against the action: `n_i a` fixes `B(v0, i)` and
/// `(n_i / p) a` does not.
fn cross_validated_orders(g: &GroupData, a: &ZVec, depth: usize) -> Result<Vec<BigInt>, String> {
    let report = stabilization_sequence(g, a, depth);
    let scaled = |k: &BigInt| -> ZVec { a.iter().map(|x| x * k).collect() };
    for i in 1..=depth {
        let n = &report.n[i - 1];
        if i > 1 {
            ensure((n % &report.n[i - 2]).is_zero(), || format!("n_{} does not divide n_{i}", i - 1))?;
        }
        let ball = expand_ball(g, i);
        ensure(ball.fixes_pointwise(&g.abelian(scaled(n)).map_err(|e| e.to_string())?), || format!("n_{i} a moves B(v0,{i})"))?;
        for p in primes_dividing(n) {
            let w = g.abelian(scaled(&(n / BigInt::from(p)))).map_err(|e| e.to_string())?;
            ensure(!ball.fixes_pointwise(&w), || format!("(n_{i}/{p}) a fixes B(v0,{i})"))?;
        }
    }
    Ok(report.n)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let g = flagship();
    let generic = find_generic_element(&g, 4);
    ensure(generic.report.k[0] == Lattice::scaled_integer(2, &BigInt::from(5)), || format!("K_1 = {}", generic.report.k[0]))?;
    let n = cross_validated_orders(&g, &generic.element, 4)?;
    ensure(n[0] == BigInt::from(5), || format!("n_1 = {}", n[0]))?;
    ensure(n.windows(2).all(|w| w[0] < w[1]), || format!("flagship orders {n:?} do not grow strictly"))?;
    let bs = baumslag_solitar(1, 2).map_err(|e| e.to_string())?;
    let nb = cross_validated_orders(&bs, &zvec(&[1]), 6)?;
    let want: Vec<BigInt> = (1..=6).map(|i| BigInt::from(1u64 << i)).collect();
    ensure(nb == want, || format!("BS(1,2) orders {nb:?}"))?;
    let qt = quarter_turn();
    let gq = find_generic_element(&qt, 6);
    let nq = cross_validated_orders(&qt, &gq.element, 6)?;
    ensure(nq[2..].windows(2).all(|w| w[0] == w[1]) && !gq.growth, || format!("quarter turn orders {nq:?}"))?;
    let t = within(start, STABILIZE_LIMIT, "stabilization checks")?;
    Ok(format!("flagship element {:?} orders {n:?}; BS(1,2) 2^i to depth 6; quarter turn {nq:?}; {t:.1?}", generic.element))
}

/// Circular arrangements of `0..m` starting at 0.
fn arrangements(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            prefix.push(x);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut vec![0], &mut (1..m).collect(), &mut out);
    out
}

fn maps_to_rotation(seq: &[usize], g: &[usize], reversed: bool) -> bool {
    let m = seq.len();
    let mut img: Vec<usize> = seq.iter().map(|&x| g[x]).collect();
    if reversed {
        img.reverse();
    }
    (0..m).any(|k| (0..m).all(|i| img[(i + k) % m] == seq[i]))
}

fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..m).collect();
    let mut c = vec![0; m];
    let mut out = vec![p.clone()];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn criterion_5() -> Outcome {
    for m in 3..=12 {
        let o = standard_order(m).map_err(|e| e.to_string())?;
        check_axioms(o.relation()).map_err(|v| format!("standard order on {m} points: {v}"))?;
        let rot: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
        let refl: Vec<usize> = (0..m).map(|i| (m - i) % m).collect();
        ensure(respect_type(&o, &rot).map_err(|e| e.to_string())? == RespectType::Preserves, || format!("rotation on {m}"))?;
        ensure(respect_type(&o, &refl).map_err(|e| e.to_string())? == RespectType::Reverses, || format!("reflection on {m}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut disagreements = 0;
    for round in 0..200 {
        let m = rng.gen_range(3..=6);
        let gens: Vec<Vec<usize>> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let mut p: Vec<usize> = (0..m).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let mode = if round % 2 == 0 { SearchMode::PreserveOnly } else { SearchMode::Respect };
        let got = search_invariant_order(m, &gens, mode).map_err(|e| e.to_string())?;
        let want = arrangements(m).iter().any(|seq| {
            gens.iter()
                .all(|g| maps_to_rotation(seq, g, false) || (mode == SearchMode::Respect && maps_to_rotation(seq, g, true)))
        });
        if got.is_satisfiable() != want {
            disagreements += 1;
        }
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements with enumeration"))?;
    let mut perms = 0;
    for m in 3..=7 {
        for p in all_permutations(m) {
            let ct = cycle_type(&p);
            let equal = ct.iter().all(|&l| l == ct[0]);
            let r = search_invariant_order(m, std::slice::from_ref(&p), SearchMode::PreserveOnly).map_err(|e| e.to_string())?;
            ensure(r.is_satisfiable() == equal, || format!("{p:?} with cycle type {ct:?}"))?;
            perms += 1;
        }
    }
    Ok(format!("axioms for m in 3..=12; 200 solver runs, 0 disagreements; equal-cycle-length law on {perms} permutations"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut fixtures = 0;
    for m in 2..=50 {
        let inst = ChainInstance::new(m).map_err(|e| e.to_string())?.with_side_condition();
        let ClosureOutcome::Closed(c) = closure(&inst.constraints) else {
            return Err(format!("chain of length {m} is inconsistent"));
        };
        verify_trace(&inst.constraints, &c.trace).map_err(|e| format!("m = {m}: {e:?}"))?;
        for i in 2..=m {
            ensure(c.contains([1, i, inst.z]), || format!("m = {m}: [x_1, x_{i}, z] not derived"))?;
        }
        for i in BTreeSet::from([2, m.div_ceil(2).max(2), m]) {
            let bad = inst.clone().with_recurrence(i).map_err(|e| e.to_string())?;
            let ClosureOutcome::Inconsistent(inc) = closure(&bad.constraints) else {
                return Err(format!("m = {m}: recurrence of x_{i} not refuted"));
            };
            verify_inconsistency(&bad.constraints, &inc).map_err(|e| format!("m = {m}, i = {i}: {e:?}"))?;
            let (a, b) = inc.clash_triples();
            ensure(b == [a[2], a[1], a[0]], || format!("clash {a:?} / {b:?} is not an asymmetry violation"))?;
            fixtures += 1;
        }
    }
    let t = within(start, CHAIN_LIMIT, "chain replay")?;
    Ok(format!("chains m = 2..=50 with checked traces; {fixtures} recurrence fixtures refuted by asymmetry; {t:.2?}"))
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> FiniteCoarseSpace {
    let weight = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
        0 => BigRational::new(BigInt::from(1), BigInt::from(2)),
        k => q(k),
    };
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, weight(rng)));
    }
    for _ in 0..rng.gen_range(0..n) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u, v, weight(rng)));
        }
    }
    FiniteCoarseSpace::from_graph(n, &edges).expect("connected positive graph")
}

fn one_sided_instances(count: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let mut checked = 0;
    while checked < count {
        let n = rng.gen_range(6..16);
        let x = random_graph(&mut rng, n);
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        let mut a = all[..rng.gen_range(1..=2)].to_vec();
        a.sort_unstable();
        let (r, s) = (q(rng.gen_range(1..3)), q(rng.gen_range(1..3)));
        let sep = x.separation_analysis(&a, &r, &s, Some(q(1))).map_err(|e| e.to_string())?;
        let c: Vec<usize> =
            sep.components.iter().filter(|_| rng.gen_bool(0.5)).flat_map(|c| c.points.iter().copied()).collect();
        let to_a = x.distances_to(&a).map_err(|e| e.to_string())?;
        let s_prime = x
            .boundary(&c, &s)
            .map_err(|e| e.to_string())?
            .iter()
            .filter_map(|&p| to_a[p].clone())
            .max()
            .unwrap_or_else(|| q(0));
        let p = &s_prime + &s;
        let near = x.neighborhood(&a, &p).map_err(|e| e.to_string())?;
        let pool: Vec<usize> = (0..n).filter(|v| !near.contains(v)).collect();
        let Some(&start) = pool.choose(&mut rng) else { continue };
        let comps = x.s_components(&pool, &s).map_err(|e| e.to_string())?;
        let m = comps.into_iter().find(|comp| comp.contains(&start)).expect("start has a component");
        let side = x.one_sided_containment_check(&m, &a, &c, &s, &p).map_err(|e| e.to_string())?;
        ensure(!matches!(side, Side::Straddles { .. }), || format!("M = {m:?} straddles C = {c:?}"))?;
        checked += 1;
    }
    Ok(())
}

fn profile_linear(x: &FiniteCoarseSpace, c: &[usize], a: &[usize], r_max: usize, what: &str) -> Result<(), String> {
    let prof = x.coarse_complement_profile(c, a, r_max).map_err(|e| e.to_string())?;
    for (i, rho) in prof.iter().enumerate() {
        ensure(rho.bounded_by(i as i64 + 3), || format!("{what}: rho({}) = {rho:?}", i + 1))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let grid = build_grid(&[21, 21, 21]).map_err(|e| e.to_string())?;
    let plane: Vec<usize> = (0..21 * 21 * 21).filter(|p| p % 21 == 10).collect();
    let sep = grid.separation_analysis(&plane, &q(1), &q(1), None).map_err(|e| e.to_string())?;
    ensure(sep.deep_count == 2 && sep.class_dimension == 1, || {
        format!("plane: {} deep components, dimension {}", sep.deep_count, sep.class_dimension)
    })?;
    for comp in sep.components.iter().filter(|c| c.deep) {
        profile_linear(&grid, &comp.points, &plane, 3, "half of the 21^3 grid")?;
    }
    let fiber: Vec<usize> = (0..21 * 21 * 21).filter(|p| p % 21 == 10 && (p / 21) % 21 == 10).collect();
    let sep = grid.separation_analysis(&fiber, &q(1), &q(1), None).map_err(|e| e.to_string())?;
    ensure(sep.deep_count == 1 && sep.class_dimension == 0, || {
        format!("fiber: {} deep components, dimension {}", sep.deep_count, sep.class_dimension)
    })?;
    one_sided_instances(500)?;

    let small = build_grid(&[9, 9]).map_err(|e| e.to_string())?;
    let row: Vec<usize> = (0..9).map(|j| 4 * 9 + j).collect();
    for comp in small.separation_analysis(&row, &q(1), &q(1), None).map_err(|e| e.to_string())?.components {
        profile_linear(&small, &comp.points, &row, 4, "9^2 grid")?;
    }
    for g in [flagship(), baumslag_solitar(1, 2).map_err(|e| e.to_string())?] {
        let ball = expand_ball(&g, 2);
        let path = build_grid(&[5]).map_err(|e| e.to_string())?;
        let x = build_tree_product(&ball, &path).map_err(|e| e.to_string())?;
        let a: Vec<usize> = ball.axis().iter().flat_map(|&v| (0..5).map(move |p| v * 5 + p)).collect();
        for comp in x.separation_analysis(&a, &q(1), &q(1), None).map_err(|e| e.to_string())?.components {
            profile_linear(&x, &comp.points, &a, 3, "tree product")?;
        }
    }
    let t = within(start, COARSE_LIMIT, "coarse checks")?;
    Ok(format!("21^3 plane: 2 deep, dim 1; fiber: 1 deep, dim 0; 500 one-sided instances; profiles linear; {t:.1?}"))
}

fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hnntree");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/flagship_demo.json");
    let run = |args: &[&str]| Command::new(bin).args(args).output().map_err(|e| e.to_string());
    let first = run(&["demo", "--config", config])?;
    ensure(first.status.success(), || format!("demo failed: {}", String::from_utf8_lossy(&first.stderr)))?;
    let second = run(&["demo", "--config", config])?;
    ensure(first.stdout == second.stdout, || "demo reports differ between runs".into())?;
    let start = Instant::now();
    let st = run(&["selftest"])?;
    let t = within(start, SELFTEST_LIMIT, "selftest")?;
    ensure(st.status.success(), || format!("selftest failed: {}", String::from_utf8_lossy(&st.stderr)))?;
    Ok(format!("demo reports identical ({} bytes); selftest passed in {t:.1?}", first.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 flagship classification", criterion_1),
        ("2 word-problem soundness", criterion_2),
        ("3 tree structure", criterion_3),
        ("4 stabilization at finite depth", criterion_4),
        ("5 cyclic-order engine", criterion_5),
        ("6 chain replay", criterion_6),
        ("7 coarse separations", criterion_7),
        ("8 determinism and self-test", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
