//! Desk-scale invariant suites for every module. Randomized inputs come from
//! fixed seeds so a run is reproducible.

use hnntree::bass_serre::{expand_ball, find_generic_element, stabilization_sequence};
use hnntree::coarse::{build_grid, FiniteCoarseSpace, Side};
use hnntree::cyclic::{
    check_axioms, closure, cycle_type, respect_type, search_invariant_order, standard_order, verify_inconsistency,
    verify_trace, ChainInstance, ClosureOutcome, RespectType, SearchMode, TripleSet,
};
use hnntree::hnn::presets::{baumslag_solitar, flagship, quarter_turn};
use hnntree::hnn::{GroupData, Sign, Word};
use hnntree::linalg::{classify_matrix, hnf, MatrixOrder, RationalMatrix};
use hnntree::{zvec, BigInt, BigRational, ZVec};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::load_group;
use crate::demo::build_group;
use crate::error::CliError;

#[derive(Clone, Debug, Default)]
pub struct SelftestOptions {
    /// Group file checked by the validation suite.
    pub group: Option<std::path::PathBuf>,
    /// Feed the cyclic-order suite a relation holding both `[0,1,2]` and `[0,2,1]`.
    pub inject_asymmetry: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

type Outcome = Result<(), String>;

struct Suite {
    name: &'static str,
    checks: Vec<CheckReport>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, checks: Vec::new() }
    }

    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        let r = f();
        self.checks.push(CheckReport { name: name.to_string(), passed: r.is_ok(), detail: r.err() });
    }

    fn finish(self) -> SuiteReport {
        SuiteReport { suite: self.name.to_string(), passed: self.checks.iter().all(|c| c.passed), checks: self.checks }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn run(opts: &SelftestOptions) -> SelftestReport {
    let suites = vec![linalg_suite(), validation_suite(opts), hnn_suite(), tree_suite(), coarse_suite(), cyclic_suite(opts)];
    SelftestReport { passed: suites.iter().all(|s| s.passed), suites }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn linalg_suite() -> SuiteReport {
    let mut s = Suite::new("exact-linalg");
    s.check("flagship rotation is orthogonal of infinite order", || {
        let c = classify_matrix(flagship().matrix()).map_err(|e| e.to_string())?;
        ensure(c.orthogonal_conjugate && c.order == MatrixOrder::Infinite, || format!("{c:?}"))
    });
    s.check("quarter turn has order 4", || {
        let a = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]], 1).map_err(|e| e.to_string())?;
        let c = classify_matrix(&a).map_err(|e| e.to_string())?;
        ensure(c.order == MatrixOrder::Finite(4), || format!("{:?}", c.order))
    });
    s.check("[q/p] is orthogonal iff |p| = |q|", || {
        for p in 1..=10 {
            for qq in 1..=10 {
                let a = RationalMatrix::from_i64(&[&[qq]], p).map_err(|e| e.to_string())?;
                let c = classify_matrix(&a).map_err(|e| e.to_string())?;
                ensure(c.orthogonal_conjugate == (p == qq), || format!("p = {p}, q = {qq}"))?;
            }
        }
        Ok(())
    });
    s.check("residues partition Z^n / L", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let gens: Vec<ZVec> =
                (0..n + 1).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect()).collect();
            let l = hnf(n, &gens);
            for g in &gens {
                ensure(l.contains(g), || format!("generator {g:?} outside its lattice"))?;
            }
            if !l.is_full_rank() || l.covolume() > BigInt::from(400) {
                continue;
            }
            let res = l.residues();
            ensure(BigInt::from(res.len()) == l.covolume(), || format!("{} residues, covolume {}", res.len(), l.covolume()))?;
            for r in &res {
                ensure(&l.residue(r) == r, || format!("residue {r:?} is not reduced"))?;
            }
        }
        Ok(())
    });
    s.check("intersection lies in both lattices", || {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let gen = |rng: &mut ChaCha8Rng| -> Vec<ZVec> {
                (0..2).map(|_| (0..2).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect()).collect()
            };
            let (a, b) = (hnf(2, &gen(&mut rng)), hnf(2, &gen(&mut rng)));
            let i = a.intersect(&b);
            ensure(i.is_subset_of(&a) && i.is_subset_of(&b), || format!("{a:?} meet {b:?} = {i:?}"))?;
        }
        Ok(())
    });
    s.finish()
}

fn validation_suite(opts: &SelftestOptions) -> SuiteReport {
    let mut s = Suite::new("validation");
    if let Some(path) = &opts.group {
        s.check(&format!("group file {}", path.display()), || {
            let g = load_group(path).map_err(|e| e.to_string())?;
            match build_group(&g) {
                Ok(_) => Ok(()),
                Err(CliError::Stage { message, .. }) => Err(format!("lattice error: {message}")),
                Err(e) => Err(e.to_string()),
            }
        });
    }
    s.check("presets validate with the expected indices", || {
        let cases = [(flagship(), 5, 5), (baumslag_solitar(1, 2).map_err(|e| e.to_string())?, 1, 2), (quarter_turn(), 2, 2)];
        for (g, i1, i2) in cases {
            ensure(*g.index_prime() == BigInt::from(i1) && *g.index_doubleprime() == BigInt::from(i2), || {
                format!("indices {} and {}", g.index_prime(), g.index_doubleprime())
            })?;
        }
        Ok(())
    });
    s.check("non-integral image of L' is rejected", || {
        let a = RationalMatrix::from_i64(&[&[3, -4], &[4, 3]], 5).map_err(|e| e.to_string())?;
        let bad = hnntree::hnn::validate_group(2, a, &[zvec(&[1, 0]), zvec(&[0, 1])]);
        ensure(bad.is_err(), || "Z^2 accepted as L'".into())
    });
    s.finish()
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, max_t: usize) -> Word {
    let entry = |rng: &mut ChaCha8Rng| -> ZVec { (0..n).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect() };
    let head = entry(rng);
    let k = rng.gen_range(0..=max_t);
    let tail = (0..k).map(|_| (if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg }, entry(rng))).collect();
    Word { head, tail }
}

fn hnn_suite() -> SuiteReport {
    let mut s = Suite::new("hnn-core");
    let groups: Vec<(&str, GroupData)> = vec![
        ("flagship", flagship()),
        ("BS(1,2)", baumslag_solitar(1, 2).expect("valid")),
        ("BS(2,3)", baumslag_solitar(2, 3).expect("valid")),
        ("quarter turn", quarter_turn()),
    ];
    for (name, g) in &groups {
        s.check(&format!("{name}: idempotence, inverses, products"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            for _ in 0..150 {
                let (u, v) = (random_word(&mut rng, g.dim(), 5), random_word(&mut rng, g.dim(), 5));
                let nu = g.normalize(&u).map_err(|e| e.to_string())?;
                let nv = g.normalize(&v).map_err(|e| e.to_string())?;
                let again = g.normalize(nu.as_word()).map_err(|e| e.to_string())?;
                ensure(again == nu, || format!("normalize is not idempotent on {u}"))?;
                let id = g.multiply(&nu, &g.invert(&nu)).map_err(|e| e.to_string())?;
                ensure(id.is_identity(), || format!("{u} times its inverse is {}", id.as_word()))?;
                let whole = g.normalize(&u.concat(&v)).map_err(|e| e.to_string())?;
                let prod = g.multiply(&nu, &nv).map_err(|e| e.to_string())?;
                ensure(whole == prod, || format!("normalize({u} {v}) differs from the product"))?;
            }
            Ok(())
        });
    }
    s.check("flagship: t c t^-1 = A c on L'", || {
        let g = flagship();
        for c in g.l_prime().basis() {
            let w = Word::stable(2, Sign::Pos).concat(&Word::abelian(c.clone())).concat(&Word::stable(2, Sign::Neg));
            let lhs = g.normalize(&w).map_err(|e| e.to_string())?;
            let rhs = g.abelian(g.conjugate_by_t(c)).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("relation fails for {c:?}"))?;
        }
        Ok(())
    });
    s.finish()
}

fn primes_dividing(n: &BigInt) -> Vec<u64> {
    let mut n = n.to_u64().unwrap_or(1);
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

fn cross_validate(g: &GroupData, a: &ZVec, depth: usize) -> Result<Vec<BigInt>, String> {
    let report = stabilization_sequence(g, a, depth);
    let scaled = |k: &BigInt| -> ZVec { a.iter().map(|x| x * k).collect() };
    for i in 1..=depth {
        let n = &report.n[i - 1];
        if i > 1 {
            ensure((n % &report.n[i - 2]).is_zero(), || format!("n_{} does not divide n_{i}", i - 1))?;
        }
        let ball = expand_ball(g, i);
        let fixer = g.abelian(scaled(n)).map_err(|e| e.to_string())?;
        ensure(ball.fixes_pointwise(&fixer), || format!("n_{i} a moves B(v0,{i})"))?;
        for p in primes_dividing(n) {
            let w = g.abelian(scaled(&(n / BigInt::from(p)))).map_err(|e| e.to_string())?;
            ensure(!ball.fixes_pointwise(&w), || format!("(n_{i}/{p}) a fixes B(v0,{i})"))?;
        }
    }
    Ok(report.n)
}

fn tree_suite() -> SuiteReport {
    let mut s = Suite::new("bass-serre");
    s.check("flagship ball sizes 1 + 10 (9^r - 1) / 8", || {
        let g = flagship();
        for r in 0..=3u32 {
            let want = 1 + 10 * (9usize.pow(r) - 1) / 8;
            let got = expand_ball(&g, r as usize).len();
            ensure(got == want, || format!("radius {r}: {got} vertices, expected {want}"))?;
        }
        Ok(())
    });
    s.check("BS(1,2) tree is 3-regular", || {
        let g = baumslag_solitar(1, 2).map_err(|e| e.to_string())?;
        let ball = expand_ball(&g, 4);
        for v in 0..ball.len() {
            if ball.depth(v) < 4 {
                ensure(ball.neighbors(v).len() == 3, || format!("vertex {v} has degree {}", ball.neighbors(v).len()))?;
            }
        }
        Ok(())
    });
    s.check("flagship orders grow from 5", || {
        let g = flagship();
        let generic = find_generic_element(&g, 3);
        let n = cross_validate(&g, &generic.element, 3)?;
        ensure(n[0] == BigInt::from(5) && n.windows(2).all(|w| w[0] < w[1]), || format!("n = {n:?}"))
    });
    s.check("BS(1,2) orders are powers of two", || {
        let g = baumslag_solitar(1, 2).map_err(|e| e.to_string())?;
        let n = cross_validate(&g, &zvec(&[1]), 5)?;
        let want: Vec<BigInt> = (1..=5).map(|i| BigInt::from(1u64 << i)).collect();
        ensure(n == want, || format!("n = {n:?}"))
    });
    s.check("quarter turn orders stay constant", || {
        let g = quarter_turn();
        let generic = find_generic_element(&g, 4);
        let n = cross_validate(&g, &generic.element, 4)?;
        ensure(!generic.growth && n.windows(2).all(|w| w[0] == w[1]), || format!("n = {n:?}"))
    });
    s.finish()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Result<FiniteCoarseSpace, String> {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v, q(rng.gen_range(1..=3))));
    }
    for _ in 0..rng.gen_range(0..n) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u, v, q(rng.gen_range(1..=3))));
        }
    }
    FiniteCoarseSpace::from_graph(n, &edges).map_err(|e| e.to_string())
}

fn coarse_suite() -> SuiteReport {
    let mut s = Suite::new("coarse-geom");
    let grid = build_grid(&[9, 9, 9]).expect("small grid");
    s.check("plane splits the 9^3 grid in two", || {
        let plane: Vec<usize> = (0..729).filter(|p| p % 9 == 4).collect();
        let sep = grid.separation_analysis(&plane, &q(1), &q(1), None).map_err(|e| e.to_string())?;
        ensure(sep.deep_count == 2 && sep.class_dimension == 1, || format!("{} deep components", sep.deep_count))
    });
    s.check("fiber leaves the 9^3 grid whole", || {
        let fiber: Vec<usize> = (0..729).filter(|p| p % 9 == 4 && (p / 9) % 9 == 4).collect();
        let sep = grid.separation_analysis(&fiber, &q(1), &q(1), None).map_err(|e| e.to_string())?;
        ensure(sep.deep_count == 1 && sep.class_dimension == 0, || format!("{} deep components", sep.deep_count))
    });
    s.check("half-space profile is linear", || {
        let plane: Vec<usize> = (0..729).filter(|p| p % 9 == 4).collect();
        let half: Vec<usize> = (0..729).filter(|p| p % 9 > 4).collect();
        let prof = grid.coarse_complement_profile(&half, &plane, 3).map_err(|e| e.to_string())?;
        for (i, rho) in prof.iter().enumerate() {
            ensure(rho.bounded_by(i as i64 + 3), || format!("rho({}) = {rho:?}", i + 1))?;
        }
        Ok(())
    });
    s.check("one-sided containment on random graphs", || {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 50 {
            attempts += 1;
            ensure(attempts < 5000, || format!("only {checked} instances met the preconditions"))?;
            let n = rng.gen_range(6..14);
            let x = random_graph(&mut rng, n)?;
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            let mut a = all[..rng.gen_range(1..=2)].to_vec();
            a.sort_unstable();
            let sv = q(rng.gen_range(1..3));
            let sep = x.separation_analysis(&a, &q(1), &sv, Some(q(1))).map_err(|e| e.to_string())?;
            let c: Vec<usize> =
                sep.components.iter().filter(|_| rng.gen_bool(0.5)).flat_map(|c| c.points.iter().copied()).collect();
            let to_a = x.distances_to(&a).map_err(|e| e.to_string())?;
            let bd = x.boundary(&c, &sv).map_err(|e| e.to_string())?;
            let s_prime = bd.iter().filter_map(|&p| to_a[p].clone()).max().unwrap_or_else(|| q(0));
            let p = &s_prime + &sv;
            let near = x.neighborhood(&a, &p).map_err(|e| e.to_string())?;
            let pool: Vec<usize> = (0..n).filter(|v| !near.contains(v)).collect();
            let Some(&start) = pool.choose(&mut rng) else { continue };
            // the s-component of `start` inside the pool is s-connected and avoids N_p(A)
            let m = x
                .s_components(&pool, &sv)
                .map_err(|e| e.to_string())?
                .into_iter()
                .find(|comp| comp.contains(&start))
                .expect("start lies in some component");
            let side = x.one_sided_containment_check(&m, &a, &c, &sv, &p).map_err(|e| e.to_string())?;
            ensure(!matches!(side, Side::Straddles { .. }), || format!("M = {m:?} straddles C = {c:?}"))?;
            checked += 1;
        }
        Ok(())
    });
    s.finish()
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

fn cyclic_suite(opts: &SelftestOptions) -> SuiteReport {
    let mut s = Suite::new("cyclic-order");
    s.check("standard orders satisfy the axioms", || {
        for m in 3..=10 {
            let o = standard_order(m).map_err(|e| e.to_string())?;
            check_axioms(o.relation()).map_err(|v| format!("m = {m}: {v:?}"))?;
            let rot: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
            let refl: Vec<usize> = (0..m).map(|i| (m - i) % m).collect();
            ensure(respect_type(&o, &rot).map_err(|e| e.to_string())? == RespectType::Preserves, || "rotation".into())?;
            ensure(respect_type(&o, &refl).map_err(|e| e.to_string())? == RespectType::Reverses, || "reflection".into())?;
        }
        Ok(())
    });
    if opts.inject_asymmetry {
        s.check("injected asymmetry fixture", || {
            let mut triples = standard_order(5).map_err(|e| e.to_string())?.triples();
            triples.extend([[0, 2, 1], [2, 1, 0], [1, 0, 2]]);
            let rel = TripleSet::from_triples(5, &triples).map_err(|e| e.to_string())?;
            match check_axioms(&rel) {
                Ok(()) => Ok(()),
                Err(v) => Err(format!("{:?} violated by {:?}", v.axiom, v.triples)),
            }
        });
    }
    s.check("equal-cycle-length law for m <= 6", || {
        for m in 3..=6 {
            for p in all_permutations(m) {
                let ct = cycle_type(&p);
                let equal = ct.iter().all(|&l| l == ct[0]);
                let r = search_invariant_order(m, std::slice::from_ref(&p), SearchMode::PreserveOnly)
                    .map_err(|e| e.to_string())?;
                ensure(r.is_satisfiable() == equal, || format!("{p:?} with cycle type {ct:?}"))?;
            }
        }
        Ok(())
    });
    s.check("chain replay with checked traces", || {
        for m in [2, 10, 25] {
            let inst = ChainInstance::new(m).map_err(|e| e.to_string())?.with_side_condition();
            let ClosureOutcome::Closed(c) = closure(&inst.constraints) else {
                return Err(format!("chain of length {m} is inconsistent"));
            };
            verify_trace(&inst.constraints, &c.trace).map_err(|e| format!("{e:?}"))?;
            for t in inst.expected_consequences() {
                ensure(c.contains(t), || format!("{t:?} not derived"))?;
            }
            let bad = inst.clone().with_recurrence(m).map_err(|e| e.to_string())?;
            let ClosureOutcome::Inconsistent(inc) = closure(&bad.constraints) else {
                return Err(format!("recurrence at {m} went unnoticed"));
            };
            verify_inconsistency(&bad.constraints, &inc).map_err(|e| format!("{e:?}"))?;
        }
        Ok(())
    });
    s.check("solver witnesses respect their generators", || {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..60 {
            let m = rng.gen_range(3..=7);
            let gens: Vec<Vec<usize>> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let mut p: Vec<usize> = (0..m).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .collect();
            let r = search_invariant_order(m, &gens, SearchMode::Respect).map_err(|e| e.to_string())?;
            if let (Some(w), Some(signs)) = (r.witness(), r.signs.as_ref()) {
                check_axioms(w.relation()).map_err(|v| format!("{v:?}"))?;
                for (g, sgn) in gens.iter().zip(signs) {
                    ensure(respect_type(w, g).map_err(|e| e.to_string())? == *sgn, || format!("{g:?}"))?;
                }
            }
        }
        Ok(())
    });
    s.finish()
}
