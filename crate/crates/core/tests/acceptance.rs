//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polykit::autos::{compose, evaluate_letters, restrict, verify_steinberg_over, Letter};
use polykit::corpus::{make, named_corpus, simplex};
use polykit::divisibility::{col_divisibility, embed_in_simplex, Violation};
use polykit::doubling::{double, spectrum};
use polykit::linalg::{self, IVec};
use polykit::par::Execution;
use polykit::polygon::{classify, lattice_polygons, ClassTag};
use polykit::rigid::{check_rigid, embed_system, is_y_rigid, k_decompose, y_resolve, RigidSystem};
use polykit::ring::Ring;
use polykit::triangular::{canonicalize, equals_in_g, evaluate_form, layer_partition, random_word};
use polykit::{ColSet, LatticePolytope, LongProduct};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn corpus() -> Vec<LatticePolytope> {
    let mut all = named_corpus();
    all.extend(lattice_polygons(3, Execution::default()).expect("sweep"));
    all
}

fn cols(p: &LatticePolytope) -> Arc<ColSet> {
    Arc::new(ColSet::new(Arc::new(p.clone())))
}

fn sweep4() -> &'static [LatticePolytope] {
    static SWEEP: std::sync::OnceLock<Vec<LatticePolytope>> = std::sync::OnceLock::new();
    SWEEP.get_or_init(|| lattice_polygons(4, Execution::default()).expect("sweep"))
}

fn balanced_sweep4() -> Vec<Arc<ColSet>> {
    polykit::par::map(sweep4(), cols)
        .into_iter()
        .filter(|c| !c.is_empty() && c.is_balanced())
        .collect()
}

fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let corpus = corpus();
    ensure!(corpus.len() >= 20, "corpus has only {} members", corpus.len());
    for p in &corpus {
        let pts = p.lattice_points();
        let mut candidates = BTreeSet::new();
        for a in pts {
            for b in pts {
                if a != b {
                    candidates.insert(linalg::sub(a, b));
                }
            }
        }
        let mut by_facets = BTreeSet::new();
        let mut by_shifts = BTreeSet::new();
        for v in &candidates {
            let pairings: Vec<i64> = p.facets().iter().map(|f| linalg::dot(&f.normal, v)).collect();
            let minus_one = pairings.iter().filter(|&&x| x == -1).count();
            if minus_one == 1 && pairings.iter().all(|&x| x >= -1) {
                by_facets.insert(v.clone());
            }
            let shifts = (0..p.facets().len()).any(|f| {
                let fac = p.facet(f);
                if linalg::dot(&fac.normal, v) != -1 {
                    return false;
                }
                let off: Vec<&IVec> = pts.iter().filter(|x| linalg::dot(&fac.normal, x) != fac.offset).collect();
                off.iter().all(|x| p.contains_lattice_point(&linalg::add(x, v)))
            });
            if shifts {
                by_shifts.insert(v.clone());
            }
        }
        ensure!(by_facets == by_shifts, "criteria disagree on {:?}", p.vertices());
        let c = cols(p);
        let listed: BTreeSet<IVec> = (0..c.len()).map(|i| c.coords(i).clone()).collect();
        ensure!(listed == by_facets, "column set differs on {:?}", p.vertices());
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(format!("{} polytopes in {:.2?}", corpus.len(), t))
}

fn criterion_2() -> Outcome {
    let mut checks = 0usize;
    for p in corpus() {
        let c = cols(&p);
        let n = c.len();
        let base = |i: usize| p.facet(c.base(i));
        let pair = |i: usize, j: usize| linalg::dot(&base(i).normal, c.coords(j));
        let prod = |i: usize, j: usize| c.product(i, j);
        let sum = |i: usize, j: usize| linalg::add(c.coords(i), c.coords(j));
        for u in 0..n {
            for v in 0..n {
                checks += 1;
                let uv = prod(u, v);
                let s = sum(u, v);
                // (a)
                ensure!(uv.is_some() == (!linalg::is_zero(&s) && pair(v, u) > 0), "(a) fails for {u},{v}");
                ensure!(uv.is_some() == c.product_definitional(u, v), "(a) shift form fails for {u},{v}");
                // (b)
                let b_rhs = c.find(&s).is_some_and(|k| c.base(k) == c.base(u));
                ensure!(uv.is_some() == b_rhs, "(b) fails for {u},{v}");
                // (c)
                if let Some(k) = uv {
                    ensure!(c.base(k) == c.base(u) && pair(u, v) == 0, "(c) fails for {u},{v}");
                }
                // (d)
                ensure!(c.contains(&s) == (uv.is_some() != prod(v, u).is_some()), "(d) fails for {u},{v}");
                // (h)
                if let Some(w) = uv {
                    if c.contains(&linalg::neg(c.coords(w))) {
                        ensure!(c.is_invertible(u) && c.is_invertible(v), "(h) fails for {u},{v}");
                    }
                }
                for w in 0..n {
                    let total = linalg::add(&s, c.coords(w));
                    // (e)
                    if let (Some(a), Some(b)) = (uv, prod(v, w)) {
                        if !linalg::is_zero(&total) {
                            let left = prod(a, w);
                            ensure!(left.is_some() && left == prod(u, b), "(e) fails for {u},{v},{w}");
                        }
                    }
                    // (f)
                    if let Some(b) = prod(v, w) {
                        if prod(u, b).is_some() && !linalg::is_zero(&s) {
                            ensure!(uv.is_some(), "(f) fails for {u},{v},{w}");
                        }
                    }
                }
            }
            // (g)
            let v = c.coords(u);
            let pairings: Vec<i64> = p.facets().iter().map(|f| linalg::dot(&f.normal, v)).collect();
            let g1 = c.is_invertible(u);
            let g2 = pairings.iter().filter(|&&x| x == -1).count() == 1
                && pairings.iter().filter(|&&x| x == 1).count() == 1
                && pairings.iter().all(|&x| x.abs() <= 1);
            let f = c.base(u);
            let g3 = (0..n).any(|w| {
                let gw = c.base(w);
                gw != f
                    && linalg::dot(&p.facet(gw).normal, v) > 0
                    && linalg::dot(&p.facet(f).normal, c.coords(w)) > 0
            });
            ensure!(g1 == g2 && g2 == g3, "(g) fails for {v:?} on {:?}", p.vertices());
        }
    }
    Ok(format!("{checks} ordered pairs, zero violations"))
}

fn criterion_3() -> Outcome {
    let c = cols(&make("P_trap").unwrap());
    let (u, v, w) = (vec![0, -1], vec![-1, 0], vec![-1, -1]);
    let got: BTreeSet<IVec> = (0..c.len()).map(|i| c.coords(i).clone()).collect();
    let want: BTreeSet<IVec> = [u.clone(), v.clone(), linalg::neg(&v), w.clone()].into_iter().collect();
    ensure!(got == want, "Col = {got:?}");
    let products: BTreeSet<(IVec, IVec, IVec)> = c
        .product_triples()
        .into_iter()
        .map(|(i, j, k)| (c.coords(i).clone(), c.coords(j).clone(), c.coords(k).clone()))
        .collect();
    let want: BTreeSet<(IVec, IVec, IVec)> =
        [(u.clone(), v.clone(), w.clone()), (w, linalg::neg(&v), u)].into_iter().collect();
    ensure!(products == want, "products = {products:?}");
    Ok("Col = {u, v, -v, w}; products uv = w, w(-v) = u".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let ring = Ring::polynomials(&["l", "m"]).unwrap();
    let members: Vec<Arc<ColSet>> = corpus().iter().map(cols).filter(|c| c.is_balanced()).collect();
    let results = polykit::par::map(&members, |c| -> Result<(usize, usize), String> {
        let (mut prod, mut comm) = (0, 0);
        for i in 0..c.len() {
            for j in 0..c.len() {
                let (u, v) = (c.coords(i), c.coords(j));
                let s = linalg::add(u, v);
                if linalg::is_zero(&s) || (c.contains(&s) && c.product(i, j).is_none()) {
                    continue;
                }
                let r = verify_steinberg_over(c, u, v, &ring).map_err(|e| e.to_string())?;
                if !r.passed {
                    return Err(format!("{u:?}, {v:?} on {:?}", c.polytope().vertices()));
                }
                if r.product.is_some() {
                    prod += 1;
                } else {
                    comm += 1;
                }
            }
        }
        Ok((prod, comm))
    });
    let (mut prod, mut comm) = (0, 0);
    for r in results {
        let (a, b) = r?;
        prod += a;
        comm += b;
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!(
        "{} balanced members, {prod} product and {comm} commuting pairs over ZZ[l,m] in {t:.2?}",
        members.len()
    ))
}

fn criterion_5() -> Outcome {
    let p = Arc::new(simplex(2, 2).unwrap());
    let r = Ring::Integers;
    let c = ColSet::new(p.clone());
    let mut tried = 0;
    for i in 0..c.len() {
        let v = c.coords(i).clone();
        if !c.is_invertible(i) {
            continue;
        }
        tried += 1;
        let w = evaluate_letters(
            &p,
            &[
                Letter::new(v.clone(), r.one()),
                Letter::new(linalg::neg(&v), r.from_i64(-1)),
                Letter::new(v.clone(), r.one()),
            ],
            &r,
        )
        .map_err(|e| e.to_string())?;
        let eps = compose(&w, &w).map_err(|e| e.to_string())?;
        ensure!(!eps.is_identity(), "ε is the identity for v = {v:?}");
        // the edge of 2Δ_2 parallel to v is a copy of 2Δ_1
        let edge: Vec<IVec> = p
            .facets()
            .iter()
            .filter(|f| linalg::dot(&f.normal, &v) == 0)
            .flat_map(|f| p.lattice_points().iter().filter(|x| linalg::dot(&f.normal, x) == f.offset).cloned())
            .collect();
        ensure!(edge.len() == 3, "edge parallel to {v:?} has {} points", edge.len());
        let res = restrict(&eps, &edge).map_err(|e| e.to_string())?;
        ensure!(res.is_identity(), "restriction is not the identity for v = {v:?}");
    }
    ensure!(tried == 6, "expected six invertible vectors, found {tried}");
    Ok("ε ≠ id on 2Δ_2 and ε restricted to 2Δ_1 = id, for all six edge directions".into())
}

fn test_systems() -> Vec<(String, RigidSystem)> {
    let mut out = Vec::new();
    let mut add = |name: &str, vs: &[&[i64]]| {
        let c = cols(&make(name).unwrap());
        let v: Vec<IVec> = vs.iter().map(|x| x.to_vec()).collect();
        let s = check_rigid(&c, &v).unwrap().unwrap();
        out.push((format!("{name} {v:?}"), s));
    };
    add("P_trap", &[&[0, -1], &[-1, 0]]);
    add("P_trap", &[&[-1, -1], &[1, 0]]);
    add("pyr4", &[&[0, 0, -1], &[0, 1, -1], &[1, 0, 0]]);
    add("simplex(2,2)", &[&[1, 0], &[-1, 1]]);
    add("simplex(3,1)", &[&[1, 0, 0], &[-1, 1, 0], &[0, -1, 1]]);
    out
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut words = 0;
    let mut comparisons = 0;
    let mut equal_pairs = 0;
    for ring in [Ring::Integers, Ring::integers_mod(5).unwrap()] {
        for (name, s) in test_systems() {
            let ls = layer_partition(&s);
            let pool = s.closure_coords();
            let p = ls.polytope().clone();
            for _ in 0..100 {
                let len = rand::Rng::gen_range(&mut rng, 0..8);
                let w1 = random_word(&mut rng, &pool, len, &ring);
                let m1 = evaluate_letters(&p, &w1, &ring).map_err(|e| e.to_string())?;
                let form = canonicalize(&ls, &w1, &ring, 1).map_err(|e| e.to_string())?;
                let back = evaluate_form(&ls, &form, &ring).map_err(|e| e.to_string())?;
                ensure!(back.matrix() == m1.matrix(), "canonical form changes the value on {name}");
                words += 1;
                // compare against a random word, and against the canonical letters reversed twice
                let w2 = if rand::Rng::gen_bool(&mut rng, 0.5) {
                    random_word(&mut rng, &pool, len, &ring)
                } else {
                    form.letters()
                };
                let m2 = evaluate_letters(&p, &w2, &ring).map_err(|e| e.to_string())?;
                let by_matrix = m1.matrix() == m2.matrix();
                let by_forms = equals_in_g(&ls, &w1, &w2, &ring).map_err(|e| e.to_string())?;
                ensure!(by_matrix == by_forms, "equality verdicts differ on {name} over {ring}");
                comparisons += 1;
                equal_pairs += usize::from(by_matrix);
            }
        }
    }
    Ok(format!(
        "{words} words on 5 systems over ZZ and ZZ/5; {comparisons} equality verdicts agree ({equal_pairs} equal)"
    ))
}

fn criterion_7() -> Outcome {
    let mut products = 0usize;
    for p in corpus() {
        let c = cols(&p);
        if !c.is_balanced() {
            continue;
        }
        let n = c.len();
        // every sequence of distinct vectors whose long product exists strongly
        let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while let Some(seq) = stack.pop() {
            if let LongProduct::Strong(_) = c.long_product(&seq) {
                products += 1;
                for (i, &vi) in seq.iter().enumerate() {
                    for (j, &vj) in seq.iter().enumerate() {
                        let want = if i == j {
                            -1
                        } else if j == i + 1 {
                            1
                        } else {
                            0
                        };
                        let got = linalg::dot(&p.facet(c.base(vj)).normal, c.coords(vi));
                        ensure!(got == want, "entry ({i},{j}) of {seq:?} is {got} on {:?}", p.vertices());
                    }
                }
            }
            if seq.len() < n {
                let last = *seq.last().unwrap();
                for k in 0..n {
                    if !seq.contains(&k) && c.product(last, k).is_some() {
                        let mut next = seq.clone();
                        next.push(k);
                        stack.push(next);
                    }
                }
            }
        }
    }
    // the non-balanced simplex: uvw exists but the matrix is not bidiagonal
    let c = cols(&make("P_nonrig").unwrap());
    let (u, v, w) = (vec![1, 0, -1], vec![-1, 0, 0], vec![0, 1, 0]);
    let idx: Vec<usize> = [&u, &v, &w].iter().map(|x| c.find(x).unwrap()).collect();
    ensure!(matches!(c.long_product(&idx), LongProduct::Strong(_)), "uvw does not exist on P_nonrig");
    let pw = c.polytope().facet(c.base(idx[2])).clone();
    let pv = c.polytope().facet(c.base(idx[1])).clone();
    let off_band = linalg::dot(&pw.normal, &u);
    let uv = linalg::add(&u, &v);
    let imbalance = linalg::dot(&pw.normal, &uv);
    ensure!(off_band == 1, "⟨P_w, u⟩ = {off_band}");
    ensure!(imbalance == 2, "⟨P_w, uv⟩ = {imbalance}");
    let stated = linalg::dot(&pv.normal, &u);
    Ok(format!(
        "{products} strong products bidiagonal; P_nonrig: ⟨P_w,u⟩ = 1 off the band, ⟨P_w,uv⟩ = 2 (⟨P_v,u⟩ = {stated})"
    ))
}

fn criterion_8() -> Outcome {
    let pyr = cols(&make("pyr4").unwrap());
    let nonrig = cols(&make("P_nonrig").unwrap());
    let (u, v, w) = (vec![0, 0, -1], vec![1, 0, 0], vec![0, 1, 0]);
    ensure!(check_rigid(&pyr, &[u.clone(), v.clone(), w.clone()]).unwrap().is_err(), "pyr4 {{u,v,w}} accepted");
    let nv = [vec![1, 0, -1], vec![-1, 0, 0], vec![0, 1, 0]];
    ensure!(check_rigid(&nonrig, &nv).unwrap().is_err(), "P_nonrig {{u,v,w}} accepted");
    let uw = linalg::add(&u, &w);
    let t = check_rigid(&pyr, &[u.clone(), uw.clone(), v.clone()])
        .unwrap()
        .map_err(|e| format!("T system rejected: {e}"))?;
    ensure!(t.graph.vertex_count == 4, "T graph has {} vertices", t.graph.vertex_count);
    ensure!(t.complexity() == (1, 1), "T complexity {:?}", t.complexity());
    ensure!(!is_y_rigid(&t), "T system is Y-rigid");
    let base: BTreeSet<usize> = [&u, &uw, &v].iter().map(|x| pyr.find(x).unwrap()).collect();
    let mut supersets = 0;
    let mut rigid_supersets = 0;
    for sub in nonempty_subsets(pyr.len()) {
        let set: BTreeSet<usize> = sub.iter().copied().collect();
        if !base.is_subset(&set) {
            continue;
        }
        supersets += 1;
        let vs: Vec<IVec> = sub.iter().map(|&i| pyr.coords(i).clone()).collect();
        if let Ok(s) = check_rigid(&pyr, &vs).unwrap() {
            rigid_supersets += 1;
            ensure!(!is_y_rigid(&s), "Y-rigid superset {vs:?}");
        }
    }
    Ok(format!(
        "both {{u,v,w}} rejected; T accepted; {supersets} supersets ({rigid_supersets} rigid), none Y-rigid"
    ))
}

fn criterion_9() -> Outcome {
    let pyr = cols(&make("pyr4").unwrap());
    let r = col_divisibility(&pyr).map_err(|e| e.to_string())?;
    let cd1 = r.violations.iter().filter(|x| matches!(x, Violation::Cd1 { .. })).count();
    let cd2 = r.violations.iter().filter(|x| matches!(x, Violation::Cd2 { .. })).count();
    ensure!(!r.cd1_ok && cd1 > 0, "pyr4 passes CD1");
    ensure!(!r.cd2_ok && cd2 > 0, "pyr4 passes CD2");
    let balanced = balanced_sweep4();
    let verdicts = polykit::par::map(&balanced, |c| col_divisibility(c).map(|r| r.is_divisible()));
    for (c, v) in balanced.iter().zip(verdicts) {
        ensure!(v == Ok(true), "{:?} is not divisible", c.polytope().vertices());
    }
    Ok(format!("pyr4: {cd1} CD1 and {cd2} CD2 witnesses; {} balanced sweep polygons divisible", balanced.len()))
}

/// Resolves every rigid system generated by at most `max_gens` vectors.
fn resolve_all(c: &Arc<ColSet>, max_gens: usize) -> Result<(usize, usize), String> {
    let (mut systems, mut steps) = (0, 0);
    for sub in nonempty_subsets(c.len()).filter(|s| s.len() <= max_gens) {
        let vs: Vec<IVec> = sub.iter().map(|&i| c.coords(i).clone()).collect();
        let Ok(s) = check_rigid(c, &vs).unwrap() else { continue };
        systems += 1;
        let r = y_resolve(c, &vs).map_err(|e| format!("{vs:?} on {:?}: {e}", c.polytope().vertices()))?;
        let before: HashSet<IVec> = s.closure_coords().into_iter().collect();
        let after: HashSet<IVec> = r.system.closure_coords().into_iter().collect();
        if !before.is_subset(&after) || !is_y_rigid(&r.system) || !r.strictly_decreasing() {
            return Err(format!("{vs:?} on {:?}", c.polytope().vertices()));
        }
        steps += r.steps.len();
    }
    Ok((systems, steps))
}

fn criterion_10() -> Outcome {
    let mut members = balanced_sweep4();
    // three-dimensional members, where rigid systems need not be Y-rigid
    members.push(cols(&simplex(3, 1).unwrap()));
    for p in named_corpus().into_iter().filter(|p| p.dim() == 2) {
        let p = Arc::new(p);
        for f in 0..p.facets().len() {
            let q = double(&p, f).map_err(|e| e.to_string())?.q;
            let c = cols(&q);
            if col_divisibility(&c).is_ok_and(|r| r.is_divisible()) {
                members.push(c);
            }
        }
    }
    let results = polykit::par::map(&members, |c| resolve_all(c, 4));
    let (mut systems, mut steps) = (0, 0);
    for r in results {
        let (a, b) = r?;
        systems += a;
        steps += b;
    }
    ensure!(steps > 0, "no system needed rewriting");
    Ok(format!("{systems} rigid systems on {} polytopes resolved, {steps} rewrite steps", members.len()))
}

fn criterion_11() -> Outcome {
    let mut doublings = 0;
    let mut members = 0;
    for p in named_corpus() {
        let c = cols(&p);
        if c.is_empty() {
            continue;
        }
        members += 1;
        let arc = c.polytope_arc().clone();
        for i in 0..c.len() {
            let v = c.coords(i).clone();
            let d = double(&arc, c.base(i)).map_err(|e| e.to_string())?;
            d.verify_identities().map_err(|e| e.to_string())?;
            let q = ColSet::new(d.q.clone());
            // (a)
            for j in 0..c.len() {
                ensure!(q.contains(&d.embed(c.coords(j))), "Col not preserved on {:?}", p.vertices());
            }
            // (b)
            let (dp, dm) = (d.delta_plus.clone(), d.delta_minus());
            let (vm, vl) = (d.embed(&v), d.lift_vector(&v));
            let prod = |a: &IVec, b: &IVec| -> Option<IVec> {
                q.product(q.find(a)?, q.find(b)?).map(|k| q.coords(k).clone())
            };
            ensure!(prod(&dp, &vl) == Some(vm.clone()), "v ≠ δ⁺v^| for {v:?}");
            ensure!(prod(&dm, &vm) == Some(vl.clone()), "v^| ≠ δ⁻v⁻ for {v:?}");
            // (c)
            if c.is_balanced() {
                ensure!(q.is_balanced(), "double of a balanced polytope is not balanced");
                let mut want: BTreeSet<IVec> = BTreeSet::new();
                for j in 0..c.len() {
                    want.insert(d.embed(c.coords(j)));
                    want.insert(d.lift_vector(c.coords(j)));
                }
                want.insert(dp.clone());
                want.insert(dm.clone());
                let got: BTreeSet<IVec> = (0..q.len()).map(|k| q.coords(k).clone()).collect();
                ensure!(got == want, "Col of the double differs on {:?}", p.vertices());
            }
            doublings += 1;
        }
    }
    ensure!(doublings >= 10, "only {doublings} doublings");
    // fairness: every base vector decomposed within the horizon
    let mut ledgers = 0;
    for name in ["P_trap", "square", "simplex(2,1)", "segment(3)"] {
        let p = make(name).unwrap();
        let h = cols(&p).len();
        let s = spectrum(&p, h, p.dim() + h).map_err(|e| e.to_string())?;
        ensure!(s.undecomposed_base_vectors().is_empty(), "{name}: undecomposed base vectors after {h} steps");
        ledgers += 1;
    }
    Ok(format!("{doublings} doublings over {members} members; {ledgers} spectra decompose every base vector"))
}

fn criterion_12() -> Outcome {
    let a = classify(&simplex(2, 2).unwrap()).map_err(|e| e.to_string())?;
    ensure!(a.class == ClassTag::A && a.params.c == Some(2) && a.group_shape.label == "E_a", "2Δ_2 → {a:?}");
    let b = classify(&make("P_trap").unwrap()).map_err(|e| e.to_string())?;
    ensure!(b.class == ClassTag::B && b.group_shape.label == "E_b", "P_trap → {:?}", b.class);
    let e = classify(&make("square").unwrap()).map_err(|e| e.to_string())?;
    ensure!(e.class == ClassTag::E && e.group_shape.label == "E_e", "square → {:?}", e.class);
    let balanced = balanced_sweep4();
    let verdicts = polykit::par::map(&balanced, |c| classify(c.polytope()));
    let mut counts: HashMap<ClassTag, usize> = HashMap::new();
    for (c, v) in balanced.iter().zip(verdicts) {
        let v = v.map_err(|e| format!("{:?}: {e}", c.polytope().vertices()))?;
        *counts.entry(v.class).or_default() += 1;
    }
    let summary: Vec<String> = ClassTag::ALL
        .iter()
        .map(|t| format!("{}={}", t.letter(), counts.get(t).copied().unwrap_or(0)))
        .collect();
    Ok(format!("{} balanced polygons classified ({})", balanced.len(), summary.join(" ")))
}

fn criterion_13() -> Outcome {
    let mut members = 0;
    let mut systems = 0;
    for p in corpus() {
        let c = cols(&p);
        if c.is_empty() || !col_divisibility(&c).is_ok_and(|r| r.is_divisible()) {
            continue;
        }
        members += 1;
        let e = embed_in_simplex(&c).map_err(|e| format!("{:?}: {e}", p.vertices()))?;
        let s = &e.simplex;
        for i in 0..c.len() {
            for j in 0..c.len() {
                let img = |k: usize| e.image(k).clone();
                let si = s.find(&img(i)).unwrap();
                let sj = s.find(&img(j)).unwrap();
                ensure!(c.pairing(i, j) == s.pairing(si, sj), "pairing not preserved on {:?}", p.vertices());
                let lhs = c.product(i, j).map(img);
                let rhs = s.product(si, sj).map(|k| s.coords(k).clone());
                ensure!(lhs == rhs, "product not preserved on {:?}", p.vertices());
            }
        }
        for sub in nonempty_subsets(c.len()).filter(|s| s.len() <= 3) {
            let vs: Vec<IVec> = sub.iter().map(|&i| c.coords(i).clone()).collect();
            let Ok(sys) = check_rigid(&c, &vs).unwrap() else { continue };
            let image = embed_system(&e, &sys).map_err(|e| e.to_string())?;
            ensure!(image.is_ok(), "image of {vs:?} on {:?} is not rigid", p.vertices());
            systems += 1;
        }
    }
    Ok(format!("{members} divisible members embedded; {systems} rigid systems map to rigid systems"))
}

/// Irreducibles of `closure` (under `c`'s products) used by `x`.
fn irreducible_support(c: &ColSet, closure: &HashSet<IVec>, x: &IVec) -> BTreeSet<IVec> {
    let idx = c.find(x).unwrap();
    for a in closure {
        for b in closure {
            let (ai, bi) = (c.find(a).unwrap(), c.find(b).unwrap());
            if c.product(ai, bi) == Some(idx) {
                let mut s = irreducible_support(c, closure, a);
                s.extend(irreducible_support(c, closure, b));
                return s;
            }
        }
    }
    [x.clone()].into_iter().collect()
}

fn criterion_14() -> Outcome {
    let c = cols(&make("P_trap").unwrap());
    let pairs = [
        [vec![vec![-1, -1], vec![0, -1]], vec![vec![-1, -1], vec![1, 0]]],
        [vec![vec![-1, -1], vec![-1, 0]], vec![vec![-1, 0], vec![0, -1]]],
    ];
    let mut runs = 0;
    for inputs in &pairs {
        for k in [2usize, 3] {
            check_k_decomposition(&c, inputs, k)?;
            runs += 1;
        }
    }
    Ok(format!("k = 2, 3 on two pairs of trapezoid systems ({runs} constructions) satisfy the definition"))
}

fn check_k_decomposition(c: &Arc<ColSet>, inputs: &[Vec<IVec>], k: usize) -> Result<(), String> {
    let us: Vec<RigidSystem> = inputs.iter().map(|v| check_rigid(c, v).unwrap().unwrap()).collect();
    let kd = k_decompose(&us, k, 12).map_err(|e| format!("{inputs:?}, k = {k}: {e}"))?;
    let qc = &kd.cols;
    let n = qc.polytope().dim();
    let pad = |v: &IVec| {
        let mut y = v.clone();
        y.resize(n, 0);
        y
    };
    // U_i ⊆ V_i
    for (u, v) in us.iter().zip(&kd.systems) {
        ensure!(u.generator_coords().iter().all(|g| v.contains(&pad(g))), "an input is not contained in its extension");
    }
    let shared: HashSet<IVec> = kd
        .systems
        .iter()
        .map(|s| s.closure_coords().into_iter().collect::<HashSet<_>>())
        .reduce(|a, b| a.intersection(&b).cloned().collect())
        .unwrap();
    let shared_in: HashSet<IVec> = us
        .iter()
        .map(|s| s.closure_coords().into_iter().map(|x| pad(&x)).collect::<HashSet<_>>())
        .reduce(|a, b| a.intersection(&b).cloned().collect())
        .unwrap();
    ensure!(kd.factorizations.len() >= 2, "{inputs:?}: fewer than two targets");
    let mut supports: Vec<BTreeSet<IVec>> = Vec::new();
    for (u, fs) in &kd.factorizations {
        ensure!(shared_in.contains(u), "target {u:?} is not in the input intersection");
        ensure!(fs.len() == k, "{u:?} has {} factors", fs.len());
        ensure!(fs.iter().all(|f| shared.contains(f)), "a factor of {u:?} is outside the intersection");
        let total = fs.iter().fold(vec![0; n], |a, f| linalg::add(&a, f));
        ensure!(&total == u, "factors of {u:?} sum to {total:?}");
        let idx: Vec<usize> = fs.iter().map(|f| qc.find(f).unwrap()).collect();
        ensure!(matches!(qc.long_product(&idx), LongProduct::Strong(_)), "product of factors of {u:?} does not exist");
        let support: BTreeSet<IVec> = fs.iter().flat_map(|f| irreducible_support(qc, &shared, f)).collect();
        ensure!(supports.iter().all(|s| s.is_disjoint(&support)), "irreducible supports overlap for {u:?}");
        supports.push(support);
    }
    Ok(())
}

fn main() {
    let criteria: [Check; 14] = [
        ("column-vector duality", criterion_1),
        ("product properties", criterion_2),
        ("trapezoid products", criterion_3),
        ("commutator relations", criterion_4),
        ("unfaithful restriction", criterion_5),
        ("canonical forms", criterion_6),
        ("long-product pairing matrix", criterion_7),
        ("rigidity decisions", criterion_8),
        ("divisibility", criterion_9),
        ("Y-resolution", criterion_10),
        ("doubling identities", criterion_11),
        ("polygon classification", criterion_12),
        ("simplex embedding", criterion_13),
        ("k-decomposition", criterion_14),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{t:.2?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} {name}: FAIL ({why}) [{t:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
