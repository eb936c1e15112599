//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p j2kit --test acceptance`. `J2KIT_C6_SECONDS` sets the
//! time budget of criterion 6 (default 120, capped at 540).

mod common;

use std::time::{Duration, Instant};

use common::{nbisim_direct, Plain, SumOracle, Universe};
use j2kit::bisim::{char_formula, nbisimilar};
use j2kit::decide::{consequence_formula, is_theorem, is_valid};
use j2kit::model::{apply_subst_model, generated_submodel, validate_frame, RawModel};
use j2kit::unify::{
    basis_of_unifiers, is_admissible, projective_unifier, rank_info, theta_bar, ThetaBar, UnifyBounds,
};
use j2kit::{parse, render, Formula, Modality, PointedModel, StratifiedModel, VarContext};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { pass, detail: detail.into() }
    }
}

/// Criteria that cannot pass as stated, with the reason printed next to the FAIL line.
const UNATTAINABLE: &[(usize, &str)] = &[
    (1, "scheme (vi) [0]A -> [1]A is not valid on stratified models"),
    (6, "2^32 semantic classes cannot be enumerated in the budget, and some violations need models beyond the oracle bounds"),
];

fn main() {
    let started = Instant::now();
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "soundness of the axiom schemes", Box::new(c1_soundness)),
        (2, "frame condition vs [0]p -> [0][1]p", Box::new(c2_frames)),
        (3, "characteristic formulas vs n-bisimilarity", Box::new(c3_char_formulas)),
        (4, "n-bisimilar points agree on depth-n formulas", Box::new(c4_transfer)),
        (5, "substitutions acting on models", Box::new(c5_substitutions)),
        (6, "projectivity vs brute-force 1-sum oracle", Box::new(c6_projectivity)),
        (7, "one repair round fixes a bad root sheet", Box::new(c7_root_sheet_repair)),
        (8, "least rank of a bad world grows under repair", Box::new(c8_mu_monotone)),
        (9, "admissibility regression", Box::new(c9_admissibility)),
        (10, "basis incomparability", Box::new(c10_basis)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in &criteria {
        let t = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict}: {name} ({:.1}s) {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            match UNATTAINABLE.iter().find(|(k, _)| k == id) {
                Some((_, why)) => println!("             known: {why}"),
                None => unexpected.push(*id),
            }
        }
    }
    println!("acceptance finished in {:.1}s", started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn bounds() -> UnifyBounds {
    UnifyBounds::default()
}

fn var(i: usize) -> Formula {
    Formula::var(i)
}

fn bx(m: Modality, a: Formula) -> Formula {
    Formula::boxed(m, a)
}

fn imp(a: Formula, b: Formula) -> Formula {
    Formula::implies(a, b)
}

type Scheme = (&'static str, fn(&[Formula]) -> Formula);

fn schemes() -> Vec<Scheme> {
    use Modality::{One, Zero};
    vec![
        ("(i) A->(B->A)", |f| imp(f[0].clone(), imp(f[1].clone(), f[0].clone()))),
        ("(i) distribution", |f| {
            let (a, b, c) = (f[0].clone(), f[1].clone(), f[2].clone());
            imp(imp(a.clone(), imp(b.clone(), c.clone())), imp(imp(a.clone(), b), imp(a, c)))
        }),
        ("(i) contraposition", |f| {
            imp(imp(Formula::not(f[1].clone()), Formula::not(f[0].clone())), imp(f[0].clone(), f[1].clone()))
        }),
        ("(i) excluded middle", |f| Formula::or(f[0].clone(), Formula::not(f[0].clone()))),
        ("(i) A&B->A", |f| imp(Formula::and(f[0].clone(), f[1].clone()), f[0].clone())),
        ("(ii) K[0]", |f| k_axiom(Zero, f)),
        ("(ii) K[1]", |f| k_axiom(One, f)),
        ("(iii) Loeb[0]", |f| loeb(Zero, f)),
        ("(iii) Loeb[1]", |f| loeb(One, f)),
        ("(iv) [0]A->[0][0]A", |f| imp(bx(Zero, f[0].clone()), bx(Zero, bx(Zero, f[0].clone())))),
        ("(iv) [0]A->[1][0]A", |f| imp(bx(Zero, f[0].clone()), bx(One, bx(Zero, f[0].clone())))),
        ("(iv) [1]A->[1][1]A", |f| imp(bx(One, f[0].clone()), bx(One, bx(One, f[0].clone())))),
        ("(v) <0>A->[1]<0>A", |f| {
            let d = Formula::diamond(Zero, f[0].clone());
            imp(d.clone(), bx(One, d))
        }),
        ("(vi) [0]A->[1]A", |f| imp(bx(Zero, f[0].clone()), bx(One, f[0].clone()))),
        ("J2 [0]A->[0][0]A", |f| imp(bx(Zero, f[0].clone()), bx(Zero, bx(Zero, f[0].clone())))),
        ("J2 [0]A->[0][1]A", |f| imp(bx(Zero, f[0].clone()), bx(Zero, bx(One, f[0].clone())))),
        ("J2 [1]A->[1][1]A", |f| imp(bx(One, f[0].clone()), bx(One, bx(One, f[0].clone())))),
    ]
}

fn k_axiom(m: Modality, f: &[Formula]) -> Formula {
    let (a, b) = (f[0].clone(), f[1].clone());
    imp(bx(m, imp(a.clone(), b.clone())), imp(bx(m, a), bx(m, b)))
}

fn loeb(m: Modality, f: &[Formula]) -> Formula {
    let a = f[0].clone();
    imp(bx(m, imp(bx(m, a.clone()), a.clone())), bx(m, a))
}

fn c1_soundness() -> Outcome {
    let t = Instant::now();
    let mut rng = common::rng(101);
    let mut models = Vec::new();
    while models.len() < 200 {
        let m = common::random_model(&mut rng, 8, 2);
        if validate_frame(&m.to_raw()).map(|r| r.all_ok()).unwrap_or(false) {
            models.push(m);
        }
    }
    let mut failing = Vec::new();
    let mut other_failures = 0;
    for (name, build) in schemes() {
        let mut bad = 0;
        let mut example = None;
        for _ in 0..50 {
            let args: Vec<Formula> = (0..3).map(|_| common::random_formula(&mut rng, 2, 1)).collect();
            let inst = build(&args);
            if let Some(m) = models.iter().find(|m| !m.globally_true(&inst)) {
                bad += 1;
                example.get_or_insert_with(|| format!("{} refuted on a {}-world model", render(&inst), m.len()));
            }
        }
        if bad > 0 {
            if !name.starts_with("(vi)") {
                other_failures += bad;
            }
            failing.push(format!("{name}: {bad}/50 instances fail, e.g. {}", example.unwrap_or_default()));
        }
    }
    let fast = t.elapsed() < Duration::from_secs(60);
    let detail = if failing.is_empty() {
        "17 schemes x 50 instances globally true on 200 models".to_string()
    } else {
        format!("{} failing schemes ({} failures outside (vi)); {}", failing.len(), other_failures, failing.join("; "))
    };
    Outcome::new(failing.is_empty() && fast, detail)
}

/// Strict partial orders on `0..n`.
fn strict_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let mut r = vec![vec![false; n]; n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            r[a][b] = mask >> k & 1 == 1;
        }
        let asym = (0..n).all(|a| (0..n).all(|b| !(r[a][b] && r[b][a])));
        let trans = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(r[a][b] && r[b][c]) || r[a][c])));
        if asym && trans {
            out.push(r);
        }
    }
    out
}

fn c2_frames() -> Outcome {
    let t = Instant::now();
    let (mut frames, mut agree, mut disagree) = (0usize, 0usize, Vec::new());
    let mut valid_count = 0;
    for n in 1..=4 {
        let orders = strict_orders(n);
        for r0 in &orders {
            for r1 in &orders {
                let rooted = {
                    let mut seen = vec![false; n];
                    let mut stack = vec![0];
                    seen[0] = true;
                    while let Some(x) = stack.pop() {
                        for y in 0..n {
                            if (r0[x][y] || r1[x][y]) && !seen[y] {
                                seen[y] = true;
                                stack.push(y);
                            }
                        }
                    }
                    seen.into_iter().all(|s| s)
                };
                if !rooted {
                    continue;
                }
                frames += 1;
                let edges = |r: &Vec<Vec<bool>>| {
                    let mut e = Vec::new();
                    for a in 0..n {
                        for b in 0..n {
                            if r[a][b] {
                                e.push((a as i64, b as i64));
                            }
                        }
                    }
                    e
                };
                let raw = RawModel {
                    worlds: (0..n as i64).collect(),
                    r0: edges(r0),
                    r1: edges(r1),
                    val: vec![0; n],
                    root: Some(0),
                };
                let flag = validate_frame(&raw).expect("well-formed").j2_ok;
                let f = imp(bx(Modality::Zero, var(0)), bx(Modality::Zero, bx(Modality::One, var(0))));
                let valid = (0u64..1 << n).all(|bits| {
                    let val = (0..n).map(|x| bits >> x & 1).collect();
                    Plain::of_raw(&RawModel { val, ..raw.clone() }).global(&f)
                });
                valid_count += valid as usize;
                if flag == valid {
                    agree += 1;
                } else if disagree.len() < 3 {
                    disagree.push(format!("{raw:?}"));
                }
            }
        }
    }
    let fast = t.elapsed() < Duration::from_secs(120);
    Outcome::new(
        agree == frames && fast,
        format!(
            "{agree}/{frames} rooted pairs of strict orders on <=4 worlds agree ({valid_count} validate the formula){}",
            if disagree.is_empty() { String::new() } else { format!("; disagreements: {}", disagree.join(" | ")) }
        ),
    )
}

fn c3_char_formulas() -> Outcome {
    let t = Instant::now();
    let mut rng = common::rng(303);
    let (mut checks, mut positives, mut failures) = (0, 0, Vec::new());
    for i in 0..500 {
        let nvars = rng.gen_range(1..=2);
        let ctx = VarContext::standard(nvars);
        let a = common::random_model(&mut rng, 6, nvars);
        let b = if i % 2 == 0 { common::bisimilar_copy(&mut rng, &a) } else { common::random_model(&mut rng, 6, nvars) };
        let pa = PointedModel { point: rng.gen_range(0..a.len()), model: a.clone() };
        let pb = if i % 2 == 0 && rng.gen_bool(0.5) {
            PointedModel { point: b.index_of(a.id(pa.point)).expect("twinning keeps ids"), model: b.clone() }
        } else {
            PointedModel { point: rng.gen_range(0..b.len()), model: b.clone() }
        };
        let (plain_a, plain_b) = (Plain::of(&a), Plain::of(&b));
        for n in 0..=2 {
            let chi = char_formula(&pa, n, &ctx);
            let forced = pb.model.forces(pb.point, &chi);
            let direct = nbisim_direct(&plain_a, pa.point, &plain_b, pb.point, n);
            let library = nbisimilar(&pa, &pb, n);
            checks += 1;
            positives += direct as usize;
            if forced != direct || library != direct {
                failures.push(format!("pair {i} n={n}: forces={forced} direct={direct} nbisimilar={library}"));
            }
        }
    }
    let fast = t.elapsed() < Duration::from_secs(120);
    Outcome::new(
        failures.is_empty() && fast,
        format!(
            "{}/{checks} agree ({positives} bisimilar){}",
            checks - failures.len(),
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    )
}

fn c4_transfer() -> Outcome {
    let mut rng = common::rng(404);
    let (mut pairs, mut failures, mut tries) = (0, Vec::new(), 0);
    while pairs < 300 {
        tries += 1;
        let nvars = rng.gen_range(1..=2);
        let n = rng.gen_range(0..=2);
        let a = common::random_model(&mut rng, 6, nvars);
        let (pa, pb) = if pairs % 2 == 0 {
            let b = common::bisimilar_copy(&mut rng, &a);
            let x = rng.gen_range(0..a.len());
            let y = b.index_of(a.id(x)).expect("twinning keeps ids");
            (PointedModel { model: a, point: x }, PointedModel { model: b, point: y })
        } else {
            let b = common::random_model(&mut rng, 6, nvars);
            let (x, y) = (rng.gen_range(0..a.len()), rng.gen_range(0..b.len()));
            (PointedModel { model: a, point: x }, PointedModel { model: b, point: y })
        };
        if !nbisim_direct(&Plain::of(&pa.model), pa.point, &Plain::of(&pb.model), pb.point, n) {
            continue;
        }
        pairs += 1;
        for _ in 0..20 {
            let f = common::random_formula(&mut rng, nvars, n);
            if pa.model.forces(pa.point, &f) != pb.model.forces(pb.point, &f) {
                failures.push(format!("n={n} {}", render(&f)));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "300 pairs ({tries} drawn) x 20 formulas, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    )
}

fn c5_substitutions() -> Outcome {
    let mut rng = common::rng(505);
    let mut failures = Vec::new();
    for i in 0..300 {
        let nvars = rng.gen_range(1..=2);
        let w = common::random_model(&mut rng, 6, nvars);
        let sigma = common::random_subst(&mut rng, nvars, 2);
        let tau = common::random_subst(&mut rng, nvars, 2);
        let sw = apply_subst_model(&sigma, &w);
        let (plain_w, plain_sw) = (Plain::of(&w), Plain::of(&sw));
        for _ in 0..5 {
            let f = common::random_formula(&mut rng, nvars, 2);
            let image = sigma.apply(&f);
            if (0..w.len()).any(|x| plain_sw.eval(x, &f) != plain_w.eval(x, &image)) {
                failures.push(format!("pair {i}: forcing transfer fails for {}", render(&f)));
            }
        }
        // sigma applied to the model tau(W) reads tau(sigma(p)) in W
        let stepwise = apply_subst_model(&sigma, &apply_subst_model(&tau, &w));
        if stepwise.valuations() != apply_subst_model(&tau.compose(&sigma), &w).valuations() {
            failures.push(format!("pair {i}: sigma(tau(W)) differs from (tau sigma)(W)"));
        }
        for x in 0..w.len() {
            let id = w.id(x);
            let a = generated_submodel(&sw, id).expect("world exists").model;
            let b = apply_subst_model(&sigma, &generated_submodel(&w, id).expect("world exists").model);
            let by_id = |m: &StratifiedModel| {
                let mut v: Vec<(i64, u64)> = (0..m.len()).map(|y| (m.id(y), m.valuation(y))).collect();
                v.sort_unstable();
                v
            };
            if by_id(&a) != by_id(&b) {
                failures.push(format!("pair {i}: restriction to world {id} does not commute"));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "300 pairs, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    )
}

/// Seeded classes of the depth-1 one-variable fragment: the two trivial ones,
/// then random type sets at several densities.
fn fragment_classes(seed: u64, ntypes: usize) -> impl Iterator<Item = u64> {
    let mut rng = common::rng(seed);
    let full = (1u64 << ntypes) - 1;
    [0, full].into_iter().chain(std::iter::from_fn(move || {
        let p: f64 = [0.5, 0.8, 0.95][rng.gen_range(0..3)];
        Some((0..ntypes).filter(|_| rng.gen_bool(p)).fold(0u64, |a, b| a | 1 << b))
    }))
}

fn unifier_checks(phi: &Formula, sigma: &j2kit::Substitution, b: &UnifyBounds) -> bool {
    let unifies = is_valid(&sigma.apply(phi), &b.saturation).unwrap_or(false);
    let fixes = (0..sigma.ctx().len()).all(|i| {
        let p = var(i);
        is_valid(&consequence_formula(phi, &Formula::iff(sigma.apply(&p), p)), &b.saturation).unwrap_or(false)
    });
    unifies && fixes
}

fn c6_projectivity() -> Outcome {
    let t = Instant::now();
    let budget = std::env::var("J2KIT_C6_SECONDS")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(120)
        .min(540);
    let u = Universe::one_var();
    let oracle = SumOracle::build(&u);
    let b = bounds();
    let ntypes = u.len();
    let (mut seen, mut agree, mut unifiers, mut bad_unifiers, mut errors) = (0, 0, 0, 0, 0);
    // engine reports a violation the oracle misses, split by whether the witness checks out
    let (mut beyond_bounds, mut bad_witness, mut false_projective) = (0, 0, 0);
    let mut examples = Vec::new();
    let mut largest_witness = 0;
    let mut distinct = std::collections::HashSet::new();
    for class in fragment_classes(606, ntypes) {
        if t.elapsed() > Duration::from_secs(budget) {
            break;
        }
        if !distinct.insert(class) {
            continue;
        }
        seen += 1;
        let phi = u.class_formula(class);
        let violated = oracle.violated(class);
        match projective_unifier(&phi, &u.ctx, &b) {
            Ok(rep) => {
                if let Some(sigma) = &rep.unifier {
                    unifiers += 1;
                    if !unifier_checks(&phi, sigma, &b) {
                        bad_unifiers += 1;
                    }
                }
                if rep.projective != violated {
                    agree += 1;
                } else if rep.projective {
                    false_projective += 1;
                    examples.push(format!("{class:#x} projective but the oracle found a violation"));
                } else {
                    let w = rep.witness.as_ref();
                    let genuine = w.is_some_and(|w| witness_holds(&w.model, &phi));
                    if genuine {
                        beyond_bounds += 1;
                        largest_witness = largest_witness.max(w.map_or(0, |w| w.model.len()));
                    } else {
                        bad_witness += 1;
                    }
                    if examples.len() < 5 {
                        examples.push(format!(
                            "{class:#x} witness of {} worlds ({})",
                            w.map_or(0, |w| w.model.len()),
                            if genuine { "checked" } else { "does not check" }
                        ));
                    }
                }
            }
            Err(e) => {
                errors += 1;
                examples.push(format!("{class:#x} error: {e}"));
            }
        }
    }
    let total = 1u64 << ntypes;
    let exhaustive = seen as u64 == total;
    let disagreements = seen - agree - errors;
    let pass = exhaustive && disagreements == 0 && errors == 0 && bad_unifiers == 0;
    Outcome::new(
        pass,
        format!(
            "{ntypes} types, {} oracle signatures; {seen} of {total} classes checked in a {budget}s budget; \
             {agree} agree, {errors} errors; {unifiers} unifiers, {bad_unifiers} failing re-verification; \
             disagreements: {false_projective} claimed projective against an oracle violation, \
             {beyond_bounds} violations beyond the oracle bounds with checked witnesses (largest {largest_witness} worlds), \
             {bad_witness} with unchecked witnesses{}",
            oracle.signatures.len(),
            if examples.is_empty() { String::new() } else { format!("; e.g. {}", examples.join(", ")) }
        ),
    )
}

/// Every non-root world satisfies `phi` and no variant makes the root satisfy it,
/// checked with the plain evaluator.
fn witness_holds(m: &StratifiedModel, phi: &Formula) -> bool {
    let plain = Plain::of(m);
    let rest = (0..m.len()).filter(|&x| x != m.root()).all(|x| plain.eval(x, phi));
    let variants = (0..2u64).all(|v| {
        let mv = m.variant(v);
        !Plain::of(&mv).eval(mv.root(), phi)
    });
    rest && variants
}

/// Projective classes of the fragment with their repair substitutions.
fn projective_sample(u: &Universe, oracle: &SumOracle, seed: u64, want: usize) -> Vec<(u64, Formula, ThetaBar)> {
    let b = bounds();
    let mut out = Vec::new();
    for class in fragment_classes(seed, u.len()).skip(2).take(400) {
        if out.len() == want {
            break;
        }
        if oracle.violated(class) {
            continue;
        }
        let phi = u.class_formula(class);
        let projective = projective_unifier(&phi, &u.ctx, &b).map(|r| r.projective).unwrap_or(false);
        if !projective {
            continue;
        }
        if let Ok(tb) = theta_bar(&phi, &u.ctx, &b) {
            out.push((class, phi, tb));
        }
    }
    out
}

fn root_sheet_bad(m: &StratifiedModel, phi: &Formula) -> bool {
    let truth = m.truth_set(phi);
    let root_sheet = m.sheet_of(m.root());
    let outside_ok = (0..m.len()).filter(|&x| m.sheet_of(x) != root_sheet).all(|x| truth.contains(x));
    outside_ok && !m.globally_true(phi)
}

fn c7_root_sheet_repair() -> Outcome {
    let u = Universe::one_var();
    let oracle = SumOracle::build(&u);
    let sample = projective_sample(&u, &oracle, 707, 10);
    let mut rng = common::rng(7070);
    let (mut models, mut failures) = (0, Vec::new());
    let mut draws = 0;
    'outer: for round in 0.. {
        for (class, phi, tb) in &sample {
            if models == 100 {
                break 'outer;
            }
            let m = (0..2000).map(|_| common::random_model(&mut rng, 7, 1)).find(|m| root_sheet_bad(m, phi));
            draws += 1;
            let Some(m) = m else { continue };
            models += 1;
            if !apply_subst_model(&tb.subst, &m).globally_true(phi) {
                failures.push(format!("class {class:#x} on {} worlds", m.len()));
            }
        }
        if round > 200 {
            break;
        }
    }
    Outcome::new(
        failures.is_empty() && models == 100 && !sample.is_empty(),
        format!(
            "{models} models over {} projective classes ({draws} searches), {} failures{}",
            sample.len(),
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    )
}

fn c8_mu_monotone() -> Outcome {
    let u = Universe::one_var();
    let oracle = SumOracle::build(&u);
    let sample = projective_sample(&u, &oracle, 808, 10);
    let mut rng = common::rng(8080);
    let (mut pairs, mut failures) = (0, Vec::new());
    'outer: for _ in 0..100 {
        for (class, phi, tb) in &sample {
            if pairs == 50 {
                break 'outer;
            }
            let Some(m) = (0..2000).map(|_| common::random_model(&mut rng, 7, 1)).find(|m| !m.globally_true(phi))
            else {
                continue;
            };
            pairs += 1;
            let before = rank_info(phi, &m).mu.expect("model refutes phi");
            let after = rank_info(phi, &apply_subst_model(&tb.subst, &m)).mu;
            if after.is_some_and(|a| a <= before) {
                failures.push(format!("class {class:#x}: mu {before} -> {after:?} on {} worlds", m.len()));
            }
        }
    }
    Outcome::new(
        failures.is_empty() && pairs == 50,
        format!(
            "{pairs} pairs over {} classes, {} without strict increase{}",
            sample.len(),
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    )
}

fn c9_admissibility() -> Outcome {
    let t = Instant::now();
    let ctx = VarContext::standard(1);
    let b = bounds();
    let f = |s: &str| parse(s, &ctx).expect("literal parses");
    let mut problems = Vec::new();

    match is_admissible(&f("<0>T"), &f("F"), &ctx, &b) {
        Ok(v) if v.admissible && !v.derivable => {}
        other => problems.push(format!("<0>T/F: {:?}", other.map(|v| (v.admissible, v.derivable)))),
    }
    match is_admissible(&f("p1"), &f("p1 & p1"), &ctx, &b) {
        Ok(v) if v.admissible && v.derivable => {}
        other => problems.push(format!("p1/p1&p1: {:?}", other.map(|v| (v.admissible, v.derivable)))),
    }
    let conclusion = f("[0]F");
    match is_admissible(&f("p1"), &conclusion, &ctx, &b) {
        Ok(v) if !v.admissible => match v.failing_psi {
            Some(psi) => {
                // a model where psi holds throughout and the conclusion fails at the root
                let verdict = is_theorem(&consequence_formula(&psi, &conclusion), &b.saturation).expect("decidable");
                let refuted = verdict.countermodel.as_ref().is_some_and(|cm| {
                    let m = &generated_submodel(&cm.model, cm.model.id(cm.point)).expect("point exists").model;
                    Plain::of(m).global(&psi) && !Plain::of(m).eval(m.root(), &conclusion)
                });
                let entails_premise = is_valid(&consequence_formula(&psi, &f("p1")), &b.saturation).unwrap_or(false);
                if !refuted || !entails_premise {
                    problems.push(format!("p1/[0]F: failing psi {} not independently refuted", render(&psi)));
                }
            }
            None => problems.push("p1/[0]F: no failing psi".into()),
        },
        other => problems.push(format!("p1/[0]F: {:?}", other.map(|v| v.admissible))),
    }
    let fast = t.elapsed() < Duration::from_secs(60);
    Outcome::new(
        problems.is_empty() && fast,
        if problems.is_empty() { "3 rules as expected".to_string() } else { problems.join("; ") },
    )
}

fn c10_basis() -> Outcome {
    let u = Universe::one_var();
    let b = bounds();
    let (mut formulas, mut multi, mut failures, mut tried) = (0, 0, Vec::new(), 0);
    for class in fragment_classes(1010, u.len()).skip(2).take(400) {
        if formulas == 20 {
            break;
        }
        tried += 1;
        let phi = u.class_formula(class);
        let Ok((approx, basis)) = basis_of_unifiers(&phi, &u.ctx, &b) else { continue };
        if approx.pi.is_empty() {
            continue;
        }
        formulas += 1;
        multi += (approx.pi.len() > 1) as usize;
        for (i, sigma) in basis.iter().enumerate() {
            if !is_valid(&sigma.apply(&phi), &b.saturation).unwrap_or(false) {
                failures.push(format!("{class:#x}: basis unifier {i} does not unify"));
            }
        }
        for (i, a) in approx.pi.iter().enumerate() {
            for (j, c) in approx.pi.iter().enumerate() {
                if i != j && is_valid(&consequence_formula(a, c), &b.saturation).unwrap_or(true) {
                    failures.push(format!("{class:#x}: member {i} entails member {j}"));
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty() && formulas == 20,
        format!(
            "{formulas} unifiable formulas ({tried} classes tried, {multi} with several members), {} failures{}",
            failures.len(),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    )
}
