//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use paction_core::pathalg::{
    canonical_algebra_isomorphism, check_not_ideal, check_subalgebra_partial_action, enumerate_paths,
    generated_subalgebra, induced_partial_action, sum_of_translates, truncated_dimension, IdealCheck,
};
use paction_core::quiver_paction::{envelope_quiver_action_ordered, ENVELOPING_CLAUSES};
use paction_core::setaction::globalize_set_action;
use paction_core::{
    check_enveloping, envelope_quiver_action, enveloping_isomorphism, restrict_global_action, AlgebraPartialAction,
    Elem, EnvelopingQuiverAction, Quiver, Subquiver,
};
use rand::Rng;

const EX216_BUDGET: Duration = Duration::from_secs(1);
const EX215_ALGEBRA_BUDGET: Duration = Duration::from_secs(5);
const PROPERTY_INSTANCES: usize = 200;
const SOUNDNESS_INSTANCES: usize = 50;
const MUTATIONS: usize = 50;
const UNIQUENESS_INSTANCES: usize = 20;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Whether the arrows of `q` form exactly one directed cycle through every
/// vertex.
fn is_single_cycle(q: &Quiver) -> bool {
    if q.vertex_count() != q.arrow_count() {
        return false;
    }
    let mut out = vec![0; q.vertex_count()];
    let mut inn = vec![0; q.vertex_count()];
    for a in 0..q.arrow_count() {
        out[q.source(a)] += 1;
        inn[q.target(a)] += 1;
    }
    if out.iter().chain(&inn).any(|&d| d != 1) {
        return false;
    }
    let mut v = 0;
    for step in 1..=q.vertex_count() {
        v = q.target(q.out_arrows(v).next().unwrap());
        if v == 0 {
            return step == q.vertex_count();
        }
    }
    false
}

fn example_216_end_to_end() -> Outcome {
    let start = Instant::now();
    let env = envelope_quiver_action(&arrow_example()).map_err(|e| e.to_string())?;
    let report = check_enveloping(&env);
    let elapsed = start.elapsed();
    let q = env.global.quiver();
    ensure(q.vertex_count() == 3 && q.arrow_count() == 3, format!("{} vertices, {} arrows", q.vertex_count(), q.arrow_count()))?;
    ensure(is_single_cycle(q), "arrows do not form one directed 3-cycle")?;
    ensure(q.vertex_names() == ["(e, v1)", "(e, v2)", "(t, v1)"], format!("vertex names {:?}", q.vertex_names()))?;
    let summary = report.summary(&ENVELOPING_CLAUSES);
    ensure(summary.iter().all(|(_, ok)| *ok), format!("clauses {summary:?}"))?;
    ensure(elapsed < EX216_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("3 vertices, 3 arrows, one 3-cycle, clauses a-d pass, {elapsed:?}"))
}

fn example_215_restriction() -> Outcome {
    let b = rotation();
    let q = b.quiver().clone();
    let a = restrict_global_action(&b, &path_subquiver(&q)).map_err(|e| e.to_string())?;
    let g = a.group().clone();
    let gamma = a.quiver().clone();
    let names = |s: &Subquiver| -> (Vec<&str>, Vec<&str>) { (s.vertex_names(&gamma), s.arrow_names(&gamma)) };
    let expected: [(&str, (Vec<&str>, Vec<&str>)); 3] = [
        ("t", (vec!["2", "3"], vec!["b"])),
        ("t2", (vec!["1", "3"], vec![])),
        ("t3", (vec!["1", "2"], vec!["a"])),
    ];
    for (name, want) in expected {
        let got = names(a.domain(g.element(name).unwrap()));
        ensure(got == want, format!("domain of {name}: {got:?}"))?;
    }
    let arrow_map = |name: &str| -> Vec<(&str, &str)> {
        a.map(g.element(name).unwrap())
            .arrows
            .iter()
            .map(|(&x, &y)| (gamma.arrow_name(x), gamma.arrow_name(y)))
            .collect()
    };
    ensure(arrow_map("t") == [("a", "b")], format!("alpha_t on arrows {:?}", arrow_map("t")))?;
    ensure(arrow_map("t3") == [("b", "a")], format!("alpha_t3 on arrows {:?}", arrow_map("t3")))?;
    ensure(arrow_map("t2").is_empty(), "alpha_t2 moves an arrow")?;
    Ok("domains and arrow maps match for t, t2, t3".into())
}

fn example_215_algebra() -> Outcome {
    let start = Instant::now();
    let b = rotation();
    let env = EnvelopingQuiverAction::from_orbit(&b, &path_subquiver(b.quiver())).map_err(|e| e.to_string())?;
    let sum = sum_of_translates(&env, 3);
    let generated = generated_subalgebra(&env, 3);
    let elapsed = start.elapsed();
    let q = env.global.quiver();
    let short = paction_core::pathalg::SubalgebraSpan::explicit(
        q.clone(),
        enumerate_paths(q, 2).into_iter().map(|p| paction_core::AlgebraElement::from_path(q.clone(), p)).collect(),
        3,
    );
    let (ds, dg) = (sum.dimension(3), generated.dimension(3));
    ensure(ds == 12, format!("sum dimension {ds}"))?;
    ensure(sum.window_span(3).same_space(&short.window_span(3)), "sum is not the span of paths of length <= 2")?;
    ensure(dg == 16 && dg == truncated_dimension(q, 3), format!("generated dimension {dg}"))?;
    ensure(elapsed < EX215_ALGEBRA_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("sum dim = {ds}, generated dim = {dg}, {elapsed:?}"))
}

fn example_216_not_ideal() -> Outcome {
    let alpha = induced_partial_action(&arrow_example()).map_err(|e| e.to_string())?;
    let g = alpha.group().clone();
    let mut found = Vec::new();
    for name in ["t", "t2"] {
        match check_not_ideal(&alpha.domain(g.element(name).unwrap()), 1) {
            IdealCheck::NotIdeal(w) => found.push(w.to_string()),
            IdealCheck::Ideal { .. } => return Err(format!("R_{name} reported as an ideal")),
        }
    }
    Ok(found.join("; "))
}

fn property_suite() -> Outcome {
    let mut rng = rng(0x5eed_0001);
    for i in 0..PROPERTY_INSTANCES {
        let (b, s, a) = random_partial_action(&mut rng);
        let report = a.check();
        ensure(report.is_valid(), format!("instance {i}: (a) restriction invalid:\n{report}"))?;
        // (d): the endpoint assertion is an error path of the construction
        let env = envelope_quiver_action(&a).map_err(|e| format!("instance {i}: (d) {e}"))?;
        ensure(restriction_recovers(&env), format!("instance {i}: (b) restriction of the envelope differs"))?;
        let orbit = EnvelopingQuiverAction::from_orbit(&b, &s).map_err(|e| format!("instance {i}: (c) {e}"))?;
        enveloping_isomorphism(&env, &orbit).map_err(|e| format!("instance {i}: (c) {e}"))?;
        for action in [a.vertex_action(), a.arrow_action()] {
            let glob = globalize_set_action(&action).map_err(|e| format!("instance {i}: (e) {e}"))?;
            let got: BTreeSet<BTreeSet<(usize, usize)>> =
                glob.classes.iter().map(|c| c.iter().map(|&(g, x)| (g.0, x)).collect()).collect();
            ensure(got == closure_classes(&action), format!("instance {i}: (e) quotient differs from oracle"))?;
        }
    }
    Ok(format!("{PROPERTY_INSTANCES} instances, (a)-(e) hold"))
}

/// Perturbs one domain or one map entry of `alpha` at a non-identity
/// element. Removing a point fixed by an involution yields another valid
/// partial action, so that case is skipped (`None`).
fn mutate(rng: &mut TestRng, alpha: &mut AlgebraPartialAction) -> Option<String> {
    let g_ = alpha.group().clone();
    let q = alpha.quiver().clone();
    let g = Elem(rng.gen_range(0..g_.order()));
    if g == g_.identity() {
        return None;
    }
    let involution = g_.inv(g) == g;
    let name = g_.name(g).to_string();
    let map = alpha.map(g).clone();
    match rng.gen_range(0..4) {
        0 if q.vertex_count() > 1 => {
            let (&x, &y) = map.vertices.iter().nth(rng.gen_range(0..map.vertices.len().max(1)))?;
            let z = (y + rng.gen_range(1..q.vertex_count())) % q.vertex_count();
            alpha.map_mut(g).vertices.insert(x, z);
            Some(format!("alpha_{name}({}) := {}", q.vertex_name(x), q.vertex_name(z)))
        }
        1 if q.arrow_count() > 1 => {
            let (&x, &y) = map.arrows.iter().nth(rng.gen_range(0..map.arrows.len().max(1)))?;
            let z = (y + rng.gen_range(1..q.arrow_count())) % q.arrow_count();
            alpha.map_mut(g).arrows.insert(x, z);
            Some(format!("alpha_{name}({}) := {}", q.arrow_name(x), q.arrow_name(z)))
        }
        2 if q.arrow_count() > 0 => {
            let x = rng.gen_range(0..q.arrow_count());
            let mut d = alpha.domain_subquiver(g).clone();
            if d.arrows.contains(&x) {
                if involution && map.arrows.get(&x) == Some(&x) {
                    return None;
                }
                d.arrows.remove(&x);
            } else {
                d.arrows.insert(x);
            }
            alpha.set_domain(g, d);
            Some(format!("toggle arrow {} in R_{name}", q.arrow_name(x)))
        }
        _ => {
            let v = rng.gen_range(0..q.vertex_count());
            let mut d = alpha.domain_subquiver(g).clone();
            if d.vertices.contains(&v) {
                if involution && map.vertices.get(&v) == Some(&v) {
                    return None;
                }
                d.vertices.remove(&v);
            } else {
                d.vertices.insert(v);
            }
            alpha.set_domain(g, d);
            Some(format!("toggle vertex {} in R_{name}", q.vertex_name(v)))
        }
    }
}

fn subalgebra_soundness() -> Outcome {
    let mut rng = rng(0x5eed_0002);
    let mut actions = Vec::new();
    for i in 0..SOUNDNESS_INSTANCES {
        let (_, _, a) = random_partial_action(&mut rng);
        let alpha = induced_partial_action(&a).map_err(|e| format!("instance {i}: {e}"))?;
        let report = check_subalgebra_partial_action(&alpha, 4);
        ensure(report.is_valid(), format!("instance {i} rejected at L=4:\n{report}"))?;
        actions.push(alpha);
    }
    let mut mutated = 0;
    while mutated < MUTATIONS {
        let base = &actions[rng.gen_range(0..actions.len())];
        if base.group().order() < 2 {
            continue;
        }
        let mut alpha = base.clone();
        let Some(what) = mutate(&mut rng, &mut alpha) else { continue };
        let report = check_subalgebra_partial_action(&alpha, 4);
        ensure(!report.is_valid(), format!("mutation not detected: {what}"))?;
        ensure(report.violations.iter().all(|v| !v.to_string().is_empty()), "empty witness")?;
        mutated += 1;
    }
    Ok(format!("{SOUNDNESS_INSTANCES} induced actions valid at L=4, {MUTATIONS} mutations all rejected"))
}

fn uniqueness() -> Outcome {
    let mut rng = rng(0x5eed_0003);
    for i in 0..UNIQUENESS_INSTANCES {
        let (_, _, a) = random_partial_action(&mut rng);
        let n = a.group().order();
        let vorder = shuffled(&mut rng, n * a.quiver().vertex_count());
        let aorder = shuffled(&mut rng, n * a.quiver().arrow_count());
        let e1 = envelope_quiver_action(&a).map_err(|e| e.to_string())?;
        let e2 = envelope_quiver_action_ordered(&a, Some((&vorder, &aorder))).map_err(|e| e.to_string())?;
        let iso = enveloping_isomorphism(&e1, &e2).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(iso.is_isomorphism(), format!("instance {i}: not an isomorphism"))?;
        canonical_algebra_isomorphism(&e1, &e2, 3).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(format!("{UNIQUENESS_INSTANCES} instances connected by quiver and algebra isomorphisms (L=3)"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("arrow quiver end-to-end envelope", example_216_end_to_end),
        ("4-cycle restriction domains", example_215_restriction),
        ("4-cycle sum vs generated subalgebra", example_215_algebra),
        ("vertex spans are not ideals", example_216_not_ideal),
        ("random instance property suite", property_suite),
        ("subalgebra checker soundness", subalgebra_soundness),
        ("uniqueness of enveloping actions", uniqueness),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
