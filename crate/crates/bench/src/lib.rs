//! Workload builders shared by the benchmarks.

use std::sync::Arc;

use paction_core::{
    restrict_global_action, FiniteGroup, GlobalQuiverAction, Quiver, QuiverMorphism, QuiverPartialAction, Subquiver,
};

/// The oriented cycle on `n` vertices `0 .. n` with arrows `a0 .. a{n-1}`.
pub fn cycle(n: usize) -> Arc<Quiver> {
    let vertices: Vec<String> = (0..n).map(|v| v.to_string()).collect();
    let arrows: Vec<(String, String, String)> =
        (0..n).map(|v| (format!("a{v}"), v.to_string(), ((v + 1) % n).to_string())).collect();
    let vs: Vec<&str> = vertices.iter().map(String::as_str).collect();
    let as_: Vec<(&str, &str, &str)> = arrows.iter().map(|(a, s, t)| (a.as_str(), s.as_str(), t.as_str())).collect();
    Arc::new(Quiver::from_names(&vs, &as_).expect("cycle is well formed"))
}

/// The cyclic group of order `n` rotating [`cycle`]`(n)`.
pub fn rotation(n: usize) -> GlobalQuiverAction {
    let g = Arc::new(FiniteGroup::cyclic(n).expect("positive order"));
    let q = cycle(n);
    let shift: Vec<usize> = (0..n).map(|v| (v + 1) % n).collect();
    let tau = QuiverMorphism::new(q.clone(), q.clone(), shift.clone(), shift).expect("rotation is a morphism");
    let t = if n == 1 { g.identity() } else { g.element("t").expect("generator") };
    GlobalQuiverAction::from_generators(g, q, &[(t, tau)]).expect("rotation is an action")
}

/// The restriction of [`rotation`]`(n)` to the open path through the first `k` vertices.
pub fn rotation_restricted(n: usize, k: usize) -> QuiverPartialAction {
    let b = rotation(n);
    let k = k.clamp(1, n);
    let s = Subquiver::new(0..k, 0..k - 1);
    restrict_global_action(&b, &s).expect("subquiver is closed")
}
