#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use paction_core::quiver_paction::PartialIso;
use paction_core::{
    Arrow, Elem, EnvelopingQuiverAction, FiniteGroup, GlobalQuiverAction, Quiver, QuiverPartialAction,
    SetPartialAction, Subquiver,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// C1..C6, S3 and the Klein four-group.
pub fn random_group(rng: &mut TestRng) -> Arc<FiniteGroup> {
    let g = match rng.gen_range(0..8) {
        k @ 0..=5 => FiniteGroup::cyclic(k + 1).unwrap(),
        6 => FiniteGroup::from_permutations(&[vec![1, 2, 0], vec![1, 0, 2]], 100).unwrap().0,
        _ => FiniteGroup::from_permutations(&[vec![1, 0, 2, 3], vec![0, 1, 3, 2]], 100).unwrap().0,
    };
    Arc::new(g)
}

pub fn subgroups(g: &FiniteGroup) -> Vec<BTreeSet<usize>> {
    let n = g.order();
    let e = g.identity().0;
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask & (1 << e) == 0 {
            continue;
        }
        let s: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if s.iter().all(|&a| s.iter().all(|&b| s.contains(&g.mul(Elem(a), Elem(b)).0))) {
            out.push(s);
        }
    }
    out
}

/// Left cosets of `h`, and the action of `g` on them.
struct Cosets {
    cosets: Vec<BTreeSet<usize>>,
    /// `table[g][i]` is the coset `g·cosets[i]`.
    table: Vec<Vec<usize>>,
}

fn cosets(g: &FiniteGroup, h: &BTreeSet<usize>) -> Cosets {
    let mut cosets: Vec<BTreeSet<usize>> = Vec::new();
    for x in g.elements() {
        let c: BTreeSet<usize> = h.iter().map(|&k| g.mul(x, Elem(k)).0).collect();
        if !cosets.contains(&c) {
            cosets.push(c);
        }
    }
    let table = g
        .elements()
        .map(|x| {
            cosets
                .iter()
                .map(|c| {
                    let rep = *c.iter().next().unwrap();
                    let image = g.mul(x, Elem(rep)).0;
                    cosets.iter().position(|d| d.contains(&image)).unwrap()
                })
                .collect()
        })
        .collect();
    Cosets { cosets, table }
}

fn stabilizer(table: &[Vec<usize>], point: usize) -> BTreeSet<usize> {
    (0..table.len()).filter(|&g| table[g][point] == point).collect()
}

/// A random global action: vertices form a union of coset spaces, arrows
/// are orbits `G/K -> (u, v)` with `K` inside both stabilizers.
pub fn random_global_action(rng: &mut TestRng, max_vertices: usize, max_arrows: usize) -> GlobalQuiverAction {
    loop {
        if let Some(b) = try_global_action(rng, max_vertices, max_arrows) {
            return b;
        }
    }
}

fn try_global_action(rng: &mut TestRng, max_vertices: usize, max_arrows: usize) -> Option<GlobalQuiverAction> {
    let g = random_group(rng);
    let n = g.order();
    let subs = subgroups(&g);
    let mut vtable: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = 0;
    let orbits = rng.gen_range(1..=3);
    for _ in 0..orbits {
        let h = subs.choose(rng).unwrap();
        let c = cosets(&g, h);
        if count + c.cosets.len() > max_vertices {
            continue;
        }
        for (x, row) in vtable.iter_mut().enumerate() {
            row.extend(c.table[x].iter().map(|&i| i + count));
        }
        count += c.cosets.len();
    }
    if count == 0 {
        return None;
    }
    let vertices: Vec<String> = (0..count).map(|i| format!("v{i}")).collect();

    let mut atable: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut arrows: Vec<Arrow> = Vec::new();
    let arrow_orbits = rng.gen_range(0..=4);
    for _ in 0..arrow_orbits {
        let (u, v) = (rng.gen_range(0..count), rng.gen_range(0..count));
        let common: BTreeSet<usize> =
            stabilizer(&vtable, u).intersection(&stabilizer(&vtable, v)).copied().collect();
        let allowed: Vec<&BTreeSet<usize>> = subs.iter().filter(|k| k.is_subset(&common)).collect();
        let k = allowed.choose(rng).unwrap();
        let c = cosets(&g, k);
        if arrows.len() + c.cosets.len() > max_arrows {
            continue;
        }
        let base = arrows.len();
        for coset in &c.cosets {
            let rep = Elem(*coset.iter().next().unwrap());
            let s = vtable[rep.0][u];
            let t = vtable[rep.0][v];
            arrows.push(Arrow::new(format!("a{}", arrows.len()), vertices[s].clone(), vertices[t].clone()));
        }
        for (x, row) in atable.iter_mut().enumerate() {
            row.extend(c.table[x].iter().map(|&i| i + base));
        }
    }
    let q = Arc::new(Quiver::new(vertices, arrows).unwrap());
    Some(GlobalQuiverAction::from_tables(g, q, vtable, atable).expect("coset construction gives an action"))
}

/// A random nonempty closed subquiver.
pub fn random_subquiver(rng: &mut TestRng, q: &Quiver) -> Subquiver {
    loop {
        let vertices: BTreeSet<usize> = (0..q.vertex_count()).filter(|_| rng.gen_bool(0.6)).collect();
        if vertices.is_empty() {
            continue;
        }
        let arrows = (0..q.arrow_count())
            .filter(|&a| vertices.contains(&q.source(a)) && vertices.contains(&q.target(a)) && rng.gen_bool(0.7))
            .collect();
        return Subquiver { vertices, arrows };
    }
}

/// A random valid partial action, obtained by restricting a random global
/// one.
pub fn random_partial_action(rng: &mut TestRng) -> (GlobalQuiverAction, Subquiver, QuiverPartialAction) {
    let b = random_global_action(rng, 6, 8);
    let s = random_subquiver(rng, b.quiver());
    let a = paction_core::restrict_global_action(&b, &s).unwrap();
    (b, s, a)
}

/// Equivalence classes of the relation `(g,x) ~ (h,y)` iff
/// `x ∈ X_{g⁻¹h}` and `α_{h⁻¹g}(x) = y`, closed by repeated squaring of a
/// boolean matrix.
pub fn closure_classes(a: &SetPartialAction) -> BTreeSet<BTreeSet<(usize, usize)>> {
    let g = a.group();
    let m = a.carrier().len();
    let n = g.order() * m;
    let mut rel = vec![vec![false; n]; n];
    for gi in g.elements() {
        for hi in g.elements() {
            for x in 0..m {
                let ginv_h = g.mul(g.inv(gi), hi);
                if !a.domain(ginv_h).contains(&x) {
                    continue;
                }
                let hinv_g = g.mul(g.inv(hi), gi);
                if let Some(&y) = a.map(hinv_g).get(&x) {
                    rel[gi.0 * m + x][hi.0 * m + y] = true;
                }
            }
        }
    }
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if rel[i][j] {
                rel[j][i] = true;
            }
        }
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] {
                    continue;
                }
                if (0..n).any(|k| rel[i][k] && rel[k][j]) {
                    rel[i][j] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..n)
        .map(|i| (0..n).filter(|&j| rel[i][j]).map(|j| (j / m, j % m)).collect())
        .collect()
}

/// The partial action transported along name maps of its quiver, described
/// by names so it can be compared with an action on another quiver.
pub fn named_action(
    a: &QuiverPartialAction,
    vname: impl Fn(&str) -> String,
    aname: impl Fn(&str) -> String,
) -> Vec<(BTreeSet<String>, BTreeSet<String>, BTreeMap<String, String>, BTreeMap<String, String>)> {
    let q = a.quiver();
    a.group()
        .elements()
        .map(|g| {
            let d = a.domain(g);
            let PartialIso { vertices, arrows } = a.map(g);
            (
                d.vertices.iter().map(|&v| vname(q.vertex_name(v))).collect(),
                d.arrows.iter().map(|&x| aname(q.arrow_name(x))).collect(),
                vertices.iter().map(|(&x, &y)| (vname(q.vertex_name(x)), vname(q.vertex_name(y)))).collect(),
                arrows.iter().map(|(&x, &y)| (aname(q.arrow_name(x)), aname(q.arrow_name(y)))).collect(),
            )
        })
        .collect()
}

/// Whether restricting the global part of `e` to the embedded copy of `Γ`
/// gives back the original action, matched through the embedding.
pub fn restriction_recovers(e: &EnvelopingQuiverAction) -> bool {
    let back = paction_core::restrict_global_action(&e.global, &e.embedded()).unwrap();
    let gamma = e.original.quiver();
    let q = e.global.quiver();
    let vmap: BTreeMap<String, String> = (0..gamma.vertex_count())
        .map(|v| (gamma.vertex_name(v).to_string(), q.vertex_name(e.embedding.map_vertex(v)).to_string()))
        .collect();
    let amap: BTreeMap<String, String> = (0..gamma.arrow_count())
        .map(|x| (gamma.arrow_name(x).to_string(), q.arrow_name(e.embedding.map_arrow(x)).to_string()))
        .collect();
    named_action(&e.original, |v| vmap[v].clone(), |x| amap[x].clone())
        == named_action(&back, str::to_string, str::to_string)
}

/// A random permutation of `0..n`.
pub fn shuffled(rng: &mut TestRng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// C3 acting partially on the quiver `v1 --f--> v2`.
pub fn arrow_example() -> QuiverPartialAction {
    let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
    let q = Arc::new(Quiver::from_names(&["v1", "v2"], &[("f", "v1", "v2")]).unwrap());
    let mut a = QuiverPartialAction::new(g, q);
    a.define("t", &["v1"], &[], &[("v2", "v1")], &[]).unwrap();
    a.define("t2", &["v2"], &[], &[("v1", "v2")], &[]).unwrap();
    a
}

pub fn four_cycle() -> Arc<Quiver> {
    Arc::new(
        Quiver::from_names(
            &["1", "2", "3", "4"],
            &[("a", "1", "2"), ("b", "2", "3"), ("c", "3", "4"), ("d", "4", "1")],
        )
        .unwrap(),
    )
}

/// C4 rotating the 4-cycle, given by its generator.
pub fn rotation() -> GlobalQuiverAction {
    let g = Arc::new(FiniteGroup::cyclic(4).unwrap());
    let q = four_cycle();
    let tau = paction_core::QuiverMorphism::from_names(
        q.clone(),
        q.clone(),
        &[("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")],
        &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
    )
    .unwrap();
    GlobalQuiverAction::from_generators(g.clone(), q, &[(g.element("t").unwrap(), tau)]).unwrap()
}

/// The subquiver `1 -a-> 2 -b-> 3` of the 4-cycle.
pub fn path_subquiver(q: &Quiver) -> Subquiver {
    Subquiver::from_names(q, &["1", "2", "3"], &["a", "b"]).unwrap()
}
