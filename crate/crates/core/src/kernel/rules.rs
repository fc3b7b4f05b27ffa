//! The individual reduction rules.
//!
//! Each `apply_*` function checks its precondition on the live graph, and when
//! it holds performs the rewrite, appends exactly one [`ReductionEvent`] and
//! returns `true`. A `false` return leaves graph and event list untouched.

use crate::flow::{FlowNetwork, INFINITE};
use crate::graph::{Vertex, Weight, WeightedGraph};

use super::{Edit, ReduceOptions, ReductionEvent, Recovery, Rule};

fn sorted_neighbors(g: &WeightedGraph, v: Vertex) -> Vec<Vertex> {
    let mut n: Vec<Vertex> = g.neighbors(v).collect();
    n.sort_unstable();
    n
}

fn weight_of(g: &WeightedGraph, vs: &[Vertex]) -> Weight {
    vs.iter().map(|&u| g.weight(u)).sum()
}

fn is_clique(g: &WeightedGraph, vs: &[Vertex]) -> bool {
    if vs.iter().any(|&u| g.degree(u) + 1 < vs.len()) {
        return false;
    }
    vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

fn is_independent_among(g: &WeightedGraph, vs: &[Vertex]) -> bool {
    vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| !g.has_edge(a, b)))
}

fn is_simplicial(g: &WeightedGraph, v: Vertex) -> bool {
    is_clique(g, &sorted_neighbors(g, v))
}

/// Union of the live neighborhoods of `vs`, minus `exclude`, sorted.
fn neighborhood_union(g: &WeightedGraph, vs: &[Vertex], exclude: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = vs.iter().flat_map(|&u| g.neighbors(u)).filter(|w| !exclude.contains(w)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Orders the two neighbors of a degree-two vertex as (lighter, heavier),
/// breaking ties by id.
fn light_heavy(g: &WeightedGraph, a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if (g.weight(a), a) <= (g.weight(b), b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Dispatches `rule` at vertex `v`. Edge rules try every live edge at `v` in
/// both orientations; the critical-set rule is global and ignores `v`.
pub fn apply_at(rule: Rule, g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>, options: ReduceOptions) -> bool {
    if rule == Rule::Cwis {
        return apply_cwis(g, events, options.cwis_allow_zero);
    }
    if !g.is_alive(v) {
        return false;
    }
    match rule {
        Rule::NeighborhoodRemoval => apply_neighborhood_removal(g, v, events),
        Rule::DegreeOne => apply_degree_one(g, v, events),
        Rule::Triangle => apply_triangle(g, v, events),
        Rule::VShape => apply_v_shape(g, v, events),
        Rule::VShapeMin => apply_v_shape_min(g, v, events),
        Rule::IsolatedClique => apply_isolated_clique(g, v, events),
        Rule::BasicSingleEdge => {
            sorted_neighbors(g, v).into_iter().any(|u| apply_basic_single_edge(g, v, u, events) || apply_basic_single_edge(g, u, v, events))
        }
        Rule::ExtendedSingleEdge => sorted_neighbors(g, v)
            .into_iter()
            .any(|u| apply_extended_single_edge(g, v, u, events) || apply_extended_single_edge(g, u, v, events)),
        Rule::Domination => sorted_neighbors(g, v).into_iter().any(|u| apply_domination(g, v, u, events)),
        Rule::Twin => find_twin(g, v).is_some_and(|u| apply_twin(g, v, u, events)),
        Rule::SimplicialTransfer => apply_simplicial_transfer(g, v, events),
        Rule::NeighborhoodFolding => apply_neighborhood_folding(g, v, events),
        Rule::Cwis => unreachable!(),
    }
}

/// `w(v) >= w(N(v))`: take `v`, drop `N[v]`.
pub fn apply_neighborhood_removal(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(v) {
        return false;
    }
    let nbrs = sorted_neighbors(g, v);
    let w = g.weight(v);
    if w < weight_of(g, &nbrs) {
        return false;
    }
    let mut e = Edit::new(g);
    e.remove(v);
    e.remove_all(&nbrs);
    events.push(e.finish(Rule::NeighborhoodRemoval, Recovery::Include(vec![v]), w));
    true
}

pub fn apply_degree_one(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(v) {
        return false;
    }
    let nbrs = sorted_neighbors(g, v);
    let [u] = nbrs[..] else {
        return false;
    };
    let (wv, wu) = (g.weight(v), g.weight(u));
    let mut e = Edit::new(g);
    let event = if wv >= wu {
        e.remove(v);
        e.remove(u);
        e.finish(Rule::DegreeOne, Recovery::Include(vec![v]), wv)
    } else {
        e.remove(v);
        e.set_weight(u, wu - wv);
        e.finish(Rule::DegreeOne, Recovery::IncludeUnlessAny { watch: vec![u], vertex: v }, wv)
    };
    events.push(event);
    true
}

/// Degree-two vertex whose neighbors are adjacent.
pub fn apply_triangle(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(v) {
        return false;
    }
    let nbrs = sorted_neighbors(g, v);
    let [a, b] = nbrs[..] else {
        return false;
    };
    if !g.has_edge(a, b) {
        return false;
    }
    let (x, y) = light_heavy(g, a, b);
    let (wv, wx, wy) = (g.weight(v), g.weight(x), g.weight(y));
    let mut e = Edit::new(g);
    let event = if wv >= wy {
        e.remove_all(&[v, x, y]);
        e.finish(Rule::Triangle, Recovery::Include(vec![v]), wv)
    } else if wv >= wx {
        e.remove_all(&[v, x]);
        e.set_weight(y, wy - wv);
        e.finish(Rule::Triangle, Recovery::IncludeUnlessAny { watch: vec![y], vertex: v }, wv)
    } else {
        e.remove(v);
        e.set_weight(x, wx - wv);
        e.set_weight(y, wy - wv);
        e.finish(Rule::Triangle, Recovery::IncludeUnlessAny { watch: vec![x, y], vertex: v }, wv)
    };
    events.push(event);
    true
}

fn v_shape_neighbors(g: &WeightedGraph, v: Vertex) -> Option<(Vertex, Vertex)> {
    if !g.is_alive(v) {
        return None;
    }
    let nbrs = sorted_neighbors(g, v);
    let [a, b] = nbrs[..] else {
        return None;
    };
    if g.has_edge(a, b) {
        return None;
    }
    Some(light_heavy(g, a, b))
}

/// Degree-two vertex with non-adjacent neighbors, cases `w(v) >= w(x)`.
/// The `w(v) < w(x)` case is [`apply_v_shape_min`].
pub fn apply_v_shape(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    let Some((x, y)) = v_shape_neighbors(g, v) else {
        return false;
    };
    let (wv, wx, wy) = (g.weight(v), g.weight(x), g.weight(y));
    if wv < wx {
        return false;
    }
    let event = if wv >= wy && wv >= wx + wy {
        let mut e = Edit::new(g);
        e.remove_all(&[v, x, y]);
        e.finish(Rule::VShape, Recovery::Include(vec![v]), wv)
    } else if wv >= wy {
        let targets = neighborhood_union(g, &[x, y], &[v, x, y]);
        let mut e = Edit::new(g);
        e.remove_all(&[v, x, y]);
        let fold = e.push_vertex(wx + wy - wv, &targets);
        e.finish(Rule::VShape, Recovery::Fold { fold, inside: vec![x, y], outside: vec![v] }, wv)
    } else {
        let mut e = Edit::new(g);
        e.remove(v);
        let extra: Vec<Vertex> = sorted_neighbors(e.g, y).into_iter().filter(|&w| w != x && !e.g.has_edge(x, w)).collect();
        for w in extra {
            e.add_edge(x, w);
        }
        e.set_weight(y, wy - wv);
        e.finish(Rule::VShape, Recovery::VShapeMerge { v, x, y }, wv)
    };
    events.push(event);
    true
}

/// Degree-two vertex with non-adjacent neighbors and `0 < w(v) < w(x) <= w(y)`:
/// both neighbors lose `w(v)` and `v` is rewired to `N(x) ∪ N(y)`.
pub fn apply_v_shape_min(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    let Some((x, y)) = v_shape_neighbors(g, v) else {
        return false;
    };
    let (wv, wx, wy) = (g.weight(v), g.weight(x), g.weight(y));
    // A zero-weight v would fire forever without changing any weight.
    if wv == 0 || wv >= wx {
        return false;
    }
    let targets = neighborhood_union(g, &[x, y], &[v, x, y]);
    let mut e = Edit::new(g);
    e.set_weight(x, wx - wv);
    e.set_weight(y, wy - wv);
    e.drop_edge(v, x);
    e.drop_edge(v, y);
    for w in targets {
        e.add_edge(v, w);
    }
    events.push(e.finish(Rule::VShapeMin, Recovery::VShapeMin { v, x, y }, wv));
    true
}

/// Simplicial `v` (closed neighborhood is a clique) at least as heavy as
/// every neighbor. Degree zero is the trivial case.
pub fn apply_isolated_clique(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(v) {
        return false;
    }
    let nbrs = sorted_neighbors(g, v);
    let w = g.weight(v);
    if nbrs.iter().any(|&u| g.weight(u) > w) || !is_clique(g, &nbrs) {
        return false;
    }
    let mut e = Edit::new(g);
    e.remove(v);
    e.remove_all(&nbrs);
    events.push(e.finish(Rule::IsolatedClique, Recovery::Include(vec![v]), w));
    true
}

/// Edge `{u, v}` with `w(v) + w(N(u) \ N[v]) <= w(u)`: `v` is removable.
pub fn apply_basic_single_edge(g: &mut WeightedGraph, u: Vertex, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(u) || !g.is_alive(v) || u == v || !g.has_edge(u, v) {
        return false;
    }
    let nv = sorted_neighbors(g, v);
    let budget = g.weight(u);
    let mut sum = g.weight(v);
    if sum > budget {
        return false;
    }
    for w in g.neighbors(u) {
        if w != v && nv.binary_search(&w).is_err() {
            sum += g.weight(w);
            if sum > budget {
                return false;
            }
        }
    }
    let mut e = Edit::new(g);
    e.remove(v);
    events.push(e.finish(Rule::BasicSingleEdge, Recovery::Exclude, 0));
    true
}

/// Edge `{u, v}` with `w(v) >= w(N(v)) - w(u)`: the common neighbors of `u`
/// and `v` are removable. Requires at least one common neighbor.
pub fn apply_extended_single_edge(g: &mut WeightedGraph, u: Vertex, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(u) || !g.is_alive(v) || u == v || !g.has_edge(u, v) {
        return false;
    }
    let nv = sorted_neighbors(g, v);
    if g.weight(v) + g.weight(u) < weight_of(g, &nv) {
        return false;
    }
    let common: Vec<Vertex> = sorted_neighbors(g, u).into_iter().filter(|w| nv.binary_search(w).is_ok()).collect();
    if common.is_empty() {
        return false;
    }
    let mut e = Edit::new(g);
    e.remove_all(&common);
    events.push(e.finish(Rule::ExtendedSingleEdge, Recovery::Exclude, 0));
    true
}

fn closed_contains(g: &WeightedGraph, big: Vertex, small: Vertex) -> bool {
    let nb = sorted_neighbors(g, big);
    g.neighbors(small).all(|w| w == big || nb.binary_search(&w).is_ok())
}

/// Adjacent `u, v`. If `N[u] ⊇ N[v]` and `w(u) <= w(v)` then `u` is removed
/// (and symmetrically for `v`). When both directions hold the lower id goes.
pub fn apply_domination(g: &mut WeightedGraph, u: Vertex, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(u) || !g.is_alive(v) || u == v || !g.has_edge(u, v) {
        return false;
    }
    let (wu, wv) = (g.weight(u), g.weight(v));
    let u_goes = wu <= wv && g.degree(u) >= g.degree(v) && closed_contains(g, u, v);
    let v_goes = wv <= wu && g.degree(v) >= g.degree(u) && closed_contains(g, v, u);
    let target = match (u_goes, v_goes) {
        (true, true) => u.min(v),
        (true, false) => u,
        (false, true) => v,
        (false, false) => return false,
    };
    let mut e = Edit::new(g);
    e.remove(target);
    events.push(e.finish(Rule::Domination, Recovery::Exclude, 0));
    true
}

/// A degree-three vertex sharing the exact neighborhood of `u`.
pub fn find_twin(g: &WeightedGraph, u: Vertex) -> Option<Vertex> {
    if !g.is_alive(u) || g.degree(u) != 3 {
        return None;
    }
    let nu = sorted_neighbors(g, u);
    let mut candidates: Vec<Vertex> = g.neighbors(nu[0]).filter(|&c| c != u && g.degree(c) == 3).collect();
    candidates.sort_unstable();
    candidates.into_iter().find(|&c| sorted_neighbors(g, c) == nu)
}

/// Non-adjacent `u, v` with `N(u) = N(v) = {p, q, r}` independent.
pub fn apply_twin(g: &mut WeightedGraph, u: Vertex, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(u) || !g.is_alive(v) || u == v {
        return false;
    }
    let nu = sorted_neighbors(g, u);
    if nu.len() != 3 || nu != sorted_neighbors(g, v) || !is_independent_among(g, &nu) {
        return false;
    }
    let pair = g.weight(u) + g.weight(v);
    let outer = weight_of(g, &nu);
    let lightest = nu.iter().map(|&p| g.weight(p)).min().unwrap_or(0);
    let event = if pair >= outer {
        let mut e = Edit::new(g);
        e.remove_all(&[u, v]);
        e.remove_all(&nu);
        e.finish(Rule::Twin, Recovery::Include(vec![u, v]), pair)
    } else if pair + lightest > outer {
        let members = [u, v, nu[0], nu[1], nu[2]];
        let targets = neighborhood_union(g, &nu, &members);
        let mut e = Edit::new(g);
        e.remove_all(&members);
        let fold = e.push_vertex(outer - pair, &targets);
        e.finish(Rule::Twin, Recovery::Fold { fold, inside: nu, outside: vec![u, v] }, pair)
    } else {
        return false;
    };
    events.push(event);
    true
}

/// Simplicial `v` at least as heavy as each of its simplicial neighbors.
/// Neighbors no heavier than `v` are removed, the rest lose `w(v)`.
pub fn apply_simplicial_transfer(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(v) {
        return false;
    }
    let nbrs = sorted_neighbors(g, v);
    let wv = g.weight(v);
    if !is_clique(g, &nbrs) {
        return false;
    }
    if nbrs.iter().any(|&u| g.weight(u) > wv && is_simplicial(g, u)) {
        return false;
    }
    let (dropped, kept): (Vec<Vertex>, Vec<Vertex>) = nbrs.iter().partition(|&&u| g.weight(u) <= wv);
    let mut e = Edit::new(g);
    e.remove_all(&dropped);
    e.remove(v);
    for &x in &kept {
        let wx = e.g.weight(x);
        e.set_weight(x, wx - wv);
    }
    events.push(e.finish(Rule::SimplicialTransfer, Recovery::IncludeUnlessAny { watch: kept, vertex: v }, wv));
    true
}

/// Finds an independent set `I` maximizing `w(I) - w(N(I))` through a
/// minimum cut in the bipartite double cover. Returns `(I, value)`.
pub fn critical_independent_set(g: &WeightedGraph) -> (Vec<Vertex>, i128) {
    let live: Vec<Vertex> = g.live_vertices().collect();
    let n = live.len();
    if n == 0 {
        return (Vec::new(), 0);
    }
    let mut local = vec![usize::MAX; g.capacity()];
    for (i, &v) in live.iter().enumerate() {
        local[v] = i;
    }
    let source = 2 * n;
    let sink = source + 1;
    let mut net = FlowNetwork::new(2 * n + 2);
    for (i, &v) in live.iter().enumerate() {
        net.add_arc(source, i, g.weight(v));
        net.add_arc(n + i, sink, g.weight(v));
        for u in g.neighbors(v) {
            net.add_arc(i, n + local[u], INFINITE);
        }
    }
    net.max_flow(source, sink);
    let reach = net.source_side(source);
    let critical: Vec<bool> = (0..n).map(|i| reach[i]).collect();
    let independent: Vec<Vertex> = (0..n)
        .filter(|&i| critical[i] && !g.neighbors(live[i]).any(|u| critical[local[u]]))
        .map(|i| live[i])
        .collect();
    let boundary = neighborhood_union(g, &independent, &[]);
    let value = weight_of(g, &independent) as i128 - weight_of(g, &boundary) as i128;
    (independent, value)
}

/// Takes a critical weighted independent set if its value is positive (or
/// zero, when allowed) and removes its closed neighborhood.
pub fn apply_cwis(g: &mut WeightedGraph, events: &mut Vec<ReductionEvent>, allow_zero: bool) -> bool {
    let (set, value) = critical_independent_set(g);
    if set.is_empty() || value < 0 || (value == 0 && !allow_zero) {
        return false;
    }
    let boundary = neighborhood_union(g, &set, &[]);
    let gain = weight_of(g, &set);
    let mut e = Edit::new(g);
    e.remove_all(&set);
    e.remove_all(&boundary);
    events.push(e.finish(Rule::Cwis, Recovery::Include(set), gain));
    true
}

/// `N(v)` independent and `w(N(v)) > w(v) > w(N(v)) - min w(N(v))`: fold
/// `N[v]` into one vertex of weight `w(N(v)) - w(v)`.
pub fn apply_neighborhood_folding(g: &mut WeightedGraph, v: Vertex, events: &mut Vec<ReductionEvent>) -> bool {
    if !g.is_alive(v) {
        return false;
    }
    let nbrs = sorted_neighbors(g, v);
    let Some(lightest) = nbrs.iter().map(|&u| g.weight(u)).min() else {
        return false;
    };
    let wv = g.weight(v);
    let total = weight_of(g, &nbrs);
    if !(total > wv && wv + lightest > total) || !is_independent_among(g, &nbrs) {
        return false;
    }
    let mut closed = nbrs.clone();
    closed.push(v);
    let targets = neighborhood_union(g, &nbrs, &closed);
    let mut e = Edit::new(g);
    e.remove(v);
    e.remove_all(&nbrs);
    let fold = e.push_vertex(total - wv, &targets);
    events.push(e.finish(Rule::NeighborhoodFolding, Recovery::Fold { fold, inside: nbrs, outside: vec![v] }, wv));
    true
}
