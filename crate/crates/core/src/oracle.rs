//! Brute-force reference implementations and random generators. Nothing here
//! is clever; the point is to be obviously right.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::ClosedWalk;
use crate::codec::{AnyCode, IntersignedGaussCode, IntersignedLinkCode, LinkComponent, LinkOcc, Sign, SignedGaussCode};
use crate::error::{Error, Result};
use crate::gf2::{self, BitVec, Cochain0, Cochain1};
use crate::isomorphism::{self, generators};
use crate::topology::{EdgeEnd, EmbeddingScheme, FourValentGraph};

/// Largest vertex count the exhaustive membership test accepts.
pub const BRUTE_MAX_VERTICES: usize = 16;
/// Orbit closure stops with `TooLarge` past this many codes.
pub const ORBIT_CAP: usize = 200_000;

/// Is `target` the coboundary of some 0-cochain? Tries all 2^n of them.
pub fn brute_coboundary_membership(target: &Cochain1, graph: &FourValentGraph) -> Result<bool> {
    let n = graph.vertex_count();
    if n > BRUTE_MAX_VERTICES {
        return Err(Error::TooLarge(format!("{n} vertices for exhaustive search")));
    }
    if target.len() != graph.edge_count() {
        return Err(Error::SizeMismatch { expected: graph.edge_count(), actual: target.len() });
    }
    for mask in 0u32..1 << n {
        let x = Cochain0(BitVec::from_bits((0..n).map(|v| (mask >> v & 1) as u8)));
        if &gf2::coboundary(&x, graph)? == target {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Orientability straight from the flag graph: the surface is orientable iff
/// the graph on flags with the corner, along and across involutions is
/// bipartite.
pub fn face_trace_orientable(scheme: &EmbeddingScheme) -> bool {
    let count = scheme.flag_count();
    let mut color = vec![u8::MAX; count];
    for start in 0..count {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            for g in [scheme.corner(f), scheme.along(f), EmbeddingScheme::across(f)] {
                if color[g] == u8::MAX {
                    color[g] = color[f] ^ 1;
                    stack.push(g);
                } else if color[g] == color[f] {
                    return false;
                }
            }
        }
    }
    true
}

fn cycle_perm(k: usize) -> Vec<usize> {
    (1..k).chain([0]).collect()
}

fn swap_perm(k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    p.swap(0, 1);
    p
}

fn label_perms(n: usize) -> Vec<Vec<u32>> {
    if n < 2 {
        return Vec::new();
    }
    let to_labels = |p: Vec<usize>| p.into_iter().map(|i| i as u32 + 1).collect();
    vec![to_labels(cycle_perm(n)), to_labels(swap_perm(n))]
}

fn neighbours(code: &AnyCode, oriented: bool) -> Vec<AnyCode> {
    let mut out = Vec::new();
    match code {
        AnyCode::Intersigned(c) => {
            let k = c.components().len();
            for i in 0..k {
                out.push(AnyCode::Intersigned(generators::rotate(c, i, 1)));
                if !oriented {
                    let one = BTreeSet::from([i]);
                    out.push(AnyCode::Intersigned(isomorphism::reverse_component(c, &one).expect("index in range")));
                }
            }
            if k > 1 {
                out.push(AnyCode::Intersigned(generators::permute_components(c, &cycle_perm(k))));
                out.push(AnyCode::Intersigned(generators::permute_components(c, &swap_perm(k))));
            }
            out.extend(label_perms(c.n()).iter().map(|p| AnyCode::Intersigned(generators::relabel(c, p))));
        }
        AnyCode::Signed(c) => {
            let k = c.components().len();
            for i in 0..k {
                out.push(AnyCode::Signed(generators::rotate_signed(c, i, 1)));
                let one = BTreeSet::from([i]);
                out.push(AnyCode::Signed(isomorphism::reverse_signed_component(c, &one).expect("index in range")));
            }
            if k > 1 {
                out.push(AnyCode::Signed(generators::permute_signed(c, &cycle_perm(k))));
                out.push(AnyCode::Signed(generators::permute_signed(c, &swap_perm(k))));
            }
            out.extend(label_perms(c.n()).iter().map(|p| AnyCode::Signed(generators::relabel_signed(c, p))));
            out.push(AnyCode::Signed(generators::complement_signed(c)));
        }
        AnyCode::Link(c) => {
            let k = c.components().len();
            for i in 0..k {
                out.push(AnyCode::Link(generators::rotate_link(c, i, 1)));
                let one = BTreeSet::from([i]);
                out.push(AnyCode::Link(isomorphism::reverse_link_component(c, &one).expect("index in range")));
            }
            if k > 1 {
                out.push(AnyCode::Link(generators::permute_link(c, &cycle_perm(k))));
                out.push(AnyCode::Link(generators::permute_link(c, &swap_perm(k))));
            }
            out.extend(label_perms(c.n()).iter().map(|p| AnyCode::Link(generators::relabel_link(c, p))));
        }
    }
    out
}

/// Every code reachable from `code` by the group generators, as text.
/// Signed and link codes always use their full group; `oriented` only
/// matters for intersigned codes.
pub fn orbit_enumerate(code: &AnyCode, oriented: bool) -> Result<BTreeSet<String>> {
    let mut seen = BTreeSet::from([code.to_string()]);
    let mut queue = VecDeque::from([code.clone()]);
    while let Some(c) = queue.pop_front() {
        for next in neighbours(&c, oriented) {
            if seen.insert(next.to_string()) {
                if seen.len() > ORBIT_CAP {
                    return Err(Error::TooLarge(format!("orbit exceeds {ORBIT_CAP} codes")));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    Sign::from_bit(rng.gen_range(0..2))
}

/// A shuffled double-occurrence word on 1..n cut into `components` nonempty
/// cyclic pieces.
fn random_word(n: usize, components: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    assert!(n >= 1, "need at least one symbol");
    let components = components.clamp(1, 2 * n);
    let mut letters: Vec<u32> = (1..=n as u32).flat_map(|s| [s, s]).collect();
    letters.shuffle(rng);
    let mut cuts: Vec<usize> = (1..2 * n).collect::<Vec<_>>().choose_multiple(rng, components - 1).copied().collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(components);
    let mut start = 0;
    for cut in cuts.into_iter().chain([2 * n]) {
        out.push(letters[start..cut].to_vec());
        start = cut;
    }
    out
}

pub fn random_code(n: usize, components: usize, seed: u64) -> IntersignedGaussCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = random_word(n, components, &mut rng);
    let parts = word
        .into_iter()
        .map(|symbols| {
            let signs = symbols.iter().map(|_| random_sign(&mut rng)).collect();
            (symbols, signs)
        })
        .collect();
    IntersignedGaussCode::from_parts(parts).expect("random word is a valid code").normalized()
}

pub fn random_signed(n: usize, components: usize, seed: u64) -> SignedGaussCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = random_word(n, components, &mut rng);
    let first: Vec<Sign> = (0..n).map(|_| random_sign(&mut rng)).collect();
    let mut used = vec![false; n];
    let comps = word
        .into_iter()
        .map(|symbols| {
            symbols
                .into_iter()
                .map(|s| {
                    let i = s as usize - 1;
                    let g = if used[i] { -first[i] } else { first[i] };
                    used[i] = true;
                    (s, g)
                })
                .collect()
        })
        .collect();
    SignedGaussCode::new(comps).expect("random word is a valid signed code").normalized()
}

/// A link code with `n` crossings spread over `components` crossing
/// components plus `free` components without crossings.
pub fn random_link(n: usize, components: usize, free: usize, seed: u64) -> IntersignedLinkCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps = Vec::new();
    if n > 0 {
        let writhes: Vec<Sign> = (0..n).map(|_| random_sign(&mut rng)).collect();
        for symbols in random_word(n, components, &mut rng) {
            let occ = symbols.iter().map(|&s| LinkOcc { symbol: s, writhe: writhes[s as usize - 1] }).collect();
            let signs = symbols.iter().map(|_| random_sign(&mut rng)).collect();
            comps.push(LinkComponent::crossings(occ, signs).expect("nonempty component"));
        }
    }
    let free = if comps.is_empty() { free.max(1) } else { free };
    for _ in 0..free {
        comps.push(LinkComponent::Free(random_sign(&mut rng)));
    }
    IntersignedLinkCode::from_unnormalized(comps).expect("random link code is valid")
}

/// Departure ends reachable in one step: arrive through the opposite end and
/// leave by any other end of that vertex.
fn successors(graph: &FourValentGraph, d: EdgeEnd) -> impl Iterator<Item = EdgeEnd> + '_ {
    let arrive = FourValentGraph::opposite_end(d);
    graph.vertex_ends(graph.end_vertex(arrive)).into_iter().filter(move |&e| e != arrive)
}

/// A random non-backtracking walk of about `len` steps, closed up by a
/// shortest non-backtracking path back to its first step.
pub fn random_walk(graph: &FourValentGraph, len: usize, seed: u64) -> ClosedWalk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ends = 2 * graph.edge_count();
    let start = rng.gen_range(0..ends);
    let mut steps = vec![start];
    for _ in 1..len.max(1) {
        let options: Vec<EdgeEnd> = successors(graph, *steps.last().unwrap()).collect();
        steps.push(*options.choose(&mut rng).unwrap());
    }
    let last = *steps.last().unwrap();
    if successors(graph, last).any(|e| e == start) {
        return ClosedWalk::new(steps);
    }
    let mut prev = vec![usize::MAX; ends];
    let mut queue = VecDeque::from([last]);
    prev[last] = last;
    while let Some(d) = queue.pop_front() {
        for e in successors(graph, d) {
            if prev[e] == usize::MAX {
                prev[e] = d;
                queue.push_back(e);
            }
        }
    }
    // Find an end that steps into `start`, then unwind the BFS tree.
    let into_start = (0..ends).filter(|&d| prev[d] != usize::MAX).find(|&d| successors(graph, d).any(|e| e == start));
    let Some(mut d) = into_start else {
        return ClosedWalk::new(steps);
    };
    let mut tail = Vec::new();
    while d != last {
        tail.push(d);
        d = prev[d];
    }
    steps.extend(tail.into_iter().rev());
    ClosedWalk::new(steps)
}
