//! Orientability, two-colorability, w1 evaluation and the intersection
//! pairing, conversion from signed codes, and the word-level criteria
//! (evenly intersticed, interlacement, planarity by exhaustion).

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{GaussWord, IntersignedGaussCode, Sign, SignedGaussCode};
use crate::error::{Error, Result};
use crate::gf2::{self, Cochain0, Cochain1};
use crate::topology::{self, EdgeEnd, EmbeddingScheme, FourValentGraph, RotationCochain, SurfaceSummary};

/// Largest crossing count accepted by the exhaustive spectrum by default.
pub const DEFAULT_SPECTRUM_BOUND: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientability {
    pub orientable: bool,
    pub witness: Option<Cochain0>,
    /// S + δr, a representative of w1.
    pub w1_rep: Cochain1,
}

pub fn orientability(code: &IntersignedGaussCode) -> Orientability {
    orientability_with_seed(code, 0)
}

pub fn orientability_with_seed(code: &IntersignedGaussCode, seed: u64) -> Orientability {
    let graph = FourValentGraph::new(code);
    let (_, r) = topology::choose_rotation(&graph, seed);
    let w1_rep = topology::sign_cochain(code).add(&gf2::lift_coboundary(&r, &graph));
    let witness = gf2::solve_coboundary(&w1_rep, &graph).expect("sizes agree by construction");
    Orientability { orientable: witness.is_some(), witness, w1_rep }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoColorability {
    pub two_colorable: bool,
    /// A 0-cochain whose coboundary is `dual_rep`; it labels the two colors.
    pub witness: Option<Cochain0>,
    /// S + 𝟏, a representative of the Poincaré dual of the curve.
    pub dual_rep: Cochain1,
}

pub fn two_colorability(code: &IntersignedGaussCode) -> TwoColorability {
    let graph = FourValentGraph::new(code);
    let dual_rep = topology::sign_cochain(code).add(&Cochain1::ones(graph.edge_count()));
    let witness = gf2::solve_coboundary(&dual_rep, &graph).expect("sizes agree by construction");
    TwoColorability { two_colorable: witness.is_some(), witness, dual_rep }
}

/// Checkerboard test straight from the definition: faces are nodes, every
/// edge links the two faces it borders; colorable iff that graph is bipartite.
pub fn two_color_oracle(scheme: &EmbeddingScheme) -> bool {
    let trace = topology::face_cycles(scheme).expect("face tracing of a valid scheme");
    let f = trace.face_count();
    let mut adj = vec![Vec::new(); f];
    for e in 0..scheme.graph.edge_count() {
        let (a, b) = trace.faces_of_edge(e);
        if a == b {
            return false;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color = vec![u8::MAX; f];
    for start in 0..f {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if color[v] == u8::MAX {
                    color[v] = color[u] ^ 1;
                    stack.push(v);
                } else if color[v] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

/// A closed walk given by its departure edge-ends: step `i` leaves through
/// `steps[i]`, runs along that edge and arrives at the opposite end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedWalk {
    pub steps: Vec<EdgeEnd>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Passage {
    /// Arrives and leaves through the in/out pair of a single occurrence.
    Straight,
    Bent,
}

impl ClosedWalk {
    pub fn new(steps: Vec<EdgeEnd>) -> Self {
        ClosedWalk { steps }
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|&s| FourValentGraph::end_edge(s))
    }

    /// Validates closure and classifies the passage at each vertex visited
    /// (passage `i` sits between step `i` and step `i + 1`).
    pub fn passages(&self, graph: &FourValentGraph) -> Result<Vec<Passage>> {
        let k = self.steps.len();
        if k == 0 {
            return Err(Error::NotClosed("empty walk".into()));
        }
        let ends = 2 * graph.edge_count();
        if let Some(&bad) = self.steps.iter().find(|&&s| s >= ends) {
            return Err(Error::NotClosed(format!("edge-end {bad} does not exist")));
        }
        (0..k)
            .map(|i| {
                let arrive = FourValentGraph::opposite_end(self.steps[i]);
                let leave = self.steps[(i + 1) % k];
                if graph.end_vertex(arrive) != graph.end_vertex(leave) {
                    return Err(Error::NotClosed(format!("step {} does not continue at the vertex reached", i + 1)));
                }
                if arrive == leave {
                    return Err(Error::NotClosed(format!("walk backtracks after step {i}")));
                }
                Ok(if graph.end_lift(arrive) == graph.end_lift(leave) { Passage::Straight } else { Passage::Bent })
            })
            .collect()
    }
}

/// (S + δr)(z).
pub fn w1_evaluate(code: &IntersignedGaussCode, z: &ClosedWalk) -> Result<u8> {
    let graph = FourValentGraph::new(code);
    z.passages(&graph)?;
    Ok(orientability(code).w1_rep.evaluate(z.edges()))
}

/// Returns ((S + 𝟏)(z), #straight-throughs(z) + w1(z)) mod 2; they always agree.
pub fn pairing_check(code: &IntersignedGaussCode, z: &ClosedWalk) -> Result<(u8, u8)> {
    let graph = FourValentGraph::new(code);
    let straight = z.passages(&graph)?.iter().filter(|&&p| p == Passage::Straight).count();
    let lhs = two_colorability(code).dual_rep.evaluate(z.edges());
    let rhs = (straight % 2) as u8 ^ w1_evaluate(code, z)?;
    Ok((lhs, rhs))
}

/// Occurrence signs become the rotation cochain r ("+" is 0) and the sign
/// sequence is its coboundary on the cycle graphs.
pub fn from_signed(code: &SignedGaussCode) -> IntersignedGaussCode {
    let parts: Vec<(Vec<u32>, Vec<Sign>)> = code
        .components()
        .iter()
        .map(|c| {
            let m = c.len();
            let signs = (0..m).map(|i| c[i].1 ^ c[(i + 1) % m].1).collect();
            (c.iter().map(|&(s, _)| s).collect(), signs)
        })
        .collect();
    IntersignedGaussCode::from_parts(parts).expect("same word as a valid signed code")
}

/// The rotation cochain a signed code's occurrence signs define.
pub fn signed_rotation_cochain(code: &SignedGaussCode, graph: &FourValentGraph) -> Result<RotationCochain> {
    RotationCochain::new(graph, code.components().iter().flatten().map(|&(_, g)| g.bit()).collect())
}

fn single_component(word: &GaussWord) -> Result<&[u32]> {
    match word.components() {
        [only] => Ok(only),
        _ => Err(Error::MultiComponent),
    }
}

fn occurrence_positions(component: &[u32]) -> BTreeMap<u32, (usize, usize)> {
    let mut first: BTreeMap<u32, usize> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (i, &s) in component.iter().enumerate() {
        match first.get(&s) {
            Some(&j) => {
                out.insert(s, (j, i));
            }
            None => {
                first.insert(s, i);
            }
        }
    }
    out
}

/// Every symbol has an even number of symbols between its two occurrences.
/// Components are checked separately; a symbol shared by two components has
/// no gap to measure.
pub fn evenly_intersticed(word: &GaussWord) -> Result<bool> {
    let mut ok = true;
    let mut seen = 0;
    for comp in word.components() {
        let pos = occurrence_positions(comp);
        seen += pos.len();
        ok &= pos.values().all(|&(i, j)| (j - i - 1) % 2 == 0);
    }
    if seen != word.n() {
        return Err(Error::MultiComponent);
    }
    Ok(ok)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlacementGraph {
    pub vertices: Vec<u32>,
    pub edges: BTreeSet<(u32, u32)>,
}

impl InterlacementGraph {
    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<(u32, usize)> {
        self.vertices.iter().map(|&v| (v, self.degree(v))).collect()
    }
}

/// Symbols a and b are joined iff they occur in the pattern a…b…a…b.
pub fn interlacement(word: &GaussWord) -> Result<InterlacementGraph> {
    let comp = single_component(word)?;
    let pos = occurrence_positions(comp);
    let mut edges = BTreeSet::new();
    for (&a, &(a1, a2)) in &pos {
        for (&b, &(b1, b2)) in pos.range(a + 1..) {
            let inside = |p: usize| a1 < p && p < a2;
            if inside(b1) != inside(b2) {
                edges.insert((a, b));
            }
        }
    }
    Ok(InterlacementGraph { vertices: pos.keys().copied().collect(), edges })
}

/// True iff every vertex of the interlacement graph has even degree.
pub fn lins_orientable_criterion(word: &GaussWord) -> Result<bool> {
    let g = interlacement(word)?;
    Ok(g.degrees().iter().all(|&(_, d)| d % 2 == 0))
}

/// One sign decoration of a word and what it realizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub code: String,
    pub surface: SurfaceSummary,
    pub two_colorable: bool,
}

/// Classifies every one of the 2^(2n) sign sequences on a word.
pub fn realizations(word: &GaussWord, bound: usize) -> Result<Vec<Realization>> {
    let n = word.n();
    if n > bound {
        return Err(Error::TooLarge(format!("{n} crossings exceeds the spectrum bound {bound}")));
    }
    if 2 * n >= 63 {
        return Err(Error::TooLarge(format!("{n} crossings")));
    }
    let m = word.len();
    let base = word.with_signs(&vec![Sign::Plus; m])?;
    let graph = FourValentGraph::new(&base);
    let (rotation, r) = topology::choose_rotation(&graph, 0);
    let delta_r = gf2::lift_coboundary(&r, &graph);
    (0u64..1 << m)
        .into_par_iter()
        .map(|mask| {
            let signs: Vec<Sign> = (0..m).map(|i| Sign::from_bit((mask >> i & 1) as u8)).collect();
            let code = base.with_signs(&signs)?;
            let s = Cochain1::from_bits(signs.iter().map(|g| g.bit()));
            let scheme = EmbeddingScheme::new(graph.clone(), rotation.clone(), s.add(&delta_r))?;
            let surface = topology::trace_faces(&scheme)?;
            let dual = s.add(&Cochain1::ones(m));
            let two_colorable = gf2::solve_coboundary(&dual, &graph)?.is_some();
            Ok(Realization { code: code.to_string(), surface, two_colorable })
        })
        .collect()
}

pub fn surface_spectrum(word: &GaussWord, bound: usize) -> Result<BTreeSet<SurfaceSummary>> {
    Ok(realizations(word, bound)?.into_iter().map(|r| r.surface).collect())
}

/// Some sign sequence realizes the word on the sphere.
pub fn is_planar(word: &GaussWord) -> Result<bool> {
    Ok(realizations(word, DEFAULT_SPECTRUM_BOUND)?.iter().any(|r| r.surface.is_sphere()))
}

/// Checks that "all two-colorable realizations are orientable" agrees with
/// the even-valence criterion on the interlacement graph.
pub fn lins_cross_check(word: &GaussWord) -> Result<bool> {
    let criterion = lins_orientable_criterion(word)?;
    let colorable: Vec<Realization> =
        realizations(word, DEFAULT_SPECTRUM_BOUND)?.into_iter().filter(|r| r.two_colorable).collect();
    if colorable.is_empty() {
        return Err(Error::NoTwoColorableRealization);
    }
    let all_orientable = colorable.iter().all(|r| r.surface.orientable);
    Ok(all_orientable == criterion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{parse_intersigned, parse_signed, parse_word};

    const EIGHT_CROSSING: &str = "1+2-3-4-2-3+5-6+7-7+6-5+8+8-4+1-";

    fn code(t: &str) -> IntersignedGaussCode {
        parse_intersigned(t).unwrap()
    }

    #[test]
    fn orientability_examples() {
        assert!(!orientability(&code(EIGHT_CROSSING)).orientable);
        let fig8 = orientability(&code("1-1-"));
        assert!(fig8.orientable);
        assert!(fig8.w1_rep.is_zero());
        assert!(orientability(&code("1-2-3-1-2-3-")).orientable);
    }

    #[test]
    fn witness_solves_w1_rep() {
        let c = code("1-2+1-2+");
        let o = orientability_with_seed(&c, 3);
        let g = FourValentGraph::new(&c);
        assert_eq!(gf2::coboundary(&o.witness.unwrap(), &g).unwrap(), o.w1_rep);
    }

    #[test]
    fn verdict_independent_of_seed() {
        for t in [EIGHT_CROSSING, "1-2+1-3-/2+3-", "1+2+1-2-"] {
            let base = orientability(&code(t)).orientable;
            for seed in 1..10 {
                assert_eq!(orientability_with_seed(&code(t), seed).orientable, base);
            }
        }
    }

    #[test]
    fn two_colorability_examples() {
        assert!(two_colorability(&code("1-1-")).two_colorable);
        let all_minus = two_colorability(&code("1-2-3-1-2-3-"));
        assert!(all_minus.dual_rep.is_zero() && all_minus.two_colorable);
        assert!(two_color_oracle(&topology::scheme_from_code(&code("1-2-3-1-2-3-"), 0)));
    }

    #[test]
    fn one_face_realization_is_not_colorable() {
        let c = code("1-2+3+1+2+3-");
        let scheme = topology::scheme_from_code(&c, 0);
        assert_eq!(topology::face_cycles(&scheme).unwrap().face_count(), 1);
        assert!(!two_color_oracle(&scheme));
    }

    #[test]
    fn cohomology_matches_face_coloring_on_small_words() {
        for w in ["11", "1212", "123123"] {
            let word = parse_word(w).unwrap();
            let m = word.len();
            for mask in 0..1u32 << m {
                let signs: Vec<Sign> = (0..m).map(|i| Sign::from_bit((mask >> i & 1) as u8)).collect();
                let c = word.with_signs(&signs).unwrap();
                assert_eq!(
                    two_colorability(&c).two_colorable,
                    two_color_oracle(&topology::scheme_from_code(&c, 0)),
                    "{c}"
                );
            }
        }
    }

    #[test]
    fn walk_along_a_component_satisfies_pairing() {
        let c = code(EIGHT_CROSSING);
        let g = FourValentGraph::new(&c);
        let z = ClosedWalk::new((0..g.lift_count()).map(|l| g.out_end(l)).collect());
        assert!(z.passages(&g).unwrap().iter().all(|&p| p == Passage::Straight));
        let (lhs, rhs) = pairing_check(&c, &z).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn broken_walks_are_rejected() {
        let c = code("1-2+1-2+");
        let g = FourValentGraph::new(&c);
        assert!(matches!(w1_evaluate(&c, &ClosedWalk::new(vec![g.out_end(0)])), Err(Error::NotClosed(_))));
        let back = ClosedWalk::new(vec![0, 1]);
        assert!(matches!(back.passages(&g), Err(Error::NotClosed(_))));
    }

    #[test]
    fn from_signed_examples() {
        let out = from_signed(&parse_signed("1^+1^-").unwrap());
        assert_eq!(out.to_string(), "1-1-");
        let three = from_signed(&parse_signed("1^-2^+3^-1^+/2^-/3^+").unwrap());
        assert!(orientability(&three).orientable);
    }

    #[test]
    fn word_criteria() {
        let w = |t| parse_word(t).unwrap();
        assert!(!evenly_intersticed(&w("1212")).unwrap());
        assert!(evenly_intersticed(&w("1234534125")).unwrap());
        assert!(evenly_intersticed(&w("1122")).unwrap());

        let g = interlacement(&w("1212")).unwrap();
        assert_eq!(g.edges, BTreeSet::from([(1, 2)]));
        assert!(!lins_orientable_criterion(&w("1212")).unwrap());
        assert!(lins_orientable_criterion(&w("1234534125")).unwrap());
        assert!(interlacement(&w("1122")).unwrap().edges.is_empty());
        assert!(matches!(interlacement(&w("12/12")), Err(Error::MultiComponent)));
    }

    #[test]
    fn planarity() {
        let w = |t| parse_word(t).unwrap();
        assert!(!is_planar(&w("1212")).unwrap());
        assert!(!is_planar(&w("1234534125")).unwrap());
        assert!(is_planar(&w("11")).unwrap());
        assert!(is_planar(&w("123123")).unwrap());
        assert!(matches!(surface_spectrum(&w("1212"), 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn lins_examples() {
        let w = |t| parse_word(t).unwrap();
        assert!(lins_cross_check(&w("1212")).unwrap());
        assert!(lins_cross_check(&w("1234534125")).unwrap());
    }
}
