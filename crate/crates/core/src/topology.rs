//! Cycle-graph cover, four-valent quotient graph, straight-through rotation
//! systems, embedding schemes and face tracing.
//!
//! Lifts are the occurrences of a code, numbered in reading order. Edge `i`
//! is the interstice following lift `i`; it runs from that lift (its tail) to
//! the cyclically next lift of the same component (its head). Every edge has
//! two edge-ends: `2 * i` at the tail (an outgoing end) and `2 * i + 1` at the
//! head (an incoming end).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{IntersignedGaussCode, Occurrence};
use crate::error::{Error, Result};
use crate::gf2::{self, Cochain1};

pub type Lift = usize;
pub type EdgeEnd = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: Lift,
    pub head: Lift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourValentGraph {
    /// Vertex (symbol - 1) of each lift.
    lift_vertex: Vec<usize>,
    lift_occurrence: Vec<Occurrence>,
    /// The two lifts of each vertex, in reading order.
    vertex_lifts: Vec<[Lift; 2]>,
    edges: Vec<Edge>,
    /// Edge arriving at each lift.
    in_edge: Vec<usize>,
    component_of_edge: Vec<usize>,
}

impl FourValentGraph {
    pub fn new(code: &IntersignedGaussCode) -> Self {
        let n = code.n();
        let mut lift_vertex = Vec::with_capacity(2 * n);
        let mut lift_occurrence = Vec::with_capacity(2 * n);
        let mut vertex_lifts = vec![[usize::MAX; 2]; n];
        let mut edges = Vec::with_capacity(2 * n);
        let mut in_edge = vec![0; 2 * n];
        let mut component_of_edge = Vec::with_capacity(2 * n);
        let mut base = 0;
        for (c, comp) in code.components().iter().enumerate() {
            let len = comp.len();
            for (p, &sym) in comp.symbols().iter().enumerate() {
                let lift = base + p;
                let v = sym as usize - 1;
                lift_vertex.push(v);
                lift_occurrence.push(Occurrence { component: c, position: p });
                let slot = usize::from(vertex_lifts[v][0] != usize::MAX);
                vertex_lifts[v][slot] = lift;
                let head = base + (p + 1) % len;
                edges.push(Edge { tail: lift, head });
                in_edge[head] = lift;
                component_of_edge.push(c);
            }
            base += len;
        }
        FourValentGraph { lift_vertex, lift_occurrence, vertex_lifts, edges, in_edge, component_of_edge }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_lifts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn lift_count(&self) -> usize {
        self.lift_vertex.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_vertices(&self, e: &Edge) -> (usize, usize) {
        (self.lift_vertex[e.tail], self.lift_vertex[e.head])
    }

    pub fn lift_vertex(&self, lift: Lift) -> usize {
        self.lift_vertex[lift]
    }

    pub fn lift_occurrence(&self, lift: Lift) -> Occurrence {
        self.lift_occurrence[lift]
    }

    pub fn vertex_lifts(&self, v: usize) -> [Lift; 2] {
        self.vertex_lifts[v]
    }

    /// The other lift of the same crossing.
    pub fn partner(&self, lift: Lift) -> Lift {
        let [a, b] = self.vertex_lifts[self.lift_vertex[lift]];
        if a == lift {
            b
        } else {
            a
        }
    }

    pub fn component_of_edge(&self, e: usize) -> usize {
        self.component_of_edge[e]
    }

    pub fn out_end(&self, lift: Lift) -> EdgeEnd {
        2 * lift
    }

    pub fn in_end(&self, lift: Lift) -> EdgeEnd {
        2 * self.in_edge[lift] + 1
    }

    pub fn end_edge(end: EdgeEnd) -> usize {
        end / 2
    }

    /// The end at the other extremity of the same edge.
    pub fn opposite_end(end: EdgeEnd) -> EdgeEnd {
        end ^ 1
    }

    /// The lift an edge-end is attached to.
    pub fn end_lift(&self, end: EdgeEnd) -> Lift {
        let e = &self.edges[end / 2];
        if end.is_multiple_of(2) {
            e.tail
        } else {
            e.head
        }
    }

    pub fn end_vertex(&self, end: EdgeEnd) -> usize {
        self.lift_vertex[self.end_lift(end)]
    }

    /// The four edge-ends at a vertex: `[in1, out1, in2, out2]`.
    pub fn vertex_ends(&self, v: usize) -> [EdgeEnd; 4] {
        let [a, b] = self.vertex_lifts[v];
        [self.in_end(a), self.out_end(a), self.in_end(b), self.out_end(b)]
    }

    /// Connected components of the quotient graph, as a vertex labelling.
    pub fn connected_components(&self) -> (usize, Vec<usize>) {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (u, v) = self.edge_vertices(e);
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        }
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            label[v] = label[r];
        }
        (count, label)
    }
}

/// A cyclic order of the four edge-ends at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    cycles: Vec<[EdgeEnd; 4]>,
    /// (vertex, index in its cycle) per edge-end.
    slot: Vec<(usize, usize)>,
}

impl RotationSystem {
    pub fn from_cycles(graph: &FourValentGraph, cycles: Vec<[EdgeEnd; 4]>) -> Result<Self> {
        if cycles.len() != graph.vertex_count() {
            return Err(Error::SizeMismatch { expected: graph.vertex_count(), actual: cycles.len() });
        }
        let mut slot = vec![(usize::MAX, 0); 2 * graph.edge_count()];
        for (v, cyc) in cycles.iter().enumerate() {
            let mut ends = graph.vertex_ends(v);
            let mut given = *cyc;
            ends.sort_unstable();
            given.sort_unstable();
            if ends != given {
                return Err(Error::Validation(format!(
                    "rotation at vertex {} is not a permutation of its ends",
                    v + 1
                )));
            }
            for (i, &end) in cyc.iter().enumerate() {
                slot[end] = (v, i);
            }
        }
        Ok(RotationSystem { cycles, slot })
    }

    /// Straight-through rotation from one interleaving choice per vertex:
    /// 0 gives `[in1, in2, out1, out2]`, 1 gives `[in1, out2, out1, in2]`.
    pub fn from_choices(graph: &FourValentGraph, choices: &[u8]) -> Self {
        let cycles = (0..graph.vertex_count())
            .map(|v| {
                let [in1, out1, in2, out2] = graph.vertex_ends(v);
                if choices[v] & 1 == 0 {
                    [in1, in2, out1, out2]
                } else {
                    [in1, out2, out1, in2]
                }
            })
            .collect();
        Self::from_cycles(graph, cycles).expect("interleavings are permutations of the vertex ends")
    }

    pub fn cycle(&self, v: usize) -> [EdgeEnd; 4] {
        self.cycles[v]
    }

    pub fn next(&self, end: EdgeEnd) -> EdgeEnd {
        let (v, i) = self.slot[end];
        self.cycles[v][(i + 1) % 4]
    }

    pub fn prev(&self, end: EdgeEnd) -> EdgeEnd {
        let (v, i) = self.slot[end];
        self.cycles[v][(i + 3) % 4]
    }

    /// Each strand's in/out pair sits at antipodal positions.
    pub fn is_straight_through(&self, graph: &FourValentGraph) -> bool {
        (0..graph.vertex_count()).all(|v| {
            graph.vertex_lifts(v).iter().all(|&l| {
                let a = self.slot[graph.in_end(l)].1;
                let b = self.slot[graph.out_end(l)].1;
                (a + 2) % 4 == b
            })
        })
    }

    /// Reverses the cyclic order at one vertex.
    pub fn reversed_at(&self, v: usize) -> Self {
        let mut out = self.clone();
        let [a, b, c, d] = self.cycles[v];
        out.cycles[v] = [a, d, c, b];
        for (i, &end) in out.cycles[v].iter().enumerate() {
            out.slot[end] = (v, i);
        }
        out
    }
}

/// GF(2) value per lift, opposite on the two lifts of every crossing.
/// 0 stands for "+", 1 for "-".
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RotationCochain(Vec<u8>);

impl RotationCochain {
    pub fn new(graph: &FourValentGraph, values: Vec<u8>) -> Result<Self> {
        if values.len() != graph.lift_count() {
            return Err(Error::SizeMismatch { expected: graph.lift_count(), actual: values.len() });
        }
        for v in 0..graph.vertex_count() {
            let [a, b] = graph.vertex_lifts(v);
            if values[a] == values[b] {
                return Err(Error::Validation(format!("rotation cochain agrees on both lifts of symbol {}", v + 1)));
            }
        }
        Ok(RotationCochain(values))
    }

    pub fn value(&self, lift: Lift) -> u8 {
        self.0[lift]
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    /// Derives r from a straight-through rotation: r(o) = 0 iff the rotation
    /// sends o's outgoing end to the other occurrence's outgoing end.
    pub fn from_rotation(graph: &FourValentGraph, rotation: &RotationSystem) -> Self {
        let values = (0..graph.lift_count())
            .map(|l| u8::from(rotation.next(graph.out_end(l)) != graph.out_end(graph.partner(l))))
            .collect();
        RotationCochain(values)
    }
}

/// Picks one of the two straight-through interleavings at every vertex.
pub fn choose_rotation(graph: &FourValentGraph, seed: u64) -> (RotationSystem, RotationCochain) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices: Vec<u8> = (0..graph.vertex_count()).map(|_| rng.gen_range(0..2)).collect();
    let rotation = RotationSystem::from_choices(graph, &choices);
    let r = RotationCochain::from_rotation(graph, &rotation);
    (rotation, r)
}

/// Rotation system plus signature λ (1 marks a twisted edge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingScheme {
    pub graph: FourValentGraph,
    pub rotation: RotationSystem,
    pub signature: Cochain1,
}

/// Flags are (edge-end, side) pairs encoded as `2 * end + side`.
pub type Flag = usize;

impl EmbeddingScheme {
    pub fn new(graph: FourValentGraph, rotation: RotationSystem, signature: Cochain1) -> Result<Self> {
        if signature.len() != graph.edge_count() {
            return Err(Error::SizeMismatch { expected: graph.edge_count(), actual: signature.len() });
        }
        Ok(EmbeddingScheme { graph, rotation, signature })
    }

    pub fn flag_count(&self) -> usize {
        4 * self.graph.edge_count()
    }

    /// Corner involution: the corner between an end and its rotation successor.
    pub fn corner(&self, flag: Flag) -> Flag {
        let (end, side) = (flag / 2, flag % 2);
        if side == 0 {
            2 * self.rotation.next(end) + 1
        } else {
            2 * self.rotation.prev(end)
        }
    }

    /// Edge involution: runs along the edge to its other end; untwisted edges
    /// swap the side label, twisted ones keep it.
    pub fn along(&self, flag: Flag) -> Flag {
        let (end, side) = (flag / 2, flag % 2);
        let twist = self.signature.get(FourValentGraph::end_edge(end)) as usize;
        2 * FourValentGraph::opposite_end(end) + (side ^ 1 ^ twist)
    }

    /// Side involution: the other side of the same edge-end.
    pub fn across(flag: Flag) -> Flag {
        flag ^ 1
    }

    /// Equivalence move: reverse the rotation at `v` and invert the signature
    /// on its incident edges (loops are inverted twice).
    pub fn switched_at(&self, v: usize) -> Self {
        let mut signature = self.signature.clone();
        for (i, e) in self.graph.edges().iter().enumerate() {
            let (a, b) = self.graph.edge_vertices(e);
            if (a == v) != (b == v) {
                signature.0.flip(i);
            }
        }
        EmbeddingScheme { graph: self.graph.clone(), rotation: self.rotation.reversed_at(v), signature }
    }
}

/// λ = S + δr for the rotation chosen by `seed`.
pub fn scheme_from_code(code: &IntersignedGaussCode, seed: u64) -> EmbeddingScheme {
    let graph = FourValentGraph::new(code);
    let (rotation, r) = choose_rotation(&graph, seed);
    let s = sign_cochain(code);
    let signature = s.add(&gf2::lift_coboundary(&r, &graph));
    EmbeddingScheme { graph, rotation, signature }
}

/// The sign sequence as a 1-cochain ("+" is 0).
pub fn sign_cochain(code: &IntersignedGaussCode) -> Cochain1 {
    Cochain1::from_bits(code.sign_sequence().into_iter().map(|s| s.bit()))
}

/// The face cycles of an embedding scheme.
#[derive(Clone, Debug)]
pub struct FaceTrace {
    /// Face index of every flag.
    pub face_of_flag: Vec<usize>,
    /// Edge sequence along each face boundary.
    pub faces: Vec<Vec<usize>>,
}

impl FaceTrace {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// The faces on the two sides of edge `e`.
    pub fn faces_of_edge(&self, e: usize) -> (usize, usize) {
        let end = 2 * e;
        (self.face_of_flag[2 * end], self.face_of_flag[2 * end + 1])
    }
}

/// Walks every face as an alternating corner/edge orbit on the flags.
pub fn face_cycles(scheme: &EmbeddingScheme) -> Result<FaceTrace> {
    let flags = scheme.flag_count();
    let mut face_of_flag = vec![usize::MAX; flags];
    let mut faces = Vec::new();
    let mut side_uses = vec![0u8; scheme.graph.edge_count()];
    for start in 0..flags {
        if face_of_flag[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut boundary = Vec::new();
        let mut f = start;
        loop {
            face_of_flag[f] = id;
            let g = scheme.along(f);
            face_of_flag[g] = id;
            let e = FourValentGraph::end_edge(f / 2);
            boundary.push(e);
            side_uses[e] += 1;
            f = scheme.corner(g);
            if f == start {
                break;
            }
            if face_of_flag[f] != usize::MAX {
                return Err(Error::Internal("face walk re-entered a traced flag".into()));
            }
        }
        faces.push(boundary);
    }
    if let Some(e) = side_uses.iter().position(|&u| u != 2) {
        return Err(Error::Internal(format!("edge {e} bordered {} face sides", side_uses[e])));
    }
    Ok(FaceTrace { face_of_flag, faces })
}

/// The closed surface realized by a scheme. For a disconnected graph the
/// surface has several pieces; genus and crosscap number then describe their
/// connected sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub pieces: usize,
    pub euler_characteristic: i64,
    pub orientable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscaps: Option<u32>,
}

impl SurfaceSummary {
    pub fn is_sphere(&self) -> bool {
        self.orientable && self.genus == Some(0)
    }

    fn from_counts(vertices: usize, edges: usize, faces: usize, pieces: usize, orientable: bool) -> Result<Self> {
        let chi = vertices as i64 - edges as i64 + faces as i64;
        // χ of the connected sum of all pieces
        let connected = chi - 2 * (pieces as i64 - 1);
        let (genus, crosscaps) = if orientable {
            if connected > 2 || (2 - connected) % 2 != 0 {
                return Err(Error::Internal(format!("orientable surface with Euler characteristic {chi}")));
            }
            (Some(((2 - connected) / 2) as u32), None)
        } else {
            if connected > 1 {
                return Err(Error::Internal(format!("non-orientable surface with Euler characteristic {chi}")));
            }
            (None, Some((2 - connected) as u32))
        };
        Ok(SurfaceSummary { vertices, edges, faces, pieces, euler_characteristic: chi, orientable, genus, crosscaps })
    }
}

impl std::fmt::Display for SurfaceSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match (self.orientable, self.genus, self.crosscaps) {
            (true, Some(g), _) => format!("orientable, genus {g}"),
            (false, _, Some(k)) => format!("non-orientable, crosscaps {k}"),
            _ => unreachable!("summary always carries genus or crosscaps"),
        };
        write!(f, "{name} (V={} E={} F={} chi={}", self.vertices, self.edges, self.faces, self.euler_characteristic)?;
        if self.pieces > 1 {
            write!(f, " pieces={}", self.pieces)?;
        }
        write!(f, ")")
    }
}

/// Traces faces and identifies the surface; orientability is decided by
/// whether λ is a coboundary on the four-valent graph.
pub fn trace_faces(scheme: &EmbeddingScheme) -> Result<SurfaceSummary> {
    let trace = face_cycles(scheme)?;
    let total: usize = trace.faces.iter().map(Vec::len).sum();
    if total != 2 * scheme.graph.edge_count() {
        return Err(Error::Internal(format!("face walks have total length {total}")));
    }
    let orientable = gf2::solve_coboundary(&scheme.signature, &scheme.graph)?.is_some();
    let (pieces, _) = scheme.graph.connected_components();
    SurfaceSummary::from_counts(
        scheme.graph.vertex_count(),
        scheme.graph.edge_count(),
        trace.face_count(),
        pieces,
        orientable,
    )
}

/// Surface of the unique cellular immersion of a code.
pub fn surface(code: &IntersignedGaussCode) -> Result<SurfaceSummary> {
    trace_faces(&scheme_from_code(code, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_intersigned;

    const EIGHT_CROSSING: &str = "1+2-3-4-2-3+5-6+7-7+6-5+8+8-4+1-";
    const TREFOIL_SIGNS: &str = "1-2+3+1+2+3-";

    #[test]
    fn graph_counts() {
        for (text, v) in [("1-1-", 1), (TREFOIL_SIGNS, 3), (EIGHT_CROSSING, 8)] {
            let g = FourValentGraph::new(&parse_intersigned(text).unwrap());
            assert_eq!(g.vertex_count(), v);
            assert_eq!(g.edge_count(), 2 * v);
        }
        let g = FourValentGraph::new(&parse_intersigned("1-1-").unwrap());
        assert!(g.edges().iter().all(|e| {
            let (u, v) = g.edge_vertices(e);
            u == v && g.partner(e.tail) == e.head
        }));
    }

    #[test]
    fn every_vertex_has_four_distinct_ends() {
        let g = FourValentGraph::new(&parse_intersigned("1+/1-2+2-3+/3+").unwrap());
        for v in 0..g.vertex_count() {
            let mut ends = g.vertex_ends(v).to_vec();
            ends.sort_unstable();
            ends.dedup();
            assert_eq!(ends.len(), 4);
            assert!(ends.iter().all(|&e| g.end_vertex(e) == v));
        }
    }

    #[test]
    fn exactly_two_of_three_cyclic_orders_are_straight_through() {
        let g = FourValentGraph::new(&parse_intersigned("1-1-").unwrap());
        let [in1, out1, in2, out2] = g.vertex_ends(0);
        let orders = [[in1, out1, in2, out2], [in1, in2, out1, out2], [in1, out2, out1, in2]];
        let straight = orders
            .iter()
            .filter(|c| RotationSystem::from_cycles(&g, vec![**c]).unwrap().is_straight_through(&g))
            .count();
        assert_eq!(straight, 2);
    }

    #[test]
    fn rotation_cochain_is_opposite_on_lifts() {
        let code = parse_intersigned(EIGHT_CROSSING).unwrap();
        let g = FourValentGraph::new(&code);
        for seed in 0..20 {
            let (rot, r) = choose_rotation(&g, seed);
            assert!(rot.is_straight_through(&g));
            for v in 0..g.vertex_count() {
                let [a, b] = g.vertex_lifts(v);
                assert_eq!(r.value(a) ^ r.value(b), 1);
            }
        }
    }

    #[test]
    fn seeds_differ_by_a_pullback() {
        let code = parse_intersigned(TREFOIL_SIGNS).unwrap();
        let g = FourValentGraph::new(&code);
        let (_, r1) = choose_rotation(&g, 1);
        let (_, r2) = choose_rotation(&g, 2);
        for v in 0..g.vertex_count() {
            let [a, b] = g.vertex_lifts(v);
            assert_eq!(r1.value(a) ^ r2.value(a), r1.value(b) ^ r2.value(b));
        }
    }

    #[test]
    fn figure_eight_signature_is_zero() {
        let code = parse_intersigned("1-1-").unwrap();
        for seed in 0..4 {
            assert!(scheme_from_code(&code, seed).signature.is_zero());
        }
    }

    #[test]
    fn all_plus_signature_is_delta_r() {
        let code = parse_intersigned("1+2+1+2+").unwrap();
        let g = FourValentGraph::new(&code);
        let (_, r) = choose_rotation(&g, 5);
        assert_eq!(scheme_from_code(&code, 5).signature, gf2::lift_coboundary(&r, &g));
    }

    #[test]
    fn figure_eight_is_a_sphere_with_three_faces() {
        let s = surface(&parse_intersigned("1-1-").unwrap()).unwrap();
        assert_eq!((s.faces, s.euler_characteristic, s.orientable, s.genus), (3, 2, true, Some(0)));
    }

    #[test]
    fn trefoil_shadow_is_planar() {
        for seed in 0..8 {
            let s = trace_faces(&scheme_from_code(&parse_intersigned("1-2-3-1-2-3-").unwrap(), seed)).unwrap();
            assert_eq!((s.faces, s.euler_characteristic, s.orientable, s.genus), (5, 2, true, Some(0)));
        }
    }

    #[test]
    fn eight_crossing_example_is_non_orientable() {
        let s = surface(&parse_intersigned(EIGHT_CROSSING).unwrap()).unwrap();
        assert!(!s.orientable);
        assert_eq!(s.euler_characteristic, 2 - s.crosscaps.unwrap() as i64);
    }

    #[test]
    fn face_lengths_sum_to_four_n() {
        let code = parse_intersigned(EIGHT_CROSSING).unwrap();
        let trace = face_cycles(&scheme_from_code(&code, 3)).unwrap();
        assert_eq!(trace.faces.iter().map(Vec::len).sum::<usize>(), 4 * code.n());
    }

    #[test]
    fn switching_a_vertex_preserves_the_surface() {
        let code = parse_intersigned(EIGHT_CROSSING).unwrap();
        let scheme = scheme_from_code(&code, 11);
        let base = trace_faces(&scheme).unwrap();
        for v in 0..code.n() {
            assert_eq!(trace_faces(&scheme.switched_at(v)).unwrap(), base);
        }
    }

    #[test]
    fn disconnected_codes_report_pieces() {
        let s = surface(&parse_intersigned("1-1-/2-2-").unwrap()).unwrap();
        assert_eq!((s.pieces, s.euler_characteristic, s.genus), (2, 4, Some(0)));
    }
}
