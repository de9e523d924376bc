//! Cochains over GF(2) on the four-valent graph and coboundary solving.

use crate::error::{Error, Result};
use crate::topology::{FourValentGraph, RotationCochain};

/// Dense bit vector; bit `i` of word `i / 64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, 1);
        }
        v
    }

    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        let bits: Vec<u8> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> u8 {
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        let mask = 1u64 << (i % 64);
        if bit & 1 == 1 {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    fn lowest_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

impl std::fmt::Display for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A GF(2) value per vertex (symbol); index `s - 1` for symbol `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cochain0(pub BitVec);

/// A GF(2) value per edge, edges indexed in reading order of the code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cochain1(pub BitVec);

impl Cochain0 {
    pub fn zeros(n: usize) -> Self {
        Cochain0(BitVec::zeros(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> u8 {
        self.0.get(v)
    }
}

impl Cochain1 {
    pub fn zeros(m: usize) -> Self {
        Cochain1(BitVec::zeros(m))
    }

    /// The all-ones cochain.
    pub fn ones(m: usize) -> Self {
        Cochain1(BitVec::ones(m))
    }

    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        Cochain1(BitVec::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: usize) -> u8 {
        self.0.get(e)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &Cochain1) -> Cochain1 {
        let mut out = self.clone();
        out.0.xor_assign(&other.0);
        out
    }

    /// c(z) for an edge multiset z.
    pub fn evaluate(&self, edges: impl IntoIterator<Item = usize>) -> u8 {
        edges.into_iter().fold(0, |acc, e| acc ^ self.get(e))
    }
}

/// (δx)(e) = x(u) + x(v) over the edge's endpoint vertices; loops get 0.
pub fn coboundary(x: &Cochain0, graph: &FourValentGraph) -> Result<Cochain1> {
    if x.len() != graph.vertex_count() {
        return Err(Error::SizeMismatch { expected: graph.vertex_count(), actual: x.len() });
    }
    Ok(Cochain1::from_bits(graph.edges().iter().map(|e| {
        let (u, v) = graph.edge_vertices(e);
        x.get(u) ^ x.get(v)
    })))
}

/// Coboundary of a lift 0-cochain on the cycle-graph cover: value on each
/// edge is the sum over its two lift endpoints.
pub fn lift_coboundary(r: &RotationCochain, graph: &FourValentGraph) -> Cochain1 {
    Cochain1::from_bits(graph.edges().iter().map(|e| r.value(e.tail) ^ r.value(e.head)))
}

/// Finds x with δx = target by Gaussian elimination on the incidence system,
/// or `None` when the target is not a coboundary.
pub fn solve_coboundary(target: &Cochain1, graph: &FourValentGraph) -> Result<Option<Cochain0>> {
    let m = graph.edge_count();
    let n = graph.vertex_count();
    if target.len() != m {
        return Err(Error::SizeMismatch { expected: m, actual: target.len() });
    }
    // Augmented rows: n unknown bits followed by the right-hand side bit.
    let mut rows: Vec<BitVec> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut row = BitVec::zeros(n + 1);
            let (u, v) = graph.edge_vertices(e);
            if u != v {
                row.set(u, 1);
                row.set(v, 1);
            }
            row.set(n, target.get(i));
            row
        })
        .collect();
    let pivots = eliminate(&mut rows, n);
    if rows.iter().skip(pivots.len()).any(|r| r.get(n) == 1) {
        return Ok(None);
    }
    let mut x = BitVec::zeros(n);
    for (row, &col) in rows.iter().zip(&pivots) {
        x.set(col, row.get(n));
    }
    Ok(Some(Cochain0(x)))
}

/// Rank of δ, i.e. dim image(δ).
pub fn coboundary_rank(graph: &FourValentGraph) -> usize {
    let n = graph.vertex_count();
    let mut rows: Vec<BitVec> = graph
        .edges()
        .iter()
        .map(|e| {
            let mut row = BitVec::zeros(n);
            let (u, v) = graph.edge_vertices(e);
            if u != v {
                row.set(u, 1);
                row.set(v, 1);
            }
            row
        })
        .collect();
    eliminate(&mut rows, n).len()
}

/// Reduced row echelon form over the first `cols` columns; returns the pivot
/// column of each of the leading rows.
fn eliminate(rows: &mut [BitVec], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col) == 1) else {
            continue;
        };
        rows.swap(next, found);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row.get(col) == 1 {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        next += 1;
    }
    debug_assert!(rows[next..].iter().all(|r| r.lowest_one().is_none_or(|i| i >= cols)));
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_intersigned;

    fn graph(text: &str) -> FourValentGraph {
        FourValentGraph::new(&parse_intersigned(text).unwrap())
    }

    #[test]
    fn constant_cochains_are_cocycles() {
        let g = graph("1-2+3+1+2+3-");
        assert!(coboundary(&Cochain0::zeros(3), &g).unwrap().is_zero());
        assert!(coboundary(&Cochain0(BitVec::ones(3)), &g).unwrap().is_zero());
    }

    #[test]
    fn indicator_hits_non_loop_incident_edges() {
        let g = graph("1-2+3+1+2+3-");
        for v in 0..3 {
            let mut x = Cochain0::zeros(3);
            x.0.set(v, 1);
            let dx = coboundary(&x, &g).unwrap();
            for (i, e) in g.edges().iter().enumerate() {
                let (a, b) = g.edge_vertices(e);
                let expected = u8::from(a != b && (a == v || b == v));
                assert_eq!(dx.get(i), expected);
            }
        }
    }

    #[test]
    fn size_mismatch() {
        let g = graph("1-1-");
        assert!(matches!(coboundary(&Cochain0::zeros(2), &g), Err(Error::SizeMismatch { .. })));
        assert!(matches!(solve_coboundary(&Cochain1::zeros(3), &g), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn loop_target_is_not_a_coboundary() {
        let g = graph("1-1-2+2+");
        let loop_edge = g.edges().iter().position(|e| {
            let (u, v) = g.edge_vertices(e);
            u == v
        });
        let mut t = Cochain1::zeros(4);
        t.0.set(loop_edge.unwrap(), 1);
        assert_eq!(solve_coboundary(&t, &g).unwrap(), None);
        assert!(solve_coboundary(&Cochain1::zeros(4), &g).unwrap().is_some());
    }

    #[test]
    fn solution_reproduces_target() {
        let g = graph("1-2+3+1+2+3-");
        let mut x = Cochain0::zeros(3);
        x.0.set(1, 1);
        let t = coboundary(&x, &g).unwrap();
        let y = solve_coboundary(&t, &g).unwrap().unwrap();
        assert_eq!(coboundary(&y, &g).unwrap(), t);
    }

    #[test]
    fn rank_is_vertices_minus_components() {
        assert_eq!(coboundary_rank(&graph("1-2+3+1+2+3-")), 2);
        assert_eq!(coboundary_rank(&graph("1-1-/2+2+")), 0);
        assert_eq!(coboundary_rank(&graph("1-1-2+2+")), 1);
    }

    #[test]
    fn lift_coboundary_on_figure_eight() {
        let code = parse_intersigned("1-1-").unwrap();
        let g = FourValentGraph::new(&code);
        let (_, r) = crate::topology::choose_rotation(&g, 7);
        assert_eq!(lift_coboundary(&r, &g), Cochain1::from_bits([1, 1]));
    }

    #[test]
    fn evaluation_is_linear() {
        let a = Cochain1::from_bits([1, 0, 1, 1]);
        let b = Cochain1::from_bits([0, 1, 1, 0]);
        let z = [0usize, 2, 3, 3];
        assert_eq!(a.add(&b).evaluate(z), a.evaluate(z) ^ b.evaluate(z));
        assert_eq!(Cochain1::zeros(4).evaluate(z), 0);
    }
}
