//! Isomorphism groups of the three code kinds and canonical forms.
//!
//! A canonical form is the lexicographically least presentation over every
//! component order, every starting position and (for unoriented groups) every
//! subset of reversed components, with symbols relabeled by first encounter.
//! Equal canonical forms is the classifier for stable geotopy of curves.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codec::{
    AnyCode, CodeKind, Component, IntersignedGaussCode, IntersignedLinkCode, LinkComponent, LinkOcc, Sign,
    SignedGaussCode,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub kind: CodeKind,
    pub oriented: bool,
    pub text: String,
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// One occurrence in kind-independent form: `attr` is the writhe (links) or
/// the occurrence sign (signed codes), `gap` the following interstitial sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Tok {
    sym: u32,
    attr: u8,
    gap: u8,
}

const SEPARATOR: Tok = Tok { sym: 0, attr: 0, gap: 0 };

/// Least presentation of `comps` over component order and rotation.
fn min_presentation(comps: &[Vec<Tok>], n: usize) -> Vec<Vec<Tok>> {
    struct Search<'a> {
        comps: &'a [Vec<Tok>],
        best: Option<Vec<Tok>>,
        generation: u64,
    }

    impl Search<'_> {
        fn run(
            &mut self,
            used: &mut Vec<bool>,
            labels: &mut Vec<u32>,
            next_label: u32,
            key: &mut Vec<Tok>,
            placed: usize,
            state: (Ordering, u64),
        ) {
            if placed == self.comps.len() {
                if self.best.as_ref().is_none_or(|b| key.as_slice() < b.as_slice()) {
                    self.best = Some(key.clone());
                    self.generation += 1;
                }
                return;
            }
            for c in 0..self.comps.len() {
                if used[c] {
                    continue;
                }
                let comp = &self.comps[c];
                for start in 0..comp.len() {
                    let mark = key.len();
                    let mut assigned = Vec::new();
                    let mut label = next_label;
                    let (mut st, mut st_gen) = state;
                    let mut pruned = false;
                    for i in 0..=comp.len() {
                        let tok = if i == comp.len() {
                            SEPARATOR
                        } else {
                            let t = comp[(start + i) % comp.len()];
                            let s = t.sym as usize;
                            if labels[s] == 0 {
                                labels[s] = label;
                                label += 1;
                                assigned.push(s);
                            }
                            Tok { sym: labels[s], ..t }
                        };
                        if let Some(best) = &self.best {
                            // the best may have improved since `st` was computed
                            if st_gen != self.generation {
                                st = key.as_slice().cmp(&best[..key.len()]);
                                st_gen = self.generation;
                            }
                            if st == Ordering::Equal {
                                st = tok.cmp(&best[key.len()]);
                            }
                            if st == Ordering::Greater {
                                pruned = true;
                                break;
                            }
                        }
                        key.push(tok);
                    }
                    if !pruned {
                        used[c] = true;
                        self.run(used, labels, label, key, placed + 1, (st, st_gen));
                        used[c] = false;
                    }
                    key.truncate(mark);
                    for s in assigned {
                        labels[s] = 0;
                    }
                }
            }
        }
    }

    let mut search = Search { comps, best: None, generation: 0 };
    let total: usize = comps.iter().map(|c| c.len() + 1).sum();
    search.run(
        &mut vec![false; comps.len()],
        &mut vec![0; n + 1],
        1,
        &mut Vec::with_capacity(total),
        0,
        (Ordering::Equal, 0),
    );
    let key = search.best.expect("at least one presentation");
    key.split(|t| *t == SEPARATOR).filter(|c| !c.is_empty()).map(<[Tok]>::to_vec).collect()
}

fn subsets(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << k).map(move |m| (0..k).map(|i| m >> i & 1 == 1).collect())
}

/// split(c) = 1 iff exactly one occurrence of c lies on a reversed component.
fn split_symbols(comps: &[Vec<Tok>], reversed: &[bool], n: usize) -> Vec<bool> {
    let mut split = vec![false; n + 1];
    for (comp, &rev) in comps.iter().zip(reversed) {
        if rev {
            for t in comp {
                split[t.sym as usize] ^= true;
            }
        }
    }
    split
}

/// Reversal with the intersigned sign rule: a gap between symbols a and b
/// flips iff split(a) != split(b).
fn reverse_gapped(comps: &[Vec<Tok>], reversed: &[bool], n: usize) -> Vec<Vec<Tok>> {
    let split = split_symbols(comps, reversed, n);
    comps
        .iter()
        .zip(reversed)
        .map(|(comp, &rev)| {
            let m = comp.len();
            let mut out: Vec<Tok> = if rev {
                (0..m)
                    .map(|j| Tok {
                        sym: comp[m - 1 - j].sym,
                        attr: comp[m - 1 - j].attr,
                        gap: comp[(2 * m - 2 - j) % m].gap,
                    })
                    .collect()
            } else {
                comp.clone()
            };
            for j in 0..m {
                let (a, b) = (out[j].sym as usize, out[(j + 1) % m].sym as usize);
                if split[a] != split[b] {
                    out[j].gap ^= 1;
                }
            }
            out
        })
        .collect()
}

/// Reversal with the signed rule: occurrence signs of split symbols are complemented.
fn reverse_signed(comps: &[Vec<Tok>], reversed: &[bool], n: usize) -> Vec<Vec<Tok>> {
    let split = split_symbols(comps, reversed, n);
    comps
        .iter()
        .zip(reversed)
        .map(|(comp, &rev)| {
            let mut out = comp.clone();
            if rev {
                out.reverse();
            }
            for t in &mut out {
                if split[t.sym as usize] {
                    t.attr ^= 1;
                }
            }
            out
        })
        .collect()
}

fn intersigned_toks(code: &IntersignedGaussCode) -> Vec<Vec<Tok>> {
    code.components()
        .iter()
        .map(|c| c.symbols().iter().zip(c.signs()).map(|(&sym, g)| Tok { sym, attr: 0, gap: g.bit() }).collect())
        .collect()
}

fn intersigned_from_toks(comps: &[Vec<Tok>]) -> IntersignedGaussCode {
    IntersignedGaussCode::new(
        comps
            .iter()
            .map(|c| {
                Component::new(c.iter().map(|t| t.sym).collect(), c.iter().map(|t| Sign::from_bit(t.gap)).collect())
                    .expect("non-empty component")
            })
            .collect(),
    )
    .expect("relabeling preserves validity")
}

fn signed_toks(code: &SignedGaussCode) -> Vec<Vec<Tok>> {
    code.components().iter().map(|c| c.iter().map(|&(sym, g)| Tok { sym, attr: g.bit(), gap: 0 }).collect()).collect()
}

fn signed_from_toks(comps: &[Vec<Tok>]) -> SignedGaussCode {
    SignedGaussCode::new(comps.iter().map(|c| c.iter().map(|t| (t.sym, Sign::from_bit(t.attr))).collect()).collect())
        .expect("relabeling preserves validity")
}

fn link_toks(code: &IntersignedLinkCode) -> (Vec<Vec<Tok>>, Vec<Sign>) {
    let mut crossings = Vec::new();
    let mut free = Vec::new();
    for c in code.components() {
        match c {
            LinkComponent::Free(s) => free.push(*s),
            LinkComponent::Crossings { occ, signs } => crossings.push(
                occ.iter().zip(signs).map(|(o, g)| Tok { sym: o.symbol, attr: o.writhe.bit(), gap: g.bit() }).collect(),
            ),
        }
    }
    (crossings, free)
}

fn link_from_toks(comps: &[Vec<Tok>], free: &[Sign]) -> IntersignedLinkCode {
    let mut out: Vec<LinkComponent> = comps
        .iter()
        .map(|c| LinkComponent::Crossings {
            occ: c.iter().map(|t| LinkOcc { symbol: t.sym, writhe: Sign::from_bit(t.attr) }).collect(),
            signs: c.iter().map(|t| Sign::from_bit(t.gap)).collect(),
        })
        .collect();
    out.extend(free.iter().map(|&s| LinkComponent::Free(s)));
    IntersignedLinkCode::new(out).expect("relabeling preserves validity")
}

fn flatten(comps: &[Vec<Tok>]) -> Vec<Tok> {
    let mut key = Vec::new();
    for c in comps {
        key.extend_from_slice(c);
        key.push(SEPARATOR);
    }
    key
}

fn least_over_reversals(comps: &[Vec<Tok>], n: usize, oriented: bool) -> Vec<Vec<Tok>> {
    if oriented {
        return min_presentation(comps, n);
    }
    subsets(comps.len())
        .map(|rev| min_presentation(&reverse_gapped(comps, &rev, n), n))
        .min_by(|a, b| flatten(a).cmp(&flatten(b)))
        .expect("at least the empty subset")
}

/// Canonical representative code of an intersigned code.
pub fn canonical_intersigned_code(code: &IntersignedGaussCode, oriented: bool) -> IntersignedGaussCode {
    intersigned_from_toks(&least_over_reversals(&intersigned_toks(code), code.n(), oriented))
}

pub fn canonical_intersigned(code: &IntersignedGaussCode, oriented: bool) -> CanonicalForm {
    CanonicalForm {
        kind: CodeKind::Intersigned,
        oriented,
        text: canonical_intersigned_code(code, oriented).to_string(),
    }
}

pub fn canonical_signed_code(code: &SignedGaussCode) -> SignedGaussCode {
    let comps = signed_toks(code);
    let n = code.n();
    let best = subsets(comps.len())
        .flat_map(|rev| {
            let reversed = reverse_signed(&comps, &rev, n);
            let flipped: Vec<Vec<Tok>> =
                reversed.iter().map(|c| c.iter().map(|t| Tok { attr: t.attr ^ 1, ..*t }).collect()).collect();
            [min_presentation(&reversed, n), min_presentation(&flipped, n)]
        })
        .min_by(|a, b| flatten(a).cmp(&flatten(b)))
        .expect("non-empty group");
    signed_from_toks(&best)
}

pub fn canonical_signed(code: &SignedGaussCode) -> CanonicalForm {
    CanonicalForm { kind: CodeKind::Signed, oriented: false, text: canonical_signed_code(code).to_string() }
}

/// Link codes use the unoriented intersigned group with writhes attached to
/// symbols; crossing-free components are compared only by their signs.
pub fn canonical_link_code(code: &IntersignedLinkCode) -> IntersignedLinkCode {
    let (comps, mut free) = link_toks(code);
    free.sort();
    let best = if comps.is_empty() { Vec::new() } else { least_over_reversals(&comps, code.n(), false) };
    link_from_toks(&best, &free)
}

pub fn canonical_link(code: &IntersignedLinkCode) -> CanonicalForm {
    CanonicalForm { kind: CodeKind::Link, oriented: false, text: canonical_link_code(code).to_string() }
}

pub fn canonical(code: &AnyCode, oriented: bool) -> CanonicalForm {
    match code {
        AnyCode::Intersigned(c) => canonical_intersigned(c, oriented),
        AnyCode::Signed(c) => canonical_signed(c),
        AnyCode::Link(c) => canonical_link(c),
    }
}

/// Equality of canonical forms. The `oriented` flag only affects intersigned codes.
pub fn is_isomorphic(a: &AnyCode, b: &AnyCode, oriented: bool) -> Result<bool> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch(a.kind().to_string(), b.kind().to_string()));
    }
    Ok(canonical(a, oriented) == canonical(b, oriented))
}

fn check_indices(which: &BTreeSet<usize>, count: usize) -> Result<Vec<bool>> {
    if let Some(&index) = which.iter().find(|&&i| i >= count) {
        return Err(Error::IndexOutOfRange { index, count });
    }
    Ok((0..count).map(|i| which.contains(&i)).collect())
}

/// Reverses the given components, flipping each sign whose two neighbouring
/// symbols differ in split status.
pub fn reverse_component(code: &IntersignedGaussCode, which: &BTreeSet<usize>) -> Result<IntersignedGaussCode> {
    let rev = check_indices(which, code.components().len())?;
    Ok(intersigned_from_toks(&reverse_gapped(&intersigned_toks(code), &rev, code.n())))
}

pub fn reverse_signed_component(code: &SignedGaussCode, which: &BTreeSet<usize>) -> Result<SignedGaussCode> {
    let rev = check_indices(which, code.components().len())?;
    Ok(signed_from_toks(&reverse_signed(&signed_toks(code), &rev, code.n())))
}

/// Reversal on link codes; crossing-free components are unaffected.
pub fn reverse_link_component(code: &IntersignedLinkCode, which: &BTreeSet<usize>) -> Result<IntersignedLinkCode> {
    let rev = check_indices(which, code.components().len())?;
    let comps: Vec<Vec<Tok>> = code
        .components()
        .iter()
        .map(|c| {
            c.occ()
                .iter()
                .zip(c.signs())
                .map(|(o, g)| Tok { sym: o.symbol, attr: o.writhe.bit(), gap: g.bit() })
                .collect()
        })
        .collect();
    let out = reverse_gapped(&comps, &rev, code.n());
    let components = code
        .components()
        .iter()
        .zip(out)
        .map(|(orig, toks)| match orig {
            LinkComponent::Free(s) => LinkComponent::Free(*s),
            LinkComponent::Crossings { .. } => LinkComponent::Crossings {
                occ: toks.iter().map(|t| LinkOcc { symbol: t.sym, writhe: Sign::from_bit(t.attr) }).collect(),
                signs: toks.iter().map(|t| Sign::from_bit(t.gap)).collect(),
            },
        })
        .collect();
    IntersignedLinkCode::new(components)
}

/// Elementary group generators, shared by the orbit oracle and property tests.
pub mod generators {
    use super::*;

    /// Cyclic rotation of one component by `shift` positions.
    pub fn rotate(code: &IntersignedGaussCode, component: usize, shift: usize) -> IntersignedGaussCode {
        let mut parts: Vec<(Vec<u32>, Vec<Sign>)> =
            code.components().iter().map(|c| (c.symbols().to_vec(), c.signs().to_vec())).collect();
        let (s, g) = &mut parts[component];
        let k = shift % s.len();
        s.rotate_left(k);
        g.rotate_left(k);
        IntersignedGaussCode::from_parts(parts).expect("rotation preserves validity")
    }

    /// Reorders components: output component `i` is input component `order[i]`.
    pub fn permute_components(code: &IntersignedGaussCode, order: &[usize]) -> IntersignedGaussCode {
        IntersignedGaussCode::new(order.iter().map(|&i| code.components()[i].clone()).collect())
            .expect("permutation preserves validity")
    }

    /// Renames symbol `s` to `perm[s - 1]`.
    pub fn relabel(code: &IntersignedGaussCode, perm: &[u32]) -> IntersignedGaussCode {
        IntersignedGaussCode::from_parts(
            code.components()
                .iter()
                .map(|c| (c.symbols().iter().map(|&s| perm[s as usize - 1]).collect(), c.signs().to_vec()))
                .collect(),
        )
        .expect("alphabet permutation preserves validity")
    }

    pub fn rotate_signed(code: &SignedGaussCode, component: usize, shift: usize) -> SignedGaussCode {
        let mut comps = code.components().to_vec();
        let k = shift % comps[component].len();
        comps[component].rotate_left(k);
        SignedGaussCode::new(comps).expect("rotation preserves validity")
    }

    pub fn permute_signed(code: &SignedGaussCode, order: &[usize]) -> SignedGaussCode {
        SignedGaussCode::new(order.iter().map(|&i| code.components()[i].clone()).collect())
            .expect("permutation preserves validity")
    }

    pub fn relabel_signed(code: &SignedGaussCode, perm: &[u32]) -> SignedGaussCode {
        SignedGaussCode::new(
            code.components().iter().map(|c| c.iter().map(|&(s, g)| (perm[s as usize - 1], g)).collect()).collect(),
        )
        .expect("alphabet permutation preserves validity")
    }

    pub fn complement_signed(code: &SignedGaussCode) -> SignedGaussCode {
        SignedGaussCode::new(code.components().iter().map(|c| c.iter().map(|&(s, g)| (s, -g)).collect()).collect())
            .expect("complement preserves validity")
    }

    pub fn rotate_link(code: &IntersignedLinkCode, component: usize, shift: usize) -> IntersignedLinkCode {
        let mut comps = code.components().to_vec();
        if let LinkComponent::Crossings { occ, signs } = &mut comps[component] {
            let k = shift % occ.len();
            occ.rotate_left(k);
            signs.rotate_left(k);
        }
        IntersignedLinkCode::new(comps).expect("rotation preserves validity")
    }

    pub fn permute_link(code: &IntersignedLinkCode, order: &[usize]) -> IntersignedLinkCode {
        IntersignedLinkCode::new(order.iter().map(|&i| code.components()[i].clone()).collect())
            .expect("permutation preserves validity")
    }

    pub fn relabel_link(code: &IntersignedLinkCode, perm: &[u32]) -> IntersignedLinkCode {
        IntersignedLinkCode::new(
            code.components()
                .iter()
                .map(|c| match c {
                    LinkComponent::Free(s) => LinkComponent::Free(*s),
                    LinkComponent::Crossings { occ, signs } => LinkComponent::Crossings {
                        occ: occ.iter().map(|o| LinkOcc { symbol: perm[o.symbol as usize - 1], ..*o }).collect(),
                        signs: signs.clone(),
                    },
                })
                .collect(),
        )
        .expect("alphabet permutation preserves validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{parse_intersigned, parse_link, parse_signed};

    fn code(t: &str) -> IntersignedGaussCode {
        parse_intersigned(t).unwrap()
    }

    #[test]
    fn oriented_example_pair() {
        assert_eq!(
            canonical_intersigned(&code("1-2+1-3-/2+3-"), true),
            canonical_intersigned(&code("2+3-/2+1-3-1-"), true)
        );
    }

    #[test]
    fn unoriented_example_pair() {
        let a = code("1-2-3+1-/2+3-");
        let b = code("1-3-2+1-/2+3-");
        assert_eq!(canonical_intersigned(&a, false), canonical_intersigned(&b, false));
        assert_ne!(canonical_intersigned(&a, true), canonical_intersigned(&b, true));
    }

    #[test]
    fn signed_example_pair() {
        let a = parse_signed("1^-2^+3^-1^+/2^-/3^+").unwrap();
        let b = parse_signed("1^+3^+2^-1^-/3^-/2^+").unwrap();
        assert_eq!(canonical_signed(&a), canonical_signed(&b));
        assert_eq!(
            canonical_signed(&parse_signed("1^+1^-").unwrap()),
            canonical_signed(&parse_signed("1^-1^+").unwrap())
        );
    }

    #[test]
    fn reversal_matches_worked_example() {
        let r = reverse_component(&code("1-2-3+1-/2+3-"), &BTreeSet::from([0])).unwrap();
        assert_eq!(r.to_string(), "1-3-2+1-/2+3-");
        assert_eq!(canonical_intersigned(&r, true), canonical_intersigned(&code("1-3-2+1-/2+3-"), true));
    }

    #[test]
    fn reversal_edge_cases() {
        let x = code("1-2-3+1-/2+3-");
        assert_eq!(reverse_component(&x, &BTreeSet::new()).unwrap(), x);
        let once = reverse_component(&x, &BTreeSet::from([0])).unwrap();
        assert_eq!(reverse_component(&once, &BTreeSet::from([0])).unwrap(), x);
        assert!(matches!(
            reverse_component(&x, &BTreeSet::from([2])),
            Err(Error::IndexOutOfRange { index: 2, count: 2 })
        ));
        // reversing everything splits nothing, so only the order changes
        let all = reverse_component(&x, &BTreeSet::from([0, 1])).unwrap();
        let mut before = x.sign_sequence();
        let mut after = all.sign_sequence();
        before.sort();
        after.sort();
        assert_eq!(before, after);
    }

    #[test]
    fn figure_eight_signs_are_not_interchangeable() {
        // intersigned codes have no global sign complement
        assert_ne!(canonical_intersigned(&code("1-1-"), false), canonical_intersigned(&code("1+1+"), false));
        assert_eq!(canonical_intersigned(&code("1+1-"), true), canonical_intersigned(&code("1-1+"), true));
    }

    #[test]
    fn canonical_is_idempotent() {
        for t in ["1-2+1-3-/2+3-", "1+2-3-4-2-3+5-6+7-7+6-5+8+8-4+1-", "3+1-/2-1+3-2+"] {
            for oriented in [true, false] {
                let c = canonical_intersigned_code(&code(t), oriented);
                assert_eq!(canonical_intersigned_code(&c, oriented), c);
            }
        }
    }

    #[test]
    fn kind_mismatch() {
        let a = AnyCode::Intersigned(code("1-1-"));
        let b = AnyCode::Signed(parse_signed("1^+1^-").unwrap());
        assert!(matches!(is_isomorphic(&a, &b, false), Err(Error::KindMismatch(..))));
        assert!(is_isomorphic(&a, &a, false).unwrap());
    }

    #[test]
    fn link_canonical_keeps_free_components() {
        let a = parse_link("-/1^++2^-+/1^++2^-+").unwrap();
        let b = parse_link("2^-+1^++/1^++2^-+/-").unwrap();
        assert_eq!(canonical_link(&a), canonical_link(&b));
        assert_ne!(canonical_link(&parse_link("+").unwrap()), canonical_link(&parse_link("-").unwrap()));
    }
}
