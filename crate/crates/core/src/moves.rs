//! Intersigned link codes under the R-1, R-2 and R-3 rewrite schemas, and a
//! bounded search for Reidemeister equivalence.
//!
//! A fragment is two cyclically adjacent occurrences together with the gap
//! between them. Insertions place fragments into gaps; the gap before the
//! first new fragment keeps the old sign and the other new boundary gaps get
//! "+", unless the instance spells the junction signs out. Removals fold
//! every consumed gap sign into the surviving gap before the run, so the
//! GF(2) sign sum of each component never changes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{IntersignedGaussCode, IntersignedLinkCode, LinkComponent, LinkOcc, Sign};
use crate::error::{Error, Result};
use crate::isomorphism;

/// Flips every interstitial sign and attaches the writhes.
pub fn complement(code: &IntersignedGaussCode, writhes: &BTreeMap<u32, Sign>) -> Result<IntersignedLinkCode> {
    let comps = code
        .components()
        .iter()
        .map(|c| {
            let occ = c
                .symbols()
                .iter()
                .map(|&s| writhes.get(&s).map(|&w| LinkOcc { symbol: s, writhe: w }).ok_or(Error::MissingWrithe(s)))
                .collect::<Result<Vec<_>>>()?;
            LinkComponent::crossings(occ, c.signs().iter().map(|&g| -g).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    IntersignedLinkCode::new(comps)
}

pub fn uncomplement(code: &IntersignedLinkCode) -> Result<(IntersignedGaussCode, BTreeMap<u32, Sign>)> {
    let mut writhes = BTreeMap::new();
    let mut parts = Vec::new();
    for c in code.components() {
        if c.is_free() {
            return Err(Error::Validation("a crossing-free component has no intersigned form".into()));
        }
        writhes.extend(c.occ().iter().map(|o| (o.symbol, o.writhe)));
        parts.push((c.occ().iter().map(|o| o.symbol).collect(), c.signs().iter().map(|&g| -g).collect()));
    }
    Ok((IntersignedGaussCode::from_parts(parts)?, writhes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    R1,
    R2a,
    R2b,
    R3a,
    R3b,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Insert,
    Remove,
    Left,
    Right,
}

impl Direction {
    fn flipped(self) -> Direction {
        match self {
            Direction::Insert => Direction::Remove,
            Direction::Remove => Direction::Insert,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

/// An occurrence position, or the gap that follows it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub component: usize,
    pub position: usize,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.component, self.position)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveInstance {
    pub kind: MoveKind,
    pub direction: Direction,
    /// Removal: first occurrence of each fragment. Insertion: the gap that
    /// receives each fragment (a repeated gap takes them in order). R-3: the
    /// fragments P = (X + Y), A = (Z - Y) and B = (X - Z).
    pub sites: Vec<Site>,
    pub epsilon: Sign,
    /// Insertion only: signs of the boundary gaps of each receiving gap, in
    /// order of first appearance in `sites`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junctions: Option<Vec<Vec<Sign>>>,
}

impl MoveInstance {
    pub fn crossing_delta(&self) -> i64 {
        let size = match self.kind {
            MoveKind::R1 => 1,
            MoveKind::R2a | MoveKind::R2b => 2,
            MoveKind::R3a | MoveKind::R3b => 0,
        };
        match self.direction {
            Direction::Insert => size,
            Direction::Remove => -size,
            _ => 0,
        }
    }

    fn plain(kind: MoveKind, direction: Direction, sites: Vec<Site>, epsilon: Sign) -> Self {
        MoveInstance { kind, direction, sites, epsilon, junctions: None }
    }
}

impl fmt::Display for MoveInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Insert => "insert",
            Direction::Remove => "remove",
            Direction::Left => "left",
            Direction::Right => "right",
        };
        write!(f, "{:?}{} {dir} at ", self.kind, self.epsilon)?;
        for (i, s) in self.sites.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        if let Some(js) = &self.junctions {
            f.write_str(" junctions ")?;
            for (i, j) in js.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                for s in j {
                    write!(f, "{s}")?;
                }
            }
        }
        Ok(())
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInstance(msg.into())
}

/// Read-only helpers over a code's occurrence layout.
struct Layout<'a> {
    comps: &'a [LinkComponent],
    places: HashMap<u32, [Site; 2]>,
}

impl<'a> Layout<'a> {
    fn new(code: &'a IntersignedLinkCode) -> Self {
        let mut partial: HashMap<u32, Vec<Site>> = HashMap::new();
        for (c, comp) in code.components().iter().enumerate() {
            for (p, o) in comp.occ().iter().enumerate() {
                partial.entry(o.symbol).or_default().push(Site { component: c, position: p });
            }
        }
        let places = partial.into_iter().map(|(s, v)| (s, [v[0], v[1]])).collect();
        Layout { comps: code.components(), places }
    }

    fn len(&self, c: usize) -> usize {
        self.comps[c].occ().len()
    }

    fn occ(&self, s: Site) -> LinkOcc {
        self.comps[s.component].occ()[s.position]
    }

    fn sign(&self, s: Site) -> Sign {
        self.comps[s.component].signs()[s.position]
    }

    fn succ(&self, s: Site) -> Site {
        Site { component: s.component, position: (s.position + 1) % self.len(s.component) }
    }

    fn pred(&self, s: Site) -> Site {
        let len = self.len(s.component);
        Site { component: s.component, position: (s.position + len - 1) % len }
    }

    fn other(&self, s: Site) -> Site {
        let [a, b] = self.places[&self.occ(s).symbol];
        if a == s {
            b
        } else {
            a
        }
    }

    fn check_occurrence(&self, s: Site) -> Result<()> {
        if s.component >= self.comps.len() || s.position >= self.len(s.component) {
            return Err(invalid(format!("no occurrence at {s}")));
        }
        Ok(())
    }

    fn check_gap(&self, s: Site) -> Result<()> {
        let ok = s.component < self.comps.len()
            && if self.comps[s.component].is_free() { s.position == 0 } else { s.position < self.len(s.component) };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("no gap at {s}")))
        }
    }

    /// The fragment starting at `s`: (first, second, internal gap, second's site).
    fn fragment(&self, s: Site) -> Option<(LinkOcc, LinkOcc, Sign, Site)> {
        if s.component >= self.comps.len() || s.position >= self.len(s.component) || self.len(s.component) < 2 {
            return None;
        }
        let t = self.succ(s);
        Some((self.occ(s), self.occ(t), self.sign(s), t))
    }

    fn gaps(&self) -> Vec<Site> {
        (0..self.comps.len())
            .flat_map(|c| (0..self.len(c).max(1)).map(move |p| Site { component: c, position: p }))
            .collect()
    }
}

fn r2_fragments(kind: MoveKind, eps: Sign, k: u32, m: u32) -> Vec<[LinkOcc; 2]> {
    let a = LinkOcc { symbol: k, writhe: eps };
    let b = LinkOcc { symbol: m, writhe: -eps };
    match kind {
        MoveKind::R2a => vec![[a, b], [a, b]],
        _ => vec![[a, b], [b, a]],
    }
}

fn check_r1_removal(lay: &Layout, m: &MoveInstance) -> Result<()> {
    let (x, y, g, _) = lay.fragment(m.sites[0]).ok_or_else(|| invalid("no fragment at site"))?;
    if x.symbol != y.symbol || g != Sign::Plus || x.writhe != m.epsilon {
        return Err(invalid(format!("no kink {}^{}+{}^{} at {}", "k", m.epsilon, "k", m.epsilon, m.sites[0])));
    }
    Ok(())
}

fn check_r2_removal(lay: &Layout, m: &MoveInstance) -> Result<()> {
    let f1 = lay.fragment(m.sites[0]).ok_or_else(|| invalid("no fragment at first site"))?;
    let f2 = lay.fragment(m.sites[1]).ok_or_else(|| invalid("no fragment at second site"))?;
    let positions = BTreeSet::from([m.sites[0], f1.3, m.sites[1], f2.3]);
    if positions.len() != 4 {
        return Err(invalid("fragments overlap"));
    }
    let (x, y) = (f1.0, f1.1);
    let shape_ok = f1.2 == Sign::Plus
        && f2.2 == Sign::Plus
        && x.symbol != y.symbol
        && x.writhe == m.epsilon
        && y.writhe == -m.epsilon
        && match m.kind {
            MoveKind::R2a => (f2.0, f2.1) == (x, y),
            _ => (f2.0, f2.1) == (y, x),
        };
    if !shape_ok {
        return Err(invalid(format!("fragments at {} and {} do not match {:?}", m.sites[0], m.sites[1], m.kind)));
    }
    Ok(())
}

/// Locates A and B for the P fragment at `p`.
fn r3_match(lay: &Layout, p: Site) -> Option<(Site, Site, LinkOcc, LinkOcc, LinkOcc)> {
    let (x, y, g, q) = lay.fragment(p)?;
    if g != Sign::Plus || x.symbol == y.symbol {
        return None;
    }
    let y2 = lay.other(q);
    if lay.len(y2.component) < 2 {
        return None;
    }
    let a = lay.pred(y2);
    let z = lay.occ(a);
    if lay.sign(a) != Sign::Minus || z.symbol == x.symbol || z.symbol == y.symbol {
        return None;
    }
    let b = lay.other(p);
    if lay.len(b.component) < 2 {
        return None;
    }
    let zb = lay.succ(b);
    if lay.sign(b) != Sign::Minus || lay.occ(zb).symbol != z.symbol || zb == a {
        return None;
    }
    Some((a, b, x, y, z))
}

fn r3_directions(lay: &Layout, p: Site, a: Site, b: Site) -> Vec<Direction> {
    let (pc, ac, bc) = (p.component, a.component, b.component);
    if pc == ac && ac == bc {
        let len = lay.len(pc);
        let da = (a.position + len - p.position) % len;
        let db = (b.position + len - p.position) % len;
        vec![if da < db { Direction::Left } else { Direction::Right }]
    } else if ac == bc {
        vec![Direction::Left, Direction::Right]
    } else if ac == pc {
        vec![Direction::Left]
    } else if bc == pc {
        vec![Direction::Right]
    } else {
        vec![Direction::Left, Direction::Right]
    }
}

/// The written writhe constraints; `None` if no ε satisfies them.
fn r3_epsilon(kind: MoveKind, dir: Direction, wx: Sign, wy: Sign, wz: Sign) -> Option<Sign> {
    let ok = match (kind, dir) {
        (MoveKind::R3a, _) => wx == wz && wy == wz,
        (_, Direction::Left) => wy == wz && wx == -wz,
        _ => wx == wz && wy == -wz,
    };
    ok.then_some(wz)
}

fn check_r3(lay: &Layout, m: &MoveInstance) -> Result<()> {
    let (a, b, x, y, z) = r3_match(lay, m.sites[0]).ok_or_else(|| invalid("no R-3 triangle at P site"))?;
    if [a, b] != [m.sites[1], m.sites[2]] {
        return Err(invalid("A and B sites do not belong to the triangle at P"));
    }
    if !r3_directions(lay, m.sites[0], a, b).contains(&m.direction) {
        return Err(invalid(format!("fragment order does not allow {:?}", m.direction)));
    }
    if r3_epsilon(m.kind, m.direction, x.writhe, y.writhe, z.writhe) != Some(m.epsilon) {
        return Err(invalid("writhes do not match the schema"));
    }
    Ok(())
}

fn check_instance(lay: &Layout, m: &MoveInstance) -> Result<()> {
    let want = match m.kind {
        MoveKind::R1 => 1,
        MoveKind::R2a | MoveKind::R2b => 2,
        MoveKind::R3a | MoveKind::R3b => 3,
    };
    if m.sites.len() != want {
        return Err(invalid(format!("{:?} takes {want} sites, got {}", m.kind, m.sites.len())));
    }
    let r3 = matches!(m.kind, MoveKind::R3a | MoveKind::R3b);
    let lr = matches!(m.direction, Direction::Left | Direction::Right);
    if r3 != lr {
        return Err(invalid(format!("{:?} cannot move {:?}", m.kind, m.direction)));
    }
    if m.junctions.is_some() && m.direction != Direction::Insert {
        return Err(invalid("junction signs apply to insertions only"));
    }
    match m.direction {
        Direction::Insert => m.sites.iter().try_for_each(|&s| lay.check_gap(s)),
        Direction::Remove => {
            m.sites.iter().try_for_each(|&s| lay.check_occurrence(s))?;
            if m.kind == MoveKind::R1 {
                check_r1_removal(lay, m)
            } else {
                check_r2_removal(lay, m)
            }
        }
        _ => {
            m.sites.iter().try_for_each(|&s| lay.check_occurrence(s))?;
            check_r3(lay, m)
        }
    }
}

/// All matches of every schema. Insertions that would exceed
/// `max_crossings` are left out.
pub fn enumerate_moves_bounded(code: &IntersignedLinkCode, max_crossings: Option<usize>) -> Vec<MoveInstance> {
    let lay = Layout::new(code);
    let mut out = Vec::new();
    let frags: Vec<(Site, LinkOcc, LinkOcc)> = lay
        .gaps()
        .into_iter()
        .filter_map(|s| lay.fragment(s).filter(|f| f.2 == Sign::Plus).map(|f| (s, f.0, f.1)))
        .collect();

    for &(s, x, y) in &frags {
        if x.symbol == y.symbol {
            out.push(MoveInstance::plain(MoveKind::R1, Direction::Remove, vec![s], x.writhe));
        }
    }
    for (i, &(s1, x1, y1)) in frags.iter().enumerate() {
        if x1.symbol == y1.symbol || x1.writhe == y1.writhe {
            continue;
        }
        for &(s2, x2, y2) in &frags[i + 1..] {
            let kind = if (x2, y2) == (x1, y1) {
                MoveKind::R2a
            } else if (x2, y2) == (y1, x1) {
                MoveKind::R2b
            } else {
                continue;
            };
            let m = MoveInstance::plain(kind, Direction::Remove, vec![s1, s2], x1.writhe);
            if check_r2_removal(&lay, &m).is_ok() {
                out.push(m);
            }
        }
    }
    for &(p, _, _) in &frags {
        let Some((a, b, x, y, z)) = r3_match(&lay, p) else { continue };
        for dir in r3_directions(&lay, p, a, b) {
            for kind in [MoveKind::R3a, MoveKind::R3b] {
                if let Some(eps) = r3_epsilon(kind, dir, x.writhe, y.writhe, z.writhe) {
                    out.push(MoveInstance::plain(kind, dir, vec![p, a, b], eps));
                }
            }
        }
    }

    let room = max_crossings.map_or(usize::MAX, |m| m.saturating_sub(code.n()));
    let gaps = lay.gaps();
    if room >= 1 {
        for &g in &gaps {
            for eps in [Sign::Plus, Sign::Minus] {
                out.push(MoveInstance::plain(MoveKind::R1, Direction::Insert, vec![g], eps));
            }
        }
    }
    if room >= 2 {
        for (i, &g1) in gaps.iter().enumerate() {
            for &g2 in &gaps[i..] {
                for kind in [MoveKind::R2a, MoveKind::R2b] {
                    for eps in [Sign::Plus, Sign::Minus] {
                        out.push(MoveInstance::plain(kind, Direction::Insert, vec![g1, g2], eps));
                    }
                }
            }
        }
    }
    out
}

pub fn enumerate_moves(code: &IntersignedLinkCode) -> Vec<MoveInstance> {
    enumerate_moves_bounded(code, None)
}

/// Distinct receiving gaps in order of first appearance, with the fragment
/// indices each one takes.
fn group_sites(sites: &[Site]) -> Vec<(Site, Vec<usize>)> {
    let mut groups: Vec<(Site, Vec<usize>)> = Vec::new();
    for (i, &s) in sites.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| *g == s) {
            Some((_, v)) => v.push(i),
            None => groups.push((s, vec![i])),
        }
    }
    groups
}

fn insert(
    code: &IntersignedLinkCode,
    sites: &[Site],
    frags: &[[LinkOcc; 2]],
    junctions: Option<&Vec<Vec<Sign>>>,
) -> Result<(IntersignedLinkCode, Vec<Site>)> {
    let groups = group_sites(sites);
    if let Some(js) = junctions {
        if js.len() != groups.len() {
            return Err(invalid(format!("expected junction signs for {} gaps, got {}", groups.len(), js.len())));
        }
    }
    let mut plan: HashMap<Site, (Vec<usize>, Vec<Sign>)> = HashMap::new();
    for (gi, (g, members)) in groups.into_iter().enumerate() {
        let comp = &code.components()[g.component];
        let old = comp.signs()[g.position];
        let count = members.len() + usize::from(!comp.is_free());
        let js = match junctions {
            Some(js) => js[gi].clone(),
            None if comp.is_free() => (0..count).map(|i| if i + 1 == count { old } else { Sign::Plus }).collect(),
            None => (0..count).map(|i| if i == 0 { old } else { Sign::Plus }).collect(),
        };
        if js.len() != count {
            return Err(invalid(format!("gap {g} needs {count} junction signs, got {}", js.len())));
        }
        if js.iter().fold(Sign::Plus, |a, &b| a ^ b) != old {
            return Err(invalid(format!("junction signs at {g} do not sum to the gap sign {old}")));
        }
        plan.insert(g, (members, js));
    }

    let mut placed = vec![Site { component: 0, position: 0 }; frags.len()];
    let mut comps = Vec::with_capacity(code.components().len());
    for (c, comp) in code.components().iter().enumerate() {
        let mut entries: Vec<(LinkOcc, Sign)> = Vec::new();
        let mut put = |entries: &mut Vec<(LinkOcc, Sign)>, members: &[usize], js: &[Sign]| {
            for (t, &f) in members.iter().enumerate() {
                placed[f] = Site { component: c, position: entries.len() };
                entries.push((frags[f][0], Sign::Plus));
                entries.push((frags[f][1], js[t]));
            }
        };
        if comp.is_free() {
            match plan.get(&Site { component: c, position: 0 }) {
                Some((members, js)) => put(&mut entries, members, js),
                None => {
                    comps.push(comp.clone());
                    continue;
                }
            }
        } else {
            for (p, (&o, &g)) in comp.occ().iter().zip(comp.signs()).enumerate() {
                match plan.get(&Site { component: c, position: p }) {
                    Some((members, js)) => {
                        entries.push((o, js[0]));
                        put(&mut entries, members, &js[1..]);
                    }
                    None => entries.push((o, g)),
                }
            }
        }
        let (occ, signs) = entries.into_iter().unzip();
        comps.push(LinkComponent::crossings(occ, signs)?);
    }
    Ok((IntersignedLinkCode::new(comps)?, placed))
}

struct Removal {
    code: IntersignedLinkCode,
    /// Per fragment: receiving gap in the new code and rank within that gap.
    landing: Vec<(Site, usize)>,
    junctions: HashMap<Site, Vec<Sign>>,
}

fn remove(code: &IntersignedLinkCode, starts: &[Site]) -> Result<Removal> {
    let lay = Layout::new(code);
    let mut landing = vec![(Site { component: 0, position: 0 }, 0); starts.len()];
    let mut junctions = HashMap::new();
    let mut gone: BTreeSet<u32> = BTreeSet::new();
    let mut comps = Vec::with_capacity(code.components().len());
    for (c, comp) in code.components().iter().enumerate() {
        let len = comp.occ().len();
        let mut removed = vec![false; len];
        let mut frag_at: BTreeMap<usize, usize> = BTreeMap::new();
        for (f, s) in starts.iter().enumerate().filter(|(_, s)| s.component == c) {
            removed[s.position] = true;
            removed[(s.position + 1) % len] = true;
            frag_at.insert(s.position, f);
        }
        if frag_at.is_empty() {
            comps.push(comp.clone());
            continue;
        }
        gone.extend((0..len).filter(|&p| removed[p]).map(|p| lay.occ(Site { component: c, position: p }).symbol));
        let here = Site { component: c, position: 0 };
        let Some(first_kept) = (0..len).find(|&p| !removed[p]) else {
            let sum = comp.sign_sum();
            let mut js = Vec::new();
            for (rank, (&p, &f)) in frag_at.iter().enumerate() {
                landing[f] = (here, rank);
                js.push(comp.signs()[(p + 1) % len]);
            }
            junctions.insert(here, js);
            comps.push(LinkComponent::Free(sum));
            continue;
        };
        let mut entries: Vec<(LinkOcc, Sign)> = Vec::new();
        let mut run: Vec<Sign> = Vec::new();
        let mut rank = 0;
        for i in (first_kept..len).chain(0..first_kept) {
            let g = comp.signs()[i];
            if !removed[i] {
                if run.len() > 1 {
                    junctions.insert(Site { component: c, position: entries.len() - 1 }, std::mem::take(&mut run));
                }
                entries.push((comp.occ()[i], g));
                run = vec![g];
                rank = 0;
                continue;
            }
            let last = entries.len() - 1;
            entries[last].1 = entries[last].1 ^ g;
            if let Some(&f) = frag_at.get(&i) {
                landing[f] = (Site { component: c, position: last }, rank);
                rank += 1;
                run.push(comp.signs()[(i + 1) % len]);
            }
        }
        if run.len() > 1 {
            junctions.insert(Site { component: c, position: entries.len() - 1 }, run);
        }
        let (occ, signs) = entries.into_iter().unzip();
        comps.push(LinkComponent::crossings(occ, signs)?);
    }
    let keep: Vec<u32> = (1..=code.n() as u32).filter(|s| !gone.contains(s)).collect();
    let rank: HashMap<u32, u32> = keep.iter().enumerate().map(|(i, &s)| (s, i as u32 + 1)).collect();
    let comps = comps
        .into_iter()
        .map(|c| match c {
            LinkComponent::Crossings { occ, signs } => LinkComponent::Crossings {
                occ: occ.into_iter().map(|o| LinkOcc { symbol: rank[&o.symbol], ..o }).collect(),
                signs,
            },
            free => free,
        })
        .collect();
    Ok(Removal { code: IntersignedLinkCode::new(comps)?, landing, junctions })
}

fn swap_r3(code: &IntersignedLinkCode, m: &MoveInstance) -> Result<IntersignedLinkCode> {
    let lay = Layout::new(code);
    let (p, a, b) = (m.sites[0], m.sites[1], m.sites[2]);
    let flip: BTreeSet<u32> = if m.kind == MoveKind::R3b {
        BTreeSet::from([lay.occ(p).symbol, lay.occ(lay.succ(p)).symbol])
    } else {
        BTreeSet::new()
    };
    let mut occs: Vec<Vec<LinkOcc>> = code.components().iter().map(|c| c.occ().to_vec()).collect();
    for (from, to) in [(a, b), (lay.succ(a), lay.succ(b))] {
        occs[to.component][to.position] = lay.occ(from);
        occs[from.component][from.position] = lay.occ(to);
    }
    let comps = code
        .components()
        .iter()
        .zip(occs)
        .map(|(c, occ)| match c {
            LinkComponent::Free(s) => Ok(LinkComponent::Free(*s)),
            LinkComponent::Crossings { signs, .. } => {
                let occ = occ
                    .into_iter()
                    .map(|o| if flip.contains(&o.symbol) { LinkOcc { writhe: -o.writhe, ..o } } else { o })
                    .collect();
                LinkComponent::crossings(occ, signs.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    IntersignedLinkCode::new(comps)
}

fn apply_valid(code: &IntersignedLinkCode, m: &MoveInstance) -> Result<(IntersignedLinkCode, MoveInstance)> {
    match m.direction {
        Direction::Insert => {
            let k = code.n() as u32 + 1;
            let frags = match m.kind {
                MoveKind::R1 => vec![[LinkOcc { symbol: k, writhe: m.epsilon }; 2]],
                kind => r2_fragments(kind, m.epsilon, k, k + 1),
            };
            let (next, placed) = insert(code, &m.sites, &frags, m.junctions.as_ref())?;
            Ok((next, MoveInstance::plain(m.kind, Direction::Remove, placed, m.epsilon)))
        }
        Direction::Remove => {
            let r = remove(code, &m.sites)?;
            let mut order: Vec<usize> = (0..m.sites.len()).collect();
            let mut eps = m.epsilon;
            if order.len() == 2 && r.landing[0].0 == r.landing[1].0 && r.landing[0].1 > r.landing[1].1 {
                order.swap(0, 1);
                if m.kind == MoveKind::R2b {
                    eps = -eps;
                }
            }
            let sites: Vec<Site> = order.iter().map(|&i| r.landing[i].0).collect();
            let junctions = group_sites(&sites).into_iter().map(|(g, _)| r.junctions[&g].clone()).collect();
            let inv = MoveInstance {
                kind: m.kind,
                direction: Direction::Insert,
                sites,
                epsilon: eps,
                junctions: Some(junctions),
            };
            Ok((r.code, inv))
        }
        _ => {
            let next = swap_r3(code, m)?;
            let sites = vec![m.sites[0], m.sites[2], m.sites[1]];
            Ok((next, MoveInstance::plain(m.kind, m.direction.flipped(), sites, m.epsilon)))
        }
    }
}

/// Applies `m` and returns the result with an instance that undoes it.
pub fn apply_with_inverse(code: &IntersignedLinkCode, m: &MoveInstance) -> Result<(IntersignedLinkCode, MoveInstance)> {
    check_instance(&Layout::new(code), m)?;
    apply_valid(code, m)
}

pub fn apply_move(code: &IntersignedLinkCode, m: &MoveInstance) -> Result<IntersignedLinkCode> {
    Ok(apply_with_inverse(code, m)?.0)
}

/// The instance that takes `apply_move(code, m)` back to `code`.
pub fn inverse(code: &IntersignedLinkCode, m: &MoveInstance) -> Result<MoveInstance> {
    Ok(apply_with_inverse(code, m)?.1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub before: String,
    #[serde(rename = "move")]
    pub step: MoveInstance,
    pub after: String,
}

struct Visit {
    code: IntersignedLinkCode,
    parent: Option<(String, MoveInstance)>,
}

struct Side {
    seen: HashMap<String, Visit>,
    frontier: Vec<String>,
    depth: usize,
}

impl Side {
    fn new(code: &IntersignedLinkCode, key: String) -> Self {
        let seen = HashMap::from([(key.clone(), Visit { code: code.clone(), parent: None })]);
        Side { seen, frontier: vec![key], depth: 0 }
    }

    fn crossing_range(&self) -> (usize, usize) {
        let counts = self.seen.values().map(|v| v.code.n());
        (counts.clone().min().unwrap_or(0), counts.max().unwrap_or(0))
    }

    /// Moves out of the frontier whose result keeps crossing counts within
    /// `lo..=hi`.
    fn candidates(&self, lo: usize, hi: usize) -> Vec<(String, MoveInstance)> {
        self.frontier
            .iter()
            .flat_map(|key| {
                let code = &self.seen[key].code;
                enumerate_moves_bounded(code, Some(hi))
                    .into_iter()
                    .filter(move |m| code.n() as i64 + m.crossing_delta() >= lo as i64)
                    .map(move |m| (key.clone(), m))
            })
            .collect()
    }

    /// Next layer: (canonical key, visit) for every candidate move. The
    /// backward side records the move that returns to the parent.
    fn layer(&self, moves: Vec<(String, MoveInstance)>, backward: bool) -> Vec<(String, Visit)> {
        moves
            .into_par_iter()
            .map(|(key, m)| {
                let code = &self.seen[&key].code;
                let (next, inv) = apply_valid(code, &m).expect("enumerated moves apply");
                let canon = isomorphism::canonical_link(&next).text;
                let recorded = if backward { inv } else { m };
                (canon, Visit { code: next, parent: Some((key, recorded)) })
            })
            .collect()
    }

    fn path_from_root(&self, key: &str) -> Vec<PathStep> {
        let mut steps = Vec::new();
        let mut v = &self.seen[key];
        while let Some((pk, m)) = &v.parent {
            let parent = &self.seen[pk];
            steps.push(PathStep { before: parent.code.to_string(), step: m.clone(), after: v.code.to_string() });
            v = parent;
        }
        steps.reverse();
        steps
    }

    fn path_to_root(&self, key: &str) -> Vec<PathStep> {
        let mut steps = Vec::new();
        let mut v = &self.seen[key];
        while let Some((pk, inv)) = &v.parent {
            let after = apply_valid(&v.code, inv).expect("recorded inverse applies").0;
            steps.push(PathStep { before: v.code.to_string(), step: inv.clone(), after: after.to_string() });
            v = &self.seen[pk];
        }
        steps
    }
}

/// Bidirectional breadth-first search over isomorphism classes. Returns a
/// move path from `a` to `b`; consecutive steps meet up to isomorphism.
/// `None` only means nothing was found within the bounds.
pub fn reidemeister_equivalent(
    a: &IntersignedLinkCode,
    b: &IntersignedLinkCode,
    max_depth: usize,
    max_crossings: usize,
) -> Option<Vec<PathStep>> {
    let ka = isomorphism::canonical_link(a).text;
    let kb = isomorphism::canonical_link(b).text;
    if ka == kb {
        return Some(Vec::new());
    }
    if a.components().len() != b.components().len() {
        return None;
    }
    let mut fwd = Side::new(a, ka);
    let mut bwd = Side::new(b, kb);
    // Nodes whose crossing count is more than 2 per remaining move away from
    // everything the other side has seen cannot meet it in time.
    let window = |other: &Side, left: usize| {
        let (lo, hi) = other.crossing_range();
        (lo.saturating_sub(2 * left), (hi + 2 * left).min(max_crossings))
    };
    while fwd.depth + bwd.depth < max_depth {
        let left = max_depth - fwd.depth - bwd.depth - 1;
        let (flo, fhi) = window(&bwd, left);
        let (blo, bhi) = window(&fwd, left);
        let fmoves = fwd.candidates(flo, fhi);
        let bmoves = bwd.candidates(blo, bhi);
        let forward = match (fmoves.is_empty(), bmoves.is_empty()) {
            (true, true) => return None,
            (false, true) => true,
            (true, false) => false,
            (false, false) => fmoves.len() <= bmoves.len(),
        };
        let (this, other, moves) = if forward { (&mut fwd, &bwd, fmoves) } else { (&mut bwd, &fwd, bmoves) };
        let layer = this.layer(moves, !forward);
        let mut next = Vec::new();
        let mut meet = None;
        for (key, visit) in layer {
            if this.seen.contains_key(&key) {
                continue;
            }
            this.seen.insert(key.clone(), visit);
            if other.seen.contains_key(&key) {
                meet = Some(key);
                break;
            }
            next.push(key);
        }
        this.frontier = next;
        this.depth += 1;
        if let Some(key) = meet {
            let mut path = fwd.path_from_root(&key);
            path.extend(bwd.path_to_root(&key));
            return Some(path);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_intersigned;

    fn link(t: &str) -> IntersignedLinkCode {
        t.parse().unwrap()
    }

    fn iso(a: &IntersignedLinkCode, b: &IntersignedLinkCode) -> bool {
        isomorphism::canonical_link(a) == isomorphism::canonical_link(b)
    }

    #[test]
    fn complement_round_trip() {
        let code = parse_intersigned("1-1-").unwrap();
        let w = BTreeMap::from([(1, Sign::Plus)]);
        let l = complement(&code, &w).unwrap();
        assert_eq!(l.to_string(), "1^++1^++");
        assert_eq!(uncomplement(&l).unwrap(), (code.clone(), w));
        assert!(matches!(complement(&code, &BTreeMap::new()), Err(Error::MissingWrithe(1))));
        let two = parse_intersigned("1-2+1-3-/2+3-").unwrap();
        let w3 = BTreeMap::from([(1, Sign::Plus), (2, Sign::Minus), (3, Sign::Plus)]);
        assert_eq!(complement(&two, &w3).unwrap().components().len(), 2);
    }

    #[test]
    fn kink_removal() {
        let code = link("1^++1^+-");
        let moves = enumerate_moves(&code);
        let m = moves.iter().find(|m| m.kind == MoveKind::R1 && m.direction == Direction::Remove).unwrap();
        assert_eq!(apply_move(&code, m).unwrap().to_string(), "-");
    }

    #[test]
    fn free_component_allows_only_insertions() {
        let moves = enumerate_moves(&link("+"));
        assert!(moves.iter().all(|m| m.direction == Direction::Insert));
        assert!(moves.iter().any(|m| m.kind == MoveKind::R1));
        assert!(moves.iter().any(|m| m.kind == MoveKind::R2a));
    }

    #[test]
    fn r2_insertion_across_free_components() {
        let code = link("+/+");
        let m = MoveInstance::plain(
            MoveKind::R2a,
            Direction::Insert,
            vec![Site { component: 0, position: 0 }, Site { component: 1, position: 0 }],
            Sign::Plus,
        );
        assert_eq!(apply_move(&code, &m).unwrap().to_string(), "1^++2^-+/1^++2^-+");
    }

    #[test]
    fn no_triangle_no_r3() {
        let moves = enumerate_moves(&link("1^++2^-+1^++2^-+"));
        assert!(moves.iter().all(|m| !matches!(m.kind, MoveKind::R3a | MoveKind::R3b)));
    }

    #[test]
    fn r3_left_becomes_right() {
        // a 1+2 b 3-2 c 1-3 d with all writhes +
        let code = link("1^++2^++3^+-2^++1^+-3^++");
        let moves = enumerate_moves(&code);
        let m = moves.iter().find(|m| m.kind == MoveKind::R3a).unwrap();
        assert_eq!(m.direction, Direction::Left);
        let (next, inv) = apply_with_inverse(&code, m).unwrap();
        assert_eq!(next.to_string(), "1^++2^++1^+-3^++3^+-2^++");
        assert_eq!(inv.direction, Direction::Right);
        assert_eq!(apply_move(&next, &inv).unwrap(), code);
    }

    #[test]
    fn bad_instances_are_rejected() {
        let code = link("1^++1^+-");
        let mut m =
            MoveInstance::plain(MoveKind::R1, Direction::Remove, vec![Site { component: 0, position: 1 }], Sign::Plus);
        assert!(matches!(apply_move(&code, &m), Err(Error::InvalidInstance(_))));
        m.sites[0].component = 4;
        assert!(matches!(apply_move(&code, &m), Err(Error::InvalidInstance(_))));
        let j = MoveInstance {
            junctions: Some(vec![vec![Sign::Plus, Sign::Plus]]),
            ..MoveInstance::plain(MoveKind::R1, Direction::Insert, vec![Site { component: 0, position: 1 }], Sign::Plus)
        };
        assert!(matches!(apply_move(&code, &j), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn every_move_inverts() {
        for t in ["1^++1^+-", "+", "+/-", "1^++2^-+1^++2^-+", "1^++2^++3^+-2^++1^+-3^++", "1^-+2^+-/2^++1^-+"] {
            let code = link(t);
            for m in enumerate_moves(&code) {
                let (next, inv) = apply_with_inverse(&code, &m).unwrap();
                assert_eq!(next.n() as i64 - code.n() as i64, m.crossing_delta(), "{t} {m}");
                assert_eq!(next.components().len(), code.components().len());
                let back = apply_move(&next, &inv).unwrap_or_else(|e| panic!("{t} {m} -> {next} {inv}: {e}"));
                assert!(iso(&back, &code), "{t} {m} -> {next} -> {back}");
                for (c, d) in code.components().iter().zip(next.components()) {
                    if m.kind == MoveKind::R1 || m.kind == MoveKind::R2a || m.kind == MoveKind::R2b {
                        assert_eq!(c.sign_sum(), d.sign_sum());
                    }
                }
            }
        }
    }

    #[test]
    fn search_examples() {
        let x = link("1^++2^-+1^++2^-+");
        assert_eq!(reidemeister_equivalent(&x, &x, 3, 6), Some(Vec::new()));
        let path = reidemeister_equivalent(&link("1^++1^+-"), &link("-"), 2, 2).unwrap();
        assert_eq!(path.len(), 1);
        assert!(reidemeister_equivalent(&link("1^++1^+-"), &link("+/+"), 3, 3).is_none());
    }
}
