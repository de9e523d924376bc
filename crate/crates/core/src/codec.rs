//! The three code notations (intersigned, signed, link), plain Gauss words,
//! their text grammar and the JSON interchange format.
//!
//! Text grammar (whitespace is ignored everywhere):
//!
//! ```text
//! code        := component ("/" component)*
//! intersigned := (INT SIGN)+
//! signed      := (INT "^" SIGN)+
//! link        := (INT "^" SIGN SIGN)+ | SIGN
//! INT         := [1-9][0-9]*
//! SIGN        := "+" | "-"
//! ```

use std::collections::HashMap;
use std::fmt;
use std::ops::{BitXor, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An interstitial, occurrence or writhe sign. `Plus` encodes 0 in GF(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Sign {
        if bit & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' | '\u{2212}' => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        Sign::from_bit(self.bit() ^ 1)
    }
}

/// GF(2) addition.
impl BitXor for Sign {
    type Output = Sign;
    fn bitxor(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.bit() ^ rhs.bit())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Position of one occurrence (a lift of a crossing) inside a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub component: usize,
    pub position: usize,
}

/// One component of an intersigned code: `signs[i]` sits between `symbols[i]`
/// and `symbols[i + 1]` (cyclically).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    symbols: Vec<u32>,
    signs: Vec<Sign>,
}

impl Component {
    pub fn new(symbols: Vec<u32>, signs: Vec<Sign>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Validation("empty component".into()));
        }
        if symbols.len() != signs.len() {
            return Err(Error::Validation(format!(
                "component has {} symbols but {} signs",
                symbols.len(),
                signs.len()
            )));
        }
        Ok(Component { symbols, signs })
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A multi-component double-occurrence sequence whose symbols alternate with
/// signs. Symbols always form the alphabet `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntersignedGaussCode {
    components: Vec<Component>,
    n: usize,
}

impl IntersignedGaussCode {
    /// Validates double occurrence and the contiguous alphabet; labels are kept.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Validation("code has no components".into()));
        }
        let n = check_double_occurrence(components.iter().flat_map(|c| c.symbols.iter().copied()))?;
        Ok(IntersignedGaussCode { components, n })
    }

    pub fn from_parts(parts: Vec<(Vec<u32>, Vec<Sign>)>) -> Result<Self> {
        let components = parts.into_iter().map(|(s, g)| Component::new(s, g)).collect::<Result<Vec<_>>>()?;
        Self::new(components)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Number of crossings (alphabet size).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symbol_at(&self, occ: Occurrence) -> u32 {
        self.components[occ.component].symbols[occ.position]
    }

    /// All occurrences in reading order.
    pub fn occurrences(&self) -> impl Iterator<Item = Occurrence> + '_ {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(c, comp)| (0..comp.len()).map(move |p| Occurrence { component: c, position: p }))
    }

    /// The sign sequence, flattened in reading order.
    pub fn sign_sequence(&self) -> Vec<Sign> {
        self.components.iter().flat_map(|c| c.signs.iter().copied()).collect()
    }

    /// Same word, new sign sequence (flattened in reading order).
    pub fn with_signs(&self, signs: &[Sign]) -> Result<Self> {
        let total: usize = self.components.iter().map(Component::len).sum();
        if signs.len() != total {
            return Err(Error::SizeMismatch { expected: total, actual: signs.len() });
        }
        let mut rest = signs;
        let components = self
            .components
            .iter()
            .map(|c| {
                let (head, tail) = rest.split_at(c.len());
                rest = tail;
                Component { symbols: c.symbols.clone(), signs: head.to_vec() }
            })
            .collect();
        Ok(IntersignedGaussCode { components, n: self.n })
    }

    pub fn word(&self) -> GaussWord {
        GaussWord { components: self.components.iter().map(|c| c.symbols.clone()).collect() }
    }

    /// Renumbers symbols 1..n in order of first occurrence.
    pub fn normalized(&self) -> Self {
        let map = first_occurrence_labels(self.components.iter().flat_map(|c| c.symbols.iter().copied()));
        let components = self
            .components
            .iter()
            .map(|c| Component { symbols: c.symbols.iter().map(|s| map[s]).collect(), signs: c.signs.clone() })
            .collect();
        IntersignedGaussCode { components, n: self.n }
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            kind: CodeKind::Intersigned,
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    occ: c.symbols.iter().map(|&sym| OccJson { sym, writhe: None }).collect(),
                    signs: c.signs.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for IntersignedGaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for (s, g) in c.symbols.iter().zip(&c.signs) {
                write!(f, "{s}{g}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntersignedGaussCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_intersigned(s)
    }
}

/// Carter-style code: one sign per occurrence, opposite at the two occurrences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedGaussCode {
    components: Vec<Vec<(u32, Sign)>>,
    n: usize,
}

impl SignedGaussCode {
    pub fn new(components: Vec<Vec<(u32, Sign)>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Validation("code has no components".into()));
        }
        if components.iter().any(Vec::is_empty) {
            return Err(Error::Validation("empty component".into()));
        }
        let n = check_double_occurrence(components.iter().flatten().map(|&(s, _)| s))?;
        let mut seen: HashMap<u32, Sign> = HashMap::new();
        for &(sym, sign) in components.iter().flatten() {
            if let Some(prev) = seen.insert(sym, sign) {
                if prev == sign {
                    return Err(Error::Validation(format!("both occurrences of symbol {sym} carry the sign {sign}")));
                }
            }
        }
        Ok(SignedGaussCode { components, n })
    }

    pub fn components(&self) -> &[Vec<(u32, Sign)>] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn normalized(&self) -> Self {
        let map = first_occurrence_labels(self.components.iter().flatten().map(|&(s, _)| s));
        let components = self.components.iter().map(|c| c.iter().map(|&(s, g)| (map[&s], g)).collect()).collect();
        SignedGaussCode { components, n: self.n }
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            kind: CodeKind::Signed,
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    occ: c.iter().map(|&(sym, _)| OccJson { sym, writhe: None }).collect(),
                    signs: c.iter().map(|&(_, g)| g).collect(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for SignedGaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for (s, g) in c {
                write!(f, "{s}^{g}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SignedGaussCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_signed(s)
    }
}

/// A crossing occurrence in a link code: symbol plus the crossing's writhe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkOcc {
    pub symbol: u32,
    pub writhe: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LinkComponent {
    /// `signs[i]` follows `occ[i]`, cyclically.
    Crossings { occ: Vec<LinkOcc>, signs: Vec<Sign> },
    /// A component without crossings; carries one residual sign.
    Free(Sign),
}

impl LinkComponent {
    pub fn crossings(occ: Vec<LinkOcc>, signs: Vec<Sign>) -> Result<Self> {
        if occ.is_empty() {
            return Err(Error::Validation("crossing component without occurrences".into()));
        }
        if occ.len() != signs.len() {
            return Err(Error::Validation(format!(
                "component has {} occurrences but {} signs",
                occ.len(),
                signs.len()
            )));
        }
        Ok(LinkComponent::Crossings { occ, signs })
    }

    pub fn occ(&self) -> &[LinkOcc] {
        match self {
            LinkComponent::Crossings { occ, .. } => occ,
            LinkComponent::Free(_) => &[],
        }
    }

    /// Gap signs; a free component has exactly one.
    pub fn signs(&self) -> &[Sign] {
        match self {
            LinkComponent::Crossings { signs, .. } => signs,
            LinkComponent::Free(s) => std::slice::from_ref(s),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, LinkComponent::Free(_))
    }

    /// GF(2) sum of the gap signs.
    pub fn sign_sum(&self) -> Sign {
        self.signs().iter().fold(Sign::Plus, |a, &b| a ^ b)
    }
}

/// Sign-complemented intersigned code with a writhe at every crossing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntersignedLinkCode {
    components: Vec<LinkComponent>,
    n: usize,
}

impl IntersignedLinkCode {
    pub fn new(components: Vec<LinkComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Validation("code has no components".into()));
        }
        let n = check_double_occurrence(components.iter().flat_map(|c| c.occ().iter().map(|o| o.symbol)))?;
        let mut seen: HashMap<u32, Sign> = HashMap::new();
        for o in components.iter().flat_map(|c| c.occ()) {
            if let Some(prev) = seen.insert(o.symbol, o.writhe) {
                if prev != o.writhe {
                    return Err(Error::Validation(format!(
                        "occurrences of symbol {} carry different writhes",
                        o.symbol
                    )));
                }
            }
        }
        Ok(IntersignedLinkCode { components, n })
    }

    pub fn components(&self) -> &[LinkComponent] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn writhe(&self, symbol: u32) -> Option<Sign> {
        self.components.iter().flat_map(|c| c.occ()).find(|o| o.symbol == symbol).map(|o| o.writhe)
    }

    /// Renumbers symbols 1..n in order of first occurrence.
    pub fn normalized(&self) -> Self {
        let map = first_occurrence_labels(self.components.iter().flat_map(|c| c.occ().iter().map(|o| o.symbol)));
        let components = self
            .components
            .iter()
            .map(|c| match c {
                LinkComponent::Free(s) => LinkComponent::Free(*s),
                LinkComponent::Crossings { occ, signs } => LinkComponent::Crossings {
                    occ: occ.iter().map(|o| LinkOcc { symbol: map[&o.symbol], writhe: o.writhe }).collect(),
                    signs: signs.clone(),
                },
            })
            .collect();
        IntersignedLinkCode { components, n: self.n }
    }

    /// Builds a code from parts whose alphabet may have holes, renumbering it.
    pub(crate) fn from_unnormalized(components: Vec<LinkComponent>) -> Result<Self> {
        let map = first_occurrence_labels(components.iter().flat_map(|c| c.occ().iter().map(|o| o.symbol)));
        let components = components
            .into_iter()
            .map(|c| match c {
                LinkComponent::Free(s) => LinkComponent::Free(s),
                LinkComponent::Crossings { occ, signs } => LinkComponent::Crossings {
                    occ: occ.into_iter().map(|o| LinkOcc { symbol: map[&o.symbol], writhe: o.writhe }).collect(),
                    signs,
                },
            })
            .collect();
        Self::new(components)
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            kind: CodeKind::Link,
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    occ: c.occ().iter().map(|o| OccJson { sym: o.symbol, writhe: Some(o.writhe) }).collect(),
                    signs: c.signs().to_vec(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for IntersignedLinkCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            match c {
                LinkComponent::Free(s) => write!(f, "{s}")?,
                LinkComponent::Crossings { occ, signs } => {
                    for (o, g) in occ.iter().zip(signs) {
                        write!(f, "{}^{}{}", o.symbol, o.writhe, g)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for IntersignedLinkCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_link(s)
    }
}

/// An unsigned Gauss code (double-occurrence word, possibly multi-component).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussWord {
    components: Vec<Vec<u32>>,
}

impl GaussWord {
    pub fn new(components: Vec<Vec<u32>>) -> Result<Self> {
        if components.is_empty() || components.iter().any(Vec::is_empty) {
            return Err(Error::Validation("empty word or component".into()));
        }
        check_double_occurrence(components.iter().flatten().copied())?;
        Ok(GaussWord { components })
    }

    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.components.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn len(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Decorates the word with a flattened sign sequence.
    pub fn with_signs(&self, signs: &[Sign]) -> Result<IntersignedGaussCode> {
        if signs.len() != self.len() {
            return Err(Error::SizeMismatch { expected: self.len(), actual: signs.len() });
        }
        let mut rest = signs;
        let parts = self
            .components
            .iter()
            .map(|c| {
                let (head, tail) = rest.split_at(c.len());
                rest = tail;
                (c.clone(), head.to_vec())
            })
            .collect();
        IntersignedGaussCode::from_parts(parts)
    }
}

impl fmt::Display for GaussWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spaced = self.components.iter().flatten().any(|&s| s > 9);
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for (j, s) in c.iter().enumerate() {
                if spaced && j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for GaussWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

/// Returns n, requiring every symbol exactly twice and the alphabet `1..=n`.
fn check_double_occurrence(symbols: impl Iterator<Item = u32>) -> Result<usize> {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for s in symbols {
        *counts.entry(s).or_default() += 1;
    }
    let mut bad: Vec<_> = counts.iter().filter(|(_, &c)| c != 2).map(|(&s, &c)| (s, c)).collect();
    if !bad.is_empty() {
        bad.sort_unstable();
        let (s, c) = bad[0];
        return Err(Error::Validation(format!("symbol {s} occurs {c} times (expected 2)")));
    }
    let n = counts.len();
    if let Some(&s) = counts.keys().find(|&&s| s == 0 || s as usize > n) {
        return Err(Error::Validation(format!("symbol {s} is outside the alphabet 1..{n}")));
    }
    Ok(n)
}

fn first_occurrence_labels(symbols: impl Iterator<Item = u32>) -> HashMap<u32, u32> {
    let mut map = HashMap::new();
    for s in symbols {
        let next = map.len() as u32 + 1;
        map.entry(s).or_insert(next);
    }
    map
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(), pos: 0, _src: src }
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(o, _)| o)
            .unwrap_or_else(|| self.chars.last().map_or(0, |&(o, c)| o + c.len_utf8()))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: message.into() })
    }

    fn int(&mut self) -> Result<u32> {
        match self.peek() {
            Some(c @ '1'..='9') => {
                let mut v = c.to_digit(10).unwrap() as u64;
                self.pos += 1;
                while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
                    v = v * 10 + d as u64;
                    if v > u32::MAX as u64 {
                        return self.error("symbol too large");
                    }
                    self.pos += 1;
                }
                Ok(v as u32)
            }
            Some(c) => self.error(format!("expected a symbol (positive integer), found '{c}'")),
            None => self.error("expected a symbol, found end of input"),
        }
    }

    fn sign(&mut self) -> Result<Sign> {
        match self.peek().and_then(Sign::from_char) {
            Some(s) => {
                self.pos += 1;
                Ok(s)
            }
            None => match self.peek() {
                Some(c) => self.error(format!("expected '+' or '-', found '{c}'")),
                None => self.error("expected '+' or '-', found end of input"),
            },
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.error(format!("expected '{want}', found '{c}'")),
            None => self.error(format!("expected '{want}', found end of input")),
        }
    }

    fn component_end(&self) -> bool {
        matches!(self.peek(), None | Some('/'))
    }

    /// Parses `item ("/" item)*` where each item is read by `component`.
    fn components<T>(&mut self, mut component: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![component(self)?];
        while self.peek() == Some('/') {
            self.pos += 1;
            out.push(component(self)?);
        }
        if !self.at_end() {
            return self.error("unexpected trailing input");
        }
        Ok(out)
    }
}

pub fn parse_intersigned(text: &str) -> Result<IntersignedGaussCode> {
    let mut lx = Lexer::new(text);
    let parts = lx.components(|lx| {
        let mut syms = Vec::new();
        let mut signs = Vec::new();
        loop {
            syms.push(lx.int()?);
            signs.push(lx.sign()?);
            if lx.component_end() {
                break;
            }
        }
        Ok((syms, signs))
    })?;
    let map = {
        check_double_occurrence_relaxed(parts.iter().flat_map(|(s, _)| s.iter().copied()))?;
        first_occurrence_labels(parts.iter().flat_map(|(s, _)| s.iter().copied()))
    };
    IntersignedGaussCode::from_parts(
        parts.into_iter().map(|(s, g)| (s.into_iter().map(|x| map[&x]).collect(), g)).collect(),
    )
}

pub fn parse_signed(text: &str) -> Result<SignedGaussCode> {
    let mut lx = Lexer::new(text);
    let comps = lx.components(|lx| {
        let mut out = Vec::new();
        loop {
            let s = lx.int()?;
            lx.expect('^')?;
            out.push((s, lx.sign()?));
            if lx.component_end() {
                break;
            }
        }
        Ok(out)
    })?;
    check_double_occurrence_relaxed(comps.iter().flatten().map(|&(s, _)| s))?;
    let map = first_occurrence_labels(comps.iter().flatten().map(|&(s, _)| s));
    SignedGaussCode::new(comps.into_iter().map(|c| c.into_iter().map(|(s, g)| (map[&s], g)).collect()).collect())
}

pub fn parse_link(text: &str) -> Result<IntersignedLinkCode> {
    let mut lx = Lexer::new(text);
    let comps = lx.components(|lx| {
        if let Some(s) = lx.peek().and_then(Sign::from_char) {
            lx.pos += 1;
            if !lx.component_end() {
                return lx.error("a crossing-free component consists of a single sign");
            }
            return Ok(LinkComponent::Free(s));
        }
        let mut occ = Vec::new();
        let mut signs = Vec::new();
        loop {
            let symbol = lx.int()?;
            lx.expect('^')?;
            let writhe = lx.sign()?;
            occ.push(LinkOcc { symbol, writhe });
            signs.push(lx.sign()?);
            if lx.component_end() {
                break;
            }
        }
        LinkComponent::crossings(occ, signs)
    })?;
    check_double_occurrence_relaxed(comps.iter().flat_map(|c| c.occ().iter().map(|o| o.symbol)))?;
    IntersignedLinkCode::from_unnormalized(comps)
}

/// Parses a plain Gauss word. Without separators every digit is a symbol
/// (`1234534125`); with spaces or commas the tokens are integers.
pub fn parse_word(text: &str) -> Result<GaussWord> {
    let mut comps = Vec::new();
    for (i, part) in text.split('/').enumerate() {
        let spaced = part.trim().contains(|c: char| c.is_whitespace() || c == ',');
        let mut comp = Vec::new();
        if spaced {
            for tok in part.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                let v: u32 = tok.parse().ok().filter(|&v| v > 0).ok_or_else(|| Error::Syntax {
                    offset: i,
                    message: format!("'{tok}' is not a positive integer"),
                })?;
                comp.push(v);
            }
        } else {
            for (off, c) in part.char_indices().filter(|(_, c)| !c.is_whitespace()) {
                match c.to_digit(10) {
                    Some(d) if d > 0 => comp.push(d),
                    _ => {
                        return Err(Error::Syntax { offset: off, message: format!("'{c}' is not a symbol digit 1-9") })
                    }
                }
            }
        }
        comps.push(comp);
    }
    if comps.iter().any(Vec::is_empty) {
        return Err(Error::Validation("empty component".into()));
    }
    check_double_occurrence_relaxed(comps.iter().flatten().copied())?;
    let map = first_occurrence_labels(comps.iter().flatten().copied());
    GaussWord::new(comps.into_iter().map(|c| c.into_iter().map(|s| map[&s]).collect()).collect())
}

/// Double occurrence without the contiguity requirement (parse-time labels are free).
fn check_double_occurrence_relaxed(symbols: impl Iterator<Item = u32>) -> Result<()> {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for s in symbols {
        *counts.entry(s).or_default() += 1;
    }
    let mut bad: Vec<_> = counts.into_iter().filter(|&(_, c)| c != 2).collect();
    bad.sort_unstable();
    match bad.first() {
        Some(&(s, c)) => Err(Error::Validation(format!("symbol {s} occurs {c} times (expected 2)"))),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Intersigned,
    Signed,
    Link,
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::Intersigned => "intersigned",
            CodeKind::Signed => "signed",
            CodeKind::Link => "link",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccJson {
    pub sym: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub writhe: Option<Sign>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub occ: Vec<OccJson>,
    pub signs: Vec<Sign>,
}

/// JSON interchange form shared by all three notations. For signed codes
/// `signs` holds the occurrence signs; otherwise the gap signs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub kind: CodeKind,
    pub components: Vec<ComponentJson>,
}

/// Any of the three code kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyCode {
    Intersigned(IntersignedGaussCode),
    Signed(SignedGaussCode),
    Link(IntersignedLinkCode),
}

impl AnyCode {
    pub fn kind(&self) -> CodeKind {
        match self {
            AnyCode::Intersigned(_) => CodeKind::Intersigned,
            AnyCode::Signed(_) => CodeKind::Signed,
            AnyCode::Link(_) => CodeKind::Link,
        }
    }

    pub fn parse(kind: CodeKind, text: &str) -> Result<Self> {
        Ok(match kind {
            CodeKind::Intersigned => AnyCode::Intersigned(parse_intersigned(text)?),
            CodeKind::Signed => AnyCode::Signed(parse_signed(text)?),
            CodeKind::Link => AnyCode::Link(parse_link(text)?),
        })
    }

    /// Guesses the notation: `^` followed by two signs means link, `^` signed,
    /// a lone sign component means link, otherwise intersigned.
    pub fn detect(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let kind = if compact.contains('^') {
            let link = compact
                .split('^')
                .skip(1)
                .all(|rest| rest.chars().take(2).filter(|&c| Sign::from_char(c).is_some()).count() == 2);
            if link {
                CodeKind::Link
            } else {
                CodeKind::Signed
            }
        } else if compact.split('/').any(|c| c.len() == 1 && Sign::from_char(c.chars().next().unwrap()).is_some()) {
            CodeKind::Link
        } else {
            CodeKind::Intersigned
        };
        Self::parse(kind, text)
    }

    pub fn to_json(&self) -> CodeJson {
        match self {
            AnyCode::Intersigned(c) => c.to_json(),
            AnyCode::Signed(c) => c.to_json(),
            AnyCode::Link(c) => c.to_json(),
        }
    }

    pub fn from_json(json: &CodeJson) -> Result<Self> {
        let bad = |m: &str| Error::Validation(m.to_string());
        match json.kind {
            CodeKind::Intersigned => {
                let parts =
                    json.components.iter().map(|c| (c.occ.iter().map(|o| o.sym).collect(), c.signs.clone())).collect();
                Ok(AnyCode::Intersigned(IntersignedGaussCode::from_parts(parts)?))
            }
            CodeKind::Signed => {
                let comps = json
                    .components
                    .iter()
                    .map(|c| {
                        if c.occ.len() != c.signs.len() {
                            return Err(bad("signed component needs one sign per occurrence"));
                        }
                        Ok(c.occ.iter().zip(&c.signs).map(|(o, &s)| (o.sym, s)).collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyCode::Signed(SignedGaussCode::new(comps)?))
            }
            CodeKind::Link => {
                let comps = json
                    .components
                    .iter()
                    .map(|c| {
                        if c.occ.is_empty() {
                            return match c.signs.as_slice() {
                                [s] => Ok(LinkComponent::Free(*s)),
                                _ => Err(bad("crossing-free component needs exactly one sign")),
                            };
                        }
                        let occ = c
                            .occ
                            .iter()
                            .map(|o| {
                                o.writhe
                                    .map(|w| LinkOcc { symbol: o.sym, writhe: w })
                                    .ok_or(Error::MissingWrithe(o.sym))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        LinkComponent::crossings(occ, c.signs.clone())
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyCode::Link(IntersignedLinkCode::new(comps)?))
            }
        }
    }
}

impl fmt::Display for AnyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyCode::Intersigned(c) => c.fmt(f),
            AnyCode::Signed(c) => c.fmt(f),
            AnyCode::Link(c) => c.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_component_example() {
        let c = parse_intersigned("1-2+1-3-/2+3-").unwrap();
        assert_eq!(c.components().len(), 2);
        assert_eq!(c.n(), 3);
        assert_eq!(c.to_string(), "1-2+1-3-/2+3-");
    }

    #[test]
    fn parses_eight_crossing_code() {
        let c = parse_intersigned("1+2-3-4-2-3+5-6+7-7+6-5+8+8-4+1-").unwrap();
        assert_eq!(c.components().len(), 1);
        assert_eq!(c.n(), 8);
    }

    #[test]
    fn rejects_single_occurrence() {
        assert!(matches!(parse_intersigned("1-2+1-"), Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_malformed_tokens() {
        for bad in ["", "1", "1-2", "1-/", "0-0-", "1--1-", "a-a-", "1-1-/", "1+1+x"] {
            assert!(parse_intersigned(bad).is_err(), "{bad:?} should not parse");
        }
        assert!(matches!(parse_intersigned("1-1"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn whitespace_is_ignored_and_labels_normalized() {
        let c = parse_intersigned(" 7 - 3 + 7 - / 3 + ").unwrap();
        assert_eq!(c.to_string(), "1-2+1-/2+");
    }

    #[test]
    fn signed_codes() {
        let c = parse_signed("1^-2^+3^-1^+/2^-/3^+").unwrap();
        assert_eq!(c.components().len(), 3);
        assert!(matches!(parse_signed("1^-1^-"), Err(Error::Validation(_))));
        assert_eq!(parse_signed("1^+1^-").unwrap().to_string(), "1^+1^-");
    }

    #[test]
    fn link_codes() {
        let c = parse_link("1^++1^+-").unwrap();
        assert_eq!(c.components().len(), 1);
        assert_eq!(c.writhe(1), Some(Sign::Plus));
        assert_eq!(c.components()[0].signs(), &[Sign::Plus, Sign::Minus]);
        assert_eq!(c.to_string(), "1^++1^+-");

        let free = parse_link("+").unwrap();
        assert_eq!(free.components(), &[LinkComponent::Free(Sign::Plus)]);
        assert!(parse_link("1^++1^--").is_err(), "writhes must agree");
        assert!(parse_link("+-").is_err());
    }

    #[test]
    fn words() {
        let w = parse_word("1234534125").unwrap();
        assert_eq!(w.n(), 5);
        assert_eq!(parse_word("10 11 10 11").unwrap().to_string(), "1212");
        assert!(parse_word("121").is_err());
    }

    #[test]
    fn json_round_trip() {
        for text in ["1-2+1-3-/2+3-", "1^-2^+3^-1^+/2^-/3^+", "1^++2^-+/1^++2^-+/-"] {
            let code = AnyCode::detect(text).unwrap();
            let json = serde_json::to_string(&code.to_json()).unwrap();
            let back: CodeJson = serde_json::from_str(&json).unwrap();
            assert_eq!(AnyCode::from_json(&back).unwrap(), code);
        }
    }

    #[test]
    fn detect_kinds() {
        assert_eq!(AnyCode::detect("1-1-").unwrap().kind(), CodeKind::Intersigned);
        assert_eq!(AnyCode::detect("1^+1^-").unwrap().kind(), CodeKind::Signed);
        assert_eq!(AnyCode::detect("1^++1^+-").unwrap().kind(), CodeKind::Link);
        assert_eq!(AnyCode::detect("-").unwrap().kind(), CodeKind::Link);
    }
}
