//! Free-group words on `x1..xg, y1..yg`, endomorphisms given by generator
//! images, and the Magnus expansion used to detect lower central series
//! membership.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie::{LieElement, TensorElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator {0} is outside genus {1}")]
    IndexOutOfRange(String, usize),
    #[error("malformed word: {0}")]
    Parse(String),
    #[error("genus mismatch: expected {expected}, found {found}")]
    GenusMismatch { expected: usize, found: usize },
    #[error("word is not in F_{k}: lowest Magnus degree is {found}")]
    NotInLcs { k: usize, found: usize },
    #[error("degree-{0} Magnus term is not a Lie element")]
    NonLieResidue(usize),
    #[error("inverse images do not invert the endomorphism at {0}")]
    BadInverse(Generator),
    #[error("malformed endomorphism: {0}")]
    Endo(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    X,
    Y,
}

/// One of the symplectic generators `x_i` or `y_i`.
///
/// Stored as a code so that the derived order is the alphabet order
/// `x1 < y1 < x2 < y2 < ...`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator(u8);

impl Generator {
    pub fn new(kind: Kind, index: usize) -> Self {
        assert!((1..=120).contains(&index), "generator index {index} out of range");
        let base = 2 * (index as u8 - 1);
        Generator(match kind {
            Kind::X => base,
            Kind::Y => base + 1,
        })
    }

    pub fn x(index: usize) -> Self {
        Self::new(Kind::X, index)
    }

    pub fn y(index: usize) -> Self {
        Self::new(Kind::Y, index)
    }

    pub fn from_code(code: usize) -> Self {
        Generator(code as u8)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn kind(self) -> Kind {
        if self.0.is_multiple_of(2) {
            Kind::X
        } else {
            Kind::Y
        }
    }

    pub fn index(self) -> usize {
        (self.0 / 2) as usize + 1
    }

    pub fn is_x(self) -> bool {
        self.kind() == Kind::X
    }

    pub fn is_y(self) -> bool {
        self.kind() == Kind::Y
    }

    /// The generator of the same handle with the other kind.
    pub fn partner(self) -> Self {
        Generator(self.0 ^ 1)
    }

    /// All generators of genus `g` in alphabet order.
    pub fn all(genus: usize) -> impl Iterator<Item = Generator> {
        (0..2 * genus).map(Generator::from_code)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.is_x() { 'x' } else { 'y' };
        write!(f, "{c}{}", self.index())
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Generator {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.chars().next() {
            Some('x') => Kind::X,
            Some('y') => Kind::Y,
            _ => return Err(WordError::Parse(format!("bad generator {s:?}"))),
        };
        let index: usize = s[1..]
            .parse()
            .map_err(|_| WordError::Parse(format!("bad generator {s:?}")))?;
        if index == 0 || index > 120 {
            return Err(WordError::Parse(format!("bad generator index in {s:?}")));
        }
        Ok(Generator::new(kind, index))
    }
}

/// Parses a concatenation of generators such as `x1y1x2`.
pub fn parse_symbol_string(s: &str) -> Result<Vec<Generator>, WordError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        if bytes[i] != b'x' && bytes[i] != b'y' {
            return Err(WordError::Parse(format!("bad symbol string {s:?}")));
        }
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        out.push(s[start..i].parse()?);
    }
    Ok(out)
}

pub fn symbol_string(word: &[Generator]) -> String {
    word.iter().map(|g| g.to_string()).collect()
}

/// A freely reduced word, stored as runs of (generator, nonzero exponent)
/// with adjacent runs on distinct generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupWord {
    genus: usize,
    runs: Vec<(Generator, i32)>,
}

impl GroupWord {
    pub fn identity(genus: usize) -> Self {
        GroupWord { genus, runs: Vec::new() }
    }

    pub fn generator(genus: usize, gen: Generator) -> Result<Self, WordError> {
        check_index(genus, gen)?;
        Ok(GroupWord { genus, runs: vec![(gen, 1)] })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn runs(&self) -> &[(Generator, i32)] {
        &self.runs
    }

    /// The word as a sequence of letters with exponent ±1.
    pub fn letters(&self) -> impl Iterator<Item = (Generator, i32)> + '_ {
        self.runs
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn len(&self) -> usize {
        self.runs.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    fn push(&mut self, gen: Generator, exp: i32) {
        if exp == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((g, e)) if *g == gen => {
                *e += exp;
                if *e == 0 {
                    self.runs.pop();
                }
            }
            _ => self.runs.push((gen, exp)),
        }
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        debug_assert_eq!(self.genus, other.genus);
        let mut out = self.clone();
        for &(g, e) in &other.runs {
            out.push(g, e);
        }
        out
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            genus: self.genus,
            runs: self.runs.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, n: i32) -> GroupWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::identity(self.genus);
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> GroupWord {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// `c w c⁻¹`.
    pub fn conjugate_by(&self, c: &GroupWord) -> GroupWord {
        c.mul(self).mul(&c.inverse())
    }

    /// Image under the map killing every `x_i` (the inclusion into the
    /// handlebody group).
    pub fn delete_x(&self) -> GroupWord {
        let mut out = GroupWord::identity(self.genus);
        for &(g, e) in &self.runs {
            if g.is_y() {
                out.push(g, e);
            }
        }
        out
    }

    /// Exponent sums indexed by generator code.
    pub fn abelianize(&self) -> Vec<i64> {
        let mut v = vec![0i64; 2 * self.genus];
        for &(g, e) in &self.runs {
            v[g.code()] += e as i64;
        }
        v
    }

    pub fn only_y(&self) -> bool {
        self.runs.iter().all(|(g, _)| g.is_y())
    }

    pub fn with_genus(&self, genus: usize) -> Result<GroupWord, WordError> {
        for &(g, _) in &self.runs {
            check_index(genus, g)?;
        }
        Ok(GroupWord { genus, runs: self.runs.clone() })
    }

    pub fn parse(s: &str, genus: usize) -> Result<GroupWord, WordError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "e" {
                continue;
            }
            let (sym, exp) = match tok.split_once('^') {
                Some((sym, exp)) => {
                    let exp: i32 = exp
                        .parse()
                        .map_err(|_| WordError::Parse(format!("bad exponent in {tok:?}")))?;
                    (sym, exp)
                }
                None => (tok, 1),
            };
            letters.push((sym.parse::<Generator>()?, exp));
        }
        reduce(genus, letters)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for (g, e) in self.letters() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if e < 0 {
                write!(f, "{g}^-1")?;
            } else {
                write!(f, "{g}")?;
            }
        }
        Ok(())
    }
}

fn check_index(genus: usize, g: Generator) -> Result<(), WordError> {
    if g.index() > genus {
        Err(WordError::IndexOutOfRange(g.to_string(), genus))
    } else {
        Ok(())
    }
}

/// Freely reduces a sequence of (generator, exponent) letters.
pub fn reduce(
    genus: usize,
    letters: impl IntoIterator<Item = (Generator, i32)>,
) -> Result<GroupWord, WordError> {
    let mut out = GroupWord::identity(genus);
    for (g, e) in letters {
        check_index(genus, g)?;
        out.push(g, e);
    }
    Ok(out)
}

/// `δ = [x1,y1]···[xg,yg]`.
pub fn boundary_word(genus: usize) -> GroupWord {
    assert!(genus >= 1);
    let mut out = GroupWord::identity(genus);
    for i in 1..=genus {
        for (g, e) in [(Generator::x(i), 1), (Generator::y(i), 1), (Generator::x(i), -1), (Generator::y(i), -1)] {
            out.push(g, e);
        }
    }
    out
}

/// An endomorphism of the free group, given by the images of the
/// generators, optionally with the images of its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeEndo {
    genus: usize,
    images: Vec<GroupWord>,
    inverse_images: Option<Vec<GroupWord>>,
}

impl FreeEndo {
    /// `images` and `inverse_images` are indexed by generator code. A
    /// supplied inverse is checked by composing both ways.
    pub fn new(
        genus: usize,
        images: Vec<GroupWord>,
        inverse_images: Option<Vec<GroupWord>>,
    ) -> Result<Self, WordError> {
        let check = |ws: &[GroupWord]| -> Result<(), WordError> {
            if ws.len() != 2 * genus {
                return Err(WordError::Endo(format!("expected {} images, got {}", 2 * genus, ws.len())));
            }
            for w in ws {
                if w.genus != genus {
                    return Err(WordError::GenusMismatch { expected: genus, found: w.genus });
                }
            }
            Ok(())
        };
        check(&images)?;
        if let Some(inv) = &inverse_images {
            check(inv)?;
        }
        let endo = FreeEndo { genus, images, inverse_images };
        endo.verify_inverse()?;
        Ok(endo)
    }

    /// Builds an endomorphism from a partial map; unspecified generators
    /// are fixed.
    pub fn from_map(
        genus: usize,
        images: &BTreeMap<Generator, GroupWord>,
        inverse_images: Option<&BTreeMap<Generator, GroupWord>>,
    ) -> Result<Self, WordError> {
        let fill = |m: &BTreeMap<Generator, GroupWord>| -> Result<Vec<GroupWord>, WordError> {
            for g in m.keys() {
                check_index(genus, *g)?;
            }
            Generator::all(genus)
                .map(|g| match m.get(&g) {
                    Some(w) => w.with_genus(genus),
                    None => GroupWord::generator(genus, g),
                })
                .collect()
        };
        let images = fill(images)?;
        let inverse = inverse_images.map(fill).transpose()?;
        FreeEndo::new(genus, images, inverse)
    }

    pub fn identity(genus: usize) -> Self {
        let images: Vec<_> = Generator::all(genus)
            .map(|g| GroupWord { genus, runs: vec![(g, 1)] })
            .collect();
        FreeEndo { genus, images: images.clone(), inverse_images: Some(images) }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn image(&self, g: Generator) -> &GroupWord {
        &self.images[g.code()]
    }

    pub fn images(&self) -> &[GroupWord] {
        &self.images
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn inverse(&self) -> Option<FreeEndo> {
        self.inverse_images.as_ref().map(|inv| FreeEndo {
            genus: self.genus,
            images: inv.clone(),
            inverse_images: Some(self.images.clone()),
        })
    }

    pub fn apply(&self, w: &GroupWord) -> Result<GroupWord, WordError> {
        if w.genus != self.genus {
            return Err(WordError::GenusMismatch { expected: self.genus, found: w.genus });
        }
        Ok(substitute(&self.images, w))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FreeEndo) -> Result<FreeEndo, WordError> {
        if other.genus != self.genus {
            return Err(WordError::GenusMismatch { expected: self.genus, found: other.genus });
        }
        let images = other.images.iter().map(|w| substitute(&self.images, w)).collect();
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(si), Some(oi)) => Some(si.iter().map(|w| substitute(oi, w)).collect()),
            _ => None,
        };
        Ok(FreeEndo { genus: self.genus, images, inverse_images })
    }

    /// `self ∘ other ∘ self⁻¹ ∘ other⁻¹`.
    pub fn commutator(&self, other: &FreeEndo) -> Option<FreeEndo> {
        let si = self.inverse()?;
        let oi = other.inverse()?;
        let c = self.compose(other).ok()?.compose(&si).ok()?.compose(&oi).ok()?;
        Some(c)
    }

    /// `self ∘ other ∘ self⁻¹`.
    pub fn conjugate(&self, other: &FreeEndo) -> Option<FreeEndo> {
        let si = self.inverse()?;
        self.compose(other).ok()?.compose(&si).ok()
    }

    pub fn fixes_boundary(&self) -> bool {
        let delta = boundary_word(self.genus);
        substitute(&self.images, &delta) == delta
    }

    fn verify_inverse(&self) -> Result<(), WordError> {
        let Some(inv) = &self.inverse_images else { return Ok(()) };
        for g in Generator::all(self.genus) {
            let single = GroupWord { genus: self.genus, runs: vec![(g, 1)] };
            if substitute(&self.images, &inv[g.code()]) != single
                || substitute(inv, &self.images[g.code()]) != single
            {
                return Err(WordError::BadInverse(g));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map = |ws: &[GroupWord]| {
            let m: serde_json::Map<String, serde_json::Value> = Generator::all(self.genus)
                .map(|g| (g.to_string(), serde_json::Value::String(ws[g.code()].to_string())))
                .collect();
            serde_json::Value::Object(m)
        };
        let mut obj = serde_json::Map::new();
        obj.insert("g".into(), self.genus.into());
        obj.insert("images".into(), map(&self.images));
        if let Some(inv) = &self.inverse_images {
            obj.insert("inverse_images".into(), map(inv));
        }
        serde_json::Value::Object(obj)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, WordError> {
        #[derive(Deserialize)]
        struct Raw {
            g: usize,
            images: BTreeMap<String, String>,
            inverse_images: Option<BTreeMap<String, String>>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| WordError::Endo(e.to_string()))?;
        if raw.g == 0 {
            return Err(WordError::Endo("genus must be positive".into()));
        }
        let parse_map = |m: &BTreeMap<String, String>| -> Result<BTreeMap<Generator, GroupWord>, WordError> {
            m.iter()
                .map(|(k, v)| Ok((k.parse::<Generator>()?, GroupWord::parse(v, raw.g)?)))
                .collect()
        };
        let images = parse_map(&raw.images)?;
        let inverse = raw.inverse_images.as_ref().map(parse_map).transpose()?;
        FreeEndo::from_map(raw.g, &images, inverse.as_ref())
    }
}

fn substitute(images: &[GroupWord], w: &GroupWord) -> GroupWord {
    let mut out = GroupWord::identity(w.genus);
    for &(g, e) in &w.runs {
        let img = &images[g.code()];
        if e > 0 {
            for _ in 0..e {
                for &(h, f) in &img.runs {
                    out.push(h, f);
                }
            }
        } else {
            for _ in 0..-e {
                for &(h, f) in img.runs.iter().rev() {
                    out.push(h, -f);
                }
            }
        }
    }
    out
}

pub fn apply_endo(h: &FreeEndo, w: &GroupWord) -> Result<GroupWord, WordError> {
    h.apply(w)
}

pub fn fixes_boundary(h: &FreeEndo) -> bool {
    h.fixes_boundary()
}

/// Magnus expansion `x ↦ 1 + X` truncated at a fixed degree.
///
/// Each homogeneous part is stored densely, indexed by the base-`n`
/// reading of the word (`n` = alphabet size).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnusSeries {
    genus: usize,
    truncation: usize,
    parts: Vec<Vec<BigInt>>,
}

impl MagnusSeries {
    pub fn one(genus: usize, truncation: usize) -> Self {
        let n = 2 * genus;
        let parts = (0..=truncation)
            .map(|d| {
                let mut v = vec![BigInt::zero(); n.pow(d as u32)];
                if d == 0 {
                    v[0] = BigInt::one();
                }
                v
            })
            .collect();
        MagnusSeries { genus, truncation, parts }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn alphabet(&self) -> usize {
        2 * self.genus
    }

    /// Right multiplication by the series of `g^e`.
    fn mul_power(&mut self, g: Generator, e: i32) {
        let n = self.alphabet();
        let x = g.code();
        // (1+X)^e = Σ_j c_j X^j, with c_j = C(e, j) for e > 0 and
        // (-1)^j C(m+j-1, j) for e = -m.
        let mut coeffs = vec![BigInt::one()];
        for j in 1..=self.truncation {
            let prev = coeffs[j - 1].clone();
            let c = if e > 0 {
                prev * BigInt::from(e as i64 - j as i64 + 1) / BigInt::from(j as i64)
            } else {
                let m = -(e as i64);
                -prev * BigInt::from(m + j as i64 - 1) / BigInt::from(j as i64)
            };
            coeffs.push(c);
        }
        for d in (1..=self.truncation).rev() {
            for j in 1..=d {
                if coeffs[j].is_zero() {
                    continue;
                }
                // word u (degree d-j) followed by X^j
                let mut suffix = 0usize;
                for _ in 0..j {
                    suffix = suffix * n + x;
                }
                let shift = n.pow(j as u32);
                let (lower, upper) = self.parts.split_at_mut(d);
                let src = &lower[d - j];
                let dst = &mut upper[0];
                for (u, c) in src.iter().enumerate() {
                    if !c.is_zero() {
                        dst[u * shift + suffix] += c * &coeffs[j];
                    }
                }
            }
        }
    }

    pub fn mul(&self, other: &MagnusSeries) -> MagnusSeries {
        assert_eq!(self.genus, other.genus);
        let n = self.alphabet();
        let t = self.truncation.min(other.truncation);
        let mut out = MagnusSeries::one(self.genus, t);
        out.parts[0][0] = BigInt::zero();
        for d1 in 0..=t {
            for d2 in 0..=(t - d1) {
                let shift = n.pow(d2 as u32);
                for (u, a) in self.parts[d1].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (v, b) in other.parts[d2].iter().enumerate() {
                        if !b.is_zero() {
                            out.parts[d1 + d2][u * shift + v] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn coefficient(&self, word: &[Generator]) -> BigInt {
        if word.len() > self.truncation {
            return BigInt::zero();
        }
        let n = self.alphabet();
        let idx = word.iter().fold(0usize, |acc, g| acc * n + g.code());
        self.parts[word.len()][idx].clone()
    }

    /// The degree-`d` part as a tensor.
    pub fn homogeneous(&self, d: usize) -> TensorElement {
        let n = self.alphabet();
        let mut coeffs = BTreeMap::new();
        if d <= self.truncation {
            for (idx, c) in self.parts[d].iter().enumerate() {
                if !c.is_zero() {
                    coeffs.insert(decode_word(idx, d, n), c.clone());
                }
            }
        }
        TensorElement::from_coeffs(self.genus, d, coeffs)
    }

    /// Smallest positive degree carrying a nonzero coefficient.
    pub fn lowest_degree(&self) -> Option<usize> {
        (1..=self.truncation).find(|&d| self.parts[d].iter().any(|c| !c.is_zero()))
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.parts
            .iter()
            .flat_map(|p| p.iter())
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }
}

fn decode_word(mut idx: usize, d: usize, n: usize) -> Vec<Generator> {
    let mut w = vec![Generator::from_code(0); d];
    for slot in w.iter_mut().rev() {
        *slot = Generator::from_code(idx % n);
        idx /= n;
    }
    w
}

pub fn magnus(w: &GroupWord, truncation: usize) -> MagnusSeries {
    assert!(truncation >= 1);
    let mut s = MagnusSeries::one(w.genus, truncation);
    for &(g, e) in &w.runs {
        s.mul_power(g, e);
    }
    s
}

/// Position of a word in the lower central series, as detected by the
/// Magnus expansion truncated at `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LcsDegree {
    Identity,
    Exact(usize),
    AtLeast(usize),
}

impl LcsDegree {
    /// Whether the word lies in `F_q` (as far as the truncation can tell).
    pub fn at_least(self, q: usize) -> bool {
        match self {
            LcsDegree::Identity => true,
            LcsDegree::Exact(d) => d >= q,
            LcsDegree::AtLeast(d) => d >= q,
        }
    }
}

impl fmt::Display for LcsDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcsDegree::Identity => write!(f, "identity"),
            LcsDegree::Exact(d) => write!(f, "{d}"),
            LcsDegree::AtLeast(d) => write!(f, ">= {d}"),
        }
    }
}

pub fn lcs_degree(w: &GroupWord, truncation: usize) -> LcsDegree {
    if w.is_identity() {
        return LcsDegree::Identity;
    }
    match magnus(w, truncation).lowest_degree() {
        Some(d) => LcsDegree::Exact(d),
        None => LcsDegree::AtLeast(truncation + 1),
    }
}

/// Class of `w ∈ F_k` in `F_k / F_{k+1} ≅ L_k(H)`.
pub fn lcs_class(w: &GroupWord, k: usize) -> Result<LieElement, WordError> {
    assert!(k >= 1);
    if w.is_identity() {
        return Ok(LieElement::zero(w.genus, k));
    }
    let series = magnus(w, k);
    if let Some(d) = series.lowest_degree() {
        if d < k {
            return Err(WordError::NotInLcs { k, found: d });
        }
    }
    LieElement::from_tensor(&series.homogeneous(k)).map_err(|_| WordError::NonLieResidue(k))
}
