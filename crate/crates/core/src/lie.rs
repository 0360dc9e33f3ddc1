//! The free Lie algebra over ℤ on the symplectic alphabet, in the Lyndon
//! basis, together with its embedding in the tensor algebra.
//!
//! A Lyndon word's standard bracketing expands to the word itself plus
//! lexicographically larger words, so converting a Lie tensor back into
//! the basis is a triangular elimination with unit pivots.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::json::{int_from_json, int_to_json};
use crate::word::{parse_symbol_string, symbol_string, Generator};

pub type Word = Vec<Generator>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("tensor is not a Lie element (residue at {0})")]
    NonLie(String),
    #[error("alphabet mismatch: genus {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("malformed Lie element: {0}")]
    Parse(String),
}

/// Standard bracketing of a Lyndon word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bracketing {
    Letter(Generator),
    Bracket(Box<Bracketing>, Box<Bracketing>),
}

impl fmt::Display for Bracketing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracketing::Letter(g) => write!(f, "{g}"),
            Bracketing::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LyndonBasisWord {
    pub word: Word,
    pub bracketing: Bracketing,
}

impl LyndonBasisWord {
    pub fn degree(&self) -> usize {
        self.word.len()
    }
}

/// True when `w` is strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &[Generator]) -> bool {
    if w.is_empty() {
        return false;
    }
    // strictly smaller than every proper suffix is equivalent
    (1..w.len()).all(|i| w < &w[i..])
}

/// `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[Generator]) -> (&[Generator], &[Generator]) {
    assert!(w.len() >= 2);
    let i = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("last letter is Lyndon");
    (&w[..i], &w[i..])
}

pub fn standard_bracketing(w: &[Generator]) -> Bracketing {
    if w.len() == 1 {
        return Bracketing::Letter(w[0]);
    }
    let (u, v) = standard_factorization(w);
    Bracketing::Bracket(Box::new(standard_bracketing(u)), Box::new(standard_bracketing(v)))
}

/// All Lyndon words of length exactly `k` over the first `n` symbols, in
/// lexicographic order (Duval's generation).
pub fn lyndon_words(n: usize, k: usize) -> Vec<Word> {
    assert!(n >= 1 && k >= 1);
    let mut out = Vec::new();
    let mut w: Vec<usize> = vec![0];
    loop {
        if w.len() == k {
            out.push(w.iter().map(|&c| Generator::from_code(c)).collect());
        }
        // extend periodically to length k
        let m = w.len();
        while w.len() < k {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == n - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

pub fn lyndon_basis(n: usize, k: usize) -> Vec<LyndonBasisWord> {
    lyndon_words(n, k)
        .into_iter()
        .map(|word| {
            let bracketing = standard_bracketing(&word);
            LyndonBasisWord { word, bracketing }
        })
        .collect()
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Necklace formula `(1/k) Σ_{d|k} μ(d) n^{k/d}`.
pub fn witt_dimension(n: usize, k: usize) -> u128 {
    assert!(n >= 1 && k >= 1);
    let mut total: i128 = 0;
    for d in 1..=k {
        if k.is_multiple_of(d) {
            total += mobius(d) as i128 * (n as i128).pow((k / d) as u32);
        }
    }
    (total / k as i128) as u128
}

type Expansion = Arc<Vec<(Word, i64)>>;

fn expansion_cache() -> &'static RwLock<HashMap<Word, Expansion>> {
    static CACHE: OnceLock<RwLock<HashMap<Word, Expansion>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Tensor expansion of the standard bracketing of a Lyndon word, sorted
/// by word; the first entry is the word itself with coefficient 1.
///
/// Coefficients are bounded by `2^(k-1)` so they fit an `i64` for every
/// degree this crate handles.
pub fn lyndon_expansion(w: &[Generator]) -> Expansion {
    if let Some(e) = expansion_cache().read().unwrap().get(w) {
        return e.clone();
    }
    let exp: Vec<(Word, i64)> = if w.len() == 1 {
        vec![(w.to_vec(), 1)]
    } else {
        let (u, v) = standard_factorization(w);
        let eu = lyndon_expansion(u);
        let ev = lyndon_expansion(v);
        let mut acc: BTreeMap<Word, i64> = BTreeMap::new();
        for (a, ca) in eu.iter() {
            for (b, cb) in ev.iter() {
                let mut ab = a.clone();
                ab.extend_from_slice(b);
                *acc.entry(ab).or_insert(0) += ca * cb;
                let mut ba = b.clone();
                ba.extend_from_slice(a);
                *acc.entry(ba).or_insert(0) -= ca * cb;
            }
        }
        acc.into_iter().filter(|(_, c)| *c != 0).collect()
    };
    debug_assert!(exp[0].0 == w && exp[0].1 == 1);
    let exp = Arc::new(exp);
    expansion_cache().write().unwrap().insert(w.to_vec(), exp.clone());
    exp
}

fn add_into(map: &mut BTreeMap<Word, BigInt>, key: Word, c: BigInt) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// A homogeneous element of the tensor algebra on `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    genus: usize,
    degree: usize,
    coeffs: BTreeMap<Word, BigInt>,
}

impl TensorElement {
    pub fn zero(genus: usize, degree: usize) -> Self {
        TensorElement { genus, degree, coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs(genus: usize, degree: usize, coeffs: BTreeMap<Word, BigInt>) -> Self {
        debug_assert!(coeffs.keys().all(|w| w.len() == degree));
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        TensorElement { genus, degree, coeffs }
    }

    pub fn letter(genus: usize, g: Generator) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![g], BigInt::one());
        TensorElement { genus, degree: 1, coeffs }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, BigInt> {
        &self.coeffs
    }

    pub fn coefficient(&self, w: &[Generator]) -> BigInt {
        self.coeffs.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: BigInt) {
        debug_assert_eq!(w.len(), self.degree);
        add_into(&mut self.coeffs, w, c);
    }

    pub fn add_scaled(&mut self, other: &TensorElement, c: &BigInt) {
        assert_eq!(self.degree, other.degree);
        for (w, d) in &other.coeffs {
            add_into(&mut self.coeffs, w.clone(), d * c);
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::one());
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::from(-1));
        out
    }

    pub fn scale(&self, c: &BigInt) -> TensorElement {
        let mut out = TensorElement::zero(self.genus, self.degree);
        out.add_scaled(self, c);
        out
    }

    /// Concatenation product.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero(self.genus, self.degree + other.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let mut ab = a.clone();
                ab.extend_from_slice(b);
                add_into(&mut out.coeffs, ab, ca * cb);
            }
        }
        out
    }

    pub fn commutator(&self, other: &TensorElement) -> TensorElement {
        self.mul(other).sub(&other.mul(self))
    }
}

/// A homogeneous element of `L_k(H)` in the Lyndon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieElement {
    genus: usize,
    degree: usize,
    coeffs: BTreeMap<Word, BigInt>,
}

impl LieElement {
    pub fn zero(genus: usize, degree: usize) -> Self {
        LieElement { genus, degree, coeffs: BTreeMap::new() }
    }

    pub fn generator(genus: usize, g: Generator) -> Self {
        Self::basis(genus, vec![g])
    }

    /// The basis element for a Lyndon word.
    pub fn basis(genus: usize, word: Word) -> Self {
        assert!(is_lyndon(&word), "{} is not a Lyndon word", symbol_string(&word));
        let degree = word.len();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(word, BigInt::one());
        LieElement { genus, degree, coeffs }
    }

    /// Builds an element from basis coordinates; keys must be Lyndon words
    /// of a common degree.
    pub fn from_coeffs(genus: usize, degree: usize, coeffs: BTreeMap<Word, BigInt>) -> Result<Self, LieError> {
        for w in coeffs.keys() {
            if w.len() != degree {
                return Err(LieError::DegreeMismatch { expected: degree, found: w.len() });
            }
            if !is_lyndon(w) {
                return Err(LieError::Parse(format!("{} is not a Lyndon word", symbol_string(w))));
            }
            if w.iter().any(|g| g.index() > genus) {
                return Err(LieError::Parse(format!("{} exceeds genus {genus}", symbol_string(w))));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(LieElement { genus, degree, coeffs })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, BigInt> {
        &self.coeffs
    }

    pub fn coefficient(&self, w: &[Generator]) -> BigInt {
        self.coeffs.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_scaled(&mut self, other: &LieElement, c: &BigInt) {
        assert_eq!(self.degree, other.degree);
        for (w, d) in &other.coeffs {
            add_into(&mut self.coeffs, w.clone(), d * c);
        }
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::one());
        out
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::from(-1));
        out
    }

    pub fn neg(&self) -> LieElement {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, c: &BigInt) -> LieElement {
        let mut out = LieElement::zero(self.genus, self.degree);
        out.add_scaled(self, c);
        out
    }

    pub fn to_tensor(&self) -> TensorElement {
        let mut out = TensorElement::zero(self.genus, self.degree);
        for (w, c) in &self.coeffs {
            for (u, e) in lyndon_expansion(w).iter() {
                add_into(&mut out.coeffs, u.clone(), c * BigInt::from(*e));
            }
        }
        out
    }

    /// Inverse of [`to_tensor`](Self::to_tensor) on its image.
    pub fn from_tensor(t: &TensorElement) -> Result<LieElement, LieError> {
        let mut work = t.coeffs.clone();
        let mut out = BTreeMap::new();
        while let Some((w, c)) = work.pop_first() {
            if !is_lyndon(&w) {
                return Err(LieError::NonLie(symbol_string(&w)));
            }
            for (u, e) in lyndon_expansion(&w).iter().skip(1) {
                add_into(&mut work, u.clone(), -&c * BigInt::from(*e));
            }
            out.insert(w, c);
        }
        Ok(LieElement { genus: t.genus, degree: t.degree, coeffs: out })
    }

    pub fn bracket(&self, other: &LieElement) -> Result<LieElement, LieError> {
        if self.genus != other.genus {
            return Err(LieError::AlphabetMismatch(self.genus, other.genus));
        }
        let t = self.to_tensor().commutator(&other.to_tensor());
        Ok(LieElement::from_tensor(&t).expect("commutator of Lie elements is Lie"))
    }

    /// The Lie map sending kept generators to themselves and the others to
    /// zero. A Lyndon bracketing containing a dropped letter vanishes, and
    /// one without is still a basis element, so this is a filter.
    pub fn project_alphabet(&self, keep: impl Fn(Generator) -> bool) -> LieElement {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(w, _)| w.iter().all(|&g| keep(g)))
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        LieElement { genus: self.genus, degree: self.degree, coeffs }
    }

    /// Image under the Lie algebra map induced by a linear map on `H`,
    /// given as images of the generators (indexed by code).
    pub fn map_linear(&self, images: &[TensorElement]) -> LieElement {
        let t = self.to_tensor();
        let mut out = TensorElement::zero(self.genus, self.degree);
        for (w, c) in t.coeffs() {
            let mut prod = TensorElement::from_coeffs(self.genus, 0, BTreeMap::from([(Vec::new(), c.clone())]));
            for g in w {
                prod = prod.mul(&images[g.code()]);
            }
            out.add_scaled(&prod, &BigInt::one());
        }
        LieElement::from_tensor(&out).expect("linear substitution preserves Lie elements")
    }

    pub fn to_json(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .coeffs
            .iter()
            .map(|(w, c)| (symbol_string(w), int_to_json(c)))
            .collect();
        serde_json::json!({ "k": self.degree, "coeffs": coeffs })
    }

    pub fn from_json(v: &Value, genus: usize) -> Result<Self, LieError> {
        let k = v["k"].as_u64().ok_or_else(|| LieError::Parse("missing k".into()))? as usize;
        let obj = v["coeffs"].as_object().ok_or_else(|| LieError::Parse("missing coeffs".into()))?;
        let mut coeffs = BTreeMap::new();
        for (key, c) in obj {
            let w = parse_symbol_string(key).map_err(|e| LieError::Parse(e.to_string()))?;
            let c = int_from_json(c).ok_or_else(|| LieError::Parse(format!("bad coefficient for {key}")))?;
            coeffs.insert(w, c);
        }
        LieElement::from_coeffs(genus, k, coeffs)
    }

    /// Parses the text form `c*[w] + c*[w] ...`.
    pub fn parse(s: &str, genus: usize) -> Result<Self, LieError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Err(LieError::Parse("degree of 0 is ambiguous".into()));
        }
        let mut coeffs = BTreeMap::new();
        let mut degree = None;
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let open = body.find('[').ok_or_else(|| LieError::Parse(s.clone()))?;
            let close = body.find(']').ok_or_else(|| LieError::Parse(s.clone()))?;
            let num = body[..open].trim_end_matches('*');
            let c: BigInt = if num.is_empty() {
                BigInt::one()
            } else {
                num.parse().map_err(|_| LieError::Parse(format!("bad coefficient {num:?}")))?
            };
            let w = parse_symbol_string(&body[open + 1..close]).map_err(|e| LieError::Parse(e.to_string()))?;
            if *degree.get_or_insert(w.len()) != w.len() {
                return Err(LieError::DegreeMismatch { expected: degree.unwrap(), found: w.len() });
            }
            add_into(&mut coeffs, w, c * sign);
            rest = &body[close + 1..];
        }
        LieElement::from_coeffs(genus, degree.unwrap_or(1), coeffs)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.coeffs.iter().enumerate() {
            let sep = match (i, c.is_negative()) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            write!(f, "{sep}{}*[{}]", c.abs(), symbol_string(w))?;
        }
        Ok(())
    }
}

/// Lie element of a bracket expression given as a tree of generators.
pub fn bracketing_tensor(genus: usize, b: &Bracketing) -> TensorElement {
    match b {
        Bracketing::Letter(g) => TensorElement::letter(genus, *g),
        Bracketing::Bracket(l, r) => bracketing_tensor(genus, l).commutator(&bracketing_tensor(genus, r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(code: usize) -> Generator {
        Generator::from_code(code)
    }

    #[test]
    fn small_lyndon_bases() {
        assert_eq!(lyndon_words(2, 1), vec![vec![g(0)], vec![g(1)]]);
        assert_eq!(lyndon_words(2, 2), vec![vec![g(0), g(1)]]);
        assert_eq!(lyndon_words(2, 3), vec![vec![g(0), g(0), g(1)], vec![g(0), g(1), g(1)]]);
    }

    #[test]
    fn witt_values() {
        assert_eq!(witt_dimension(4, 2), 6);
        assert_eq!(witt_dimension(4, 3), 20);
        assert_eq!(witt_dimension(2, 5), 6);
        assert_eq!(witt_dimension(6, 4), 315);
    }

    #[test]
    fn bracketing_of_xxy() {
        let b = standard_bracketing(&[g(0), g(0), g(1)]);
        assert_eq!(b.to_string(), "[x1,[x1,y1]]");
    }

    #[test]
    fn bracket_of_generators() {
        let x = LieElement::generator(1, Generator::x(1));
        let y = LieElement::generator(1, Generator::y(1));
        let xy = x.bracket(&y).unwrap();
        assert_eq!(xy, LieElement::basis(1, vec![g(0), g(1)]));
        assert_eq!(y.bracket(&x).unwrap(), xy.neg());
        let xxy = x.bracket(&xy).unwrap();
        assert_eq!(xxy, LieElement::basis(1, vec![g(0), g(0), g(1)]));
    }

    #[test]
    fn to_tensor_of_xy() {
        let t = LieElement::basis(1, vec![g(0), g(1)]).to_tensor();
        assert_eq!(t.coefficient(&[g(0), g(1)]), BigInt::one());
        assert_eq!(t.coefficient(&[g(1), g(0)]), BigInt::from(-1));
        assert_eq!(t.coeffs().len(), 2);
    }

    #[test]
    fn symmetric_tensor_is_not_lie() {
        let mut t = TensorElement::zero(1, 2);
        t.add_term(vec![g(0), g(1)], BigInt::one());
        t.add_term(vec![g(1), g(0)], BigInt::one());
        assert!(matches!(LieElement::from_tensor(&t), Err(LieError::NonLie(_))));
    }

    #[test]
    fn text_and_json_forms() {
        let e = LieElement::parse("1*[x1y1] - 2*[x2y2]", 2).unwrap();
        assert_eq!(e.to_string(), "1*[x1y1] - 2*[x2y2]");
        assert_eq!(LieElement::from_json(&e.to_json(), 2).unwrap(), e);
        assert!(LieElement::parse("1*[y1x1]", 1).is_err());
    }

    #[test]
    fn projection_kills_x() {
        let xy = LieElement::basis(2, vec![g(0), g(1)]);
        assert!(xy.project_alphabet(|s| s.is_y()).is_zero());
        let yy = LieElement::basis(2, vec![g(1), g(3)]);
        assert_eq!(yy.project_alphabet(|s| s.is_y()), yy);
    }

    #[test]
    fn alphabet_mismatch() {
        let a = LieElement::generator(1, Generator::x(1));
        let b = LieElement::generator(2, Generator::x(1));
        assert_eq!(a.bracket(&b), Err(LieError::AlphabetMismatch(1, 2)));
    }
}
