//! The symplectic module `H`, derivations `H ⊗ L_{k+1}(H) ≅ hom(H, L_{k+1})`,
//! the bracket map β and its kernel lattice `D_k`, the derivation bracket,
//! `Λ³H ≅ D_1`, the Morita trace and the Lagrangian projection.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use thiserror::Error;

use crate::json::{int_from_json, int_to_json};
use crate::lie::{lyndon_expansion, lyndon_words, LieElement, LieError, TensorElement, Word};
use crate::par;
use crate::word::{parse_symbol_string, symbol_string, Generator};
use crate::zlinalg::{kernel_basis, IntMatrix, LatticeBasis, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("element is not in D_1 (bracket map does not vanish)")]
    NotInD1,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("malformed derivation: {0}")]
    Parse(String),
}

/// `H_g` with its standard symplectic pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticModule {
    pub genus: usize,
}

impl SymplecticModule {
    pub fn new(genus: usize) -> Self {
        SymplecticModule { genus }
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn basis(&self) -> Vec<Generator> {
        Generator::all(self.genus).collect()
    }

    /// Gram matrix of the pairing in the alphabet order.
    pub fn pairing_matrix(&self) -> IntMatrix {
        let basis = self.basis();
        IntMatrix::from_i64(&basis.iter().map(|&a| basis.iter().map(|&b| pairing(a, b)).collect()).collect::<Vec<_>>())
    }
}

/// `⟨x_i, y_i⟩ = 1 = −⟨y_i, x_i⟩`, all other pairings zero.
pub fn pairing(a: Generator, b: Generator) -> i64 {
    if a.index() != b.index() || a == b {
        0
    } else if a.is_x() {
        1
    } else {
        -1
    }
}

/// An element of `H ⊗ L_{k+1}(H)`, keyed by left factor and Lyndon word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationElement {
    genus: usize,
    degree: usize,
    coeffs: BTreeMap<(Generator, Word), BigInt>,
}

fn add_into(map: &mut BTreeMap<(Generator, Word), BigInt>, key: (Generator, Word), c: BigInt) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
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

impl DerivationElement {
    pub fn zero(genus: usize, degree: usize) -> Self {
        DerivationElement { genus, degree, coeffs: BTreeMap::new() }
    }

    /// `a ⊗ λ`.
    pub fn term(a: Generator, lambda: &LieElement) -> Self {
        let coeffs = lambda.coeffs().iter().map(|(w, c)| ((a, w.clone()), c.clone())).collect();
        DerivationElement { genus: lambda.genus(), degree: lambda.degree() - 1, coeffs }
    }

    pub fn from_coeffs(
        genus: usize,
        degree: usize,
        coeffs: BTreeMap<(Generator, Word), BigInt>,
    ) -> Result<Self, DerivError> {
        let mut out = DerivationElement::zero(genus, degree);
        for ((a, w), c) in coeffs {
            if w.len() != degree + 1 {
                return Err(DerivError::DegreeMismatch { expected: degree + 1, found: w.len() });
            }
            if a.index() > genus || w.iter().any(|g| g.index() > genus) {
                return Err(DerivError::Parse(format!("symbol outside genus {genus}")));
            }
            if !crate::lie::is_lyndon(&w) {
                return Err(DerivError::Parse(format!("{} is not a Lyndon word", symbol_string(&w))));
            }
            add_into(&mut out.coeffs, (a, w), c);
        }
        Ok(out)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<(Generator, Word), BigInt> {
        &self.coeffs
    }

    pub fn coefficient(&self, a: Generator, w: &[Generator]) -> BigInt {
        self.coeffs.get(&(a, w.to_vec())).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_scaled(&mut self, other: &DerivationElement, c: &BigInt) {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        for (k, v) in &other.coeffs {
            add_into(&mut self.coeffs, k.clone(), v * c);
        }
    }

    pub fn add(&self, other: &DerivationElement) -> DerivationElement {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::one());
        out
    }

    pub fn sub(&self, other: &DerivationElement) -> DerivationElement {
        let mut out = self.clone();
        out.add_scaled(other, &-BigInt::one());
        out
    }

    pub fn neg(&self) -> DerivationElement {
        self.scale(&-BigInt::one())
    }

    pub fn scale(&self, c: &BigInt) -> DerivationElement {
        let mut out = DerivationElement::zero(self.genus, self.degree);
        out.add_scaled(self, c);
        out
    }

    /// Whether every symbol, left factor included, is a `y`.
    pub fn is_lagrangian(&self) -> bool {
        self.coeffs.keys().all(|(a, w)| a.is_y() && w.iter().all(|g| g.is_y()))
    }

    /// Transport by a linear map of `H` on both tensor factors; `images`
    /// are degree-1 tensors indexed by generator code.
    pub fn map_linear(&self, images: &[TensorElement]) -> DerivationElement {
        let mut out = DerivationElement::zero(self.genus, self.degree);
        for ((a, w), c) in &self.coeffs {
            let lam = LieElement::basis(self.genus, w.clone()).scale(c).map_linear(images);
            for (b, cb) in images[a.code()].coeffs() {
                out.add_scaled(&DerivationElement::term(b[0], &lam), cb);
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .coeffs
            .iter()
            .map(|((a, w), c)| (format!("{a}|{}", symbol_string(w)), int_to_json(c)))
            .collect();
        serde_json::json!({ "k": self.degree, "coeffs": coeffs })
    }

    pub fn from_json(v: &Value, genus: usize) -> Result<Self, DerivError> {
        let k = v["k"].as_u64().ok_or_else(|| DerivError::Parse("missing k".into()))? as usize;
        let obj = v["coeffs"].as_object().ok_or_else(|| DerivError::Parse("missing coeffs".into()))?;
        let mut coeffs = BTreeMap::new();
        for (key, c) in obj {
            let (a, w) = key.split_once('|').ok_or_else(|| DerivError::Parse(format!("bad key {key:?}")))?;
            let a: Generator = a.parse().map_err(|_| DerivError::Parse(format!("bad symbol {a:?}")))?;
            let w = parse_symbol_string(w).map_err(|e| DerivError::Parse(e.to_string()))?;
            let c = int_from_json(c).ok_or_else(|| DerivError::Parse(format!("bad coefficient for {key}")))?;
            coeffs.insert((a, w), c);
        }
        DerivationElement::from_coeffs(genus, k, coeffs)
    }
}

impl fmt::Display for DerivationElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, w), c)) in self.coeffs.iter().enumerate() {
            let sep = match (i, c.is_negative()) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            write!(f, "{sep}{}*{a}|[{}]", c.abs(), symbol_string(w))?;
        }
        Ok(())
    }
}

/// `Σ_i x_i ⊗ φ(y_i) − y_i ⊗ φ(x_i)`; `phi` is indexed by generator code.
pub fn dualize_hom(genus: usize, degree: usize, phi: &[LieElement]) -> Result<DerivationElement, DerivError> {
    if phi.len() != 2 * genus {
        return Err(DerivError::Parse(format!("expected {} images, got {}", 2 * genus, phi.len())));
    }
    let mut out = DerivationElement::zero(genus, degree);
    for i in 1..=genus {
        let (x, y) = (Generator::x(i), Generator::y(i));
        for (a, z, sign) in [(x, y, 1), (y, x, -1)] {
            let img = &phi[z.code()];
            if img.is_zero() {
                continue;
            }
            if img.degree() != degree + 1 {
                return Err(DerivError::DegreeMismatch { expected: degree + 1, found: img.degree() });
            }
            out.add_scaled(&DerivationElement::term(a, img), &BigInt::from(sign));
        }
    }
    Ok(out)
}

/// The homomorphism `z ↦ Σ ⟨a, z⟩ λ` of `d = Σ a ⊗ λ`, at one basis vector.
pub fn hom_of(d: &DerivationElement, z: Generator) -> LieElement {
    let mut coeffs = BTreeMap::new();
    for ((a, w), c) in &d.coeffs {
        let p = pairing(*a, z);
        if p != 0 {
            let e = coeffs.entry(w.clone()).or_insert_with(BigInt::zero);
            *e += c * p;
        }
    }
    coeffs.retain(|_, c: &mut BigInt| !c.is_zero());
    LieElement::from_coeffs(d.genus, d.degree + 1, coeffs).expect("keys are Lyndon words")
}

/// `hom_of(d, z)` for every generator, indexed by code.
pub fn hom_images(d: &DerivationElement) -> Vec<LieElement> {
    Generator::all(d.genus).map(|z| hom_of(d, z)).collect()
}

/// Applies the tensor derivation extending `phi` (images of generators,
/// indexed by code) to `t`.
pub fn derivation_on_tensor(phi: &[TensorElement], t: &TensorElement) -> TensorElement {
    let shift = phi.iter().find(|p| !p.is_zero()).map_or(0, |p| p.degree() - 1);
    let mut out = TensorElement::zero(t.genus(), t.degree() + shift);
    for (u, c) in t.coeffs() {
        for j in 0..u.len() {
            for (v, e) in phi[u[j].code()].coeffs() {
                let mut w = Vec::with_capacity(u.len() + v.len() - 1);
                w.extend_from_slice(&u[..j]);
                w.extend_from_slice(v);
                w.extend_from_slice(&u[j + 1..]);
                out.add_term(w, c * e);
            }
        }
    }
    out
}

/// The derivation of `L(H)` extending `hom_of(d)`, applied to `lambda`.
pub fn apply_derivation(d: &DerivationElement, lambda: &LieElement) -> LieElement {
    let phi: Vec<TensorElement> = hom_images(d).iter().map(|l| l.to_tensor()).collect();
    let t = derivation_on_tensor(&phi, &lambda.to_tensor());
    if t.is_zero() {
        return LieElement::zero(d.genus, lambda.degree() + d.degree);
    }
    LieElement::from_tensor(&t).expect("derivations preserve Lie elements")
}

/// `β(a ⊗ λ) = [a, λ]`.
pub fn bracket_map(d: &DerivationElement) -> LieElement {
    let mut t = TensorElement::zero(d.genus, d.degree + 2);
    for ((a, w), c) in &d.coeffs {
        for (u, e) in lyndon_expansion(w).iter() {
            let ce = c * BigInt::from(*e);
            let mut left = Vec::with_capacity(u.len() + 1);
            left.push(*a);
            left.extend_from_slice(u);
            t.add_term(left, ce.clone());
            let mut right = u.clone();
            right.push(*a);
            t.add_term(right, -ce);
        }
    }
    LieElement::from_tensor(&t).expect("brackets are Lie elements")
}

/// `ω = Σ_i [x_i, y_i]`.
pub fn omega(genus: usize) -> LieElement {
    let mut out = LieElement::zero(genus, 2);
    for i in 1..=genus {
        out.add_scaled(&LieElement::basis(genus, vec![Generator::x(i), Generator::y(i)]), &BigInt::one());
    }
    out
}

/// β computed as the derivation extension of `hom_of(d)` applied to ω.
pub fn bracket_map_via_omega(d: &DerivationElement) -> LieElement {
    apply_derivation(d, &omega(d.genus))
}

/// `[d1, d2](z) = d1(d2(z)) − d2(d1(z))`, dualized.
pub fn derivation_bracket(d1: &DerivationElement, d2: &DerivationElement) -> Result<DerivationElement, DerivError> {
    if d1.genus != d2.genus {
        return Err(DerivError::GenusMismatch(d1.genus, d2.genus));
    }
    let genus = d1.genus;
    let degree = d1.degree + d2.degree;
    let phi1: Vec<TensorElement> = hom_images(d1).iter().map(|l| l.to_tensor()).collect();
    let phi2: Vec<TensorElement> = hom_images(d2).iter().map(|l| l.to_tensor()).collect();
    let mut images = Vec::with_capacity(2 * genus);
    for z in Generator::all(genus) {
        let a = derivation_on_tensor(&phi1, &phi2[z.code()]);
        let b = derivation_on_tensor(&phi2, &phi1[z.code()]);
        let mut t = TensorElement::zero(genus, degree + 1);
        if !a.is_zero() {
            t.add_scaled(&a, &BigInt::one());
        }
        if !b.is_zero() {
            t.add_scaled(&b, &-BigInt::one());
        }
        images.push(LieElement::from_tensor(&t)?);
    }
    dualize_hom(genus, degree, &images)
}

/// Fixed coordinates on `H ⊗ L_{k+1}`: index `code(a)·W + position(w)`,
/// which follows the `(a, w)` order of [`DerivationElement`] keys.
#[derive(Debug)]
pub struct DerivationCoords {
    pub genus: usize,
    pub degree: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl DerivationCoords {
    pub fn new(genus: usize, degree: usize) -> Self {
        let words = lyndon_words(2 * genus, degree + 1);
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        DerivationCoords { genus, degree, words, index }
    }

    pub fn dim(&self) -> usize {
        2 * self.genus * self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn encode(&self, d: &DerivationElement) -> SparseVec {
        let w = self.words.len();
        SparseVec::from_entries(
            d.coeffs
                .iter()
                .map(|((a, word), c)| (a.code() * w + self.index[word], c.clone()))
                .collect(),
        )
    }

    pub fn decode(&self, v: &SparseVec) -> DerivationElement {
        let w = self.words.len();
        let coeffs = v
            .entries()
            .iter()
            .map(|(i, c)| ((Generator::from_code(i / w), self.words[i % w].clone()), c.clone()))
            .collect();
        DerivationElement { genus: self.genus, degree: self.degree, coeffs }
    }
}

/// Coordinates of `L_k` in the Lyndon basis.
pub fn lie_coords(words_index: &HashMap<Word, usize>, l: &LieElement) -> SparseVec {
    SparseVec::from_entries(l.coeffs().iter().map(|(w, c)| (words_index[w], c.clone())).collect())
}

/// Matrix of `β_k : H ⊗ L_{k+1} → L_{k+2}` (rows indexed by `L_{k+2}`).
pub fn beta_matrix(genus: usize, degree: usize) -> IntMatrix {
    let coords = DerivationCoords::new(genus, degree);
    let target = lyndon_words(2 * genus, degree + 2);
    let tindex: HashMap<Word, usize> = target.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let columns = par::map_range(coords.dim(), |col| {
        let d = coords.decode(&SparseVec::unit(col));
        lie_coords(&tindex, &bracket_map(&d))
    });
    IntMatrix::from_rows(target.len(), columns).transpose()
}

/// A basis of `D_k(H_g) = ker β_k` in Hermite normal form.
#[derive(Debug)]
pub struct DkBasis {
    pub genus: usize,
    pub degree: usize,
    pub coords: DerivationCoords,
    lattice: LatticeBasis,
}

impl DkBasis {
    pub fn compute(genus: usize, degree: usize) -> Self {
        let kernel = kernel_basis(&beta_matrix(genus, degree));
        DkBasis {
            genus,
            degree,
            coords: DerivationCoords::new(genus, degree),
            lattice: LatticeBasis::new(&kernel),
        }
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn lattice(&self) -> &LatticeBasis {
        &self.lattice
    }

    pub fn elements(&self) -> Vec<DerivationElement> {
        self.lattice.basis_rows().iter().map(|r| self.coords.decode(r)).collect()
    }

    pub fn element(&self, i: usize) -> DerivationElement {
        self.coords.decode(&self.lattice.basis_rows()[i])
    }

    /// Coordinates of `d` in the basis, or `None` when `d ∉ D_k`.
    pub fn coordinates(&self, d: &DerivationElement) -> Option<SparseVec> {
        self.lattice.coordinates(&self.coords.encode(d))
    }

    pub fn contains(&self, d: &DerivationElement) -> bool {
        self.coordinates(d).is_some()
    }
}

type DkSlot = Arc<OnceLock<Arc<DkBasis>>>;

/// Cached `D_k(H_g)`; each `(g, k)` is computed once.
pub fn dk_basis(genus: usize, degree: usize) -> Arc<DkBasis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), DkSlot>>> = OnceLock::new();
    let slot = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap()
        .entry((genus, degree))
        .or_default()
        .clone();
    slot.get_or_init(|| Arc::new(DkBasis::compute(genus, degree))).clone()
}

/// `rank D_k(H_g) = 2g·W(2g, k+1) − W(2g, k+2)`.
pub fn expected_dk_rank(genus: usize, degree: usize) -> u128 {
    let n = 2 * genus;
    n as u128 * crate::lie::witt_dimension(n, degree + 1) - crate::lie::witt_dimension(n, degree + 2)
}

/// An element of `Λ³H`, keyed by strictly increasing triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wedge3Element {
    pub genus: usize,
    pub coeffs: BTreeMap<[Generator; 3], BigInt>,
}

impl Wedge3Element {
    pub fn zero(genus: usize) -> Self {
        Wedge3Element { genus, coeffs: BTreeMap::new() }
    }

    /// `a ∧ b ∧ c` in any order, sign-normalized.
    pub fn basis(genus: usize, a: Generator, b: Generator, c: Generator) -> Self {
        let mut v = [a, b, c];
        let mut sign = 1;
        for i in 0..3 {
            for j in 0..2 - i {
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        let mut out = Wedge3Element::zero(genus);
        if v[0] != v[1] && v[1] != v[2] {
            out.coeffs.insert(v, BigInt::from(sign));
        }
        out
    }

    pub fn triples(genus: usize) -> Vec<[Generator; 3]> {
        let b: Vec<Generator> = Generator::all(genus).collect();
        let mut out = Vec::new();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                for k in j + 1..b.len() {
                    out.push([b[i], b[j], b[k]]);
                }
            }
        }
        out
    }
}

/// `a∧b∧c ↦ a⊗[b,c] + b⊗[c,a] + c⊗[a,b]`.
pub fn wedge3_to_d1(w: &Wedge3Element) -> DerivationElement {
    let g = w.genus;
    let mut out = DerivationElement::zero(g, 1);
    let gen = |s| LieElement::generator(g, s);
    for ([a, b, c], coef) in &w.coeffs {
        for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
            let br = gen(*q).bracket(&gen(*r)).unwrap();
            out.add_scaled(&DerivationElement::term(*p, &br), coef);
        }
    }
    out
}

/// Inverse of [`wedge3_to_d1`] on `D_1`.
pub fn d1_to_wedge3(d: &DerivationElement) -> Result<Wedge3Element, DerivError> {
    if d.degree != 1 {
        return Err(DerivError::DegreeMismatch { expected: 1, found: d.degree });
    }
    if !bracket_map(d).is_zero() {
        return Err(DerivError::NotInD1);
    }
    // a ⊗ [b,c] with a < b < c only arises from a ∧ b ∧ c
    let mut out = Wedge3Element::zero(d.genus);
    for ((a, w), c) in &d.coeffs {
        if *a < w[0] {
            out.coeffs.insert([*a, w[0], w[1]], c.clone());
        }
    }
    if wedge3_to_d1(&out) != *d {
        return Err(DerivError::NotInD1);
    }
    Ok(out)
}

/// An element of the symmetric power `S^k H`, keyed by sorted multisets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPowerElement {
    pub genus: usize,
    pub degree: usize,
    pub coeffs: BTreeMap<Vec<Generator>, BigInt>,
}

impl SymPowerElement {
    pub fn zero(genus: usize, degree: usize) -> Self {
        SymPowerElement { genus, degree, coeffs: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_monomial(&mut self, mut m: Vec<Generator>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        m.sort();
        let e = self.coeffs.entry(m.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    /// All sorted multisets of size `degree`, in lexicographic order.
    pub fn monomials(genus: usize, degree: usize) -> Vec<Vec<Generator>> {
        fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<Generator>, out: &mut Vec<Vec<Generator>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for c in start..n {
                cur.push(Generator::from_code(c));
                rec(n, c, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(2 * genus, 0, degree, &mut Vec::new(), &mut out);
        out
    }

    pub fn to_json(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .coeffs
            .iter()
            .map(|(m, c)| (symbol_string(m), int_to_json(c)))
            .collect();
        serde_json::json!({ "k": self.degree, "coeffs": coeffs })
    }
}

/// Contracts the input slot of `hom_of(d) : H → H^{⊗(k+1)}` against the
/// first tensor slot and symmetrizes the remaining `k` slots.
pub fn morita_trace(d: &DerivationElement) -> SymPowerElement {
    let mut out = SymPowerElement::zero(d.genus, d.degree);
    for ((a, w), c) in &d.coeffs {
        // only z = partner(a) pairs with a
        let z = a.partner();
        let p = pairing(*a, z);
        for (u, e) in lyndon_expansion(w).iter() {
            if u[0] == z {
                out.add_monomial(u[1..].to_vec(), c * BigInt::from(p * e));
            }
        }
    }
    out
}

/// Same contraction against the last tensor slot.
pub fn morita_trace_last_slot(d: &DerivationElement) -> SymPowerElement {
    let mut out = SymPowerElement::zero(d.genus, d.degree);
    for ((a, w), c) in &d.coeffs {
        let z = a.partner();
        let p = pairing(*a, z);
        for (u, e) in lyndon_expansion(w).iter() {
            if *u.last().unwrap() == z {
                out.add_monomial(u[..u.len() - 1].to_vec(), c * BigInt::from(p * e));
            }
        }
    }
    out
}

/// Rank over ℚ of the Morita trace on `D_k(H_g)`.
pub fn morita_rank(genus: usize, degree: usize) -> usize {
    let dk = dk_basis(genus, degree);
    let monos = SymPowerElement::monomials(genus, degree);
    let index: HashMap<&Vec<Generator>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let rows = par::map(&dk.elements(), |d| {
        let t = morita_trace(d);
        SparseVec::from_entries(t.coeffs.iter().map(|(m, c)| (index[m], c.clone())).collect())
    });
    crate::zlinalg::rank(&IntMatrix::from_rows(monos.len(), rows))
}

/// `x_i ↦ 0, y_i ↦ y_i` on both factors.
pub fn project_to_lagrangian(d: &DerivationElement) -> DerivationElement {
    let coeffs = d
        .coeffs
        .iter()
        .filter(|((a, w), _)| a.is_y() && w.iter().all(|g| g.is_y()))
        .map(|(k, c)| (k.clone(), c.clone()))
        .collect();
    DerivationElement { genus: d.genus, degree: d.degree, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Generator {
        Generator::x(i)
    }
    fn y(i: usize) -> Generator {
        Generator::y(i)
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pairing(x(1), y(1)), 1);
        assert_eq!(pairing(y(1), x(1)), -1);
        assert_eq!(pairing(x(1), y(2)), 0);
        assert_eq!(pairing(x(1), x(1)), 0);
    }

    #[test]
    fn dualize_single_term() {
        let xy = LieElement::basis(1, vec![x(1), y(1)]);
        let phi2 = LieElement::basis(1, vec![x(1), x(1), y(1)]);
        let mut phi = vec![LieElement::zero(1, 3), LieElement::zero(1, 3)];
        phi[y(1).code()] = phi2.clone();
        let d = dualize_hom(1, 2, &phi).unwrap();
        assert_eq!(d, DerivationElement::term(x(1), &phi2));
        assert_eq!(hom_of(&d, y(1)), phi2);
        assert!(hom_of(&d, x(1)).is_zero());
        assert!(dualize_hom(1, 1, &[xy.clone(), xy]).is_ok());
    }

    #[test]
    fn beta_of_simple_terms() {
        let xy = LieElement::basis(1, vec![x(1), y(1)]);
        let d = DerivationElement::term(x(1), &xy);
        let expected = LieElement::generator(1, x(1)).bracket(&xy).unwrap();
        assert_eq!(bracket_map(&d), expected);
        assert_eq!(bracket_map_via_omega(&d), bracket_map(&d));
    }

    #[test]
    fn small_dk_ranks() {
        assert_eq!(dk_basis(1, 1).rank(), 0);
        assert_eq!(dk_basis(2, 1).rank(), 4);
        assert_eq!(expected_dk_rank(2, 1), 4);
        assert_eq!(expected_dk_rank(3, 1), 20);
        assert_eq!(expected_dk_rank(2, 2), 20);
        assert_eq!(expected_dk_rank(2, 3), 36);
    }

    #[test]
    fn wedge_example() {
        let w = Wedge3Element::basis(2, x(1), y(1), x(2));
        let d = wedge3_to_d1(&w);
        assert!(bracket_map(&d).is_zero());
        assert_eq!(d1_to_wedge3(&d).unwrap(), w);
        assert_eq!(Wedge3Element::basis(2, y(1), x(1), x(2)).coeffs.values().next(), Some(&BigInt::from(-1)));
        let bad = DerivationElement::term(x(1), &LieElement::basis(2, vec![x(1), y(1)]));
        assert_eq!(d1_to_wedge3(&bad), Err(DerivError::NotInD1));
    }

    #[test]
    fn projection_examples() {
        let d = DerivationElement::term(x(1), &LieElement::basis(3, vec![y(1), y(2)]));
        assert!(project_to_lagrangian(&d).is_zero());
        let e = DerivationElement::term(y(1), &LieElement::basis(3, vec![y(2), y(3)]));
        assert_eq!(project_to_lagrangian(&e), e);
    }

    #[test]
    fn json_round_trip() {
        let d = wedge3_to_d1(&Wedge3Element::basis(2, x(1), y(1), x(2)));
        let v = d.to_json();
        assert_eq!(DerivationElement::from_json(&v, 2).unwrap(), d);
        assert!(v["coeffs"].get("x1|y1x2").is_some());
    }

    #[test]
    fn trace_of_zero() {
        assert!(morita_trace(&DerivationElement::zero(2, 2)).is_zero());
        assert_eq!(SymPowerElement::monomials(3, 3).len(), 56);
    }
}
