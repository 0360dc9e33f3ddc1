//! Johnson and Lagrangian filtrations: membership tests, the homomorphisms
//! `J_k` and `J_k^L`, symplectic matrices, a catalog of explicit
//! automorphisms, and a search over their compositions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde_json::Value;
use thiserror::Error;

use crate::deriv::{bracket_map, dualize_hom, DerivError, DerivationElement};
use crate::lie::{LieElement, TensorElement};
use crate::par;
use crate::word::{boundary_word, lcs_class, lcs_degree, FreeEndo, Generator, GroupWord, LcsDegree, WordError};
use crate::zlinalg::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("endomorphism does not fix the boundary word")]
    BoundaryNotFixed,
    #[error("not a member of {} level {}", .0.filtration, .0.k)]
    NotMember(Box<MembershipReport>),
    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),
    #[error("inverse not available for {0:?}")]
    NoInverse(String),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Deriv(#[from] DerivError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filtration {
    Johnson,
    Lagrangian,
}

impl fmt::Display for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Filtration::Johnson => "J",
            Filtration::Lagrangian => "L",
        })
    }
}

/// Which defining condition a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `z⁻¹ h(z)` or the `x`-deleted image is not deep enough.
    LowerCentralSeries,
    /// `h(x_i) ≢ x_i` modulo `F_2`.
    Abelianization,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub generator: Generator,
    pub word: GroupWord,
    pub condition: Condition,
    pub degree: Option<LcsDegree>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub endo: Option<String>,
    pub filtration: Filtration,
    pub k: usize,
    pub member: bool,
    pub witness: Option<Witness>,
}

impl MembershipReport {
    pub fn named(mut self, name: &str) -> Self {
        self.endo = Some(name.to_string());
        self
    }

    pub fn to_json(&self) -> Value {
        let witness = match &self.witness {
            None => Value::Null,
            Some(w) => serde_json::json!({
                "generator": w.generator.to_string(),
                "word": w.word.to_string(),
                "condition": match w.condition {
                    Condition::LowerCentralSeries => "lower_central_series",
                    Condition::Abelianization => "abelianization",
                },
                "lcs_degree": w.degree.map(|d| d.to_string()),
            }),
        };
        serde_json::json!({
            "endo": self.endo,
            "filtration": self.filtration.to_string(),
            "k": self.k,
            "member": self.member,
            "witness": witness,
        })
    }
}

/// `h` acts trivially on `F / F_{k+1}`: `z⁻¹ h(z) ∈ F_{k+1}` for every
/// generator `z`.
pub fn johnson_membership(h: &FreeEndo, k: usize) -> Result<MembershipReport, FiltrationError> {
    if !h.fixes_boundary() {
        return Err(FiltrationError::BoundaryNotFixed);
    }
    let g = h.genus();
    let mut witness = None;
    for z in Generator::all(g) {
        let zw = GroupWord::generator(g, z)?;
        let w = zw.inverse().mul(h.image(z));
        let d = lcs_degree(&w, k + 1);
        if !d.at_least(k + 1) {
            witness = Some(Witness { generator: z, word: w, condition: Condition::LowerCentralSeries, degree: Some(d) });
            break;
        }
    }
    Ok(MembershipReport { endo: None, filtration: Filtration::Johnson, k, member: witness.is_none(), witness })
}

/// `J_k(h)`: the dualization of `z ↦ [z⁻¹ h(z)] ∈ L_{k+1}`.
pub fn johnson_hom(h: &FreeEndo, k: usize) -> Result<DerivationElement, FiltrationError> {
    let report = johnson_membership(h, k)?;
    if !report.member {
        return Err(FiltrationError::NotMember(Box::new(report)));
    }
    let g = h.genus();
    let mut phi = Vec::with_capacity(2 * g);
    for z in Generator::all(g) {
        let w = GroupWord::generator(g, z)?.inverse().mul(h.image(z));
        phi.push(lcs_class(&w, k + 1)?);
    }
    let d = dualize_hom(g, k, &phi)?;
    if !bracket_map(&d).is_zero() {
        return Err(FiltrationError::Internal(format!("J_{k} is not in the kernel of the bracket map")));
    }
    Ok(d)
}

/// Membership in the Lagrangian filtration: `h(x_i) ≡ x_i mod F_2` and the
/// image of `h(x_i)` with all `x` letters deleted lies in `F'_{k+1}`.
pub fn lagrangian_membership(h: &FreeEndo, k: usize) -> MembershipReport {
    let g = h.genus();
    let mut witness = None;
    for i in 1..=g {
        let x = Generator::x(i);
        let img = h.image(x);
        let mut expected = vec![0i64; 2 * g];
        expected[x.code()] = 1;
        if img.abelianize() != expected {
            witness = Some(Witness { generator: x, word: img.clone(), condition: Condition::Abelianization, degree: None });
            break;
        }
        let w = img.delete_x();
        let d = lcs_degree(&w, k + 1);
        if !d.at_least(k + 1) {
            witness = Some(Witness { generator: x, word: w, condition: Condition::LowerCentralSeries, degree: Some(d) });
            break;
        }
    }
    MembershipReport { endo: None, filtration: Filtration::Lagrangian, k, member: witness.is_none(), witness }
}

/// `J_k^L(h) = −Σ_i y_i ⊗ [i_* h(x_i)] ∈ H' ⊗ L_{k+1}(H')`.
pub fn lagrangian_hom(h: &FreeEndo, k: usize) -> Result<DerivationElement, FiltrationError> {
    let report = lagrangian_membership(h, k);
    if !report.member {
        return Err(FiltrationError::NotMember(Box::new(report)));
    }
    let g = h.genus();
    let mut out = DerivationElement::zero(g, k);
    for i in 1..=g {
        let class = lcs_class(&h.image(Generator::x(i)).delete_x(), k + 1)?;
        out.add_scaled(&DerivationElement::term(Generator::y(i), &class), &BigInt::from(-1));
    }
    if !bracket_map(&out).is_zero() {
        return Err(FiltrationError::Internal(format!("J_{k}^L is not in the kernel of the bracket map")));
    }
    Ok(out)
}

/// Position of a generator in the block basis `x_1..x_g, y_1..y_g`.
pub fn block_index(genus: usize, z: Generator) -> usize {
    if z.is_x() {
        z.index() - 1
    } else {
        genus + z.index() - 1
    }
}

/// Action on `H_1` in the block basis; column `j` is the image of basis
/// vector `j`.
pub fn sp_matrix(h: &FreeEndo) -> IntMatrix {
    let g = h.genus();
    let mut m = IntMatrix::zeros(2 * g, 2 * g);
    for z in Generator::all(g) {
        let ab = h.image(z).abelianize();
        for w in Generator::all(g) {
            let v = ab[w.code()];
            if v != 0 {
                m.set(block_index(g, w), block_index(g, z), BigInt::from(v));
            }
        }
    }
    m
}

/// `J = [[0, I], [−I, 0]]` in the block basis.
pub fn symplectic_form(genus: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(2 * genus, 2 * genus);
    for i in 0..genus {
        j.set(i, genus + i, BigInt::from(1));
        j.set(genus + i, i, BigInt::from(-1));
    }
    j
}

pub fn is_symplectic(m: &IntMatrix) -> bool {
    if m.rows() != m.cols() || !m.rows().is_multiple_of(2) {
        return false;
    }
    let j = symplectic_form(m.rows() / 2);
    m.transpose().mul(&j).and_then(|p| p.mul(m)).map(|p| p == j).unwrap_or(false)
}

/// `[[I, B], [0, I]]`.
pub fn triangular_matrix(b: &IntMatrix) -> IntMatrix {
    let g = b.rows();
    let mut m = IntMatrix::identity(2 * g);
    for i in 0..g {
        for j in 0..g {
            let v = b.get(i, j);
            if v != BigInt::from(0) {
                m.set(i, g + j, v);
            }
        }
    }
    m
}

/// Images of the generators under the induced map on `H`, as degree-1
/// tensors indexed by generator code.
pub fn linear_action(h: &FreeEndo) -> Vec<TensorElement> {
    let g = h.genus();
    Generator::all(g)
        .map(|z| {
            let ab = h.image(z).abelianize();
            let mut t = TensorElement::zero(g, 1);
            for w in Generator::all(g) {
                t.add_term(vec![w], BigInt::from(ab[w.code()]));
            }
            t
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub endo: FreeEndo,
    pub note: String,
    pub rel_boundary: bool,
    pub expected_matrix: Option<IntMatrix>,
}

fn words(g: usize, spec: &[(Generator, &str)]) -> BTreeMap<Generator, GroupWord> {
    spec.iter()
        .map(|(z, s)| (*z, GroupWord::parse(s, g).expect("catalog word")))
        .collect()
}

fn endo(g: usize, images: &[(Generator, &str)], inverse: &[(Generator, &str)]) -> FreeEndo {
    FreeEndo::from_map(g, &words(g, images), Some(&words(g, inverse))).expect("catalog inverse")
}

/// Relabels a two-handle word formula onto handles `(k, l)`.
fn on_handles(s: &str, k: usize, l: usize) -> String {
    s.split_whitespace()
        .map(|t| t.replace("x1", "X_").replace("y1", "Y_").replace("x2", &format!("x{l}")).replace("y2", &format!("y{l}")))
        .map(|t| t.replace("X_", &format!("x{k}")).replace("Y_", &format!("y{k}")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn two_handle_endo(g: usize, k: usize, l: usize, images: [&str; 4], inverse: [&str; 4]) -> FreeEndo {
    let gens = [Generator::x(k), Generator::y(k), Generator::x(l), Generator::y(l)];
    let im: Vec<(Generator, String)> = gens.iter().zip(images).map(|(z, s)| (*z, on_handles(s, k, l))).collect();
    let inv: Vec<(Generator, String)> = gens.iter().zip(inverse).map(|(z, s)| (*z, on_handles(s, k, l))).collect();
    let im: Vec<(Generator, &str)> = im.iter().map(|(z, s)| (*z, s.as_str())).collect();
    let inv: Vec<(Generator, &str)> = inv.iter().map(|(z, s)| (*z, s.as_str())).collect();
    endo(g, &im, &inv)
}

/// `r_g`: `x_i ↦ x_i y_i x_i⁻¹`, `y_i ↦ x_i⁻¹`.
pub fn r_g(g: usize) -> FreeEndo {
    let mut im = BTreeMap::new();
    let mut inv = BTreeMap::new();
    for i in 1..=g {
        im.insert(Generator::x(i), GroupWord::parse(&format!("x{i} y{i} x{i}^-1"), g).unwrap());
        im.insert(Generator::y(i), GroupWord::parse(&format!("x{i}^-1"), g).unwrap());
        inv.insert(Generator::x(i), GroupWord::parse(&format!("y{i}^-1"), g).unwrap());
        inv.insert(Generator::y(i), GroupWord::parse(&format!("y{i} x{i} y{i}^-1"), g).unwrap());
    }
    FreeEndo::from_map(g, &im, Some(&inv)).expect("r_g inverse")
}

/// Twist along the meridian `x_k`: `y_k ↦ y_k x_k^{±1}`.
pub fn meridian_twist(g: usize, k: usize, positive: bool) -> FreeEndo {
    let (e, f) = if positive { ("", "^-1") } else { ("^-1", "") };
    endo(
        g,
        &[(Generator::y(k), &format!("y{k} x{k}{e}"))],
        &[(Generator::y(k), &format!("y{k} x{k}{f}"))],
    )
}

/// Twist along the longitude `y_k`: `x_k ↦ x_k y_k^{±1}`.
pub fn longitude_twist(g: usize, k: usize, positive: bool) -> FreeEndo {
    let (e, f) = if positive { ("", "^-1") } else { ("^-1", "") };
    endo(
        g,
        &[(Generator::x(k), &format!("x{k} y{k}{e}"))],
        &[(Generator::x(k), &format!("x{k} y{k}{f}"))],
    )
}

/// Twist along the curve bounding handle `i`: conjugation of `x_i, y_i`
/// by `c_i = [x_i, y_i]`.
pub fn separating_twist(g: usize, i: usize) -> FreeEndo {
    let c = format!("x{i} y{i} x{i}^-1 y{i}^-1");
    let ci = format!("y{i} x{i} y{i}^-1 x{i}^-1");
    endo(
        g,
        &[(Generator::x(i), &format!("{c} x{i} {ci}")), (Generator::y(i), &format!("{c} y{i} {ci}"))],
        &[(Generator::x(i), &format!("{ci} x{i} {c}")), (Generator::y(i), &format!("{ci} y{i} {c}"))],
    )
}

/// Conjugation by the boundary word.
pub fn boundary_conjugation(g: usize) -> FreeEndo {
    let d = boundary_word(g);
    let di = d.inverse();
    let images = Generator::all(g)
        .map(|z| GroupWord::generator(g, z).unwrap().conjugate_by(&d))
        .collect();
    let inverse = Generator::all(g)
        .map(|z| GroupWord::generator(g, z).unwrap().conjugate_by(&di))
        .collect();
    FreeEndo::new(g, images, Some(inverse)).expect("boundary conjugation inverse")
}

/// Handle slide of handle `k` over handle `k + 1`, carrying the curve
/// `x_k` to one homologous to `x_k + x_{k+1}`.
fn handle_slide(g: usize, k: usize) -> FreeEndo {
    two_handle_endo(
        g,
        k,
        k + 1,
        ["x1 x2", "x2^-1 y1 x2", "x2^-1 y1 x2 y1^-1 x2", "y2 x2^-1 y1^-1 x2"],
        ["x1 y1^-1 x2^-1 y1", "y1^-1 x2 y1 x2^-1 y1", "y1^-1 x2 y1", "y2 y1"],
    )
}

/// A diffeomorphism of handle `l` carrying `x_l` to a curve homologous
/// to `−x_l`.
fn handle_rotation(g: usize, l: usize) -> FreeEndo {
    endo(
        g,
        &[
            (Generator::x(l), &format!("y{l} x{l}^-1 y{l}^-1")),
            (Generator::y(l), &format!("y{l} x{l} y{l}^-1 x{l}^-1 y{l}^-1")),
        ],
        &[
            (Generator::x(l), &format!("x{l} y{l} x{l}^-1 y{l}^-1 x{l}^-1")),
            (Generator::y(l), &format!("x{l} y{l}^-1 x{l}^-1")),
        ],
    )
}

/// Moves handle `i` to position `i + 1`, passing handle `i + 1` back
/// across it.
fn handle_swap(g: usize, i: usize) -> FreeEndo {
    let j = i + 1;
    let c = format!("x{j} y{j} x{j}^-1 y{j}^-1");
    let ci = format!("y{j} x{j} y{j}^-1 x{j}^-1");
    let d = format!("x{i} y{i} x{i}^-1 y{i}^-1");
    let di = format!("y{i} x{i} y{i}^-1 x{i}^-1");
    endo(
        g,
        &[
            (Generator::x(i), &format!("x{j}")),
            (Generator::y(i), &format!("y{j}")),
            (Generator::x(j), &format!("{ci} x{i} {c}")),
            (Generator::y(j), &format!("{ci} y{i} {c}")),
        ],
        &[
            (Generator::x(i), &format!("{d} x{j} {di}")),
            (Generator::y(i), &format!("{d} y{j} {di}")),
            (Generator::x(j), &format!("x{i}")),
            (Generator::y(j), &format!("y{i}")),
        ],
    )
}

fn conj(a: &FreeEndo, b: &FreeEndo) -> FreeEndo {
    a.conjugate(b).expect("catalog maps carry inverses")
}

/// Twist along a band sum of the meridians `x_k` and `x_l^{±1}` (`k < l`):
/// `b_kk = b_ll = −1`, `b_kl = b_lk = ∓1`.
pub fn meridian_sum_twist(g: usize, k: usize, l: usize, positive: bool) -> FreeEndo {
    assert!(k < l && l <= g);
    let adjacent_plus = conj(&handle_slide(g, k), &meridian_twist(g, k, false));
    let adjacent = if positive { adjacent_plus } else { conj(&handle_rotation(g, k + 1), &adjacent_plus) };
    let mut out = adjacent;
    for i in k + 1..l {
        out = conj(&handle_swap(g, i), &out);
    }
    out
}

fn meridian_sum_matrix(g: usize, k: usize, l: usize, positive: bool) -> IntMatrix {
    let mut b = IntMatrix::zeros(g, g);
    let off = BigInt::from(if positive { -1 } else { 1 });
    b.set(k - 1, k - 1, BigInt::from(-1));
    b.set(l - 1, l - 1, BigInt::from(-1));
    b.set(k - 1, l - 1, off.clone());
    b.set(l - 1, k - 1, off);
    triangular_matrix(&b)
}

/// Explicit automorphisms in genus `g`. Every entry carries a verified
/// inverse; entries marked `rel_boundary` fix the boundary word.
pub fn catalog(g: usize) -> Vec<CatalogEntry> {
    assert!(g >= 1);
    let mut out = Vec::new();
    let mut push = |name: String, endo: FreeEndo, note: &str, rel_boundary: bool, m: Option<IntMatrix>| {
        out.push(CatalogEntry { name, endo, note: note.to_string(), rel_boundary, expected_matrix: m });
    };
    push("identity".into(), FreeEndo::identity(g), "identity", true, Some(IntMatrix::identity(2 * g)));
    push("r_g".into(), r_g(g), "involution exchanging meridians and longitudes", false, None);
    for k in 1..=g {
        let mut b = IntMatrix::zeros(g, g);
        b.set(k - 1, k - 1, BigInt::from(1));
        push(format!("twist_x{k}"), meridian_twist(g, k, true), "twist along the meridian x_k", true, Some(triangular_matrix(&b)));
        b.set(k - 1, k - 1, BigInt::from(-1));
        push(format!("twist_x{k}_inv"), meridian_twist(g, k, false), "inverse twist along the meridian x_k", true, Some(triangular_matrix(&b)));
        push(format!("twist_y{k}"), longitude_twist(g, k, true), "twist along the longitude y_k", true, None);
        push(format!("twist_y{k}_inv"), longitude_twist(g, k, false), "inverse twist along the longitude y_k", true, None);
    }
    for k in 1..=g {
        for l in k + 1..=g {
            push(
                format!("meridian_sum_{k}_{l}_plus"),
                meridian_sum_twist(g, k, l, true),
                "twist along the band sum of x_k and x_l",
                true,
                Some(meridian_sum_matrix(g, k, l, true)),
            );
            push(
                format!("meridian_sum_{k}_{l}_minus"),
                meridian_sum_twist(g, k, l, false),
                "twist along the band sum of x_k and x_l^-1",
                true,
                Some(meridian_sum_matrix(g, k, l, false)),
            );
        }
    }
    for i in 1..=g {
        push(format!("sep_twist_{i}"), separating_twist(g, i), "twist along the curve bounding handle i", true, Some(IntMatrix::identity(2 * g)));
    }
    push("boundary_conj".into(), boundary_conjugation(g), "conjugation by the boundary word", true, Some(IntMatrix::identity(2 * g)));
    out
}

pub fn catalog_entry(g: usize, name: &str) -> Result<CatalogEntry, FiltrationError> {
    catalog(g)
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| FiltrationError::UnknownEntry(name.to_string()))
}

/// Resolves `a * b^-1 * c` (composition applied right to left, as
/// `a ∘ b⁻¹ ∘ c`) over catalog names.
pub fn resolve_expression(g: usize, expr: &str) -> Result<FreeEndo, FiltrationError> {
    let cat = catalog(g);
    let mut out = FreeEndo::identity(g);
    for factor in expr.split('*').map(str::trim) {
        let (name, inverse) = match factor.strip_suffix("^-1") {
            Some(n) => (n.trim(), true),
            None => (factor, false),
        };
        let entry = cat.iter().find(|e| e.name == name).ok_or_else(|| FiltrationError::UnknownEntry(name.into()))?;
        let e = if inverse {
            entry.endo.inverse().ok_or_else(|| FiltrationError::NoInverse(name.into()))?
        } else {
            entry.endo.clone()
        };
        out = out.compose(&e)?;
    }
    Ok(out)
}

/// A letter of the search alphabet: a catalog entry or its inverse.
#[derive(Clone, Debug)]
struct Letter {
    name: String,
    endo: FreeEndo,
    inverse_of: usize,
}

#[derive(Clone, Debug)]
pub struct DiscoverHit {
    pub word: Vec<String>,
    pub report: MembershipReport,
    pub value: DerivationElement,
}

impl DiscoverHit {
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "word": self.word.join(" * "),
            "membership": self.report.to_json(),
            "value": self.value.to_json(),
            "zero": self.value.is_zero(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct DiscoverResult {
    pub enumerated: usize,
    pub hits: Vec<DiscoverHit>,
}

/// Enumerates reduced compositions of the entries and their inverses up
/// to `max_length`, keeping those in the Lagrangian filtration at level
/// `k` together with their `J_k^L` values (zeros included).
pub fn discover(entries: &[CatalogEntry], max_length: usize, k: usize) -> Result<DiscoverResult, FiltrationError> {
    let mut letters = Vec::new();
    for e in entries {
        let inv = e.endo.inverse().ok_or_else(|| FiltrationError::NoInverse(e.name.clone()))?;
        let n = letters.len();
        letters.push(Letter { name: e.name.clone(), endo: e.endo.clone(), inverse_of: n + 1 });
        letters.push(Letter { name: format!("{}^-1", e.name), endo: inv, inverse_of: n });
    }
    let first: Vec<usize> = if max_length == 0 { Vec::new() } else { (0..letters.len()).collect() };
    let per_first = par::map(&first, |&a| {
        let mut found = Vec::new();
        let mut count = 0;
        let mut stack = vec![(vec![a], letters[a].endo.clone())];
        while let Some((word, h)) = stack.pop() {
            count += 1;
            let report = lagrangian_membership(&h, k);
            if report.member {
                let value = lagrangian_hom(&h, k)?;
                let names: Vec<String> = word.iter().map(|&i| letters[i].name.clone()).collect();
                found.push(DiscoverHit { word: names, report: report.named(&word_name(&letters, &word)), value });
            }
            if word.len() < max_length {
                let last = *word.last().unwrap();
                for b in (0..letters.len()).rev() {
                    if b == letters[last].inverse_of {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(b);
                    stack.push((w, h.compose(&letters[b].endo)?));
                }
            }
        }
        Ok::<_, FiltrationError>((count, found))
    });
    let mut result = DiscoverResult { enumerated: 0, hits: Vec::new() };
    for r in per_first {
        let (c, f) = r?;
        result.enumerated += c;
        result.hits.extend(f);
    }
    Ok(result)
}

fn word_name(letters: &[Letter], word: &[usize]) -> String {
    word.iter().map(|&i| letters[i].name.as_str()).collect::<Vec<_>>().join(" * ")
}

/// The bracket-map check for a Lagrangian value: `y`-only and in `ker β`.
pub fn in_lagrangian_kernel(d: &DerivationElement) -> bool {
    d.is_lagrangian() && bracket_map(d).is_zero()
}

/// `φ(z) = −[z̄, [x̄, ȳ]]`, the degree-3 class of `z⁻¹ c z c⁻¹` for the
/// twist conjugating handle `i` by `c = [x_i, y_i]`, on that handle only.
pub fn separating_twist_closed_form(g: usize, i: usize) -> Result<DerivationElement, FiltrationError> {
    let c = LieElement::basis(g, vec![Generator::x(i), Generator::y(i)]);
    let mut phi = vec![LieElement::zero(g, 3); 2 * g];
    for z in [Generator::x(i), Generator::y(i)] {
        let zb = LieElement::generator(g, z);
        phi[z.code()] = zb.bracket(&c).map_err(DerivError::from)?.neg();
    }
    Ok(dualize_hom(g, 2, &phi)?)
}

/// `φ(z) = [ω, z̄]` for conjugation by the boundary word.
pub fn boundary_conjugation_closed_form(g: usize) -> Result<DerivationElement, FiltrationError> {
    let omega = crate::deriv::omega(g);
    let phi: Result<Vec<LieElement>, _> = Generator::all(g)
        .map(|z| omega.bracket(&LieElement::generator(g, z)))
        .collect();
    Ok(dualize_hom(g, 2, &phi.map_err(DerivError::from)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_inverses_and_boundary() {
        for g in 1..=3 {
            for e in catalog(g) {
                let inv = e.endo.inverse().unwrap();
                assert_eq!(e.endo.compose(&inv).unwrap(), FreeEndo::identity(g), "{}", e.name);
                if e.rel_boundary {
                    assert!(e.endo.fixes_boundary(), "{} g={g}", e.name);
                }
                if let Some(m) = &e.expected_matrix {
                    assert_eq!(&sp_matrix(&e.endo), m, "{} g={g}", e.name);
                }
            }
        }
    }

    #[test]
    fn r_g_images() {
        let r = r_g(1);
        assert_eq!(r.image(Generator::x(1)).to_string(), "x1 y1 x1^-1");
        assert_eq!(r.image(Generator::y(1)).to_string(), "x1^-1");
        // not flagged rel boundary, but each commutator [x_i, y_i] is fixed
        for g in 1..=4 {
            assert!(r_g(g).fixes_boundary());
        }
    }

    #[test]
    fn membership_examples() {
        let tc = separating_twist(2, 1);
        for (k, expect) in [(1, true), (2, true), (3, false)] {
            assert_eq!(johnson_membership(&tc, k).unwrap().member, expect, "k={k}");
        }
        let cd = boundary_conjugation(2);
        assert!(johnson_membership(&cd, 2).unwrap().member);
        let r = johnson_membership(&cd, 3).unwrap();
        assert!(!r.member && r.witness.is_some());
        let swap = FreeEndo::from_map(
            1,
            &words(1, &[(Generator::x(1), "y1"), (Generator::y(1), "x1")]),
            None,
        )
        .unwrap();
        assert_eq!(johnson_membership(&swap, 1), Err(FiltrationError::BoundaryNotFixed));
    }

    #[test]
    fn lagrangian_examples() {
        let t = meridian_twist(2, 1, true);
        for k in 1..=6 {
            assert!(lagrangian_membership(&t, k).member);
            assert!(lagrangian_hom(&t, k).unwrap().is_zero());
        }
        let lt = longitude_twist(2, 1, true);
        let r = lagrangian_membership(&lt, 1);
        assert!(!r.member);
        assert_eq!(r.witness.unwrap().condition, Condition::Abelianization);
    }

    #[test]
    fn expression_resolution() {
        let h = resolve_expression(2, "twist_x1 * twist_x1^-1").unwrap();
        assert_eq!(h, FreeEndo::identity(2));
        assert!(matches!(resolve_expression(2, "nope"), Err(FiltrationError::UnknownEntry(_))));
    }

    #[test]
    fn symplectic_matrices() {
        for e in catalog(3) {
            if e.rel_boundary {
                assert!(is_symplectic(&sp_matrix(&e.endo)), "{}", e.name);
            }
        }
        assert_eq!(sp_matrix(&FreeEndo::identity(2)), IntMatrix::identity(4));
    }
}
