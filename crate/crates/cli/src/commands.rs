use std::fmt::Write;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Value};
use torelli_core::acceptance::run_all;
use torelli_core::deriv::{dk_basis, expected_dk_rank, morita_trace};
use torelli_core::filtration::{
    self as filt, johnson_hom, johnson_membership, lagrangian_hom, lagrangian_membership, resolve_expression,
    sp_matrix, FiltrationError,
};
use torelli_core::heegaard::{first_homology, heegaard_presentation};
use torelli_core::json::ints_to_json;
use torelli_core::lie::{lyndon_basis, witt_dimension};
use torelli_core::tree::{self, full_decompose, DecoratedTree, TreeError};
use torelli_core::word::{symbol_string, FreeEndo};

pub struct Output {
    pub command: String,
    pub params: Value,
    pub payload: Value,
    pub text: String,
    pub exit: u8,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
    pub command: String,
    pub params: Value,
    pub payload: Option<Value>,
}

pub const PRECONDITION: u8 = 2;
pub const USAGE: u8 = 64;
pub const MALFORMED: u8 = 65;

impl CliError {
    fn new(code: u8, command: &str, params: &Value, message: impl Into<String>) -> Self {
        CliError { code, message: message.into(), command: command.into(), params: params.clone(), payload: None }
    }

    fn with_payload(mut self, payload: Value) -> Self {
        self.payload = Some(payload);
        self
    }
}

fn ok(command: &str, params: Value, payload: Value, text: String) -> Result<Output, CliError> {
    Ok(Output { command: command.into(), params, payload, text, exit: 0 })
}

fn require_positive(command: &str, params: &Value, pairs: &[(&str, usize)]) -> Result<(), CliError> {
    for (name, v) in pairs {
        if *v == 0 {
            return Err(CliError::new(USAGE, command, params, format!("{name} must be positive")));
        }
    }
    Ok(())
}

/// Reads an endomorphism from a JSON file, or resolves a catalog
/// expression at genus `g` (default 2).
fn load_endo(command: &str, params: &Value, spec: &str, g: Option<usize>) -> Result<FreeEndo, CliError> {
    let malformed = |m: String| CliError::new(MALFORMED, command, params, m);
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| malformed(format!("{spec}: {e}")))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| malformed(format!("{spec}: {e}")))?;
        let h = FreeEndo::from_json(&v).map_err(|e| malformed(format!("{spec}: {e}")))?;
        if let Some(g) = g {
            if g != h.genus() {
                return Err(malformed(format!("{spec} has genus {}, --g is {g}", h.genus())));
            }
        }
        return Ok(h);
    }
    let g = g.unwrap_or(2);
    require_positive(command, params, &[("g", g)])?;
    resolve_expression(g, spec).map_err(|e| malformed(e.to_string()))
}

fn filtration_error(command: &str, params: &Value, name: &str, e: FiltrationError) -> CliError {
    match e {
        FiltrationError::NotMember(r) => {
            let report = r.named(name);
            CliError::new(PRECONDITION, command, params, format!("{name} is not in {} level {}", report.filtration, report.k))
                .with_payload(report.to_json())
        }
        FiltrationError::BoundaryNotFixed => CliError::new(PRECONDITION, command, params, format!("{name} does not fix the boundary word"))
            .with_payload(json!({ "endo": name, "boundary_fixed": false })),
        FiltrationError::UnknownEntry(_) | FiltrationError::NoInverse(_) | FiltrationError::Word(_) => {
            CliError::new(MALFORMED, command, params, e.to_string())
        }
        other => CliError::new(1, command, params, other.to_string()),
    }
}

fn tree_error(command: &str, params: &Value, e: TreeError) -> CliError {
    match e {
        TreeError::Parse(_) | TreeError::TooFewLeaves => CliError::new(MALFORMED, command, params, e.to_string()),
        TreeError::DegreeTooSmall | TreeError::NoFreshIndex(_) | TreeError::NotLagrangian(_) | TreeError::GenusTooSmall(..) => {
            CliError::new(PRECONDITION, command, params, e.to_string())
        }
        other => CliError::new(1, command, params, other.to_string()),
    }
}

/// Text rendering of a membership report or precondition payload.
pub fn report_text(v: &Value) -> String {
    let mut s = String::new();
    if let Some(member) = v.get("member") {
        let _ = writeln!(
            s,
            "{} in {}_{}: {}",
            v["endo"].as_str().unwrap_or("h"),
            v["filtration"].as_str().unwrap_or("?"),
            v["k"],
            if member.as_bool() == Some(true) { "yes" } else { "no" }
        );
        if let Some(w) = v.get("witness").filter(|w| !w.is_null()) {
            let _ = writeln!(
                s,
                "witness at {}: {} ({}, lcs degree {})",
                w["generator"].as_str().unwrap_or("?"),
                w["word"].as_str().unwrap_or("?"),
                w["condition"].as_str().unwrap_or("?"),
                w["lcs_degree"].as_str().unwrap_or("-")
            );
        }
    } else {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn basis(g: usize, k: usize) -> Result<Output, CliError> {
    let params = json!({ "g": g, "k": k });
    require_positive("basis", &params, &[("g", g), ("k", k)])?;
    let words = lyndon_basis(2 * g, k);
    let witt = witt_dimension(2 * g, k);
    let list: Vec<Value> = words
        .iter()
        .map(|b| json!({ "word": symbol_string(&b.word), "bracketing": b.bracketing.to_string() }))
        .collect();
    let mut text = format!("L_{k}(H_{g}): {} Lyndon words, Witt dimension {witt}\n", words.len());
    for b in &words {
        let _ = writeln!(text, "{}  {}", symbol_string(&b.word), b.bracketing);
    }
    let payload = json!({ "count": words.len(), "witt_dimension": big_count(witt), "words": list });
    ok("basis", params, payload, text)
}

pub fn dk(g: usize, k: usize) -> Result<Output, CliError> {
    let params = json!({ "g": g, "k": k });
    require_positive("dk", &params, &[("g", g), ("k", k)])?;
    let basis = dk_basis(g, k);
    let elements = basis.elements();
    let expected = expected_dk_rank(g, k);
    let mut text = format!("D_{k}(H_{g}): rank {} (expected {expected})\n", basis.rank());
    for (i, e) in elements.iter().enumerate() {
        let _ = writeln!(text, "{i}: {e}");
    }
    let payload = json!({
        "rank": basis.rank(),
        "expected_rank": big_count(expected),
        "basis": elements.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
    });
    ok("dk", params, payload, text)
}

pub fn eta_image(g: usize, k: usize) -> Result<Output, CliError> {
    let params = json!({ "g": g, "k": k });
    require_positive("eta-image", &params, &[("g", g), ("k", k)])?;
    let r = tree::image_lattice(g, k).map_err(|e| tree_error("eta-image", &params, e))?;
    let divs: Vec<String> = r.divisors.iter().map(|d| d.to_string()).collect();
    let text = format!(
        "D_{k}(H_{g}) / Im eta: rank {}, {} planted trees\ndivisors: {}\nall one: {}, powers of two: {}\n",
        r.dk_rank,
        r.trees,
        divs.join(" "),
        r.all_one(),
        r.powers_of_two()
    );
    let mut payload = r.to_json();
    payload["all_one"] = json!(r.all_one());
    payload["powers_of_two"] = json!(r.powers_of_two());
    ok("eta-image", params, payload, text)
}

pub fn decompose(tree_text: &str, g: usize) -> Result<Output, CliError> {
    let params = json!({ "tree": tree_text, "g": g });
    let t = DecoratedTree::parse(tree_text).map_err(|e| tree_error("decompose", &params, e))?;
    let step = tree::decompose(&t, g).map_err(|e| tree_error("decompose", &params, e))?;
    let full = full_decompose(&t, g).map_err(|e| tree_error("decompose", &params, e))?;
    let sign = |s: i32| if s > 0 { "+" } else { "-" };
    let text = format!(
        "tree: {t}\neta(T) = {}[eta({}), eta({})]\nfull: eta(T) = {}{}\n",
        sign(step.sign),
        step.tripod,
        step.rest,
        sign(full.sign),
        full.expr
    );
    let payload = json!({
        "tree": t.to_string(),
        "tripod": step.tripod.to_string(),
        "rest": step.rest.to_string(),
        "sign": step.sign,
        "full": { "expr": full.expr.to_string(), "sign": full.sign, "depth": full.expr.depth() },
    });
    ok("decompose", params, payload, text)
}

fn big_count(n: u128) -> Value {
    u64::try_from(n).map_or_else(|_| json!(n.to_string()), |v| json!(v))
}

fn endo_params(endo: &str, g: Option<usize>, k: usize) -> Value {
    json!({ "endo": endo, "g": g, "k": k })
}

pub fn johnson(endo: &str, g: Option<usize>, k: usize) -> Result<Output, CliError> {
    let params = endo_params(endo, g, k);
    require_positive("johnson", &params, &[("k", k)])?;
    let h = load_endo("johnson", &params, endo, g)?;
    let v = johnson_hom(&h, k).map_err(|e| filtration_error("johnson", &params, endo, e))?;
    let text = format!("J_{k}({endo}) = {v}\n");
    let payload = json!({ "endo": endo, "k": k, "value": v.to_json(), "zero": v.is_zero() });
    ok("johnson", params, payload, text)
}

pub fn lagrangian(endo: &str, g: Option<usize>, k: usize) -> Result<Output, CliError> {
    let params = endo_params(endo, g, k);
    require_positive("lagrangian", &params, &[("k", k)])?;
    let h = load_endo("lagrangian", &params, endo, g)?;
    let v = lagrangian_hom(&h, k).map_err(|e| filtration_error("lagrangian", &params, endo, e))?;
    let text = format!("J^L_{k}({endo}) = {v}\n");
    let payload = json!({ "endo": endo, "k": k, "value": v.to_json(), "zero": v.is_zero() });
    ok("lagrangian", params, payload, text)
}

pub fn membership(endo: &str, g: Option<usize>, k: usize, johnson: bool, lagrangian: bool) -> Result<Output, CliError> {
    let params = endo_params(endo, g, k);
    require_positive("membership", &params, &[("k", k)])?;
    let h = load_endo("membership", &params, endo, g)?;
    let mut reports = Vec::new();
    if johnson {
        let r = johnson_membership(&h, k).map_err(|e| filtration_error("membership", &params, endo, e))?;
        reports.push(r.named(endo).to_json());
    }
    if lagrangian {
        reports.push(lagrangian_membership(&h, k).named(endo).to_json());
    }
    let text: String = reports.iter().map(report_text).collect();
    ok("membership", params, json!({ "reports": reports }), text)
}

pub fn trace(endo: &str, g: Option<usize>, k: usize) -> Result<Output, CliError> {
    let params = endo_params(endo, g, k);
    require_positive("trace", &params, &[("k", k)])?;
    let h = load_endo("trace", &params, endo, g)?;
    let v = johnson_hom(&h, k).map_err(|e| filtration_error("trace", &params, endo, e))?;
    let tr = morita_trace(&v);
    let terms: Vec<String> = tr.coeffs.iter().map(|(m, c)| format!("{c}*{}", symbol_string(m))).collect();
    let text = format!("Tr(J_{k}({endo})) = {}\n", if terms.is_empty() { "0".to_string() } else { terms.join(" + ") });
    let payload = json!({ "endo": endo, "k": k, "trace": tr.to_json(), "zero": tr.is_zero() });
    ok("trace", params, payload, text)
}

pub fn heegaard(endo: &str, g: Option<usize>) -> Result<Output, CliError> {
    let params = json!({ "endo": endo, "g": g });
    let h = load_endo("heegaard", &params, endo, g)?;
    let p = heegaard_presentation(&h);
    let r = first_homology(&p);
    let relators: Vec<String> = p.relators.iter().map(|w| w.to_string()).collect();
    let divs: Vec<String> = r.divisors.iter().map(BigInt::to_string).collect();
    let text = format!(
        "relators: {}\nrelation matrix:\n{}divisors: {}\nhomology sphere: {}\n",
        relators.join(", "),
        r.matrix,
        divs.join(" "),
        if r.homology_sphere { "yes" } else { "no" }
    );
    let payload = json!({
        "h": endo,
        "relators": relators,
        "matrix": r.matrix.to_json(),
        "determinant": r.determinant.as_ref().map(|d| d.to_string()),
        "divisors": ints_to_json(&r.divisors),
        "homology_sphere": r.homology_sphere,
    });
    ok("heegaard", params, payload, text)
}

pub fn catalog(g: usize) -> Result<Output, CliError> {
    let params = json!({ "g": g });
    require_positive("catalog", &params, &[("g", g)])?;
    let entries = filt::catalog(g);
    let mut text = String::new();
    let mut list = Vec::new();
    for e in &entries {
        let images: Vec<String> = e.endo.images().iter().map(|w| w.to_string()).collect();
        let _ = writeln!(text, "{}: {}{}", e.name, e.note, if e.rel_boundary { "" } else { " (not rel boundary)" });
        let _ = writeln!(text, "    {}", images.join(", "));
        list.push(json!({
            "name": e.name,
            "note": e.note,
            "rel_boundary": e.rel_boundary,
            "endo": e.endo.to_json(),
            "matrix": sp_matrix(&e.endo).to_json(),
        }));
    }
    ok("catalog", params, json!({ "entries": list }), text)
}

pub fn discover(g: usize, names: &[String], max_length: usize, k: usize, nonzero: bool) -> Result<Output, CliError> {
    let params = json!({ "g": g, "entries": names, "max_length": max_length, "k": k, "nonzero": nonzero });
    require_positive("discover", &params, &[("g", g), ("k", k)])?;
    let all = filt::catalog(g);
    let entries: Vec<_> = if names.is_empty() {
        all.into_iter().filter(|e| e.rel_boundary && e.name != "identity").collect()
    } else {
        names
            .iter()
            .map(|n| filt::catalog_entry(g, n).map_err(|e| filtration_error("discover", &params, n, e)))
            .collect::<Result<_, _>>()?
    };
    let res = filt::discover(&entries, max_length, k).map_err(|e| filtration_error("discover", &params, "search", e))?;
    let hits: Vec<_> = res.hits.iter().filter(|h| !nonzero || !h.value.is_zero()).collect();
    let mut text = format!("{} compositions enumerated, {} in L_{k}\n", res.enumerated, hits.len());
    for h in &hits {
        let _ = writeln!(text, "{}: {}", h.word.join(" * "), h.value);
    }
    let payload = json!({
        "enumerated": res.enumerated,
        "hits": hits.iter().map(|h| h.to_json()).collect::<Vec<_>>(),
    });
    ok("discover", params, payload, text)
}

pub fn selftest(seed: u64) -> Result<Output, CliError> {
    let params = json!({ "seed": seed });
    let outcomes = run_all(seed);
    let mut text = String::new();
    for o in &outcomes {
        let _ = writeln!(text, "{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(text, "{passed}/{} criteria passed", outcomes.len());
    let payload = json!({
        "passed": passed,
        "total": outcomes.len(),
        "criteria": outcomes
            .iter()
            .map(|o| json!({ "id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail }))
            .collect::<Vec<_>>(),
    });
    let exit = if passed == outcomes.len() { 0 } else { 1 };
    Ok(Output { command: "selftest".into(), params, payload, text, exit })
}
