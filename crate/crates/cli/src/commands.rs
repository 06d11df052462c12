use std::fmt::Write as _;
use std::path::Path;

use dgk_core::dgcat::{random_category, validate, DGCategory, DgStructure, RandomCategoryConfig};
use dgk_core::drinfeld::{drinfeld_quotient, verdier_hom_check};
use dgk_core::io::{is_lattice_document, parse_category, parse_lattice, parse_matrix, parse_triple, K0Source, PairSpec};
use dgk_core::ktheory::{
    check_kermaps, chi_kernels, coxeter, gram_from_category, numerical_group, serre_from_gram, verify_k0_sequence,
    verify_numerical_sequence, verify_serre, Backing, EulerLattice, CONVENTION,
};
use dgk_core::lattice::{cokernel, fmt_vector, smith_normal_form, IntMatrix, Sublattice};
use dgk_core::perfect::TwistedComplex;
use dgk_core::{Error, Field, Result};
use serde_json::{json, Value};

pub struct Outcome {
    pub text: String,
    pub json: Value,
    /// Why verification failed, if it did.
    pub failure: Option<String>,
}

pub struct Context<'a> {
    pub input: &'a Path,
    pub field: Option<Field>,
    pub depth: Option<usize>,
}

impl Context<'_> {
    fn read(&self) -> Result<String> {
        std::fs::read_to_string(self.input).map_err(|e| Error::Input(format!("{}: {e}", self.input.display())))
    }

    fn base_dir(&self) -> &Path {
        self.input.parent().unwrap_or(Path::new("."))
    }
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| json!(r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).collect())
}

fn lattice_json(s: &Sublattice) -> Value {
    json!(s.basis_vectors().iter().map(|v| fmt_vector(v)).collect::<Vec<_>>())
}

fn fmt_lattice(s: &Sublattice) -> String {
    if s.is_zero() {
        "0".into()
    } else {
        let gens: Vec<String> = s.basis_vectors().iter().map(|v| fmt_vector(v)).collect();
        format!("span{{{}}}", gens.join(", "))
    }
}

/// `x,y[1],z[-2]`; defaults to the representables of every object.
pub fn parse_generators(c: &DGCategory, list: Option<&str>) -> Result<(Vec<TwistedComplex>, Vec<String>)> {
    let Some(list) = list else {
        let labels = c.objects().to_vec();
        return Ok(((0..c.object_count()).map(TwistedComplex::representable).collect(), labels));
    };
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (label, shift) = match item.split_once('[') {
            Some((l, rest)) => {
                let n = rest
                    .strip_suffix(']')
                    .and_then(|n| n.trim().parse::<i32>().ok())
                    .ok_or_else(|| Error::Input(format!("bad generator `{item}`")))?;
                (l.trim(), n)
            }
            None => (item, 0),
        };
        let rep = TwistedComplex::representable(c.require_object(label)?);
        gens.push(rep.shift(shift, c.field())?);
        labels.push(item.to_string());
    }
    if gens.is_empty() {
        return Err(Error::Input("no generators given".into()));
    }
    Ok((gens, labels))
}

fn lattice_input(ctx: &Context, generators: Option<&str>) -> Result<(EulerLattice, Option<IntMatrix>, Vec<String>)> {
    let text = ctx.read()?;
    if is_lattice_document(&text) {
        let (l, s) = parse_lattice(&text)?;
        let labels = (0..l.rank()).map(|i| format!("e{i}")).collect();
        return Ok((l, s, labels));
    }
    let c = parse_category(&text, ctx.field)?;
    let (gens, labels) = parse_generators(&c, generators)?;
    Ok((gram_from_category(&c, &gens)?, None, labels))
}

pub fn chi_gram(ctx: &Context, generators: Option<&str>) -> Result<Outcome> {
    let c = parse_category(&ctx.read()?, ctx.field)?;
    let (gens, labels) = parse_generators(&c, generators)?;
    let l = gram_from_category(&c, &gens)?;
    let mut text = String::new();
    writeln!(text, "chi-gram").unwrap();
    writeln!(text, "convention: {CONVENTION}").unwrap();
    writeln!(text, "field: {}", c.field()).unwrap();
    writeln!(text, "generators: {}", labels.join(", ")).unwrap();
    write!(text, "gram:\n{}", l.gram()).unwrap();
    let json = json!({
        "command": "chi-gram",
        "convention": CONVENTION,
        "field": c.field().to_string(),
        "generators": labels,
        "gram": matrix_json(l.gram()),
    });
    Ok(Outcome { text, json, failure: None })
}

pub fn numk(ctx: &Context, generators: Option<&str>) -> Result<Outcome> {
    let (l, _, labels) = lattice_input(ctx, generators)?;
    let k = chi_kernels(&l);
    let mut text = String::new();
    writeln!(text, "numk").unwrap();
    writeln!(text, "convention: {CONVENTION}").unwrap();
    writeln!(text, "generators: {}", labels.join(", ")).unwrap();
    write!(text, "gram:\n{}", l.gram()).unwrap();
    writeln!(text, "left kernel: {}", fmt_lattice(&k.left)).unwrap();
    writeln!(text, "right kernel: {}", fmt_lattice(&k.right)).unwrap();
    writeln!(text, "kernels agree: {}", k.agree).unwrap();
    let mut json = json!({
        "command": "numk",
        "convention": CONVENTION,
        "generators": labels,
        "gram": matrix_json(l.gram()),
        "left_kernel": lattice_json(&k.left),
        "right_kernel": lattice_json(&k.right),
        "kernels_agree": k.agree,
    });
    if !k.agree {
        writeln!(text, "numerical group: undefined").unwrap();
        return Ok(Outcome { text, json, failure: Some("left and right kernels of the Euler form disagree".into()) });
    }
    let n = numerical_group(&l)?;
    let factors: Vec<String> = n.presentation.invariant_factors().iter().map(|d| d.to_string()).collect();
    writeln!(text, "numerical group: {} (invariant factors: {})", n, factors.join(", ")).unwrap();
    write!(text, "projection:\n{}", n.projection).unwrap();
    json["numerical_group"] = json!(n.to_string());
    json["invariant_factors"] = json!(factors);
    json["projection"] = matrix_json(&n.projection);
    Ok(Outcome { text, json, failure: None })
}

pub fn quotient(ctx: &Context) -> Result<Outcome> {
    let mut triple = parse_triple(&ctx.read()?, ctx.base_dir(), ctx.field)?;
    if let Some(d) = ctx.depth {
        triple.depth = d;
    }
    let c = triple.require_category()?;
    let q = drinfeld_quotient(c, &triple.contract_refs(), triple.depth)?;
    let pairs = triple.pairs.clone().unwrap_or_else(|| {
        let labels = c.objects();
        labels
            .iter()
            .flat_map(|s| labels.iter().map(move |t| PairSpec { source: s.clone(), target: t.clone(), expected: None }))
            .collect()
    });
    let mut text = String::new();
    writeln!(text, "quotient").unwrap();
    writeln!(text, "contract: {}", if triple.contract.is_empty() { "(none)".into() } else { triple.contract.join(", ") }).unwrap();
    writeln!(text, "depth: {}", triple.depth).unwrap();
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for p in &pairs {
        let (a, b) = (c.require_object(&p.source)?, c.require_object(&p.target)?);
        let window = q.trust_window(a, b);
        let dim = q.h0_hom(a, b)?.dim;
        let mut line = format!("H0 Hom({}, {}) = {dim}  trusted: {window}", p.source, p.target);
        if let Some(e) = p.expected {
            let ok = e == dim;
            write!(line, "  expected {e}: {}", if ok { "ok" } else { "MISMATCH" }).unwrap();
            if !ok {
                mismatches.push(format!("H0 Hom({}, {})", p.source, p.target));
            }
        }
        writeln!(text, "{line}").unwrap();
        rows.push(json!({
            "source": p.source,
            "target": p.target,
            "h0": dim,
            "trust_window": window.to_string(),
            "expected": p.expected,
        }));
    }
    let expected: Vec<(&str, &str, usize)> =
        pairs.iter().filter_map(|p| p.expected.map(|e| (p.source.as_str(), p.target.as_str(), e))).collect();
    if !expected.is_empty() {
        let report = verdier_hom_check(c, &triple.contract_refs(), &expected, triple.depth)?;
        debug_assert_eq!(report.all_match(), mismatches.is_empty());
        writeln!(text, "comparison: {}", if report.all_match() { "all match" } else { "mismatches" }).unwrap();
    }
    let json = json!({"command": "quotient", "contract": triple.contract, "depth": triple.depth, "pairs": rows});
    let failure = (!mismatches.is_empty()).then(|| format!("unexpected dimensions for {}", mismatches.join(", ")));
    Ok(Outcome { text, json, failure })
}

fn flag_word(set: bool) -> &'static str {
    if set {
        "asserted"
    } else {
        "not asserted"
    }
}

pub fn verify_sequence(ctx: &Context) -> Result<Outcome> {
    let mut triple = parse_triple(&ctx.read()?, ctx.base_dir(), ctx.field)?;
    if let Some(d) = ctx.depth {
        triple.depth = d;
    }
    let (t, source) = triple.k_triple()?;
    let expected = triple.expected_coker.clone().unwrap_or_else(|| cokernel(&t.q_relations));
    let k0 = verify_k0_sequence(&t, &expected)?;
    let kermaps = check_kermaps(&t)?;
    let numerical = verify_numerical_sequence(&t)?;

    let mut text = String::new();
    writeln!(text, "verify-sequence").unwrap();
    writeln!(text, "convention: {CONVENTION}").unwrap();
    let source_text = match source {
        K0Source::Supplied => "supplied".to_string(),
        K0Source::Derived { depth } => format!("derived from representables, quotient at depth {depth}"),
    };
    writeln!(text, "K0 data: {source_text}").unwrap();
    writeln!(text, "subcategory thick: {}", flag_word(t.subcategory_thick)).unwrap();
    writeln!(text, "quotient preserves compacts: {}", flag_word(t.quotient_preserves_compacts)).unwrap();
    write!(text, "G_I:\n{}G_A:\n{}G_Q:\n{}", t.sub.gram(), t.ambient.gram(), t.quotient.gram()).unwrap();
    write!(text, "i_*:\n{}q_*:\n{}", t.i_star, t.q_star).unwrap();
    writeln!(text, "\n[K0 sequence K0(I) -> K0(A) -> K0(Q) -> 0]").unwrap();
    write!(text, "{k0}").unwrap();
    writeln!(text, "\n[kernel maps]").unwrap();
    for line in kermaps.to_string().lines().filter(|l| !l.starts_with("convention")) {
        writeln!(text, "{line}").unwrap();
    }
    writeln!(text, "\n[numerical sequence N(I) -> N(A) -> N(Q) -> 0]").unwrap();
    for line in numerical.to_string().lines().filter(|l| !l.starts_with("convention")) {
        writeln!(text, "{line}").unwrap();
    }

    let mut failures = Vec::new();
    if !k0.holds() {
        failures.push("K0 sequence");
    }
    if !kermaps.consistent() {
        failures.push("kernel maps");
    }
    if numerical.contradiction() {
        failures.push("numerical sequence");
    } else if !numerical.exact() {
        failures.push("numerical sequence (hypotheses unmet)");
    } else if numerical.backing == Backing::Unbacked {
        failures.push("numerical sequence exact but hypotheses unmet");
    }
    writeln!(text, "\noverall: {}", if failures.is_empty() { "PASS" } else { "FAIL" }).unwrap();

    let json = json!({
        "command": "verify-sequence",
        "convention": CONVENTION,
        "k0_source": source_text,
        "flags": {"thick": t.subcategory_thick, "q_preserves_compacts": t.quotient_preserves_compacts},
        "k0_sequence": {
            "composite_zero": k0.exactness.composite_zero,
            "image_equals_kernel": k0.exactness.image_equals_kernel,
            "surjective": k0.exactness.surjective,
            "coker": k0.coker.to_string(),
            "expected_coker": k0.expected_coker.to_string(),
            "holds": k0.holds(),
        },
        "kermaps": kermaps.verdicts.iter().map(|v| json!({
            "statement": v.statement,
            "holds": v.holds,
            "backing": v.backing.to_string(),
            "witness": v.witness.as_ref().map(|w| fmt_vector(w)),
        })).collect::<Vec<_>>(),
        "numerical_sequence": {
            "groups": numerical.groups.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "exact": numerical.exact(),
            "backing": numerical.backing.to_string(),
            "coker_torsion_free": numerical.coker_torsion_free,
            "chain_quotient": numerical.chain_quotient.to_string(),
            "chain_matches": numerical.chain_matches,
        },
        "pass": failures.is_empty(),
    });
    let failure = (!failures.is_empty()).then(|| failures.join(", "));
    Ok(Outcome { text, json, failure })
}

pub fn verify_serre_cmd(ctx: &Context, generators: Option<&str>) -> Result<Outcome> {
    let (l, supplied, labels) = lattice_input(ctx, generators)?;
    let (s, origin) = match supplied {
        Some(s) => (s, "supplied"),
        None => (serre_from_gram(&l)?, "computed"),
    };
    let report = verify_serre(&l, &s)?;
    let residual = l.gram().mul(&s)?.sub(&l.gram().transpose())?;
    let k = chi_kernels(&l);
    let mut text = String::new();
    writeln!(text, "verify-serre").unwrap();
    writeln!(text, "convention: {CONVENTION}").unwrap();
    writeln!(text, "generators: {}", labels.join(", ")).unwrap();
    write!(text, "gram:\n{}", l.gram()).unwrap();
    write!(text, "S ({origin}):\n{s}").unwrap();
    write!(text, "residual G S - G^T:\n{residual}").unwrap();
    writeln!(text, "S invertible over Z: {}", s.is_unimodular()).unwrap();
    if let (Some(c), "supplied") = (&report.computed, origin) {
        writeln!(text, "agrees with G^-1 G^T: {}", c == &s).unwrap();
    }
    write!(text, "coxeter -S:\n{}", coxeter(&s)).unwrap();
    writeln!(text, "left kernel: {}", fmt_lattice(&k.left)).unwrap();
    writeln!(text, "right kernel: {}", fmt_lattice(&k.right)).unwrap();
    writeln!(text, "kernels agree: {}", k.agree).unwrap();
    let holds = report.holds() && k.agree;
    writeln!(text, "overall: {}", if holds { "PASS" } else { "FAIL" }).unwrap();
    let json = json!({
        "command": "verify-serre",
        "convention": CONVENTION,
        "gram": matrix_json(l.gram()),
        "serre": matrix_json(&s),
        "serre_origin": origin,
        "residual": matrix_json(&residual),
        "issues": report.issues,
        "kernels_agree": k.agree,
        "pass": holds,
    });
    let mut problems = report.issues.clone();
    if report.agrees_with_computed == Some(false) {
        problems.push("S differs from G^-1 G^T".into());
    }
    if !k.agree {
        problems.push("kernels disagree".into());
    }
    let failure = (!holds).then(|| problems.join("; "));
    Ok(Outcome { text, json, failure })
}

pub fn snf(ctx: &Context) -> Result<Outcome> {
    let m = parse_matrix(&ctx.read()?)?;
    let s = smith_normal_form(&m);
    let check = s.u.mul(&m)?.mul(&s.v)? == s.d;
    let diag: Vec<String> = s.diagonal().iter().map(|d| d.to_string()).collect();
    let mut text = String::new();
    writeln!(text, "snf").unwrap();
    write!(text, "M:\n{m}D:\n{}U:\n{}V:\n{}", s.d, s.u, s.v).unwrap();
    writeln!(text, "diagonal: {}", diag.join(", ")).unwrap();
    writeln!(text, "rank: {}", s.rank()).unwrap();
    writeln!(text, "D = U M V: {check}").unwrap();
    let json = json!({
        "command": "snf",
        "d": matrix_json(&s.d),
        "u": matrix_json(&s.u),
        "v": matrix_json(&s.v),
        "diagonal": diag,
        "rank": s.rank(),
        "check": check,
    });
    Ok(Outcome { text, json, failure: (!check).then(|| "D != U M V".to_string()) })
}

pub fn fuzz(seed: u64, cases: u64, depth: usize, field: Option<Field>) -> Result<Outcome> {
    let cfg = RandomCategoryConfig { field: field.unwrap_or(Field::Rational), ..RandomCategoryConfig::default() };
    let mut failures = Vec::new();
    let mut quotient_checks = 0usize;
    for k in 0..cases {
        let s = seed.wrapping_add(k);
        let (_, c) = random_category(s, &cfg);
        let r = validate(&c);
        if !r.is_valid() {
            failures.push(format!("seed {s}: {}", r.violations[0]));
            continue;
        }
        let labels: Vec<&str> = c.objects().iter().enumerate().filter(|(i, _)| (s >> i) & 1 == 1).map(|(_, l)| l.as_str()).collect();
        let q = drinfeld_quotient(&c, &labels, depth)?;
        let r = validate(&q);
        quotient_checks += 1;
        if !r.is_valid() {
            failures.push(format!("seed {s}, quotient by {{{}}}: {}", labels.join(", "), r.violations[0]));
        }
    }
    let mut text = String::new();
    writeln!(text, "fuzz").unwrap();
    writeln!(text, "seeds: {seed}..{}", seed.wrapping_add(cases)).unwrap();
    writeln!(text, "categories validated: {cases}").unwrap();
    writeln!(text, "quotients validated at depth {depth}: {quotient_checks}").unwrap();
    for f in &failures {
        writeln!(text, "violation: {f}").unwrap();
    }
    let json = json!({"command": "fuzz", "seed": seed, "cases": cases, "depth": depth, "violations": failures});
    let failure = (!failures.is_empty()).then(|| format!("{} violations", failures.len()));
    Ok(Outcome { text, json, failure })
}
