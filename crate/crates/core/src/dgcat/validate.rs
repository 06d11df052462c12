use std::fmt;

use super::category::DgStructure;
use crate::field::Accumulator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    DifferentialDegree,
    DifferentialSquare,
    CompositionDegree,
    Leibniz,
    Associativity,
    LeftUnit,
    RightUnit,
    IdentityDegree,
    IdentityClosed,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::DifferentialDegree => "differential degree",
            Axiom::DifferentialSquare => "d² = 0",
            Axiom::CompositionDegree => "composition degree",
            Axiom::Leibniz => "Leibniz",
            Axiom::Associativity => "associativity",
            Axiom::LeftUnit => "left unit",
            Axiom::RightUnit => "right unit",
            Axiom::IdentityDegree => "identity degree",
            Axiom::IdentityClosed => "identity closed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    /// Names of the offending basis elements, outermost first.
    pub elements: Vec<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({}): {}", self.axiom, self.elements.join(", "), self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Basis tuples skipped because a product was not available.
    pub skipped: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, axiom: Axiom) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "all DG axioms hold");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks d² = 0, Leibniz, associativity and the unit laws on basis elements.
pub fn validate<C: DgStructure>(c: &C) -> ValidationReport {
    let mut report = ValidationReport::default();
    let field = c.field();
    let n = c.object_count();
    let push = |report: &mut ValidationReport, axiom, elements: Vec<String>, detail: String| {
        report.violations.push(Violation { axiom, elements, detail });
    };

    for a in 0..n {
        for b in 0..n {
            for i in 0..c.hom_dim(a, b) {
                let name = c.basis_name(a, b, i);
                let deg = c.basis_degree(a, b, i);
                let d = c.differential(a, b, i);
                if d.iter().any(|(t, _)| c.basis_degree(a, b, *t) != deg + 1) {
                    push(&mut report, Axiom::DifferentialDegree, vec![name.clone()], format!("d({name}) = {}", c.format_vector(a, b, &d)));
                }
                let dd = c.apply_differential(a, b, &d);
                if !dd.is_zero() {
                    push(&mut report, Axiom::DifferentialSquare, vec![name.clone()], format!("d(d({name})) = {}", c.format_vector(a, b, &dd)));
                }
            }
        }
    }

    for a in 0..n {
        let id = c.identity(a);
        let label = c.object_label(a).to_string();
        if id.iter().any(|(t, _)| c.basis_degree(a, a, *t) != 0) {
            push(&mut report, Axiom::IdentityDegree, vec![label.clone()], format!("id = {}", c.format_vector(a, a, &id)));
        }
        let did = c.apply_differential(a, a, &id);
        if !did.is_zero() {
            push(&mut report, Axiom::IdentityClosed, vec![label.clone()], format!("d(id) = {}", c.format_vector(a, a, &did)));
        }
        for b in 0..n {
            for f in 0..c.hom_dim(a, b) {
                let unit = crate::field::SparseVec::unit(f);
                let name = c.basis_name(a, b, f);
                match c.compose_vecs(a, b, b, &c.identity(b), &unit) {
                    Some(v) if v != unit => push(&mut report, Axiom::LeftUnit, vec![name.clone()], format!("id ∘ {name} = {}", c.format_vector(a, b, &v))),
                    Some(_) => {}
                    None => report.skipped += 1,
                }
                match c.compose_vecs(a, a, b, &unit, &id) {
                    Some(v) if v != unit => push(&mut report, Axiom::RightUnit, vec![name.clone()], format!("{name} ∘ id = {}", c.format_vector(a, b, &v))),
                    Some(_) => {}
                    None => report.skipped += 1,
                }
            }
        }
    }

    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for g in 0..c.hom_dim(b, cc) {
                    for f in 0..c.hom_dim(a, b) {
                        let Some(gf) = c.compose(a, b, cc, g, f) else {
                            report.skipped += 1;
                            continue;
                        };
                        let (gn, fname) = (c.basis_name(b, cc, g), c.basis_name(a, b, f));
                        let (dg_deg, df_deg) = (c.basis_degree(b, cc, g), c.basis_degree(a, b, f));
                        if gf.iter().any(|(t, _)| c.basis_degree(a, cc, *t) != dg_deg + df_deg) {
                            push(&mut report, Axiom::CompositionDegree, vec![gn.clone(), fname.clone()], format!("{gn} ∘ {fname} = {}", c.format_vector(a, cc, &gf)));
                        }
                        let lhs = c.apply_differential(a, cc, &gf);
                        let dg = c.differential(b, cc, g);
                        let df = c.differential(a, b, f);
                        let unit_g = crate::field::SparseVec::unit(g);
                        let unit_f = crate::field::SparseVec::unit(f);
                        let (Some(t1), Some(t2)) = (c.compose_vecs(a, b, cc, &dg, &unit_f), c.compose_vecs(a, b, cc, &unit_g, &df)) else {
                            report.skipped += 1;
                            continue;
                        };
                        let mut acc = Accumulator::new(field);
                        acc.add_vec(&crate::field::int(1), &t1);
                        acc.add_vec(&field.sign(dg_deg.rem_euclid(2) == 1, &crate::field::int(1)), &t2);
                        let rhs = acc.finish();
                        if lhs != rhs {
                            push(
                                &mut report,
                                Axiom::Leibniz,
                                vec![gn.clone(), fname.clone()],
                                format!("d({gn} ∘ {fname}) = {} but the Leibniz rule gives {}", c.format_vector(a, cc, &lhs), c.format_vector(a, cc, &rhs)),
                            );
                        }
                    }
                }
            }
        }
    }

    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for dd in 0..n {
                    check_associativity(c, [a, b, cc, dd], &mut report);
                }
            }
        }
    }
    report
}

fn check_associativity<C: DgStructure>(c: &C, [a, b, cc, d]: [usize; 4], report: &mut ValidationReport) {
    let (nh, ng, nf) = (c.hom_dim(cc, d), c.hom_dim(b, cc), c.hom_dim(a, b));
    if nh == 0 || ng == 0 || nf == 0 {
        return;
    }
    for h in 0..nh {
        let uh = crate::field::SparseVec::unit(h);
        for g in 0..ng {
            let Some(hg) = c.compose(b, cc, d, h, g) else {
                report.skipped += nf;
                continue;
            };
            for f in 0..nf {
                let uf = crate::field::SparseVec::unit(f);
                let left = c.compose_vecs(a, b, d, &hg, &uf);
                let right = c.compose(a, b, cc, g, f).and_then(|gf| c.compose_vecs(a, cc, d, &uh, &gf));
                match (left, right) {
                    (Some(l), Some(r)) if l != r => {
                        let names = vec![c.basis_name(cc, d, h), c.basis_name(b, cc, g), c.basis_name(a, b, f)];
                        let detail = format!(
                            "({0} ∘ {1}) ∘ {2} = {3} but {0} ∘ ({1} ∘ {2}) = {4}",
                            names[0],
                            names[1],
                            names[2],
                            c.format_vector(a, d, &l),
                            c.format_vector(a, d, &r)
                        );
                        report.violations.push(Violation { axiom: Axiom::Associativity, elements: names, detail });
                    }
                    (Some(_), Some(_)) => {}
                    _ => report.skipped += 1,
                }
            }
        }
    }
}
