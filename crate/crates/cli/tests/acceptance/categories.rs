use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use dgk_core::dgcat::{
    from_quiver, random_category, validate, DGCategory, DGFunctor, DgStructure, QuiverPresentation,
    RandomCategoryConfig,
};
use dgk_core::drinfeld::{drinfeld_quotient, verdier_hom_check};
use dgk_core::field::{int, SparseVec};
use dgk_core::perfect::{cone, euler_pairing, hom_complex, hom_to_module, Module, PerfMorphism, TwistedComplex};
use dgk_core::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ensure, Outcome};

fn labels(c: &DGCategory) -> Vec<&str> {
    c.objects().iter().map(String::as_str).collect()
}

fn random_subset<'a>(rng: &mut ChaCha8Rng, all: &[&'a str]) -> Vec<&'a str> {
    all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// A random closed degree-0 map, as an integer combination of a cycle basis.
fn random_closed_map<C: DgStructure>(
    c: &C,
    x: &TwistedComplex,
    y: &TwistedComplex,
    rng: &mut ChaCha8Rng,
) -> Result<PerfMorphism, String> {
    let field = c.field();
    let h = hom_complex(c, x, y).map_err(|e| e.to_string())?;
    let cycles = match h.complex.differential(0) {
        Some(d) => d.kernel(),
        None => (0..h.complex.dim(0)).map(SparseVec::unit).collect(),
    };
    let mut v = SparseVec::zero();
    for z in &cycles {
        v = v.add_scaled(field, &int(rng.gen_range(-2..=2)), z);
    }
    let f = h.to_morphism(&h.index.globalize(field, 0, &v));
    ensure(f.is_closed(c, x, y).map_err(|e| e.to_string())?, || "drawn map is not closed".into())?;
    Ok(f)
}

/// Shifted representables, closed under cones of random closed maps up to `nesting`.
fn random_twisted<C: DgStructure>(c: &C, rng: &mut ChaCha8Rng, nesting: u32) -> Result<TwistedComplex, String> {
    let base = TwistedComplex::representable(rng.gen_range(0..c.object_count()))
        .shift(rng.gen_range(-1..=1), c.field())
        .map_err(|e| e.to_string())?;
    if nesting == 0 || rng.gen_bool(0.4) {
        return Ok(base);
    }
    let x = random_twisted(c, rng, nesting - 1)?;
    let y = random_twisted(c, rng, nesting - 1)?;
    let f = random_closed_map(c, &x, &y, rng)?;
    cone(c, &x, &y, &f).map_err(|e| e.to_string())
}

pub fn validity_fuzz() -> Outcome {
    let start = Instant::now();
    let cfg = RandomCategoryConfig::default();
    let mut contracted = 0;
    for seed in 0..1000u64 {
        let (_, c) = random_category(seed, &cfg);
        ensure(c.object_count() <= 4, || format!("seed {seed}: {} objects", c.object_count()))?;
        let report = validate(&c);
        ensure(report.is_valid(), || format!("seed {seed}: base category: {}", report.violations[0]))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all = labels(&c);
        let picked = random_subset(&mut rng, &all);
        contracted += picked.len();
        let q = drinfeld_quotient(&c, &picked, 3).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = validate(&q);
        ensure(report.is_valid(), || format!("seed {seed}: quotient by {picked:?}: {}", report.violations[0]))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {:.1} s, over the 30 s budget", elapsed.as_secs_f64()))?;
    Ok(format!("1000 categories and their depth-3 quotients valid, {contracted} objects contracted in total"))
}

pub fn flagship() -> Outcome {
    let a2 = from_quiver(&QuiverPresentation::new(&["x", "y"]).arrow("f", "x", "y"), Field::Rational)
        .map_err(|e| e.to_string())?;
    let q = drinfeld_quotient(&a2, &["x"], 3).map_err(|e| e.to_string())?;
    let expected = [("y", "y", 1), ("x", "x", 0), ("x", "y", 0), ("y", "x", 0)];
    let mut dims = Vec::new();
    for (a, b, want) in expected {
        let h = q.h0_hom_by_label(a, b).map_err(|e| e.to_string())?;
        ensure(h.dim == want, || format!("H0 Hom({a}, {b}) has dimension {}, expected {want}", h.dim))?;
        dims.push(h.dim.to_string());
    }
    let report = verdier_hom_check(&a2, &["x"], &expected, 3).map_err(|e| e.to_string())?;
    ensure(report.all_match(), || format!("comparison failed:\n{report}"))?;
    Ok(format!("dims (y,y), (x,x), (x,y), (y,x) = ({})", dims.join(", ")))
}

pub fn contractibility() -> Outcome {
    let mut checked = 0;
    let mut h0_checked = 0;
    for seed in 0..100u64 {
        let cfg = if seed % 2 == 0 { RandomCategoryConfig::default() } else { RandomCategoryConfig::nonpositive() };
        let (_, c) = random_category(seed, &cfg);
        let q = drinfeld_quotient(&c, &labels(&c), 3).map_err(|e| format!("seed {seed}: {e}"))?;
        for a in 0..c.object_count() {
            for b in 0..c.object_count() {
                let window = q.trust_window(a, b);
                let mut degrees: BTreeSet<i32> = q.hom_degrees(a, b).into_iter().collect();
                degrees.insert(0);
                for n in degrees.into_iter().filter(|&n| window.contains(n)) {
                    let h = q.cohomology(a, b, n).map_err(|e| format!("seed {seed}: {e}"))?;
                    ensure(h.dim == 0, || {
                        format!("seed {seed}: H^{n} Hom({}, {}) has dimension {}", c.object_label(a), c.object_label(b), h.dim)
                    })?;
                    checked += 1;
                }
                if window.contains(0) {
                    ensure(q.h0_hom(a, b).map_err(|e| e.to_string())?.dim == 0, || format!("seed {seed}: H0 nonzero"))?;
                    h0_checked += 1;
                }
            }
        }
    }
    ensure(h0_checked > 0, || "no H0 fell inside a trust window".into())?;
    Ok(format!("100 quotients, {h0_checked} trusted H0 groups and {checked} trusted cohomology groups vanish"))
}

pub fn chi_additivity() -> Outcome {
    let cfg = RandomCategoryConfig::default();
    let (mut complexes, mut nonzero) = (0, 0);
    for seed in 0..200u64 {
        let (_, c) = random_category(seed, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let x = random_twisted(&c, &mut rng, 1)?;
        let y = random_twisted(&c, &mut rng, 1)?;
        let z = random_twisted(&c, &mut rng, 2)?;
        let f = random_closed_map(&c, &x, &y, &mut rng)?;
        let cf = cone(&c, &x, &y, &f).map_err(|e| format!("seed {seed}: {e}"))?;
        nonzero += usize::from(!f.components.is_empty());
        for (v, w) in [(&x, &y), (&cf, &z), (&y, &z), (&x, &z), (&z, &cf)] {
            let h = hom_complex(&c, v, w).map_err(|e| e.to_string())?.complex;
            let (components, cohomology) = (h.euler_char(), h.euler_char_from_cohomology());
            ensure(components == cohomology, || {
                format!("seed {seed}: Euler characteristic {components} from components, {cohomology} from cohomology")
            })?;
            complexes += 1;
        }
        let chi = |v: &TwistedComplex| euler_pairing(&c, v, &z).map_err(|e| e.to_string());
        let (lhs, y_z, x_z) = (chi(&cf)?, chi(&y)?, chi(&x)?);
        ensure(lhs == y_z - x_z, || format!("seed {seed}: chi(cone, Z) = {lhs} but chi(Y, Z) - chi(X, Z) = {}", y_z - x_z))?;
    }
    ensure(nonzero > 0, || "every drawn map was zero".into())?;
    Ok(format!("200 triples additive ({nonzero} with a nonzero map), {complexes} hom complexes checked"))
}

pub fn adjunction_shadow() -> Outcome {
    let cfg = RandomCategoryConfig::default();
    let mut inclusions = 0;
    for seed in 0..100u64 {
        let (_, c) = random_category(seed, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xad70);
        let all = labels(&c);
        let mut keep = random_subset(&mut rng, &all);
        if keep.is_empty() {
            keep.push(all[0]);
        }
        let (sub, f) = if seed % 5 == 0 {
            (c.clone(), DGFunctor::identity(&c))
        } else {
            inclusions += 1;
            c.full_subcategory(&keep).map_err(|e| e.to_string())?
        };
        let x = random_twisted(&sub, &mut rng, 2)?;
        let m = if rng.gen_bool(0.5) {
            Module::from_twisted(&c, &random_twisted(&c, &mut rng, 2)?)
        } else {
            Module::representable(&c, rng.gen_range(0..c.object_count()))
        }
        .map_err(|e| e.to_string())?;
        let issues = m.validate(&c);
        ensure(issues.is_empty(), || format!("seed {seed}: module invalid: {}", issues[0]))?;
        let pushed = x.extend_scalars(&f, &c).map_err(|e| e.to_string())?;
        let restricted = m.restrict(&f, &sub, &c).map_err(|e| e.to_string())?;
        let lhs = hom_to_module(&c, &pushed, &m).map_err(|e| e.to_string())?.euler_char();
        let rhs = hom_to_module(&sub, &x, &restricted).map_err(|e| e.to_string())?.euler_char();
        ensure(lhs == rhs, || format!("seed {seed}: {lhs} after extension, {rhs} after restriction"))?;
    }
    Ok(format!("100 instances agree ({inclusions} along full subcategory inclusions)"))
}
