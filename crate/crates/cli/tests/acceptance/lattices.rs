use std::path::Path;

use dgk_core::dgcat::{from_quiver, DGCategory, QuiverPresentation};
use dgk_core::io::{parse_lattice, parse_triple};
use dgk_core::ktheory::{
    check_kermaps, chi_kernels, gram_from_category, numerical_group, serre_from_gram, verify_k0_sequence,
    verify_numerical_sequence, verify_serre, Backing, KTriple,
};
use dgk_core::lattice::{
    cokernel, integer_kernel, is_torsion_free, smith_normal_form, to_bigint_vec, AbGroupPresentation, IntMatrix,
    Sublattice,
};
use dgk_core::perfect::TwistedComplex;
use dgk_core::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dgk, ensure, fixtures, read_fixture, Outcome};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn small(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows().iter().map(|r| r.iter().map(|x| i64::try_from(x).expect("small entry")).collect()).collect()
}

fn a_n(n: usize) -> Result<DGCategory, String> {
    let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut q = QuiverPresentation::new(&refs);
    for i in 1..n {
        q = q.arrow(&format!("a{i}"), &names[i - 1], &names[i]);
    }
    from_quiver(&q, Field::Rational).map_err(err)
}

fn det(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| *x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

/// Adjugate over the determinant; `None` unless the determinant is a unit.
fn unit_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let d = det(m);
    if d.abs() != 1 {
        return None;
    }
    let cofactor = |i: usize, j: usize| {
        let minor: Vec<Vec<i64>> = (0..n)
            .filter(|&r| r != i)
            .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect())
            .collect();
        if (i + j) % 2 == 0 {
            det(&minor)
        } else {
            -det(&minor)
        }
    };
    Some((0..n).map(|i| (0..n).map(|j| cofactor(j, i) * d).collect()).collect())
}

fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn serre_suite() -> Outcome {
    for n in 1..=4 {
        let c = a_n(n)?;
        let gens: Vec<TwistedComplex> = (0..n).map(TwistedComplex::representable).collect();
        let l = gram_from_category(&c, &gens).map_err(err)?;
        let paths: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i <= j)).collect()).collect();
        let g = small(l.gram());
        ensure(g == paths, || format!("A_{n}: Gram {g:?}, expected the path counts {paths:?}"))?;
        ensure(l.gram().is_unimodular() && det(&g).abs() == 1, || format!("A_{n}: Gram not unimodular"))?;
        let inv = unit_inverse(&g).ok_or_else(|| format!("A_{n}: no integral inverse"))?;
        let bidiagonal: Vec<Vec<i64>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else if j == i + 1 { -1 } else { 0 }).collect()).collect();
        ensure(inv == bidiagonal, || format!("A_{n}: adjugate inverse {inv:?}"))?;
        let s = serre_from_gram(&l).map_err(err)?;
        let expected = mul(&inv, &transpose(&g));
        ensure(small(&s) == expected, || format!("A_{n}: S = {:?}, oracle {expected:?}", small(&s)))?;
        let residual = l.gram().mul(&s).map_err(err)?.sub(&l.gram().transpose()).map_err(err)?;
        ensure(residual.is_zero(), || format!("A_{n}: G S - G^T = {residual}"))?;
        ensure(verify_serre(&l, &s).map_err(err)?.holds(), || format!("A_{n}: Serre check fails"))?;
        let k = chi_kernels(&l.clone().with_serre(s).map_err(err)?);
        ensure(k.left.is_zero() && k.right.is_zero() && k.agree, || format!("A_{n}: kernels {k:?}"))?;
    }
    Ok("n = 1..4: G unimodular, S integral, residual zero, kernels zero".into())
}

fn in_box(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-bound..=bound).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn is_zero_vector(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Every vector with entries in `[-3, 3]` is in the kernel lattice iff `m v = 0`.
fn kernel_matches_brute_force(m: &[Vec<i64>], cols: usize, k: &Sublattice) -> bool {
    in_box(cols, 3).iter().all(|v| k.contains(&to_bigint_vec(v)) == is_zero_vector(&apply(m, v)))
}

pub fn degenerate_kernels() -> Outcome {
    let (l, serre) = parse_lattice(&read_fixture("degenerate_lattice.json")).map_err(err)?;
    let serre = serre.ok_or("fixture has no Serre matrix")?;
    ensure(serre == IntMatrix::identity(2), || format!("fixture Serre matrix {serre}"))?;
    let l = l.with_serre(serre).map_err(err)?;
    let k = chi_kernels(&l);
    let span = Sublattice::from_generators(2, &[to_bigint_vec(&[1, -1])]).map_err(err)?;
    ensure(k.left == span && k.right == span && k.agree, || format!("kernels {k:?}"))?;
    let g = small(l.gram());
    ensure(kernel_matches_brute_force(&transpose(&g), 2, &k.left), || "left kernel disagrees with the box".into())?;
    ensure(kernel_matches_brute_force(&g, 2, &k.right), || "right kernel disagrees with the box".into())?;
    let group = numerical_group(&l).map_err(err)?;
    ensure(group.rank() == 1 && is_torsion_free(&group.presentation), || format!("N = {group}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..200 {
        let (rows, cols) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let im = IntMatrix::from_rows(&m).map_err(err)?;
        let k = integer_kernel(&im);
        ensure(k.rank() + im.rank() == cols, || format!("case {case}: kernel rank {} for {m:?}", k.rank()))?;
        ensure(kernel_matches_brute_force(&m, cols, &k), || format!("case {case}: kernel of {m:?} disagrees with the box"))?;
    }
    Ok(format!("left = right = span{{(1, -1)}}, N = {group}; 200 random kernels match brute force"))
}

fn triple(name: &str) -> Result<KTriple, String> {
    let file = parse_triple(&read_fixture(name), &fixtures(), None).map_err(err)?;
    Ok(file.k_triple().map_err(err)?.0)
}

pub fn sequence_end_to_end() -> Outcome {
    let t = triple("a2_triple.json")?;
    let k0 = verify_k0_sequence(&t, &AbGroupPresentation::free(1)).map_err(err)?;
    ensure(k0.holds(), || format!("K0 sequence:\n{k0}"))?;
    ensure(check_kermaps(&t).map_err(err)?.consistent(), || "kernel maps inconsistent".into())?;
    let num = verify_numerical_sequence(&t).map_err(err)?;
    let groups: Vec<String> = num.groups.iter().map(ToString::to_string).collect();
    ensure(groups == ["Z", "Z^2", "Z"], || format!("numerical groups {groups:?}"))?;
    ensure(num.exact() && num.backing == Backing::Theorem, || format!("numerical sequence:\n{num}"))?;
    ensure(num.chain_quotient.isomorphic(&num.groups[2].presentation), || "chain quotient differs from N(Q)".into())?;
    let (code, out, _) = dgk(&["verify-sequence", "--input", "a2_triple.json"]);
    ensure(code == 0 && out.ends_with("overall: PASS\n"), || format!("verify-sequence exited {code}"))?;
    Ok(format!("Z -> Z^2 -> Z -> 0 exact on K0 and N, chain quotient {}, exit 0", num.chain_quotient))
}

pub fn corollary_route() -> Outcome {
    for name in ["corollary_lattice_triple.json", "corollary_triple.json"] {
        let t = triple(name)?;
        ensure(!t.quotient_preserves_compacts, || format!("{name}: compacts flag set"))?;
        let num = verify_numerical_sequence(&t).map_err(err)?;
        ensure(num.coker_torsion_free, || format!("{name}: coker(i_*) has torsion"))?;
        ensure(num.exact() && num.backing == Backing::Corollary, || format!("{name}:\n{num}"))?;
        let (code, out, _) = dgk(&["verify-sequence", "--input", name]);
        ensure(code == 0 && out.contains("verdict: exact [corollary-backed]"), || format!("{name}: exit {code}"))?;
    }
    let t = triple("torsion_triple.json")?;
    let coker = cokernel(&t.i_star);
    ensure(coker.to_string() == "Z/2", || format!("coker(i_*) = {coker}"))?;
    let num = verify_numerical_sequence(&t).map_err(err)?;
    ensure(num.backing == Backing::Unbacked && !num.contradiction(), || format!("torsion triple:\n{num}"))?;
    let (code, out, stderr) = dgk(&["verify-sequence", "--input", "torsion_triple.json"]);
    ensure(code == 1, || format!("torsion triple exited {code}"))?;
    ensure(
        out.contains("hypotheses of both the theorem and the corollary unmet") && stderr.contains("hypotheses unmet"),
        || format!("torsion report lacks the hypotheses verdict: {stderr}"),
    )?;
    Ok("both corollary fixtures corollary-backed with exit 0; coker Z/2 reported hypotheses unmet, exit 1".into())
}

/// Rank over Q by fraction-free elimination in `i128`.
fn bareiss_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (rows, cols) = (a.len(), a[0].len());
    let (mut rank, mut prev) = (0, 1i128);
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                a[i][j] = (a[i][j] * a[rank][c] - a[rank][j] * a[i][c]) / prev;
            }
            a[i][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    rank
}

pub fn snf_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut total_rank = 0;
    for case in 0..500 {
        let (rows, cols) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let im = IntMatrix::from_rows(&m).map_err(err)?;
        let s = smith_normal_form(&im);
        let fail = |what: &str| format!("case {case} ({m:?}): {what}");
        ensure(s.u.mul(&im).map_err(err)?.mul(&s.v).map_err(err)? == s.d, || fail("D != U M V"))?;
        ensure(s.u.is_unimodular() && s.v.is_unimodular(), || fail("transform not unimodular"))?;
        let d = small(&s.d);
        let off_diagonal = (0..rows).any(|i| (0..cols).any(|j| i != j && d[i][j] != 0));
        ensure(!off_diagonal, || fail("D not diagonal"))?;
        let diag: Vec<i64> = (0..rows.min(cols)).map(|i| d[i][i]).collect();
        ensure(diag.iter().all(|&x| x >= 0), || fail("negative invariant factor"))?;
        let chain = diag.windows(2).all(|w| if w[0] == 0 { w[1] == 0 } else { w[1] % w[0] == 0 });
        ensure(chain, || fail("divisibility chain broken"))?;
        let rank = bareiss_rank(&m);
        ensure(s.rank() == rank && im.rank() == rank, || fail("rank disagrees"))?;
        total_rank += rank;
    }
    Ok(format!("500 matrices, total rank {total_rank}"))
}

const GOLDEN: &[(&str, &str, &str)] = &[
    ("chi_gram_a2", "chi-gram", "a2.json"),
    ("numk_a3", "numk", "a3.json"),
    ("quotient_a2", "quotient", "a2_triple.json"),
    ("verify_sequence_a2", "verify-sequence", "a2_triple.json"),
    ("verify_serre_a2", "verify-serre", "a2.json"),
    ("snf", "snf", "snf_matrix.json"),
];

pub fn golden_files() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (name, command, input) in GOLDEN {
        let golden = std::fs::read_to_string(dir.join(format!("{name}.txt"))).map_err(err)?;
        let first = dgk(&[command, "--input", input]);
        let second = dgk(&[command, "--input", input]);
        ensure(first.0 == 0, || format!("{command} exited {}: {}", first.0, first.2))?;
        ensure(first == second, || format!("{command} differs between runs"))?;
        ensure(first.1 == golden, || format!("{command} differs from {name}.txt"))?;
        let json = (dgk(&[command, "--input", input, "--json"]), dgk(&[command, "--input", input, "--json"]));
        ensure(json.0 == json.1, || format!("{command} --json differs between runs"))?;
    }
    Ok(format!("{} reports byte-identical to the golden files across runs", GOLDEN.len()))
}
