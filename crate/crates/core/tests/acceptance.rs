//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use koszul_cy::barcobar::{bar, Cobar};
use koszul_cy::cy_verify::{proper_cy_algebra, smooth_cy_on_bar, Truncation, Verdict};
use koszul_cy::cyclic::betti_compare;
use koszul_cy::input::{builtin_coalgebra, builtin_frobenius};
use koszul_cy::lie::{ce_coalgebra, check_lie_cy, is_unimodular, LieAlgebra};
use koszul_cy::linalg::ScalarKind;
use koszul_cy::selftest::{lie_pool, random_basis, structural_suite};
use koszul_cy::spaces::{
    check_pd, check_space_cy, fundamental_cycle, reduce_by_tree, sign_characters, SimplicialComplex, COSET_LIMIT,
};
use koszul_cy::Error;

const Q: ScalarKind = ScalarKind::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e(x: Error) -> String {
    x.to_string()
}

fn within(start: Instant, secs: u64, what: &str) -> Result<Duration, String> {
    let d = start.elapsed();
    ensure!(d <= Duration::from_secs(secs), "{what} took {d:.1?}, limit {secs} s");
    Ok(d)
}

fn ce_betti(g: &LieAlgebra) -> Result<Vec<usize>, String> {
    let n = g.dim() as i64;
    let c = ce_coalgebra(g).map_err(e)?;
    Ok(c.coalgebra().chain_complex().map_err(e)?.homology(0, n).map_err(e)?.ranks(0, n))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn structural() -> Outcome {
    let start = Instant::now();
    let out = structural_suite(0, 100);
    let bad: Vec<_> = out.iter().filter(|o| !o.passed).map(|o| format!("{}: {}", o.name, o.detail)).collect();
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    let d = within(start, 60, "suite")?;
    Ok(format!("{} cases in {d:.1?}", out.len()))
}

fn lie_positive() -> Outcome {
    let t = Truncation { level: 4, window: (0, 3), u_powers: 3 };
    let mut notes = Vec::new();
    for (name, betti) in [("heisenberg", vec![1, 2, 2, 1]), ("sl2", vec![1, 0, 0, 1])] {
        let g = LieAlgebra::builtin(name, Q).unwrap();
        ensure!(is_unimodular(&g), "{name} not unimodular");
        let start = Instant::now();
        let r = check_lie_cy(&g, &t, &Q.one()).map_err(e)?;
        let d = within(start, 30, name)?;
        ensure!(r.cy.verdict == Verdict::Verified, "{name}: {:?}", r.cy.checks);
        ensure!(r.cy.n == 3, "{name}: n = {}", r.cy.n);
        let lift = r.cy.lift.as_ref().ok_or(format!("{name}: no lift"))?;
        ensure!(lift.is_strict() && lift.obstructed_at.is_none(), "{name}: lift {lift:?}");
        let b = ce_betti(&g)?;
        ensure!(b == betti, "{name}: Betti {b:?}");
        notes.push(format!("{name} {b:?} {d:.1?}"));
    }
    Ok(notes.join(", "))
}

fn lie_negative() -> Outcome {
    let t = Truncation { level: 3, window: (0, 3), u_powers: 2 };
    let g = LieAlgebra::aff1(Q);
    ensure!(!is_unimodular(&g), "aff1 unimodular");
    let r = check_lie_cy(&g, &t, &Q.one()).map_err(e)?;
    ensure!(r.cy.verdict == Verdict::Failed, "aff1 verdict {:?}", r.cy.verdict);
    let o = r.cy.obstruction.as_ref().ok_or("no obstruction")?;
    ensure!(o.degree == 2 && o.source_rank == 1 && o.target_rank == 0, "obstruction {o:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for g in lie_pool(Q) {
        for i in 0..4 {
            let h = if i == 0 { g.clone() } else { random_basis(&g, &mut rng) };
            let r = check_lie_cy(&h, &t, &Q.one()).map_err(e)?;
            let expect = if is_unimodular(&h) { Verdict::Verified } else { Verdict::Failed };
            ensure!(r.cy.verdict == expect, "verdict {:?} for unimodular = {}", r.cy.verdict, r.unimodular);
            checked += 1;
        }
    }
    Ok(format!("aff1 obstruction at degree 2 (1 vs 0); {checked} Lie inputs agree"))
}

fn pbw() -> Outcome {
    let mut notes = Vec::new();
    for (name, level) in [("abelian2", 3), ("heisenberg", 3), ("heisenberg", 4), ("aff1", 3), ("aff1", 4)] {
        let g = LieAlgebra::builtin(name, Q).unwrap();
        let n = g.dim() as u64;
        let ce = ce_coalgebra(&g).map_err(e)?;
        let h = Cobar::new(ce.coalgebra()).map_err(e)?.complex(level).map_err(e)?.homology(0, 0).map_err(e)?;
        let expect: u64 = (0..=level as u64).map(|j| binomial(n + j - 1, j)).sum();
        ensure!(h.rank(0) as u64 == expect, "{name} L={level}: {} vs {expect}", h.rank(0));
        if name == "abelian2" {
            ensure!(expect == 10, "oracle gives {expect}");
        }
        notes.push(format!("{name}@{level}={expect}"));
    }
    Ok(notes.join(" "))
}

fn loop_space() -> Outcome {
    let start = Instant::now();
    let c = builtin_coalgebra("sphere", Q).map_err(e)?.unwrap();
    let level = 5;
    let h = Cobar::new(&c).map_err(e)?.complex(level).map_err(e)?.homology(0, level as i64 - 1).map_err(e)?;
    let trusted: Vec<i64> = h.degrees.iter().filter(|(_, x)| x.trusted).map(|(m, _)| *m).collect();
    ensure!(!trusted.is_empty(), "no trusted degrees");
    for &m in &trusted {
        ensure!(h.rank(m) == 1, "H_{m} has rank {}", h.rank(m));
    }
    let d = within(start, 20, "loop space")?;
    Ok(format!("rank 1 in trusted degrees {trusted:?}, {d:.1?}"))
}

fn cohh_equals_hh() -> Outcome {
    let mut notes = Vec::new();
    for name in ["ce:heisenberg", "ce:aff1", "sphere"] {
        let c = builtin_coalgebra(name, Q).map_err(e)?.unwrap();
        for level in [3, 4] {
            let r = betti_compare(&c, level, (0, 3)).map_err(e)?;
            ensure!(r.passes(), "{name} L={level}: {r:?}");
            notes.push(format!("{name}@{level}"));
        }
    }
    Ok(notes.join(" "))
}

fn topology_positive() -> Outcome {
    let t = Truncation { level: 4, window: (0, 3), u_powers: 3 };
    let mut notes = Vec::new();

    let start = Instant::now();
    let k = SimplicialComplex::sphere2();
    let m = reduce_by_tree(&k, 0).map_err(e)?;
    let a = fundamental_cycle(&k, 2, Q).map_err(e)?;
    let pd = check_pd(&m, &a, &[], COSET_LIMIT).map_err(e)?;
    ensure!(pd.passed && pd.definitive, "sphere2 pd {pd:?}");
    let r = check_space_cy(&m, &a, &[], &t, COSET_LIMIT).map_err(e)?;
    ensure!(r.cy.verdict == Verdict::Verified && r.cy.n == 2, "sphere2: {:?}", r.cy.checks);
    notes.push(format!("sphere2 {:.1?}", within(start, 120, "sphere2")?));

    let start = Instant::now();
    let f2 = ScalarKind::Prime(2);
    let k = SimplicialComplex::rp2_min();
    let m = reduce_by_tree(&k, 0).map_err(e)?;
    let a = fundamental_cycle(&k, 2, f2).map_err(e)?;
    let pd = check_pd(&m, &a, &[], COSET_LIMIT).map_err(e)?;
    ensure!(pd.passed && pd.definitive && pd.pi1_order == Some(2), "rp2 pd {pd:?}");
    ensure!(pd.systems.iter().any(|s| s.rank == 2 && s.quasi_iso), "no regular representation");
    let r = check_space_cy(&m, &a, &[], &t, COSET_LIMIT).map_err(e)?;
    ensure!(r.cy.verdict == Verdict::Verified && r.cy.definitive, "rp2: {:?}", r.cy.checks);
    notes.push(format!("rp2/F2 {:.1?}", within(start, 120, "rp2")?));

    let start = Instant::now();
    let k = SimplicialComplex::torus7();
    let m = reduce_by_tree(&k, 0).map_err(e)?;
    let a = fundamental_cycle(&k, 2, Q).map_err(e)?;
    let sys = sign_characters(&m, Q).map_err(e)?;
    ensure!(sys.len() == 2, "{} sign systems", sys.len());
    let sys = &sys[..1];
    let pd = check_pd(&m, &a, sys, COSET_LIMIT).map_err(e)?;
    ensure!(pd.passed && !pd.definitive && pd.pi1_order.is_none(), "torus pd {pd:?}");
    let r = check_space_cy(&m, &a, sys, &t, COSET_LIMIT).map_err(e)?;
    ensure!(r.cy.verdict == Verdict::VerifiedFiltered, "torus: {:?}", r.cy.checks);
    notes.push(format!("torus7 {:.1?}", within(start, 120, "torus7")?));
    Ok(notes.join(", "))
}

fn topology_negative() -> Outcome {
    let k = SimplicialComplex::rp2_min();
    match fundamental_cycle(&k, 2, Q) {
        Err(Error::NotOrientable) => {}
        other => return Err(format!("expected NotOrientable, got {:?}", other.map(|_| ())))
    }
    let h = k.chain_complex(ScalarKind::Integer).map_err(e)?.homology_all().map_err(e)?;
    let h1 = h.degrees.get(&1).ok_or("no H_1")?;
    ensure!(h1.rank == 0 && h1.torsion.len() == 1 && h1.torsion[0] == 2.into(), "H_1 = {h1:?}");
    Ok("NotOrientable over Q; H_1(Z) = Z/2".into())
}

fn algebra_duality() -> Outcome {
    let (f, n) = builtin_frobenius("dual_numbers", Q).unwrap();
    ensure!(n == 0, "n = {n}");
    let r = proper_cy_algebra(&f, 0).map_err(e)?;
    ensure!(r.verdict == Verdict::Verified, "proper: {:?}", r.checks);
    let t = Truncation { level: 5, window: (0, 3), u_powers: 3 };
    let r = smooth_cy_on_bar(&f, 0, &t).map_err(e)?;
    ensure!(r.verdict == Verdict::Verified, "smooth on bar: {:?}", r.checks);
    let (g, _) = builtin_frobenius("dual_numbers_degenerate", Q).unwrap();
    match proper_cy_algebra(&g, 0) {
        Err(Error::DegenerateTrace { .. }) => {}
        other => return Err(format!("degenerate trace gave {:?}", other.map(|r| r.verdict))),
    }
    let b = bar(&f.algebra, 6).map_err(e)?;
    let ranks = b.coalgebra().chain_complex().map_err(e)?.homology(0, 5).map_err(e)?.ranks(0, 5);
    ensure!(ranks == vec![1; 6], "bar homology {ranks:?}");
    Ok("proper and smooth pass; degenerate rejected; bar ranks 1 in 0..5".into())
}

fn metamorphic() -> Outcome {
    let t = Truncation { level: 3, window: (0, 3), u_powers: 2 };
    for name in ["heisenberg", "aff1", "sl2"] {
        let g = LieAlgebra::builtin(name, Q).unwrap();
        let base = check_lie_cy(&g, &t, &Q.one()).map_err(e)?.cy.verdict;
        for s in [2, -3] {
            let v = check_lie_cy(&g, &t, &Q.from_i64(s)).map_err(e)?.cy.verdict;
            ensure!(v == base, "{name}: scaling theta by {s} gave {v:?}, not {base:?}");
        }
        let b = ce_betti(&g)?;
        let n = g.dim();
        for shift in 1..n {
            let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).rev().collect();
            let h = g.permuted(&perm).map_err(e)?;
            ensure!(ce_betti(&h)? == b, "{name}: permuting the basis changed Betti numbers");
            ensure!(check_lie_cy(&h, &t, &Q.one()).map_err(e)?.cy.verdict == base, "{name}: permuted verdict");
        }
    }

    let st = Truncation { level: 4, window: (0, 3), u_powers: 3 };
    let k = SimplicialComplex::sphere2();
    let m = reduce_by_tree(&k, 0).map_err(e)?;
    let a = fundamental_cycle(&k, 2, Q).map_err(e)?;
    let v = check_space_cy(&m, &a.scaled(&Q.from_i64(-5)), &[], &st, COSET_LIMIT).map_err(e)?.cy.verdict;
    ensure!(v == Verdict::Verified, "scaled alpha gave {v:?}");

    for (name, k) in [("sphere2", SimplicialComplex::sphere2()), ("torus7", SimplicialComplex::torus7())] {
        let n = k.n_vertices();
        let perm: Vec<usize> = (0..n).map(|v| (3 * v + 1) % n).collect();
        let r = k.relabeled(&perm).map_err(e)?;
        for kind in [Q, ScalarKind::Integer, ScalarKind::Prime(2)] {
            let h0 = k.chain_complex(kind).map_err(e)?.homology_all().map_err(e)?;
            let h1 = r.chain_complex(kind).map_err(e)?.homology_all().map_err(e)?;
            ensure!(h0 == h1, "{name}: relabeling changed homology over {kind}");
        }
    }

    let s = SimplicialComplex::sphere2().subdivide_facet(0).map_err(e)?;
    let m = reduce_by_tree(&s, 0).map_err(e)?;
    let a = fundamental_cycle(&s, 2, Q).map_err(e)?;
    let v = check_space_cy(&m, &a, &[], &st, COSET_LIMIT).map_err(e)?.cy.verdict;
    ensure!(v == Verdict::Verified, "subdivided sphere2 gave {v:?}");
    Ok("scaling, relabeling and subdivision preserve verdicts and ranks".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("structural identities", structural),
        ("lie unimodular cases", lie_positive),
        ("lie non-unimodular case", lie_negative),
        ("pbw dimension law", pbw),
        ("loop space of S2", loop_space),
        ("coHH equals HH", cohh_equals_hh),
        ("topology positive cases", topology_positive),
        ("topology negative case", topology_negative),
        ("algebra duality", algebra_duality),
        ("metamorphic invariance", metamorphic),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let d = start.elapsed();
        match r {
            Ok(detail) => println!("PASS {:>2} {name} ({d:.1?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({d:.1?}): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
