//! Space-level Calabi–Yau certificate.

use serde::Serialize;

use super::{cap_with, chains_coalgebra, check_pd, FundamentalCycle, LocalSystem, PdReport, ReducedModel};
use crate::cy_verify::{
    trivial_coefficient_obstruction, CYReport, Check, CoHHChain, LiftRecord, Obstruction, Truncation, Verdict,
    Witness,
};
use crate::cyclic::{cohochschild_with_basis, lift_to_negative_cyclic};
use crate::dgstruct::{DGCoalgebra, Mono};
use crate::error::{Error, Result};
use crate::linalg::{solve_sparse, SparseMatrix};

/// Extra weight above n searched for the correction in [`transport_cycle`].
pub const TRANSPORT_EXTRA_WEIGHT: u32 = 3;

/// A b-cycle of coHH_n(C) whose bar-length-zero part is α⊗[], and the
/// weight it lives in.
///
/// Projection to bar length zero is a chain map coHH(C) → C and b never
/// raises weight, so each weight-≤w part is a finite subcomplex and the
/// correction is an exact linear solve there. ∂Δ³ needs w = n + 1, the
/// projective plane and the torus need n + 2.
pub fn transport_cycle(c: &DGCoalgebra, m: &ReducedModel, alpha: &FundamentalCycle) -> Result<(CoHHChain, u32)> {
    let n = alpha.n as i64;
    let gens = |s: &[usize]| -> Result<usize> {
        let i = m.cell_index(s).ok_or_else(|| Error::Input(format!("{s:?} collapsed")))?;
        let off: usize = (1..s.len() - 1).map(|p| m.cells(p).len()).sum();
        Ok(off + i)
    };
    let lead: Vec<(Vec<Mono>, _)> = alpha
        .coeffs
        .iter()
        .map(|(s, x)| Ok((vec![vec![gens(s)? as u32 + 1], vec![]], x.clone())))
        .collect::<Result<_>>()?;
    for w in alpha.n as u32..=alpha.n as u32 + TRANSPORT_EXTRA_WEIGHT {
        let (mixed, basis) = cohochschild_with_basis(c, w)?;
        let z = basis.coords(n, &lead)?;
        let b = mixed.b(n);
        let r = b.apply(&z);
        if r.is_empty() {
            return Ok((CoHHChain { degree: n, terms: lead }, w));
        }
        let free: Vec<usize> = (0..basis.dim(n)).filter(|&i| !basis.get(n)[i][1].is_empty()).collect();
        let cols = free.iter().map(|&i| b.column(i).clone()).collect();
        let sub = SparseMatrix::from_columns(c.kind(), b.n_rows(), cols)?;
        let neg: Vec<_> = r.into_iter().map(|(i, x)| (i, -x)).collect();
        if let Some(x) = solve_sparse(&sub, &neg)? {
            let mut terms = lead;
            terms.extend(x.into_iter().map(|(j, v)| (basis.get(n)[free[j]].clone(), v)));
            return Ok((CoHHChain { degree: n, terms }, w));
        }
    }
    Err(Error::NotACycle)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceCYReport {
    pub vertices: usize,
    pub tree_edges: usize,
    /// Surviving cells of K/T by dimension, starting at 1.
    pub cells: Vec<usize>,
    pub homology_preserved: bool,
    /// Terms of the class in coHH_n beyond α⊗[].
    pub correction_terms: usize,
    pub pd: PdReport,
    pub cy: CYReport,
}

/// Proper CY certificate for the chains coalgebra of K on the class of α.
///
/// The quasi-isomorphism condition is decided through cap-product duality
/// with local coefficients, which is finite; when π₁ is finite the regular
/// representation makes it definitive. The negative cyclic lift is computed
/// in weight ≤ max(L, weight of the class).
pub fn check_space_cy(
    m: &ReducedModel,
    alpha: &FundamentalCycle,
    systems: &[LocalSystem],
    t: &Truncation,
    coset_limit: usize,
) -> Result<SpaceCYReport> {
    let n = alpha.n as i64;
    let c = chains_coalgebra(m, alpha.kind)?;
    let (beta, weight) = transport_cycle(&c, m, alpha)?;
    let mut checks = vec![Check::new("cycle", true, format!("b(beta) = 0 with {} terms in weight <= {weight}", beta.terms.len()))];

    let (trivial, detail) = trivial_coefficient_obstruction(&c, n)?;
    checks.push(Check::new("trivial_coefficients", trivial.is_none(), detail));

    let pd = check_pd(m, alpha, systems, coset_limit)?;
    let failing: Vec<&str> = pd.systems.iter().filter(|r| !(r.chain_map && r.quasi_iso)).map(|r| r.name.as_str()).collect();
    checks.push(Check::new(
        "local_system_duality",
        pd.passed,
        match (&pd.pi1_order, failing.is_empty()) {
            (_, false) => format!("cap product not a quasi-isomorphism for {}", failing.join(", ")),
            (Some(o), true) => format!("cap product quasi-isomorphism for k[pi1], |pi1| = {o}"),
            (None, true) => format!("cap product quasi-isomorphism for {} supplied systems; pi1 not known finite", pd.systems.len()),
        },
    ));

    let (mixed, basis) = cohochschild_with_basis(&c, t.level.max(weight))?;
    let z = basis.coords(n, &beta.terms)?;
    let lift = lift_to_negative_cyclic(&mixed, n, &z, t.u_powers)?;
    checks.push(Check::new(
        "negative_cyclic_lift",
        lift.obstructed_at.is_none(),
        match lift.obstructed_at {
            None => format!("{} stages", lift.stages.len()),
            Some(i) => format!("no solution at stage {i}"),
        },
    ));

    let cap = cap_with(m, alpha, &LocalSystem::trivial(alpha.kind, m.cells(1).len()))?;
    let verdict = if checks.iter().any(|ch| !ch.passed) {
        Verdict::Failed
    } else if pd.definitive {
        Verdict::Verified
    } else {
        Verdict::VerifiedFiltered
    };
    let obstruction = trivial.or_else(|| {
        let r = pd.systems.iter().find(|r| r.chain_map && !r.quasi_iso)?;
        let q = (0..=alpha.n).find(|&q| r.cohomology[q] != r.homology[alpha.n - q])?;
        Some(Obstruction {
            check: format!("cap:{}", r.name),
            degree: (alpha.n - q) as i64,
            source_rank: r.cohomology[q],
            target_rank: r.homology[alpha.n - q],
            trusted: true,
        })
    });
    let dim = m.base().dim().max(0) as usize;
    Ok(SpaceCYReport {
        vertices: m.base().n_vertices(),
        tree_edges: m.tree().len(),
        cells: (1..=dim).map(|p| m.cells(p).len()).collect(),
        homology_preserved: m.certificate().equal,
        correction_terms: beta.terms.len() - alpha.coeffs.len(),
        cy: CYReport {
            verdict,
            n,
            truncation: *t,
            definitive: pd.definitive || obstruction.is_some(),
            checks,
            obstruction,
            lift: Some(LiftRecord::from_lift(&lift)),
            witness: Witness::from_map(&cap, -n, 0),
        },
        pd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cy_verify::Verdict;
    use crate::linalg::ScalarKind;
    use crate::spaces::{fundamental_cycle, reduce_by_tree, SimplicialComplex, COSET_LIMIT};

    #[test]
    fn sphere_verified() {
        let k = SimplicialComplex::sphere2();
        let m = reduce_by_tree(&k, 0).unwrap();
        let a = fundamental_cycle(&k, 2, ScalarKind::Rational).unwrap();
        let t = Truncation { level: 4, window: (0, 3), u_powers: 3 };
        let r = check_space_cy(&m, &a, &[], &t, COSET_LIMIT).unwrap();
        assert_eq!(r.cy.verdict, Verdict::Verified, "{:?}", r.cy.checks);
        assert!(r.pd.definitive);
        assert!(r.cy.witness.replay().unwrap());
    }

    #[test]
    fn rp2_mod2_verified() {
        let k = SimplicialComplex::rp2_min();
        let m = reduce_by_tree(&k, 0).unwrap();
        let a = fundamental_cycle(&k, 2, ScalarKind::Prime(2)).unwrap();
        let r = check_space_cy(&m, &a, &[], &Truncation::default(), COSET_LIMIT).unwrap();
        assert_eq!(r.cy.verdict, Verdict::Verified, "{:?}", r.cy.checks);
    }

    #[test]
    fn torus_filtered() {
        let k = SimplicialComplex::torus7();
        let m = reduce_by_tree(&k, 0).unwrap();
        let a = fundamental_cycle(&k, 2, ScalarKind::Rational).unwrap();
        let sys = crate::spaces::sign_characters(&m, ScalarKind::Rational).unwrap();
        let t = Truncation { level: 4, ..Truncation::default() };
        let r = check_space_cy(&m, &a, &sys[..1], &t, 2000).unwrap();
        assert_eq!(r.cy.verdict, Verdict::VerifiedFiltered, "{:?}", r.cy.checks);
        assert!(!r.pd.definitive);
    }
}
