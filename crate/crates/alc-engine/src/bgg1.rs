//! First order invariant operators: the Casimir scalar, the unique central
//! weight and the line bundle twisting a candidate B.

use std::collections::BTreeMap;

use num::Zero;
use serde::Serialize;

use crate::alc::{AlcContext, PairCount, Summand};
use crate::error::{EngineError, Result};
use crate::linalg;
use crate::parabolic::ParabolicData;
use crate::rational::{q, qf, serde_qvec, Q};
use crate::rootsys::Weight;

fn casimir(pd: &ParabolicData, nu: &[Q]) -> Q {
    let shifted: Vec<Q> = nu.iter().zip(&pd.rho_prime).map(|(a, r)| a + r * q(2)).collect();
    pd.rs.ip(nu, &shifted)
}

/// c_{lam, mu, a} = ((mu - lam, mu + lam + 2 rho') - (a, a + 2 rho')) / 2.
pub fn casimir_direct(pd: &ParabolicData, lam: &[Q], mu: &[Q], a: &[Q]) -> Q {
    (casimir(pd, mu) - casimir(pd, lam) - casimir(pd, a)) * qf(1, 2)
}

#[derive(Clone, Debug, Serialize)]
pub struct CasimirValue {
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub levi_part: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub central_part: Q,
}

/// Casimir coefficient with its split into Levi and central contributions.
/// Requires mu^0 = lam^0 + a^0.
pub fn casimir_coefficient(pd: &ParabolicData, lam: &[Q], mu: &[Q], a: &[Q]) -> Result<CasimirValue> {
    let (lp, l0) = pd.central_projection(lam);
    let (mp, m0) = pd.central_projection(mu);
    let (ap, a0) = pd.central_projection(a);
    if m0.iter().zip(&l0).zip(&a0).any(|((m, l), x)| *m != l + x) {
        return Err(EngineError::Rejected("central weight of mu is not lam^0 + a^0".into()));
    }
    let value = casimir_direct(pd, lam, mu, a);
    let levi_part = casimir_direct(pd, &lp, &mp, &ap);
    let central_part = pd.rs.ip(&pd.central_to_weight(&l0), &pd.central_to_weight(&a0));
    if value != &levi_part + &central_part {
        return Err(EngineError::Consistency("split Casimir form disagrees with the direct formula".into()));
    }
    Ok(CasimirValue { value, levi_part, central_part })
}

/// Display label of V_alpha: minus the simple root.
pub fn v_alpha_label(pd: &ParabolicData, alpha: usize) -> Weight {
    pd.rs.simple_root_weight(alpha).iter().map(|&x| q(-x)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralWeight {
    /// Coefficients x_beta of lam^0 = sum x_beta beta^0.
    #[serde(with = "serde_qvec")]
    pub coords: Vec<Q>,
    /// lam^0 in fundamental coordinates.
    #[serde(with = "serde_qvec")]
    pub weight: Vec<Q>,
}

fn central_gram(pd: &ParabolicData) -> Vec<Vec<Q>> {
    pd.central_basis.iter().map(|a| pd.central_basis.iter().map(|b| pd.rs.ip(a, b)).collect()).collect()
}

/// Unique lam^0 making every target operator invariant; `targets` pairs a
/// crossed node with the Levi part of a target label, `pins` are nodes with
/// (lam^0, alpha^0) = 0.
pub fn solve_central_weight(
    pd: &ParabolicData,
    lam_levi: &[Q],
    targets: &[(usize, Weight)],
    pins: &[usize],
) -> Result<CentralWeight> {
    let k = pd.sigma0.len();
    let mut rhs: BTreeMap<usize, Q> = BTreeMap::new();
    let mut put = |pos: usize, v: Q| -> Result<()> {
        if let Some(old) = rhs.get(&pos) {
            if *old != v {
                return Err(EngineError::Consistency(format!(
                    "targets at node {} give conflicting central equations",
                    pd.sigma0[pos] + 1
                )));
            }
        }
        rhs.insert(pos, v);
        Ok(())
    };
    for &a in pins {
        let pos = pd.cross_pos(a).ok_or_else(|| EngineError::InvalidNodes(format!("node {} is not crossed", a + 1)))?;
        put(pos, Q::zero())?;
    }
    for (a, mu) in targets {
        let pos = pd.cross_pos(*a).ok_or_else(|| EngineError::InvalidNodes(format!("node {} is not crossed", a + 1)))?;
        let ap = pd.levi_part(&v_alpha_label(pd, *a));
        // c' + (lam^0, a^0) = 0 with a^0 = -alpha^0
        put(pos, casimir_direct(pd, lam_levi, mu, &ap))?;
    }
    if rhs.len() != k {
        return Err(EngineError::Singular(format!("{} equations for {k} unknowns", rhs.len())));
    }
    let g = central_gram(pd);
    let b: Vec<Q> = (0..k).map(|i| rhs[&i].clone()).collect();
    let coords = linalg::solve(&g, &b).ok_or_else(|| EngineError::Singular("central Gram matrix".into()))?;
    let weight = pd.central_to_weight(&coords);
    Ok(CentralWeight { coords, weight })
}

#[derive(Clone, Debug, Serialize)]
pub struct LineBundle {
    pub lambda0: CentralWeight,
    /// Display label of L (fundamental coordinates).
    #[serde(with = "serde_qvec")]
    pub display: Vec<Q>,
    /// Weight acting on the line: minus the display label.
    #[serde(with = "serde_qvec")]
    pub actual: Vec<Q>,
    pub trivial_by_dimension: bool,
}

/// Twist L for one summand from its kernel components.
pub fn line_bundle_weight(ctx: &AlcContext, summand: usize, b_dim: usize, counts: &[PairCount]) -> Result<LineBundle> {
    let pd = &ctx.pd;
    let w: &Summand = &ctx.summands[summand];
    let l = pd.rank();
    if b_dim == 1 {
        let zero = vec![Q::zero(); l];
        return Ok(LineBundle {
            lambda0: CentralWeight { coords: vec![Q::zero(); pd.sigma0.len()], weight: zero.clone() },
            display: zero.clone(),
            actual: zero,
            trivial_by_dimension: true,
        });
    }
    let disp: Weight = w.display(pd).iter().map(|&x| q(x)).collect();
    let (lam_levi, lam_c) = pd.central_projection(&disp);
    let mut targets = Vec::new();
    let mut pins = Vec::new();
    for c in counts.iter().filter(|c| c.summand == summand) {
        let pos = pd.cross_pos(c.alpha).unwrap();
        if w.dim() == 1 && w.support().contains(&pos) {
            pins.push(c.alpha);
            continue;
        }
        if c.kernel.len() > 1 && c.own {
            return Err(EngineError::Rejected(format!("ALC fails at node {}", c.alpha + 1)));
        }
        for k in &c.kernel {
            let mu: Weight = pd.dual_label(k).iter().map(|&x| q(x)).collect();
            targets.push((c.alpha, pd.levi_part(&mu)));
        }
    }
    let lambda0 = solve_central_weight(pd, &lam_levi, &targets, &pins)?;
    let cw = pd.central_to_weight(&lam_c);
    let display: Vec<Q> = lambda0.weight.iter().zip(&cw).map(|(a, b)| a - b).collect();
    let actual = display.iter().map(|x| -x).collect();
    Ok(LineBundle { lambda0, display, actual, trivial_by_dimension: false })
}
