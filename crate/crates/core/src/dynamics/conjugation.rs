//! Conjugations between integrable maps assembled fiber by fiber.

use std::collections::BTreeMap;

use super::{DynError, RationalMapPlane, SystemAnalysis};
use crate::arith::{MPoly, RatFn, Scalar, Var};
use crate::mobius::Mobius;
use crate::vars;

#[derive(Clone, Debug)]
pub struct ConjugationResult {
    /// `k = f(h)`.
    pub level: RatFn,
    /// `h = f⁻¹(k)`, written in `h` as the level variable of the target.
    pub level_inv: RatFn,
    pub conjugator: Mobius<RatFn>,
    pub psi: RationalMapPlane,
    pub psi_inv: RationalMapPlane,
}

fn rename_h_t(r: &RatFn, to_t: bool) -> RatFn {
    let (h, t) = (vars::h(), vars::t());
    if to_t {
        r.rename(&h, &t)
    } else {
        r.rename(&t, &h)
    }
}

/// Inverse of a Möbius function of `h`.
fn invert_level(f: &RatFn) -> Result<RatFn, DynError> {
    let m = Mobius::<RatFn>::from_ratfn(&rename_h_t(f, true))
        .map_err(|_| DynError::Verification(format!("level map {f} is not invertible as a Möbius map")))?;
    Ok(rename_h_t(&m.inverse().to_ratfn(), false))
}

fn subs2(r: &RatFn, a: (Var, &RatFn), b: (Var, &RatFn)) -> Result<RatFn, DynError> {
    let mut map = BTreeMap::new();
    map.insert(a.0, a.1.clone());
    map.insert(b.0, b.1.clone());
    Ok(r.subs(&map)?)
}

/// `Ψ = Q_{f(h)} ∘ m_h ∘ P_h⁻¹ |_{h = V_F}` and its inverse
/// `Ψ⁻¹ = P_{f⁻¹(k)} ∘ m_{f⁻¹(k)}⁻¹ ∘ Q_k⁻¹ |_{k = V_G}`, verified symbolically.
///
/// `m` is a Möbius function of `t` with coefficients in `h`.
pub fn build_conjugation(
    f_sys: &SystemAnalysis,
    g_sys: &SystemAnalysis,
    level: &RatFn,
    level_inv: Option<&RatFn>,
    m: &Mobius<RatFn>,
) -> Result<ConjugationResult, DynError> {
    if f_sys.param.radical.is_some() || g_sys.param.radical.is_some() {
        return Err(DynError::NonRational(
            "conjugation needs parametrizations rational in h".into(),
        ));
    }
    let (t, h) = (vars::t(), vars::h());
    let level_inv = match level_inv {
        Some(r) => r.clone(),
        None => invert_level(level)?,
    };
    let pinv_f = f_sys.param.inverse.clone().ok_or(DynError::NoParametrization)?;
    let pinv_g = g_sys.param.inverse.clone().ok_or(DynError::NoParametrization)?;

    let s = subs2(&m.to_ratfn(), (t.clone(), &pinv_f), (h.clone(), &RatFn::var(&h)))?;
    let mut psi = Vec::new();
    for q in [&g_sys.param.p1, &g_sys.param.p2] {
        let c = subs2(q, (t.clone(), &s), (h.clone(), level))?;
        psi.push(c.subs_one(&h, &f_sys.sys.integral)?);
    }
    let m_inv = m.inverse().to_ratfn();
    let u = subs2(&m_inv, (t.clone(), &pinv_g), (h.clone(), &level_inv))?;
    let mut psi_inv = Vec::new();
    for p in [&f_sys.param.p1, &f_sys.param.p2] {
        let c = subs2(p, (t.clone(), &u), (h.clone(), &level_inv))?;
        psi_inv.push(c.subs_one(&h, &g_sys.sys.integral)?);
    }
    let psi = RationalMapPlane::new(psi[0].clone(), psi[1].clone());
    let psi_inv = RationalMapPlane::new(psi_inv[0].clone(), psi_inv[1].clone());

    if !psi_inv.compose(&psi)?.is_identity() {
        return Err(DynError::Verification("Ψ⁻¹ ∘ Ψ ≠ id".into()));
    }
    let g_map = RationalMapPlane::new(g_sys.sys.map.f1.clone(), g_sys.sys.map.f2.clone());
    let conj = psi_inv.compose(&g_map.compose(&psi)?)?;
    if conj.f1 != f_sys.sys.map.f1 || conj.f2 != f_sys.sys.map.f2 {
        return Err(DynError::Verification("F ≠ Ψ⁻¹ ∘ G ∘ Ψ".into()));
    }
    let lhs = psi.pull_back(&g_sys.sys.integral)?;
    let rhs = level.subs_one(&h, &f_sys.sys.integral)?;
    if lhs != rhs {
        return Err(DynError::Verification("V_G ∘ Ψ ≠ f ∘ V_F".into()));
    }
    Ok(ConjugationResult {
        level: level.clone(),
        level_inv,
        conjugator: m.clone(),
        psi,
        psi_inv,
    })
}

/// Solutions `k = f(h)` of `I(M_h) = I(N_k)` that are rational in `h`,
/// where `I` is the conjugacy invariant. Handles equations of degree one
/// or two in `k`; the quadratic case needs a square discriminant.
pub fn level_candidates(f_sys: &SystemAnalysis, g_sys: &SystemAnalysis) -> Result<Vec<RatFn>, DynError> {
    let (h, k) = (vars::h(), vars::k());
    let i_f = f_sys.mobius.conjugacy_invariant();
    let i_g = g_sys.mobius.conjugacy_invariant().rename(&h, &k);
    let eq: MPoly = i_g
        .numer()
        .mul(i_f.denom())
        .sub(&i_f.numer().mul(i_g.denom()));
    let c = eq.coeffs_in(&k);
    let mut out = Vec::new();
    match c.len() {
        2 => out.push(RatFn::new(c[0].neg(), c[1].clone())?),
        3 => {
            let disc = c[1].mul(&c[1]).sub(&c[0].mul(&c[2]).scale(&Scalar::from_int(4)));
            let Some(root) = disc.sqrt() else {
                return Ok(out);
            };
            let den = c[2].scale(&Scalar::from_int(2));
            for r in [c[1].neg().add(&root), c[1].neg().sub(&root)] {
                let cand = RatFn::new(r, den.clone())?;
                if !cand.numer().contains_var(&k) && !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
        _ => {}
    }
    out.retain(|r| !r.numer().contains_var(&k) && !r.denom().contains_var(&k));
    // simplest correspondence first
    out.sort_by_key(complexity);
    Ok(out)
}

/// The simplest level correspondence from [`level_candidates`].
pub fn suggest_level_correspondence(
    f_sys: &SystemAnalysis,
    g_sys: &SystemAnalysis,
) -> Result<Option<RatFn>, DynError> {
    Ok(level_candidates(f_sys, g_sys)?.into_iter().next())
}

fn complexity(r: &RatFn) -> usize {
    r.numer().num_terms() + r.denom().num_terms()
}

/// Finds a conjugation without user input: the level correspondences from
/// the conjugacy invariant, then the conjugator family from the linear
/// conjugacy equations. Among verified candidates the one with the fewest
/// terms in `Ψ` is returned.
pub fn auto_conjugation(
    f_sys: &SystemAnalysis,
    g_sys: &SystemAnalysis,
) -> Result<Option<ConjugationResult>, DynError> {
    let h = vars::h();
    let n = &g_sys.mobius;
    let size = |r: &ConjugationResult| complexity(&r.psi.f1) + complexity(&r.psi.f2);
    let mut best: Option<ConjugationResult> = None;
    for level in level_candidates(f_sys, g_sys)? {
        let sub = |r: &RatFn| r.subs_one(&h, &level);
        let n_level = Mobius::new(sub(&n.a)?, sub(&n.b)?, sub(&n.c)?, sub(&n.d)?)?;
        for g in f_sys.mobius.conjugators(&n_level) {
            let Ok(res) = build_conjugation(f_sys, g_sys, &level, None, &g) else {
                continue;
            };
            if best.as_ref().is_none_or(|b| size(&res) < size(b)) {
                best = Some(res);
            }
        }
    }
    Ok(best)
}
