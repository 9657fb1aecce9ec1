//! Dimensional reduction to two variables: restriction of distinguished
//! operators through (id, h_dual), the reduced presentation on (l0, t), the
//! localized one-variable Fourier-Laplace transform to (z, t), the gauge
//! normalization, the transpose identity, and the quantum-differential-
//! equation specialization at z = 1.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, One, Zero};
use serde::Serialize;

use crate::bernstein::{bernstein_selfdual, BernsteinPolynomial, Normalization, UniPoly};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::logfields::{dualize, DivisorAnalysis};
use crate::polyring::{rat_to_string, Rat};
use crate::weyl::{apply_to_symbolic_power, WeylContext, WeylOperator};

/// Which two-variable chart the presentation lives on; `t` is invertible in
/// both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoVarKind {
    /// Coordinates (l0, t).
    LambdaT,
    /// Coordinates (z, t).
    ZT,
}

/// A two-generator presentation of the reduced system.
#[derive(Debug, Clone)]
pub struct ReducedPresentation {
    pub kind: TwoVarKind,
    pub ctx: Arc<WeylContext>,
    /// On (l0, t): `[Euler generator, b generator]`; on (z, t) the order is
    /// `[b generator, Euler generator]`, following the respective closed
    /// forms.
    pub generators: Vec<WeylOperator>,
    pub n: usize,
    pub hp: Rat,
    pub beta0: Rat,
    /// Monic reduction-normalized b-function used in the templates.
    pub b_monic: UniPoly,
    /// Leading coefficient of the functional-equation b-function of the
    /// catalog equation (the monic polynomial times this constant satisfies
    /// `h(d) h^s = b h^(s-1)` exactly).
    pub fe_leading: Rat,
    pub gauge_normalized: bool,
}

impl ReducedPresentation {
    pub fn b_generator(&self) -> &WeylOperator {
        match self.kind {
            TwoVarKind::LambdaT => &self.generators[1],
            TwoVarKind::ZT => &self.generators[0],
        }
    }

    pub fn euler_generator(&self) -> &WeylOperator {
        match self.kind {
            TwoVarKind::LambdaT => &self.generators[0],
            TwoVarKind::ZT => &self.generators[1],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedReport {
    pub chart: String,
    pub generators: Vec<String>,
    pub n: usize,
    pub hp: String,
    pub beta0: String,
    pub b_monic: String,
    pub fe_leading: String,
    pub gauge_normalized: bool,
}

impl ReducedPresentation {
    pub fn report(&self) -> ReducedReport {
        ReducedReport {
            chart: match self.kind {
                TwoVarKind::LambdaT => "(l0, t)".into(),
                TwoVarKind::ZT => "(z, t)".into(),
            },
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            n: self.n,
            hp: rat_to_string(&self.hp),
            beta0: rat_to_string(&self.beta0),
            b_monic: self.b_monic.render("s"),
            fe_leading: rat_to_string(&self.fe_leading),
            gauge_normalized: self.gauge_normalized,
        }
    }
}

/// The Weyl context of the dual space coordinates l1..ln.
pub fn dual_weyl_context(analysis: &DivisorAnalysis) -> Arc<WeylContext> {
    WeylContext::new(
        (1..=analysis.n).map(|i| format!("l{i}")).collect::<Vec<_>>(),
        vec![],
    )
}

fn one_var_t_context() -> Arc<WeylContext> {
    WeylContext::new(vec!["t"], vec![]).with_invertible(&["t"])
}

fn lambda_t_context() -> Arc<WeylContext> {
    WeylContext::new(vec!["l0", "t"], vec![]).with_invertible(&["t"])
}

fn z_t_context(z_invertible: bool) -> Arc<WeylContext> {
    let ctx = WeylContext::new(vec!["z", "t"], vec![]);
    if z_invertible {
        ctx.with_invertible(&["z", "t"])
    } else {
        ctx.with_invertible(&["t"])
    }
}

fn falling_rat(k: i64, j: u32) -> Rat {
    let mut acc = BigInt::one();
    for t in 0..j as i64 {
        acc *= BigInt::from(k - t);
    }
    Rat::from_integer(acc)
}

/// Restriction of a dual-space operator through `phi = (id, h_dual)`: finds
/// the unique t-operator of order at most `max_order` whose action on `t^k`
/// matches `op((h_dual)^k)` for k = 0..max_order+n, verified on two further
/// powers. Fails when the images do not lie in the pullback algebra or no
/// bounded-order operator matches.
pub fn restrict_through_h(
    op: &WeylOperator,
    analysis: &DivisorAnalysis,
    max_order: usize,
) -> Result<WeylOperator> {
    let n = analysis.n as i64;
    let dual = dualize(analysis)?;
    let h = &dual.h_dual;
    // op(h^s) = h^(s - kappa) Q(s, l)
    let class = apply_to_symbolic_power(op, h)?;
    let kappa = class.shift as i64;
    let payload_ctx = class.payload.context().clone();
    let s_idx = payload_ctx
        .index_of("s")
        .expect("payload context carries s");
    let nvars = payload_ctx.len();

    // Decompose Q = sum_{j,m} gamma_{j,m} s^j h^m; each s-coefficient must be
    // a constant linear combination of powers of h, which for homogeneous h
    // means each homogeneous component is gamma * h^m exactly.
    let mut gamma: BTreeMap<(u32, i64), Rat> = BTreeMap::new();
    let mut by_j: BTreeMap<u32, crate::polyring::Polynomial> = BTreeMap::new();
    let lambda_only: Vec<usize> = (0..nvars).filter(|&i| i != s_idx).collect();
    let lambda_ctx = crate::polyring::VarContext::new(
        lambda_only
            .iter()
            .map(|&i| payload_ctx.names()[i].clone())
            .collect::<Vec<_>>(),
    );
    for (e, c) in class.payload.terms() {
        let j = e[s_idx];
        let mut le = vec![0u32; lambda_only.len()];
        for (t, &i) in lambda_only.iter().enumerate() {
            le[t] = e[i];
        }
        let mono = crate::polyring::Polynomial::monomial(&lambda_ctx, le, c.clone());
        let entry = by_j
            .entry(j)
            .or_insert_with(|| crate::polyring::Polynomial::zero(&lambda_ctx));
        *entry = entry.add(&mono)?;
    }
    let h_l = h.map_variables(&lambda_ctx, &(0..h.context().len()).collect::<Vec<_>>());
    for (j, q) in &by_j {
        let degrees: std::collections::BTreeSet<u64> = q
            .terms()
            .map(|(e, _)| e.iter().map(|&x| x as u64).sum())
            .collect();
        for d in degrees {
            let comp = q.homogeneous_component(d);
            if d % n as u64 != 0 {
                return Err(Error::Verification(format!(
                    "op does not restrict: payload component of degree {d} is not a power of h"
                )));
            }
            let m = (d / n as u64) as i64;
            let mut rest = comp;
            for _ in 0..m {
                rest = rest.divide_exact(&h_l).ok_or_else(|| {
                    Error::Verification(
                        "op does not restrict: payload component is not a multiple of a power of h"
                            .into(),
                    )
                })?;
            }
            let g = rest.as_constant().ok_or_else(|| {
                Error::Verification(
                    "op does not restrict: payload component is not constant times a power of h"
                        .into(),
                )
            })?;
            if !g.is_zero() {
                gamma.insert((*j, m - kappa), g);
            }
        }
    }

    // image_k(t) = sum gamma_{j,sigma} k^j t^(k+sigma). For each shift sigma,
    // solve sum_j c_{j} (k)_j = p_sigma(k) on k = 0..K by interpolation.
    let big_k = (max_order as i64) + n;
    let shifts: std::collections::BTreeSet<i64> = gamma.keys().map(|(_, s)| *s).collect();
    let image_at = |k: i64| -> BTreeMap<i64, Rat> {
        let mut img = BTreeMap::new();
        for ((j, sigma), g) in &gamma {
            let mut kp = Rat::one();
            for _ in 0..*j {
                kp *= Rat::from_integer(BigInt::from(k));
            }
            let v: &mut Rat = img.entry(k + sigma).or_insert_with(Rat::zero);
            *v += g * kp;
        }
        img.retain(|_, v| !v.is_zero());
        img
    };

    let mut coefficients: BTreeMap<(u32, i64), Rat> = BTreeMap::new(); // (j, r) -> c
    for &sigma in &shifts {
        let cols = max_order + 1;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..=big_k {
            let img = image_at(k);
            let val = img.get(&(k + sigma)).cloned().unwrap_or_else(Rat::zero);
            rows.push((0..cols).map(|j| falling_rat(k, j as u32)).collect::<Vec<_>>());
            rhs.push(val);
        }
        let solution = QMatrix::from_rows(rows).solve(&rhs).ok_or_else(|| {
            Error::Verification(format!(
                "no t-operator of order <= {max_order} matches the images (shift {sigma})"
            ))
        })?;
        for (j, c) in solution.into_iter().enumerate() {
            if !c.is_zero() {
                coefficients.insert((j as u32, sigma + j as i64), c);
            }
        }
    }

    // Assemble T = sum c_{j,r} t^r d_t^j on the localized one-variable chart.
    let tctx = one_var_t_context();
    let mut t_op = WeylOperator::zero(&tctx);
    for ((j, r), c) in &coefficients {
        t_op = t_op.add(&WeylOperator::term(&tctx, vec![*r], vec![*j], vec![], c.clone()))?;
    }

    // Verify on two extra powers.
    for k in (big_k + 1)..=(big_k + 2) {
        let mut acted: BTreeMap<i64, Rat> = BTreeMap::new();
        for ((j, r), c) in &coefficients {
            let v = c * falling_rat(k, *j);
            if v.is_zero() {
                continue;
            }
            let slot = acted.entry(k - *j as i64 + r).or_insert_with(Rat::zero);
            *slot += v;
        }
        acted.retain(|_, v| !v.is_zero());
        if acted != image_at(k) {
            return Err(Error::Verification(format!(
                "restriction verification failed at k = {k}"
            )));
        }
    }
    Ok(t_op)
}

/// The reduced two-variable presentation
/// `(l0 dl0 + n t dt + (n+1) + beta0, h(p) t dl0^n - b(t dt))` with the
/// monic reduction-normalized b-function, cross-checked against the
/// restrictions assembled through the right-module computation.
pub fn reduced_presentation(
    analysis: &DivisorAnalysis,
    hp: &Rat,
    beta0: &Rat,
) -> Result<ReducedPresentation> {
    if hp.is_zero() {
        return Err(Error::BadInput("h(p) must be nonzero".into()));
    }
    let n = analysis.n;
    let b_fe = bernstein_selfdual(&analysis.h)?;
    let fe_leading = b_fe.poly.leading().cloned().unwrap_or_else(Rat::one);
    let b_monic = b_fe.poly.monic();

    // Templates on (l0, t).
    let ctx = lambda_t_context();
    let l0dl0 = WeylOperator::euler(&ctx, &[1, 0]);
    let tdt = WeylOperator::euler(&ctx, &[0, 1]);
    let g_euler = l0dl0
        .add(&tdt.scale(&Rat::from_integer(BigInt::from(n as i64))))?
        .add(&WeylOperator::constant(
            &ctx,
            Rat::from_integer(BigInt::from(n as i64 + 1)) + beta0.clone(),
        ))?;
    let t_pos = WeylOperator::position(&ctx, "t")?;
    let dl0 = WeylOperator::derivation(&ctx, "l0")?;
    let g_b = t_pos
        .normal_product(&dl0.pow(n as u32))?
        .scale(hp)
        .sub(&b_monic.of_operator(&tdt))?;

    // Cross-check via the restrictions of the two distinguished operators.
    let dctx = dual_weyl_context(analysis);
    let chi_dual = WeylOperator::euler(&dctx, &vec![1i64; n]);
    let r_euler = restrict_through_h(&chi_dual, analysis, n)?;
    let tctx = r_euler.context().clone();
    let expect_euler = WeylOperator::euler(&tctx, &[1]).scale(&Rat::from_integer(BigInt::from(n as i64)));
    if r_euler != expect_euler {
        return Err(Error::Verification(format!(
            "restriction of the dual Euler sum is {r_euler}, expected {expect_euler}"
        )));
    }
    let h_of_d = WeylOperator::from_polynomial_in_derivations(
        &analysis.h,
        &dctx,
        &(0..n).collect::<Vec<_>>(),
    );
    let r_b = restrict_through_h(&h_of_d, analysis, n)?;
    // t * r_b must equal the functional-equation b evaluated at t dt.
    let t1 = WeylOperator::position(&tctx, "t")?;
    let tdt1 = WeylOperator::euler(&tctx, &[1]);
    let fe_b_op = UniPoly::new(b_fe.poly.coeffs().to_vec()).of_operator(&tdt1);
    if t1.normal_product(&r_b)? != fe_b_op {
        return Err(Error::Verification(
            "t * restriction of h(d) does not reproduce the functional-equation b".into(),
        ));
    }

    // Right-module generators and their transposes, following the proof
    // chain: transpose(dl0 l0 + n t dt - 1 - beta0) = -(Euler generator) and
    // (-1)^n t transpose(h(p) dl0^n - r_b) = h(p) t dl0^n - b_fe(t dt).
    let r_euler2 = r_euler.transfer(&ctx, &[1])?;
    let rg1 = dl0
        .normal_product(&WeylOperator::position(&ctx, "l0")?)?
        .add(&r_euler2)?
        .sub(&WeylOperator::constant(&ctx, Rat::one() + beta0.clone()))?;
    if rg1.transpose() != g_euler.neg() {
        return Err(Error::Verification(
            "transpose of the right-module Euler generator does not match".into(),
        ));
    }
    let r_b2 = r_b.transfer(&ctx, &[1])?;
    let rg2 = dl0.pow(n as u32).scale(hp).sub(&r_b2)?;
    let sign = if n % 2 == 0 { Rat::one() } else { -Rat::one() };
    let chained = t_pos.normal_product(&rg2.transpose())?.scale(&sign);
    let fe_b_two_var = UniPoly::new(b_fe.poly.coeffs().to_vec()).of_operator(&tdt);
    let expected_chain = t_pos
        .normal_product(&dl0.pow(n as u32))?
        .scale(hp)
        .sub(&fe_b_two_var)?;
    if chained != expected_chain {
        return Err(Error::Verification(
            "right-module transpose chain does not reproduce the b generator".into(),
        ));
    }

    Ok(ReducedPresentation {
        kind: TwoVarKind::LambdaT,
        ctx,
        generators: vec![g_euler, g_b],
        n,
        hp: hp.clone(),
        beta0: beta0.clone(),
        b_monic,
        fe_leading,
        gauge_normalized: false,
    })
}

/// Substitutes `dl0 -> z^(-1)`, `l0 -> z^2 dz` in a (l0, t) operator,
/// producing a Laurent operator on the z-invertible chart.
fn localize_operator(op: &WeylOperator, zctx: &Arc<WeylContext>) -> Result<WeylOperator> {
    let z = WeylOperator::position(zctx, "z")?;
    let dz = WeylOperator::derivation(zctx, "z")?;
    let z2dz = z.pow(2).normal_product(&dz)?;
    let mut out = WeylOperator::zero(zctx);
    for ((pos, der, _cen), c) in op.terms() {
        // source term: l0^a0 t^at dl0^b0 dt^bt
        let (a0, at, b0, bt) = (pos[0], pos[1], der[0], der[1]);
        if a0 < 0 {
            return Err(Error::BadInput("negative l0 exponent".into()));
        }
        let mut term = z2dz.pow(a0 as u32);
        let zinv = WeylOperator::term(zctx, vec![-(b0 as i64), 0], vec![0, 0], vec![], Rat::one());
        term = term.normal_product(&zinv)?;
        let tpart = WeylOperator::term(zctx, vec![0, at], vec![0, bt], vec![], c.clone());
        term = term.normal_product(&tpart)?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Checks that `target = sign * z^k * image` for some `k <= bound`, i.e. the
/// cited closed form is the denominator-cleared substitution image.
fn verify_cleared(
    target: &WeylOperator,
    image: &WeylOperator,
    zctx: &Arc<WeylContext>,
    bound: u32,
) -> Result<()> {
    for k in 0..=bound {
        let zk = WeylOperator::term(zctx, vec![k as i64, 0], vec![0, 0], vec![], Rat::one());
        let cleared = zk.normal_product(image)?;
        let target_l = target.transfer(zctx, &[0, 1])?;
        if cleared == target_l || cleared == target_l.neg() {
            return Ok(());
        }
    }
    Err(Error::Verification(
        "substituted generator is not a unit multiple of the cited form".into(),
    ))
}

/// The localized Fourier-Laplace transform of a (l0, t) presentation:
/// `(z^n b(t dt) - h(p) t, z^2 dz + n t z dt + z (n + beta0))` on (z, t).
pub fn localized_fl_presentation(r: &ReducedPresentation) -> Result<ReducedPresentation> {
    if r.kind != TwoVarKind::LambdaT {
        return Err(Error::BadInput("expected a (l0, t) presentation".into()));
    }
    let n = r.n;
    let zctx_loc = z_t_context(true);
    let zctx = z_t_context(false);

    // Templates.
    let z = WeylOperator::position(&zctx, "z")?;
    let tdt = WeylOperator::euler(&zctx, &[0, 1]);
    let t_pos = WeylOperator::position(&zctx, "t")?;
    let b_gen = z
        .pow(n as u32)
        .normal_product(&r.b_monic.of_operator(&tdt))?
        .sub(&t_pos.scale(&r.hp))?;
    let dz = WeylOperator::derivation(&zctx, "z")?;
    let euler_gen = z
        .pow(2)
        .normal_product(&dz)?
        .add(&t_pos.normal_product(&z)?.normal_product(
            &WeylOperator::derivation(&zctx, "t")?,
        )?.scale(&Rat::from_integer(BigInt::from(n as i64))))?
        .add(&z.scale(&(Rat::from_integer(BigInt::from(n as i64)) + r.beta0.clone())))?;

    // Verify against the substitution images.
    let image_euler = localize_operator(r.euler_generator(), &zctx_loc)?;
    verify_cleared(&euler_gen, &image_euler, &zctx_loc, (n + 2) as u32)?;
    let image_b = localize_operator(r.b_generator(), &zctx_loc)?;
    verify_cleared(&b_gen, &image_b, &zctx_loc, (n + 2) as u32)?;

    Ok(ReducedPresentation {
        kind: TwoVarKind::ZT,
        ctx: zctx,
        generators: vec![b_gen, euler_gen],
        n,
        hp: r.hp.clone(),
        beta0: r.beta0.clone(),
        b_monic: r.b_monic.clone(),
        fe_leading: r.fe_leading.clone(),
        gauge_normalized: false,
    })
}

/// Conjugation by `z^(n + beta0)`: substitutes `dz -> dz - (n + beta0)/z`
/// and clears the unit `z`, removing the `z (n + beta0)` tail of the Euler
/// generator. Idempotent; the b generator is untouched.
pub fn gauge_normalize(r: &ReducedPresentation) -> Result<ReducedPresentation> {
    if r.kind != TwoVarKind::ZT {
        return Err(Error::BadInput("expected a (z, t) presentation".into()));
    }
    let a = Rat::from_integer(BigInt::from(r.n as i64)) + r.beta0.clone();
    if a.is_zero() {
        let mut out = r.clone();
        out.gauge_normalized = true;
        return Ok(out);
    }
    let zctx_loc = z_t_context(true);
    let dz = WeylOperator::derivation(&zctx_loc, "z")?;
    let zinv = WeylOperator::term(&zctx_loc, vec![-1, 0], vec![0, 0], vec![], Rat::one());
    let dz_conj = dz.sub(&zinv.scale(&a))?;

    let mut new_gens = Vec::with_capacity(r.generators.len());
    for g in &r.generators {
        let mut image = WeylOperator::zero(&zctx_loc);
        for ((pos, der, _), c) in g.terms() {
            let (az, at, bz, bt) = (pos[0], pos[1], der[0], der[1]);
            let mono = WeylOperator::term(&zctx_loc, vec![az, at], vec![0, 0], vec![], c.clone());
            let dpart = dz_conj.pow(bz);
            let dtpart = WeylOperator::term(&zctx_loc, vec![0, 0], vec![0, bt], vec![], Rat::one());
            image = image.add(&mono.normal_product(&dpart)?.normal_product(&dtpart)?)?;
        }
        // Clear any z denominators introduced by the conjugation.
        let min_z = image
            .terms()
            .map(|((p, _, _), _)| p[0])
            .min()
            .unwrap_or(0);
        if min_z < 0 {
            let zk = WeylOperator::term(
                &zctx_loc,
                vec![-min_z, 0],
                vec![0, 0],
                vec![],
                Rat::one(),
            );
            image = zk.normal_product(&image)?;
        }
        new_gens.push(image.transfer(&r.ctx, &[0, 1])?);
    }
    if new_gens[0] != *r.b_generator() {
        return Err(Error::Verification(
            "gauge normalization must preserve the b generator".into(),
        ));
    }
    Ok(ReducedPresentation {
        kind: TwoVarKind::ZT,
        ctx: r.ctx.clone(),
        generators: new_gens,
        n: r.n,
        hp: r.hp.clone(),
        beta0: -Rat::from_integer(BigInt::from(r.n as i64)),
        b_monic: r.b_monic.clone(),
        fe_leading: r.fe_leading.clone(),
        gauge_normalized: true,
    })
}

/// Sets `z = 1` in the b generator of a gauge-normalized (z, t)
/// presentation: the operator `b(t dt) - h(p) t`.
pub fn quantum_de_specialize(r: &ReducedPresentation) -> Result<WeylOperator> {
    if r.kind != TwoVarKind::ZT || !r.gauge_normalized {
        return Err(Error::BadInput(
            "expected a gauge-normalized (z, t) presentation".into(),
        ));
    }
    r.b_generator().specialize_position("z", &Rat::one())
}

/// Outcome of the transpose identity `t (d_t B(t d_t))^T = (+-) b(t d_t)`.
#[derive(Debug, Clone, Serialize)]
pub struct TransposeIdentity {
    pub holds: bool,
    /// The global sign `(-1)^deg` the chain carries.
    pub sign: i8,
}

/// Checks `t * transpose(d_t B(t d_t)) = (-1)^deg b(t d_t)` with
/// `B = b / s`; this encodes the symmetry of the roots around zero.
pub fn transpose_identity_check(b: &BernsteinPolynomial) -> Result<TransposeIdentity> {
    if b.normalization != Normalization::Reduction {
        return Err(Error::BadInput(
            "transpose identity expects the reduction normalization".into(),
        ));
    }
    let big_b = b
        .poly
        .deflate(&Rat::zero())
        .ok_or_else(|| Error::BadInput("reduction-normalized b must vanish at 0".into()))?;
    let ctx = WeylContext::new(vec!["t"], vec![]);
    let tdt = WeylOperator::euler(&ctx, &[1]);
    let dt = WeylOperator::derivation(&ctx, "t")?;
    let t = WeylOperator::position(&ctx, "t")?;
    let lhs = t.normal_product(&dt.normal_product(&big_b.of_operator(&tdt))?.transpose())?;
    let rhs = b.poly.of_operator(&tdt);
    let deg = b.poly.degree().unwrap_or(0);
    let sign: i8 = if deg % 2 == 0 { 1 } else { -1 };
    let expected = if sign == 1 { rhs.clone() } else { rhs.neg() };
    Ok(TransposeIdentity { holds: lhs == expected, sign })
}

/// Inverse of the localized substitution for round-trip checks: maps a
/// (z, t) generator back to (l0, t) via `z -> tau^(-1)`,
/// `dz -> -tau^2 dtau`, clearing tau denominators and applying the
/// Fourier-Laplace rule `tau -> dl0`, `dtau -> -l0` to the tau pair only.
pub fn inverse_localized_generator(g: &WeylOperator) -> Result<WeylOperator> {
    let tau_ctx = WeylContext::new(vec!["tau", "t"], vec![]).with_invertible(&["tau", "t"]);
    let tau = WeylOperator::position(&tau_ctx, "tau")?;
    let dtau = WeylOperator::derivation(&tau_ctx, "tau")?;
    let sub_dz = tau.pow(2).normal_product(&dtau)?.neg();
    let mut image = WeylOperator::zero(&tau_ctx);
    for ((pos, der, _), c) in g.terms() {
        let (az, at, bz, bt) = (pos[0], pos[1], der[0], der[1]);
        let mono = WeylOperator::term(&tau_ctx, vec![-az, at], vec![0, 0], vec![], c.clone());
        let dpart = sub_dz.pow(bz);
        let dtpart = WeylOperator::term(&tau_ctx, vec![0, 0], vec![0, bt], vec![], Rat::one());
        image = image.add(&mono.normal_product(&dpart)?.normal_product(&dtpart)?)?;
    }
    let min_tau = image.terms().map(|((p, _, _), _)| p[0]).min().unwrap_or(0);
    if min_tau < 0 {
        let tk = WeylOperator::term(&tau_ctx, vec![-min_tau, 0], vec![0, 0], vec![], Rat::one());
        image = tk.normal_product(&image)?;
    }
    // Partial Fourier-Laplace on the tau pair.
    let out_ctx = lambda_t_context();
    let mut out = WeylOperator::zero(&out_ctx);
    for ((pos, der, _), c) in image.terms() {
        let (atau, at, btau, bt) = (pos[0], pos[1], der[0], der[1]);
        if atau < 0 {
            return Err(Error::Verification("tau denominators were not cleared".into()));
        }
        // tau^a dtau^b -> dl0^a (-l0)^b, reordered.
        let dpart = WeylOperator::term(
            &out_ctx,
            vec![0, 0],
            vec![atau as u32, 0],
            vec![],
            Rat::one(),
        );
        let ppart = WeylOperator::term(
            &out_ctx,
            vec![btau as i64, 0],
            vec![0, 0],
            vec![],
            if btau % 2 == 0 { Rat::one() } else { -Rat::one() },
        );
        let tpart = WeylOperator::term(&out_ctx, vec![0, at], vec![0, bt], vec![], c.clone());
        out = out.add(&dpart.normal_product(&ppart)?.normal_product(&tpart)?)?;
    }
    Ok(out)
}
