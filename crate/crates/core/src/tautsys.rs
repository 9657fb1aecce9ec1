//! Tautological-system presentations: the homogenized ideal I(s), the
//! w-side presentation attached to a base point, and its Fourier-Laplace
//! image on the dual space, verified against the expected closed forms.

use std::sync::Arc;

use num::{BigInt, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logfields::{dualize, DivisorAnalysis, FieldConvention, LinearField};
use crate::polyring::{rat_to_string, Polynomial, Rat};
use crate::weyl::{WeylContext, WeylOperator};

/// Which space the generators live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The w-side system on `V~` (coordinates w0..wn).
    Hat,
    /// The Fourier-Laplace image on the dual space (coordinates l0..ln).
    Taut,
}

impl Side {
    pub fn name(&self) -> &'static str {
        match self {
            Side::Hat => "hat",
            Side::Taut => "taut",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PresentationParams {
    pub n: usize,
    pub beta0: Option<Rat>,
    pub hp: Option<Rat>,
    pub c: Option<Rat>,
    pub d: Option<i64>,
}

/// An ordered generator list of a left ideal in a named Weyl context.
#[derive(Debug, Clone)]
pub struct SystemPresentation {
    pub side: Side,
    pub ctx: Arc<WeylContext>,
    pub generators: Vec<WeylOperator>,
    pub params: PresentationParams,
}

impl SystemPresentation {
    pub fn rendered_generators(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.to_string()).collect()
    }

    /// Substitutes a value for the central `s`, e.g. to pass from I(s) to
    /// I(beta).
    pub fn specialize_s(&self, beta: &Rat) -> Result<SystemPresentation> {
        let generators: Vec<WeylOperator> = self
            .generators
            .iter()
            .map(|g| g.specialize_central("s", beta))
            .collect::<Result<_>>()?;
        let mut params = self.params.clone();
        params.beta0 = Some(beta.clone());
        Ok(SystemPresentation {
            side: self.side,
            ctx: generators
                .first()
                .map(|g| g.context().clone())
                .unwrap_or_else(|| self.ctx.clone()),
            generators,
            params,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresentationReport {
    pub side: String,
    pub context: Vec<String>,
    pub generators: Vec<String>,
    pub n: usize,
    pub beta0: Option<String>,
    pub hp: Option<String>,
    pub c: Option<String>,
    pub d: Option<i64>,
}

impl SystemPresentation {
    pub fn report(&self) -> PresentationReport {
        PresentationReport {
            side: self.side.name().into(),
            context: self
                .ctx
                .pairs()
                .iter()
                .map(|(p, _)| p.clone())
                .chain(self.ctx.centrals().iter().cloned())
                .collect(),
            generators: self.rendered_generators(),
            n: self.params.n,
            beta0: self.params.beta0.as_ref().map(rat_to_string),
            hp: self.params.hp.as_ref().map(rat_to_string),
            c: self.params.c.as_ref().map(rat_to_string),
            d: self.params.d,
        }
    }
}

/// The extended Weyl context on `w0, w1, ..., wn` over the divisor
/// coordinates, with the given centrals.
pub fn extended_context(analysis: &DivisorAnalysis, centrals: Vec<String>) -> Arc<WeylContext> {
    let mut names: Vec<String> = vec!["w0".into()];
    names.extend(analysis.h.context().names().iter().cloned());
    WeylContext::from_pairs(
        names.into_iter().map(|p| { let d = format!("d{p}"); (p, d) }).collect(),
        centrals,
    )
}

/// `h - c w0^d` as an order-zero operator on the extended context.
pub fn deformed_equation(
    analysis: &DivisorAnalysis,
    ctx: &Arc<WeylContext>,
    c: &Rat,
    d: i64,
) -> WeylOperator {
    let n = analysis.n;
    let pos_ctx = ctx.position_context();
    let shift_map: Vec<usize> = (1..=n).collect();
    let mut w0d = vec![0u32; pos_ctx.len()];
    w0d[0] = d as u32;
    let poly = analysis
        .h
        .map_variables(&pos_ctx, &shift_map)
        .sub(&Polynomial::monomial(&pos_ctx, w0d, c.clone()))
        .expect("ctx");
    WeylOperator::from_polynomial(&poly, ctx, &(0..=n).collect::<Vec<_>>())
}

/// The a_D fields lifted to the extended context.
pub fn lifted_fields(analysis: &DivisorAnalysis, ctx: &Arc<WeylContext>) -> Vec<WeylOperator> {
    let pair_map: Vec<usize> = (1..=analysis.n).collect();
    analysis
        .ad_basis
        .iter()
        .map(|f| f.as_operator(ctx, &pair_map))
        .collect()
}

/// The homogenized Euler operator `chi + w0 d_{w0}` (for `d = deg h`), or
/// its integer-scaled deformation `d chi + (deg h) w0 d_{w0}` otherwise.
pub fn homogenized_euler(analysis: &DivisorAnalysis, ctx: &Arc<WeylContext>, d: i64) -> WeylOperator {
    let n = analysis.n;
    let n_deg = analysis.h.weighted_degree().expect("homogeneous h");
    let mut chi_weights = vec![0i64; n + 1];
    for (i, &w) in analysis.h.context().weights().iter().enumerate() {
        chi_weights[i + 1] = w;
    }
    let chi = WeylOperator::euler(ctx, &chi_weights);
    let mut w0_weights = vec![0i64; n + 1];
    w0_weights[0] = 1;
    let w0d0 = WeylOperator::euler(ctx, &w0_weights);
    if d == n_deg {
        chi.add(&w0d0).expect("ctx")
    } else {
        chi.scale(&Rat::from_integer(BigInt::from(d)))
            .add(&w0d0.scale(&Rat::from_integer(BigInt::from(n_deg))))
            .expect("ctx")
    }
}

/// The multiple of `s` subtracted from the homogenized Euler operator in the
/// I(s) generator (`d` for `d = deg h`, `d * deg h` for the scaled variant).
pub fn euler_s_scale(analysis: &DivisorAnalysis, d: i64) -> Rat {
    let n_deg = analysis.h.weighted_degree().expect("homogeneous h");
    if d == n_deg {
        Rat::from_integer(BigInt::from(d))
    } else {
        Rat::from_integer(BigInt::from(d * n_deg))
    }
}

/// The ideal `I(s) = (h - c w0^d, delta_1, ..., delta_{n-1}, chi~ - d s)` on
/// the extended context with symbolic `s`.
pub fn homogenized_ideal_is(
    analysis: &DivisorAnalysis,
    c: &Rat,
    d: i64,
) -> Result<SystemPresentation> {
    if c.is_zero() || d < 1 {
        return Err(Error::BadInput("need c != 0 and d >= 1".into()));
    }
    let ctx = extended_context(analysis, vec!["s".into()]);
    let mut generators = vec![deformed_equation(analysis, &ctx, c, d)];
    generators.extend(lifted_fields(analysis, &ctx));
    let s = WeylOperator::central(&ctx, "s")?;
    generators.push(
        homogenized_euler(analysis, &ctx, d)
            .sub(&s.scale(&euler_s_scale(analysis, d)))?,
    );
    Ok(SystemPresentation {
        side: Side::Hat,
        ctx,
        generators,
        params: PresentationParams {
            n: analysis.n,
            beta0: None,
            hp: None,
            c: Some(c.clone()),
            d: Some(d),
        },
    })
}

/// The w-side presentation `(h(p) w0^n - h, delta_1, ..., delta_{n-1},
/// chi~ - beta0)` attached to a base point with `h(p) != 0`. The first
/// generator is checked to be `chi~`-homogeneous of degree n.
pub fn hat_presentation(
    analysis: &DivisorAnalysis,
    hp: &Rat,
    beta0: &Rat,
) -> Result<SystemPresentation> {
    if hp.is_zero() {
        return Err(Error::BadInput("h(p) must be nonzero (p off the divisor)".into()));
    }
    let n = analysis.n;
    let n_deg = analysis.h.weighted_degree().ok_or(Error::Inhomogeneous)?;
    let ctx = extended_context(analysis, vec![]);
    // h(p) w0^n - h = -(h - h(p) w0^n)
    let first = deformed_equation(analysis, &ctx, hp, n_deg).neg();
    let euler = homogenized_euler(analysis, &ctx, n_deg);
    // Homogeneity: chi~(first) = n * first.
    let chif = euler.commutator(&first)?;
    if chif != first.scale(&Rat::from_integer(BigInt::from(n_deg))) {
        return Err(Error::Verification(
            "defining equation of the cone is not Euler-homogeneous of degree n".into(),
        ));
    }
    let mut generators = vec![first];
    generators.extend(lifted_fields(analysis, &ctx));
    generators.push(euler.sub(&WeylOperator::constant(&ctx, beta0.clone()))?);
    Ok(SystemPresentation {
        side: Side::Hat,
        ctx,
        generators,
        params: PresentationParams {
            n,
            beta0: Some(beta0.clone()),
            hp: Some(hp.clone()),
            c: Some(hp.clone()),
            d: Some(n_deg),
        },
    })
}

/// The dual-side context `l0, l1, ..., ln`.
pub fn dual_context(n: usize) -> Arc<WeylContext> {
    WeylContext::new((0..=n).map(|i| format!("l{i}")).collect::<Vec<_>>(), vec![])
}

/// Applies the Fourier-Laplace isomorphism to every generator of a hat
/// presentation and verifies the image against the expected tautological
/// form: `(h(p) dl0^n - h(dl), dual fields, chi~dual + (n+1) + beta0)`.
/// The returned generators are sign-normalized to that form.
pub fn fl_presentation(
    analysis: &DivisorAnalysis,
    hat: &SystemPresentation,
) -> Result<SystemPresentation> {
    if hat.side != Side::Hat {
        return Err(Error::BadInput("expected a hat-side presentation".into()));
    }
    let n = hat.params.n;
    let hp = hat
        .params
        .hp
        .clone()
        .ok_or_else(|| Error::BadInput("hat presentation lacks h(p)".into()))?;
    let beta0 = hat
        .params
        .beta0
        .clone()
        .ok_or_else(|| Error::BadInput("hat presentation lacks beta0".into()))?;
    let dual_ctx = dual_context(n);
    let pair_map: Vec<usize> = (0..=n).collect();

    let images: Vec<WeylOperator> = hat
        .generators
        .iter()
        .map(|g| g.fourier_laplace(&dual_ctx, &pair_map))
        .collect::<Result<_>>()?;

    // (i) the distinguished generator: h(p) dl0^n - h(dl1..dln).
    let mut der0 = vec![0u32; n + 1];
    der0[0] = n as u32;
    let dl0n = WeylOperator::term(
        &dual_ctx,
        vec![0; n + 1],
        der0,
        vec![],
        hp.clone(),
    );
    let h_of_d = WeylOperator::from_polynomial_in_derivations(
        &analysis.h,
        &dual_ctx,
        &(1..=n).collect::<Vec<_>>(),
    );
    let expected_first = dl0n.sub(&h_of_d)?;
    if images[0] != expected_first {
        return Err(Error::Verification(format!(
            "FL of the defining equation is {} but the tautological form requires {}",
            images[0], expected_first
        )));
    }

    // (ii) each field maps to the matching dual log field, up to sign.
    let dual = dualize(analysis)?;
    let mut normalized = vec![expected_first];
    for (k, img) in images.iter().enumerate().skip(1).take(n - 1) {
        let expect = LinearField::new(
            analysis.ad_basis[k - 1].matrix().to_vec(),
            FieldConvention::Dual,
        )
        .as_operator(&dual_ctx, &(1..=n).collect::<Vec<_>>());
        if *img == expect {
            normalized.push(expect);
        } else if *img == expect.neg() {
            normalized.push(expect);
        } else {
            return Err(Error::Verification(format!(
                "FL of field {k} is {img}, expected the dual field {expect} up to sign"
            )));
        }
    }
    // Dual fields annihilate the dual equation.
    let dual_pos = dual_ctx.position_context();
    let h_dual_ext = dual
        .h_dual
        .map_variables(&dual_pos, &(1..=n).collect::<Vec<_>>());
    for g in normalized.iter().skip(1) {
        if !g.apply(&h_dual_ext)?.is_zero() {
            return Err(Error::Verification(
                "a dual-side field does not annihilate the dual equation".into(),
            ));
        }
    }

    // (iii) the Euler generator maps to -(chi~dual + (n+1) + beta0).
    let chi_dual = WeylOperator::euler(&dual_ctx, &vec![1i64; n + 1]);
    let expected_euler = chi_dual.add(&WeylOperator::constant(
        &dual_ctx,
        Rat::from_integer(BigInt::from(n as i64 + 1)) + beta0.clone(),
    ))?;
    let last = images.last().expect("nonempty");
    if *last != expected_euler.neg() {
        return Err(Error::Verification(format!(
            "FL of the Euler generator is {last}, expected {}",
            expected_euler.neg()
        )));
    }
    normalized.push(expected_euler);

    Ok(SystemPresentation {
        side: Side::Taut,
        ctx: dual_ctx,
        generators: normalized,
        params: hat.params.clone(),
    })
}
