//! Normally ordered Weyl-algebra arithmetic with central parameters.
//!
//! Operators are stored with all position variables to the left of all
//! derivation variables, which makes the representation unique and structural
//! equality meaningful. Central parameters (such as `s`) commute with
//! everything. Position variables may be marked invertible, in which case
//! their exponents are allowed to be negative; the commutation rule
//! `d x^n = x^n d + n x^(n-1)` holds for negative `n` as well.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polyring::{rat_to_string, Polynomial, Rat, VarContext};

/// Pairs of (position, derivation) identifiers plus central parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylContext {
    pairs: Vec<(String, String)>,
    centrals: Vec<String>,
    invertible: Vec<bool>,
}

impl WeylContext {
    pub fn new<S: Into<String>>(positions: Vec<S>, centrals: Vec<S>) -> Arc<Self> {
        let positions: Vec<String> = positions.into_iter().map(Into::into).collect();
        let pairs = positions
            .iter()
            .map(|p| (p.clone(), format!("d{p}")))
            .collect();
        Self::from_pairs(pairs, centrals.into_iter().map(Into::into).collect())
    }

    pub fn from_pairs(pairs: Vec<(String, String)>, centrals: Vec<String>) -> Arc<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (p, d) in &pairs {
            assert!(seen.insert(p.clone()), "duplicate identifier `{p}`");
            assert!(seen.insert(d.clone()), "duplicate identifier `{d}`");
        }
        for c in &centrals {
            assert!(seen.insert(c.clone()), "duplicate identifier `{c}`");
        }
        let invertible = vec![false; pairs.len()];
        Arc::new(WeylContext { pairs, centrals, invertible })
    }

    /// Same pairs and centrals with the listed position variables invertible.
    pub fn with_invertible(self: &Arc<Self>, names: &[&str]) -> Arc<Self> {
        let mut ctx = (**self).clone();
        for n in names {
            let i = ctx
                .pairs
                .iter()
                .position(|(p, _)| p == n)
                .unwrap_or_else(|| panic!("unknown position variable `{n}`"));
            ctx.invertible[i] = true;
        }
        Arc::new(ctx)
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn centrals(&self) -> &[String] {
        &self.centrals
    }

    pub fn position_index(&self, name: &str) -> Option<usize> {
        self.pairs.iter().position(|(p, _)| p == name)
    }

    pub fn central_index(&self, name: &str) -> Option<usize> {
        self.centrals.iter().position(|c| c == name)
    }

    pub fn is_invertible(&self, pair: usize) -> bool {
        self.invertible[pair]
    }

    /// The commutative context of the position variables alone.
    pub fn position_context(&self) -> Arc<VarContext> {
        VarContext::new(self.pairs.iter().map(|(p, _)| p.clone()).collect())
    }

    /// Commutative context for symbols: positions, then `xi<pos>` for each
    /// derivation, then centrals.
    pub fn symbol_context(&self) -> Arc<VarContext> {
        let mut names: Vec<String> = self.pairs.iter().map(|(p, _)| p.clone()).collect();
        names.extend(self.pairs.iter().map(|(p, _)| format!("xi{p}")));
        names.extend(self.centrals.iter().cloned());
        VarContext::new(names)
    }

    /// Position variables plus centrals, with `s` adjoined when missing; the
    /// coefficient ring for symbolic powers `h^s`.
    pub fn power_payload_context(&self) -> Arc<VarContext> {
        let mut names: Vec<String> = self.pairs.iter().map(|(p, _)| p.clone()).collect();
        names.extend(self.centrals.iter().cloned());
        if !self.centrals.iter().any(|c| c == "s") {
            names.push("s".into());
        }
        VarContext::new(names)
    }
}

fn same_ctx(a: &Arc<WeylContext>, b: &Arc<WeylContext>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Which filtration grades the symbol map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiltrationKind {
    /// Derivations have order 1, everything else order 0.
    Order,
    /// Derivations and the central `s` have order 1.
    TotalOrder,
}

type TermKey = (Vec<i64>, Vec<u32>, Vec<u32>);

/// A normally ordered element of the Weyl algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylOperator {
    ctx: Arc<WeylContext>,
    terms: BTreeMap<TermKey, Rat>,
}

fn binomial(m: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(m - t) / BigInt::from(t + 1);
    }
    acc
}

fn falling(n: i64, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..k as i64 {
        acc *= BigInt::from(n - t);
    }
    acc
}

impl WeylOperator {
    pub fn zero(ctx: &Arc<WeylContext>) -> Self {
        WeylOperator { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Arc<WeylContext>) -> Self {
        Self::constant(ctx, Rat::one())
    }

    pub fn constant(ctx: &Arc<WeylContext>, c: Rat) -> Self {
        let mut op = Self::zero(ctx);
        if !c.is_zero() {
            op.terms.insert(
                (vec![0; ctx.num_pairs()], vec![0; ctx.num_pairs()], vec![0; ctx.centrals().len()]),
                c,
            );
        }
        op
    }

    pub fn term(ctx: &Arc<WeylContext>, pos: Vec<i64>, der: Vec<u32>, cen: Vec<u32>, c: Rat) -> Self {
        assert_eq!(pos.len(), ctx.num_pairs());
        assert_eq!(der.len(), ctx.num_pairs());
        assert_eq!(cen.len(), ctx.centrals().len());
        for (i, &e) in pos.iter().enumerate() {
            assert!(e >= 0 || ctx.is_invertible(i), "negative exponent on non-invertible variable");
        }
        let mut op = Self::zero(ctx);
        if !c.is_zero() {
            op.terms.insert((pos, der, cen), c);
        }
        op
    }

    /// The position variable as an operator.
    pub fn position(ctx: &Arc<WeylContext>, name: &str) -> Result<Self> {
        let i = ctx
            .position_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let mut pos = vec![0i64; ctx.num_pairs()];
        pos[i] = 1;
        Ok(Self::term(ctx, pos, vec![0; ctx.num_pairs()], vec![0; ctx.centrals().len()], Rat::one()))
    }

    /// The derivation paired with `name`.
    pub fn derivation(ctx: &Arc<WeylContext>, name: &str) -> Result<Self> {
        let i = ctx
            .position_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let mut der = vec![0u32; ctx.num_pairs()];
        der[i] = 1;
        Ok(Self::term(ctx, vec![0; ctx.num_pairs()], der, vec![0; ctx.centrals().len()], Rat::one()))
    }

    pub fn central(ctx: &Arc<WeylContext>, name: &str) -> Result<Self> {
        let i = ctx
            .central_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let mut cen = vec![0u32; ctx.centrals().len()];
        cen[i] = 1;
        Ok(Self::term(ctx, vec![0; ctx.num_pairs()], vec![0; ctx.num_pairs()], cen, Rat::one()))
    }

    /// Lifts a polynomial in the position variables to an order-0 operator.
    /// Variable `i` of `p` maps to pair `map[i]`.
    pub fn from_polynomial(p: &Polynomial, ctx: &Arc<WeylContext>, map: &[usize]) -> Self {
        let mut op = Self::zero(ctx);
        for (e, c) in p.terms() {
            let mut pos = vec![0i64; ctx.num_pairs()];
            for (i, &x) in e.iter().enumerate() {
                pos[map[i]] += x as i64;
            }
            op.insert((pos, vec![0; ctx.num_pairs()], vec![0; ctx.centrals().len()]), c.clone());
        }
        op
    }

    /// Substitutes the paired derivations for the variables of `p`, e.g.
    /// `h(∂)` from `h`. Constant-coefficient, so no ordering issues arise.
    pub fn from_polynomial_in_derivations(p: &Polynomial, ctx: &Arc<WeylContext>, map: &[usize]) -> Self {
        let mut op = Self::zero(ctx);
        for (e, c) in p.terms() {
            let mut der = vec![0u32; ctx.num_pairs()];
            for (i, &x) in e.iter().enumerate() {
                der[map[i]] += x;
            }
            op.insert((vec![0; ctx.num_pairs()], der, vec![0; ctx.centrals().len()]), c.clone());
        }
        op
    }

    /// The Euler operator `sum_i k_i x_i d_i` with per-pair integer weights.
    pub fn euler(ctx: &Arc<WeylContext>, weights: &[i64]) -> Self {
        assert_eq!(weights.len(), ctx.num_pairs());
        let mut op = Self::zero(ctx);
        for i in 0..ctx.num_pairs() {
            if weights[i] == 0 {
                continue;
            }
            let mut pos = vec![0i64; ctx.num_pairs()];
            let mut der = vec![0u32; ctx.num_pairs()];
            pos[i] = 1;
            der[i] = 1;
            op.insert(
                (pos, der, vec![0; ctx.centrals().len()]),
                Rat::from_integer(BigInt::from(weights[i])),
            );
        }
        op
    }

    pub fn context(&self) -> &Arc<WeylContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Rat)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (k, c) = self.terms.iter().next().unwrap();
            if k.0.iter().all(|&x| x == 0) && k.1.iter().all(|&x| x == 0) && k.2.iter().all(|&x| x == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert(&mut self, key: TermKey, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn check_same_context(&self, other: &Self) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch("weyl contexts differ".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_context(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect();
        WeylOperator { ctx: self.ctx.clone(), terms }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        WeylOperator { ctx: self.ctx.clone(), terms }
    }

    /// Normally ordered product. Centrals commute with everything; the only
    /// rewriting needed is `d^b x^d = sum_k C(b,k) (d)_k x^(d-k) d^(b-k)`
    /// applied pairwise.
    pub fn normal_product(&self, other: &Self) -> Result<Self> {
        self.check_same_context(other)?;
        let n = self.ctx.num_pairs();
        let mut out = Self::zero(&self.ctx);
        for ((pa, da, ca), coeff_a) in &self.terms {
            for ((pb, db, cb), coeff_b) in &other.terms {
                // Commute da past pb, one pair at a time.
                // Accumulate choices k_i with factor C(da_i,k_i)*(pb_i)_(k_i).
                let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(vec![0u32; n], BigInt::one())];
                for i in 0..n {
                    if da[i] == 0 || pb[i] == 0 {
                        continue;
                    }
                    let mut next = Vec::with_capacity(partial.len() * (da[i] as usize + 1));
                    for (ks, f) in &partial {
                        for k in 0..=da[i] {
                            let factor = binomial(da[i], k) * falling(pb[i], k);
                            if factor.is_zero() {
                                continue;
                            }
                            let mut ks2 = ks.clone();
                            ks2[i] = k;
                            next.push((ks2, f * factor));
                        }
                    }
                    partial = next;
                }
                let base_coeff = coeff_a * coeff_b;
                for (ks, f) in partial {
                    let mut pos = vec![0i64; n];
                    let mut der = vec![0u32; n];
                    for i in 0..n {
                        pos[i] = pa[i] + pb[i] - ks[i] as i64;
                        der[i] = da[i] - ks[i] + db[i];
                        if pos[i] < 0 && !self.ctx.is_invertible(i) {
                            // Can only happen when inputs already carried
                            // negative exponents on a non-invertible variable,
                            // which constructors forbid.
                            unreachable!("negative exponent produced on non-invertible variable");
                        }
                    }
                    let cen: Vec<u32> = ca.iter().zip(cb).map(|(x, y)| x + y).collect();
                    out.insert((pos, der, cen), &base_coeff * Rat::from_integer(f));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..k {
            acc = acc.normal_product(self).expect("same context");
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.normal_product(other)?.sub(&other.normal_product(self)?)
    }

    /// Natural left action on a polynomial in the position variables. The
    /// polynomial's context must list exactly the position variables, in
    /// order. Central parameters annihilate polynomials.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial> {
        let pos_names: Vec<&String> = self.ctx.pairs().iter().map(|(a, _)| a).collect();
        if p.context().names().len() != pos_names.len()
            || !p.context().names().iter().zip(&pos_names).all(|(a, b)| &a == b)
        {
            return Err(Error::ContextMismatch(
                "polynomial variables must match the operator's position variables".into(),
            ));
        }
        let ctx = p.context().clone();
        let mut out = Polynomial::zero(&ctx);
        for ((pos, der, cen), coeff) in &self.terms {
            if cen.iter().any(|&c| c > 0) {
                continue; // centrals act as zero on polynomials
            }
            if pos.iter().any(|&e| e < 0) {
                return Err(Error::BadInput(
                    "cannot apply an operator with negative exponents to a polynomial".into(),
                ));
            }
            let mut q = p.clone();
            for (i, &b) in der.iter().enumerate() {
                for _ in 0..b {
                    q = q.differentiate_index(i);
                    if q.is_zero() {
                        break;
                    }
                }
            }
            if q.is_zero() {
                continue;
            }
            let mono = Polynomial::monomial(
                &ctx,
                pos.iter().map(|&e| e as u32).collect(),
                coeff.clone(),
            );
            out = out.add(&mono.multiply(&q)?)?;
        }
        Ok(out)
    }

    /// Filtration degree of a term under the given kind.
    fn term_degree(&self, key: &TermKey, kind: FiltrationKind) -> i64 {
        let der: i64 = key.1.iter().map(|&x| x as i64).sum();
        match kind {
            FiltrationKind::Order => der,
            FiltrationKind::TotalOrder => {
                let s = self
                    .ctx
                    .central_index("s")
                    .map(|i| key.2[i] as i64)
                    .unwrap_or(0);
                der + s
            }
        }
    }

    pub fn filtration_order(&self, kind: FiltrationKind) -> i64 {
        self.terms
            .keys()
            .map(|k| self.term_degree(k, kind))
            .max()
            .unwrap_or(0)
    }

    fn symbol_term(&self, symbol_ctx: &Arc<VarContext>, key: &TermKey, c: &Rat) -> Polynomial {
        let n = self.ctx.num_pairs();
        let mut exp = vec![0u32; symbol_ctx.len()];
        for (i, &e) in key.0.iter().enumerate() {
            assert!(e >= 0, "symbols of operators with negative exponents are not defined");
            exp[i] = e as u32;
        }
        for (i, &e) in key.1.iter().enumerate() {
            exp[n + i] = e;
        }
        for (i, &e) in key.2.iter().enumerate() {
            exp[2 * n + i] = e;
        }
        Polynomial::monomial(symbol_ctx, exp, c.clone())
    }

    /// Top-filtration-degree part as a commutative polynomial in
    /// `(w, xi[, s])`.
    pub fn principal_symbol(&self, kind: FiltrationKind) -> Polynomial {
        let symbol_ctx = self.ctx.symbol_context();
        if self.is_zero() {
            return Polynomial::zero(&symbol_ctx);
        }
        let top = self.filtration_order(kind);
        let mut out = Polynomial::zero(&symbol_ctx);
        for (k, c) in &self.terms {
            if self.term_degree(k, kind) == top {
                out = out.add(&self.symbol_term(&symbol_ctx, k, c)).expect("ctx");
            }
        }
        out
    }

    /// The filtration-degree-`degree` component of the full commutative
    /// shadow; used for graded-complex comparisons.
    pub fn symbol_component(&self, kind: FiltrationKind, degree: i64) -> Polynomial {
        let symbol_ctx = self.ctx.symbol_context();
        let mut out = Polynomial::zero(&symbol_ctx);
        for (k, c) in &self.terms {
            if self.term_degree(k, kind) == degree {
                out = out.add(&self.symbol_term(&symbol_ctx, k, c)).expect("ctx");
            }
        }
        out
    }

    /// The transpose anti-automorphism: `x -> x`, `d -> -d`, `(PQ)^T = Q^T P^T`,
    /// centrals fixed.
    pub fn transpose(&self) -> Self {
        let n = self.ctx.num_pairs();
        let mut out = Self::zero(&self.ctx);
        for ((pos, der, cen), c) in &self.terms {
            // (x^a d^b)^T = (-1)^|b| d^b x^a, then re-normal-order.
            let b_total: u32 = der.iter().sum();
            let dpart = Self::term(
                &self.ctx,
                vec![0; n],
                der.clone(),
                vec![0; self.ctx.centrals().len()],
                Rat::one(),
            );
            let xpart = Self::term(
                &self.ctx,
                pos.clone(),
                vec![0; n],
                cen.clone(),
                Rat::one(),
            );
            let prod = dpart.normal_product(&xpart).expect("ctx");
            let sign = if b_total % 2 == 0 { c.clone() } else { -c.clone() };
            out = out.add(&prod.scale(&sign)).expect("ctx");
        }
        out
    }

    /// The Fourier-Laplace algebra isomorphism `x_i -> d_{y_i}`,
    /// `d_{x_i} -> -y_i`. `pair_map[i]` names the target pair for source
    /// pair `i` and must cover every source pair; centrals map by name.
    pub fn fourier_laplace(&self, target: &Arc<WeylContext>, pair_map: &[usize]) -> Result<Self> {
        if pair_map.len() != self.ctx.num_pairs() {
            return Err(Error::BadInput("dictionary must cover every pair of the source context".into()));
        }
        let central_map: Vec<usize> = self
            .ctx
            .centrals()
            .iter()
            .map(|c| {
                target
                    .central_index(c)
                    .ok_or_else(|| Error::UnknownVariable(c.clone()))
            })
            .collect::<Result<_>>()?;
        let tn = target.num_pairs();
        let mut out = Self::zero(target);
        for ((pos, der, cen), c) in &self.terms {
            if pos.iter().any(|&e| e < 0) {
                return Err(Error::BadInput("cannot transform negative exponents".into()));
            }
            let mut tder = vec![0u32; tn];
            let mut tpos = vec![0i64; tn];
            for (i, &e) in pos.iter().enumerate() {
                tder[pair_map[i]] += e as u32;
            }
            let mut sign_odd = false;
            for (i, &e) in der.iter().enumerate() {
                tpos[pair_map[i]] += e as i64;
                if e % 2 == 1 {
                    sign_odd = !sign_odd;
                }
            }
            let mut tcen = vec![0u32; target.centrals().len()];
            for (i, &e) in cen.iter().enumerate() {
                tcen[central_map[i]] += e;
            }
            // Image is d^pos * (-1)^|der| y^der with d's on the left:
            // re-normal-order.
            let dpart = Self::term(target, vec![0; tn], tder, vec![0; target.centrals().len()], Rat::one());
            let ypart = Self::term(target, tpos, vec![0; tn], tcen, Rat::one());
            let prod = dpart.normal_product(&ypart)?;
            let coeff = if sign_odd { -c.clone() } else { c.clone() };
            out = out.add(&prod.scale(&coeff))?;
        }
        Ok(out)
    }

    /// Moves the operator into another context: pair `i` of the source maps
    /// to pair `pair_map[i]` of the target, centrals map by name. Fails when
    /// a negative exponent would land on a non-invertible target variable.
    pub fn transfer(&self, target: &Arc<WeylContext>, pair_map: &[usize]) -> Result<Self> {
        if pair_map.len() != self.ctx.num_pairs() {
            return Err(Error::BadInput("pair map must cover the source context".into()));
        }
        let central_map: Vec<usize> = self
            .ctx
            .centrals()
            .iter()
            .map(|c| {
                target
                    .central_index(c)
                    .ok_or_else(|| Error::UnknownVariable(c.clone()))
            })
            .collect::<Result<_>>()?;
        let tn = target.num_pairs();
        let mut out = Self::zero(target);
        for ((pos, der, cen), c) in &self.terms {
            let mut tpos = vec![0i64; tn];
            let mut tder = vec![0u32; tn];
            for (i, &e) in pos.iter().enumerate() {
                if e < 0 && !target.is_invertible(pair_map[i]) {
                    return Err(Error::BadInput(format!(
                        "negative exponent on non-invertible `{}`",
                        target.pairs()[pair_map[i]].0
                    )));
                }
                tpos[pair_map[i]] += e;
            }
            for (i, &e) in der.iter().enumerate() {
                tder[pair_map[i]] += e;
            }
            let mut tcen = vec![0u32; target.centrals().len()];
            for (i, &e) in cen.iter().enumerate() {
                tcen[central_map[i]] += e;
            }
            out.insert((tpos, tder, tcen), c.clone());
        }
        Ok(out)
    }

    /// Evaluates a position variable at a rational value. The paired
    /// derivation must not occur anywhere in the operator.
    pub fn specialize_position(&self, name: &str, value: &Rat) -> Result<Self> {
        let idx = self
            .ctx
            .position_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let mut new_ctx = (*self.ctx.clone()).clone();
        new_ctx.pairs.remove(idx);
        new_ctx.invertible.remove(idx);
        let new_ctx = Arc::new(new_ctx);
        let mut out = Self::zero(&new_ctx);
        for ((pos, der, cen), c) in &self.terms {
            if der[idx] != 0 {
                return Err(Error::BadInput(format!(
                    "cannot evaluate `{name}`: its derivation occurs in the operator"
                )));
            }
            let e = pos[idx];
            let mut coeff = c.clone();
            if e >= 0 {
                for _ in 0..e {
                    coeff *= value;
                }
            } else {
                if value.is_zero() {
                    return Err(Error::BadInput("evaluating an inverted variable at zero".into()));
                }
                for _ in 0..(-e) {
                    coeff /= value;
                }
            }
            let mut npos = pos.clone();
            let mut nder = der.clone();
            npos.remove(idx);
            nder.remove(idx);
            out.insert((npos, nder, cen.clone()), coeff);
        }
        Ok(out)
    }

    /// Substitutes a rational value for a central parameter.
    pub fn specialize_central(&self, name: &str, value: &Rat) -> Result<Self> {
        let idx = self
            .ctx
            .central_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let remaining: Vec<String> = self
            .ctx
            .centrals()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, c)| c.clone())
            .collect();
        let mut new_ctx = (*self.ctx.clone()).clone();
        new_ctx.centrals = remaining;
        let new_ctx = Arc::new(new_ctx);
        let mut out = Self::zero(&new_ctx);
        for ((pos, der, cen), c) in &self.terms {
            let mut coeff = c.clone();
            for _ in 0..cen[idx] {
                coeff *= value;
            }
            let new_cen: Vec<u32> = cen
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, &e)| e)
                .collect();
            out.insert((pos.clone(), der.clone(), new_cen), coeff);
        }
        Ok(out)
    }

    /// Terms ordered descending by total degree then reverse-lexicographically,
    /// for canonical rendering.
    pub fn sorted_terms(&self) -> Vec<(TermKey, Rat)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        v.sort_by(|(a, _), (b, _)| cmp_term_keys(b, a));
        v
    }
}

fn cmp_term_keys(a: &TermKey, b: &TermKey) -> Ordering {
    let deg = |k: &TermKey| -> i64 {
        k.0.iter().sum::<i64>()
            + k.1.iter().map(|&x| x as i64).sum::<i64>()
            + k.2.iter().map(|&x| x as i64).sum::<i64>()
    };
    let (da, db) = (deg(a), deg(b));
    if da != db {
        return da.cmp(&db);
    }
    let flat = |k: &TermKey| -> Vec<i64> {
        k.0.iter()
            .cloned()
            .chain(k.1.iter().map(|&x| x as i64))
            .chain(k.2.iter().map(|&x| x as i64))
            .collect()
    };
    let (fa, fb) = (flat(a), flat(b));
    for i in (0..fa.len()).rev() {
        if fa[i] != fb[i] {
            return fb[i].cmp(&fa[i]);
        }
    }
    Ordering::Equal
}

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((pos, der, cen), coeff) in self.sorted_terms() {
            let neg = coeff.is_negative();
            let abs = coeff.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            let all_zero = pos.iter().all(|&e| e == 0)
                && der.iter().all(|&e| e == 0)
                && cen.iter().all(|&e| e == 0);
            if !abs.is_one() || all_zero {
                factors.push(rat_to_string(&abs));
            }
            for (i, &e) in pos.iter().enumerate() {
                let name = &self.ctx.pairs()[i].0;
                if e == 1 {
                    factors.push(name.clone());
                } else if e != 0 {
                    factors.push(format!("{name}^{e}"));
                }
            }
            for (i, &e) in der.iter().enumerate() {
                let name = &self.ctx.pairs()[i].1;
                if e == 1 {
                    factors.push(name.clone());
                } else if e != 0 {
                    factors.push(format!("{name}^{e}"));
                }
            }
            for (i, &e) in cen.iter().enumerate() {
                let name = &self.ctx.centrals()[i];
                if e == 1 {
                    factors.push(name.clone());
                } else if e != 0 {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// An expression `h^(s-k) * Q(s, w)`, reduced so that `h` does not divide `Q`
/// unless `k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicPowerClass {
    pub shift: u32,
    pub payload: Polynomial,
}

/// Applies an operator to the symbolic power `h^s` using the chain rule
/// `d_i(h^(s-j) g) = h^(s-j-1) ((s-j)(d_i h) g + h d_i g)`.
///
/// The operator's position variables must be exactly the variables of `h`;
/// central parameters multiply the payload as commuting variables, with `s`
/// identified with the symbolic exponent.
pub fn apply_to_symbolic_power(op: &WeylOperator, h: &Polynomial) -> Result<SymbolicPowerClass> {
    let ctx = op.context();
    let n = ctx.num_pairs();
    let pos_names: Vec<&String> = ctx.pairs().iter().map(|(a, _)| a).collect();
    if h.context().names().len() != n
        || !h.context().names().iter().zip(&pos_names).all(|(a, b)| &a == b)
    {
        return Err(Error::ContextMismatch(
            "h's variables must match the operator's position variables".into(),
        ));
    }
    let payload_ctx = ctx.power_payload_context();
    let id_map: Vec<usize> = (0..n).collect();
    let h_p = h.map_variables(&payload_ctx, &id_map);
    let dh: Vec<Polynomial> = (0..n)
        .map(|i| h.differentiate_index(i).map_variables(&payload_ctx, &id_map))
        .collect();
    let s_idx = payload_ctx.index_of("s").expect("payload context has s");
    let s_poly = Polynomial::variable(&payload_ctx, "s").expect("s exists");

    let mut total_shift: u32 = 0;
    let mut total_payload = Polynomial::zero(&payload_ctx);

    for ((pos, der, cen), coeff) in op.terms() {
        if pos.iter().any(|&e| e < 0) {
            return Err(Error::BadInput("operator must not carry negative exponents".into()));
        }
        let mut shift: u32 = 0;
        let mut q = Polynomial::one(&payload_ctx);
        for (i, &b) in der.iter().enumerate() {
            for _ in 0..b {
                let s_minus_j = s_poly.sub(&Polynomial::constant(
                    &payload_ctx,
                    Rat::from_integer(BigInt::from(shift)),
                ))?;
                q = s_minus_j
                    .multiply(&dh[i])?
                    .multiply(&q)?
                    .add(&h_p.multiply(&q.differentiate_index(i))?)?;
                shift += 1;
            }
        }
        // Multiply by the position monomial and the centrals.
        let mut mono_exp = vec![0u32; payload_ctx.len()];
        for (i, &e) in pos.iter().enumerate() {
            mono_exp[i] = e as u32;
        }
        for (i, name) in ctx.centrals().iter().enumerate() {
            if cen[i] > 0 {
                let j = payload_ctx.index_of(name).unwrap_or(s_idx);
                mono_exp[j] += cen[i];
            }
        }
        q = q.multiply(&Polynomial::monomial(&payload_ctx, mono_exp, coeff.clone()))?;

        // Align shifts: h^(s-a) P + h^(s-b) Q with a <= b is
        // h^(s-b) (h^(b-a) P + Q).
        if shift >= total_shift {
            total_payload = total_payload
                .multiply(&h_p.pow(shift - total_shift))?
                .add(&q)?;
            total_shift = shift;
        } else {
            total_payload = total_payload.add(&q.multiply(&h_p.pow(total_shift - shift))?)?;
        }
    }

    // Reduce: divide out h while possible.
    while total_shift > 0 {
        match total_payload.divide_exact(&h_p) {
            Some(qq) => {
                total_payload = qq;
                total_shift -= 1;
            }
            None => break,
        }
    }
    Ok(SymbolicPowerClass { shift: total_shift, payload: total_payload })
}
