//! Exact multivariate polynomial arithmetic over arbitrary-precision rationals.
//!
//! Polynomials are sparse maps from exponent vectors to nonzero `BigRational`
//! coefficients, tied to a shared [`VarContext`]. The default monomial order
//! for normalization is degree-reverse-lexicographic over the context's
//! variable order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used everywhere in the crate.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational without spaces, e.g. `-4/3` or `7`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An ordered set of variable names with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarContext {
    names: Vec<String>,
    weights: Vec<i64>,
}

impl VarContext {
    /// All weights default to 1.
    pub fn new<S: Into<String>>(names: Vec<S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let weights = vec![1; names.len()];
        Self::with_weights_vec(names, weights)
    }

    pub fn with_weights<S: Into<String>>(names: Vec<S>, weights: Vec<i64>) -> Arc<Self> {
        Self::with_weights_vec(names.into_iter().map(Into::into).collect(), weights)
    }

    fn with_weights_vec(names: Vec<String>, weights: Vec<i64>) -> Arc<Self> {
        assert_eq!(names.len(), weights.len(), "weights length must equal names length");
        assert!(weights.iter().all(|w| *w > 0), "weights must be positive");
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            assert!(seen.insert(n.clone()), "duplicate variable name `{n}`");
        }
        Arc::new(VarContext { names, weights })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn same_ctx(a: &Arc<VarContext>, b: &Arc<VarContext>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Degrevlex comparison of exponent vectors: higher total degree wins; ties are
/// broken by the last differing exponent, smaller exponent winning.
pub fn cmp_degrevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Polynomial {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        Polynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Self::constant(ctx, Rat::one())
    }

    pub fn constant(ctx: &Arc<VarContext>, c: Rat) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(vec![0; ctx.len()], c);
        }
        p
    }

    pub fn variable(ctx: &Arc<VarContext>, name: &str) -> Result<Self> {
        let i = ctx.index_of(name).ok_or_else(|| Error::UnknownVariable(name.into()))?;
        let mut exp = vec![0; ctx.len()];
        exp[i] = 1;
        Ok(Self::monomial(ctx, exp, Rat::one()))
    }

    pub fn monomial(ctx: &Arc<VarContext>, exp: Vec<u32>, c: Rat) -> Self {
        assert_eq!(exp.len(), ctx.len());
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn context(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// The coefficient of the constant monomial.
    pub fn constant_term(&self) -> Rat {
        self.terms.get(&vec![0; self.ctx.len()]).cloned().unwrap_or_else(Rat::zero)
    }

    /// As a constant, if it is one.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn check_same_context(&self, other: &Self) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!(
                "[{}] vs [{}]",
                self.ctx.names().join(","),
                other.ctx.names().join(",")
            )))
        }
    }

    fn insert_term(terms: &mut BTreeMap<Vec<u32>, Rat>, exp: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match terms.entry(exp) {
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

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_context(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            Self::insert_term(&mut terms, e.clone(), c.clone());
        }
        Ok(Polynomial { ctx: self.ctx.clone(), terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        Polynomial { ctx: self.ctx.clone(), terms }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        let terms = self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect();
        Polynomial { ctx: self.ctx.clone(), terms }
    }

    /// Exact product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_context(other)?;
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                Self::insert_term(&mut terms, exp, ca * cb);
            }
        }
        Ok(Polynomial { ctx: self.ctx.clone(), terms })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..k {
            acc = acc.multiply(self).expect("same context");
        }
        acc
    }

    /// Formal partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Result<Self> {
        let i = self
            .ctx
            .index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.into()))?;
        Ok(self.differentiate_index(i))
    }

    pub fn differentiate_index(&self, i: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[i] -= 1;
            Self::insert_term(&mut terms, exp, c * rat_int(e[i] as i64));
        }
        Polynomial { ctx: self.ctx.clone(), terms }
    }

    /// Total degree (unweighted); `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u64).sum())
            .max()
    }

    /// The common weighted degree if the polynomial is weighted-homogeneous
    /// under the context weights, otherwise `None`.
    pub fn weighted_degree(&self) -> Option<i64> {
        let mut degree = None;
        for e in self.terms.keys() {
            let d: i64 = e
                .iter()
                .zip(self.ctx.weights())
                .map(|(&x, &w)| x as i64 * w)
                .sum();
            match degree {
                None => degree = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        degree
    }

    /// Homogeneous component of the given unweighted total degree.
    pub fn homogeneous_component(&self, degree: u64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().map(|&x| x as u64).sum::<u64>() == degree)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Polynomial { ctx: self.ctx.clone(), terms }
    }

    /// Leading (exponent, coefficient) under degrevlex.
    pub fn leading_term(&self) -> Option<(&Vec<u32>, &Rat)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| cmp_degrevlex(a, b))
    }

    /// Scales so the degrevlex leading coefficient is 1.
    pub fn normalize_monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Rat::one() / c.clone();
                self.scale(&inv)
            }
        }
    }

    /// Exact division: `Some(q)` with `self = q * d`, or `None` when `d` does
    /// not divide `self`.
    pub fn divide_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        self.check_same_context(d).ok()?;
        let (dlt_exp, dlt_c) = d.leading_term().expect("nonzero divisor");
        let dlt_exp = dlt_exp.clone();
        let dlt_c = dlt_c.clone();
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.ctx);
        while let Some((rlt_exp, rlt_c)) = rem.leading_term() {
            if rlt_exp.iter().zip(&dlt_exp).any(|(r, d)| r < d) {
                // Leading term not divisible: with a single divisor this term
                // can never be cancelled later, so divisibility fails.
                return None;
            }
            let qexp: Vec<u32> = rlt_exp.iter().zip(&dlt_exp).map(|(r, d)| r - d).collect();
            let qc = rlt_c / &dlt_c;
            let qmono = Self::monomial(&self.ctx, qexp, qc);
            rem = rem.sub(&qmono.multiply(d).expect("ctx")).expect("ctx");
            quo = quo.add(&qmono).expect("ctx");
        }
        Some(quo)
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.divide_exact(self).is_some()
    }

    /// Monic-normalized greatest common divisor.
    pub fn gcd(a: &Self, b: &Self) -> Result<Self> {
        a.check_same_context(b)?;
        let g = gcd_rec(a, b, a.ctx.len());
        Ok(g.normalize_monic())
    }

    /// True iff the polynomial has no repeated irreducible factor, decided by
    /// gcds with all partial derivatives.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut g = self.clone();
        for i in 0..self.ctx.len() {
            if g.is_constant() {
                break;
            }
            let di = self.differentiate_index(i);
            g = Self::gcd(&g, &di)?;
        }
        Ok(g.is_constant())
    }

    /// Substitute variables into a target context: source variable `i` maps to
    /// target variable `map[i]`.
    pub fn map_variables(&self, target: &Arc<VarContext>, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.ctx.len());
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut exp = vec![0u32; target.len()];
            for (i, &x) in e.iter().enumerate() {
                exp[map[i]] += x;
            }
            Self::insert_term(&mut terms, exp, c.clone());
        }
        Polynomial { ctx: target.clone(), terms }
    }

    /// Evaluates one variable at a rational value.
    pub fn eval_var(&self, var: &str, value: &Rat) -> Result<Self> {
        let i = self
            .ctx
            .index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.into()))?;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut exp = e.clone();
            let k = exp[i];
            exp[i] = 0;
            let mut coeff = c.clone();
            for _ in 0..k {
                coeff *= value;
            }
            Self::insert_term(&mut terms, exp, coeff);
        }
        Ok(Polynomial { ctx: self.ctx.clone(), terms })
    }

    /// Terms ordered descending under degrevlex, for canonical rendering.
    pub fn sorted_terms(&self) -> Vec<(Vec<u32>, Rat)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        v.sort_by(|(a, _), (b, _)| cmp_degrevlex(b, a));
        v
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, coeff) in self.sorted_terms() {
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
            if !abs.is_one() || exp.iter().all(|&e| e == 0) {
                factors.push(rat_to_string(&abs));
            }
            for (i, &e) in exp.iter().enumerate() {
                if e == 1 {
                    factors.push(self.ctx.names()[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.ctx.names()[i], e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Content of `p` seen as a univariate polynomial in variable `var`, i.e. the
/// gcd of its coefficient polynomials (which live in the same context with
/// `var`-exponent zero).
fn content_wrt(p: &Polynomial, var: usize, nvars_active: usize) -> Polynomial {
    let mut coeffs: BTreeMap<u32, Polynomial> = BTreeMap::new();
    for (e, c) in &p.terms {
        let k = e[var];
        let mut exp = e.clone();
        exp[var] = 0;
        let entry = coeffs
            .entry(k)
            .or_insert_with(|| Polynomial::zero(&p.ctx));
        *entry = entry
            .add(&Polynomial::monomial(&p.ctx, exp, c.clone()))
            .expect("ctx");
    }
    let mut g = Polynomial::zero(&p.ctx);
    for c in coeffs.values() {
        g = gcd_rec(&g, c, nvars_active);
        if g.is_constant() && !g.is_zero() {
            break;
        }
    }
    g
}

fn degree_wrt(p: &Polynomial, var: usize) -> i64 {
    p.terms.keys().map(|e| e[var] as i64).max().unwrap_or(-1)
}

fn leading_coeff_wrt(p: &Polynomial, var: usize) -> Polynomial {
    let d = degree_wrt(p, var);
    let mut terms = BTreeMap::new();
    for (e, c) in &p.terms {
        if e[var] as i64 == d {
            let mut exp = e.clone();
            exp[var] = 0;
            terms.insert(exp, c.clone());
        }
    }
    Polynomial { ctx: p.ctx.clone(), terms }
}

/// Pseudo-remainder of `a` by `b` with respect to `var`.
fn pseudo_rem(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let db = degree_wrt(b, var);
    assert!(db >= 0);
    let lb = leading_coeff_wrt(b, var);
    let mut r = a.clone();
    while degree_wrt(&r, var) >= db && !r.is_zero() {
        let dr = degree_wrt(&r, var);
        let lr = leading_coeff_wrt(&r, var);
        // r := lb*r - lr*x^(dr-db)*b
        let mut shift_exp = vec![0u32; r.ctx.len()];
        shift_exp[var] = (dr - db) as u32;
        let shift = Polynomial::monomial(&r.ctx, shift_exp, Rat::one());
        r = r
            .multiply(&lb)
            .and_then(|x| x.sub(&lr.multiply(&shift).and_then(|y| y.multiply(b))?))
            .expect("ctx");
    }
    r
}

/// Recursive multivariate gcd: primitive-part recursion on the last active
/// variable. `nvars_active` marks how many leading variables are still in
/// play; variables at or beyond that index have exponent 0 in both inputs.
fn gcd_rec(a: &Polynomial, b: &Polynomial, nvars_active: usize) -> Polynomial {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(&a.ctx);
    }
    // Find the last variable occurring in either polynomial.
    let mut var = None;
    for i in (0..nvars_active).rev() {
        if degree_wrt(a, i) > 0 || degree_wrt(b, i) > 0 {
            var = Some(i);
            break;
        }
    }
    let var = match var {
        Some(v) => v,
        None => return Polynomial::one(&a.ctx),
    };
    if degree_wrt(a, var) == 0 || degree_wrt(b, var) == 0 {
        // One input does not involve `var`: gcd divides the content of the other.
        let (flat, tall) = if degree_wrt(a, var) == 0 { (a, b) } else { (b, a) };
        let cont = content_wrt(tall, var, var);
        return gcd_rec(flat, &cont, var);
    }
    let ca = content_wrt(a, var, var);
    let cb = content_wrt(b, var, var);
    let pa = a.divide_exact(&ca).expect("content divides");
    let pb = b.divide_exact(&cb).expect("content divides");
    let cg = gcd_rec(&ca, &cb, var);

    // Primitive PRS in `var`.
    let (mut f, mut g) = if degree_wrt(&pa, var) >= degree_wrt(&pb, var) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r = pseudo_rem(&f, &g, var);
        if r.is_zero() {
            break;
        }
        let cr = content_wrt(&r, var, var);
        let pr = r.divide_exact(&cr).expect("content divides");
        f = g;
        g = pr;
        if degree_wrt(&g, var) == 0 {
            // Coprime in `var`.
            return cg;
        }
    }
    cg.multiply(&g).expect("ctx")
}

/// Dense matrix of polynomials sharing one context.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Polynomial>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        if let Some(first) = entries.first() {
            for e in &entries {
                e.check_same_context(first).expect("one context per matrix");
            }
        }
        PolyMatrix { rows, cols, entries }
    }

    pub fn at(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    /// Exact determinant by cofactor expansion with minors memoized on the
    /// active column set.
    pub fn determinant(&self) -> Result<Polynomial> {
        if self.rows != self.cols {
            return Err(Error::NonSquareMatrix { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Err(Error::NonSquareMatrix { rows: 0, cols: 0 });
        }
        let ctx = self.entries[0].context().clone();
        let mut memo: std::collections::HashMap<u64, Polynomial> = std::collections::HashMap::new();
        Ok(self.det_minor(n, (1u64 << n) - 1, &ctx, &mut memo))
    }

    fn det_minor(
        &self,
        n: usize,
        cols_mask: u64,
        ctx: &Arc<VarContext>,
        memo: &mut std::collections::HashMap<u64, Polynomial>,
    ) -> Polynomial {
        if cols_mask == 0 {
            return Polynomial::one(ctx);
        }
        if let Some(p) = memo.get(&cols_mask) {
            return p.clone();
        }
        // Expand along the row determined by how many columns were consumed.
        let used = n - (cols_mask.count_ones() as usize);
        let row = used;
        let mut acc = Polynomial::zero(ctx);
        let mut sign = Rat::one();
        for c in 0..n {
            if cols_mask & (1 << c) == 0 {
                continue;
            }
            let e = self.at(row, c);
            if !e.is_zero() {
                let sub = self.det_minor(n, cols_mask & !(1 << c), ctx, memo);
                acc = acc
                    .add(&e.multiply(&sub).expect("ctx").scale(&sign))
                    .expect("ctx");
            }
            sign = -sign;
        }
        memo.insert(cols_mask, acc.clone());
        acc
    }
}
