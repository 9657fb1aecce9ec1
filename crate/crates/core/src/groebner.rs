//! Commutative Gröbner machinery: Buchberger's algorithm with normal pair
//! selection and Gebauer-Möller pruning, Krull dimension of leading-term
//! ideals, regular-sequence certification by dimension count, and the symbol
//! sequence checks used by the free-divisor pipelines.
//!
//! Runs are deterministic given the monomial order. Coefficients are either
//! exact rationals or a prime field; a modular verdict is reported as
//! "certified modulo p", never silently upgraded to an exact one.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::Instant;

use num::{BigInt, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::logfields::DivisorAnalysis;
use crate::polyring::{cmp_degrevlex, Polynomial, Rat, VarContext};
use crate::weyl::{FiltrationKind, WeylContext, WeylOperator};

pub const DEFAULT_MODULAR_PRIME: u64 = 2_147_483_647;

// ---------------------------------------------------------------------------
// monomial orders
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    DegRevLex,
    Lex,
}

/// A monomial order together with a permutation of the variables; entry 0 of
/// `vars` is the most significant variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub vars: Vec<usize>,
}

impl MonomialOrder {
    pub fn degrevlex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::DegRevLex, vars: (0..nvars).collect() }
    }

    pub fn lex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Lex, vars: (0..nvars).collect() }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> std::cmp::Ordering {
        match self.kind {
            OrderKind::DegRevLex => {
                if self.vars.iter().enumerate().all(|(i, &v)| v == i) {
                    cmp_degrevlex(a, b)
                } else {
                    let pa: Vec<u32> = self.vars.iter().map(|&v| a[v]).collect();
                    let pb: Vec<u32> = self.vars.iter().map(|&v| b[v]).collect();
                    cmp_degrevlex(&pa, &pb)
                }
            }
            OrderKind::Lex => {
                for &v in &self.vars {
                    if a[v] != b[v] {
                        return a[v].cmp(&b[v]);
                    }
                }
                std::cmp::Ordering::Equal
            }
        }
    }
}

// ---------------------------------------------------------------------------
// budget / cancellation
// ---------------------------------------------------------------------------

/// Cooperative budget honored between reduction steps.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    max_steps: Option<u64>,
    cancel: Option<Arc<AtomicBool>>,
}

#[derive(Debug, Default)]
struct BudgetState {
    steps: AtomicU64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_deadline(duration: std::time::Duration) -> Self {
        Budget { deadline: Some(Instant::now() + duration), ..Budget::default() }
    }

    pub fn with_max_steps(max: u64) -> Self {
        Budget { max_steps: Some(max), ..Budget::default() }
    }

    /// Attaches an external cancellation flag.
    pub fn with_cancel_flag(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }
}

struct BudgetGuard<'a> {
    budget: &'a Budget,
    state: BudgetState,
}

impl<'a> BudgetGuard<'a> {
    fn new(budget: &'a Budget) -> Self {
        BudgetGuard { budget, state: BudgetState::default() }
    }

    fn check(&self) -> Result<()> {
        let n = self.state.steps.fetch_add(1, AtomicOrdering::Relaxed);
        if let Some(max) = self.budget.max_steps {
            if n >= max {
                return Err(Error::BudgetExceeded);
            }
        }
        if let Some(flag) = &self.budget.cancel {
            if flag.load(AtomicOrdering::Relaxed) {
                return Err(Error::BudgetExceeded);
            }
        }
        if n % 1024 == 0 {
            if let Some(deadline) = self.budget.deadline {
                if Instant::now() > deadline {
                    return Err(Error::BudgetExceeded);
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// coefficient fields
// ---------------------------------------------------------------------------

pub trait CoeffField {
    type Elem: Clone + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_rat(&self, r: &Rat) -> Result<Self::Elem>;
}

pub struct RatField;

impl CoeffField for RatField {
    type Elem = Rat;
    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn inv(&self, a: &Rat) -> Rat {
        Rat::one() / a
    }
    fn from_rat(&self, r: &Rat) -> Result<Rat> {
        Ok(r.clone())
    }
}

pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    fn reduce_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let mut m = n % &p;
        if m.is_negative() {
            m += &p;
        }
        // p fits in u64, so the remainder does as well.
        let (_, digits) = m.to_u64_digits();
        digits.first().copied().unwrap_or(0)
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = ((acc as u128 * base as u128) % self.p as u128) as u64;
            }
            base = ((base as u128 * base as u128) % self.p as u128) as u64;
            e >>= 1;
        }
        acc
    }
}

impl CoeffField for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        self.pow(*a, self.p - 2)
    }
    fn from_rat(&self, r: &Rat) -> Result<u64> {
        let den = self.reduce_bigint(r.denom());
        if den == 0 {
            return Err(Error::BadInput(format!(
                "denominator divisible by modular prime {}",
                self.p
            )));
        }
        let num = self.reduce_bigint(r.numer());
        Ok(self.mul(&num, &self.inv(&den)))
    }
}

// ---------------------------------------------------------------------------
// generic polynomials sorted under an order
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct GbPoly<E> {
    /// Terms sorted descending under the active order.
    terms: Vec<(Vec<u32>, E)>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> GbPoly<E> {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &Vec<u32> {
        &self.terms[0].0
    }

    fn lc(&self) -> &E {
        &self.terms[0].1
    }
}

fn from_polynomial<F: CoeffField>(
    p: &Polynomial,
    field: &F,
    order: &MonomialOrder,
) -> Result<GbPoly<F::Elem>> {
    let mut terms = Vec::with_capacity(p.num_terms());
    for (e, c) in p.terms() {
        let elem = field.from_rat(c)?;
        if !field.is_zero(&elem) {
            terms.push((e.clone(), elem));
        }
    }
    terms.sort_by(|(a, _), (b, _)| order.cmp(b, a));
    Ok(GbPoly { terms })
}

fn to_polynomial(p: &GbPoly<Rat>, ctx: &Arc<VarContext>) -> Polynomial {
    let mut out = Polynomial::zero(ctx);
    for (e, c) in &p.terms {
        out = out
            .add(&Polynomial::monomial(ctx, e.clone(), c.clone()))
            .expect("ctx");
    }
    out
}

fn mono_mul(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mono_divides(d: &[u32], m: &[u32]) -> bool {
    d.iter().zip(m).all(|(x, y)| x <= y)
}

fn mono_lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn mono_deg(a: &[u32]) -> u64 {
    a.iter().map(|&x| x as u64).sum()
}

/// `p - c * x^shift * q`, merge-based.
fn sub_scaled<F: CoeffField>(
    field: &F,
    order: &MonomialOrder,
    p: &GbPoly<F::Elem>,
    c: &F::Elem,
    shift: &[u32],
    q: &GbPoly<F::Elem>,
) -> GbPoly<F::Elem> {
    let mut out = Vec::with_capacity(p.terms.len() + q.terms.len());
    let mut i = 0;
    let mut j = 0;
    while i < p.terms.len() && j < q.terms.len() {
        let qm = mono_mul(&q.terms[j].0, shift);
        match order.cmp(&p.terms[i].0, &qm) {
            std::cmp::Ordering::Greater => {
                out.push(p.terms[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push((qm, field.neg(&field.mul(c, &q.terms[j].1))));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = field.sub(&p.terms[i].1, &field.mul(c, &q.terms[j].1));
                if !field.is_zero(&v) {
                    out.push((qm, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    while i < p.terms.len() {
        out.push(p.terms[i].clone());
        i += 1;
    }
    while j < q.terms.len() {
        let qm = mono_mul(&q.terms[j].0, shift);
        out.push((qm, field.neg(&field.mul(c, &q.terms[j].1))));
        j += 1;
    }
    GbPoly { terms: out }
}

/// Full normal form of `p` modulo `basis`.
fn reduce<F: CoeffField>(
    field: &F,
    order: &MonomialOrder,
    mut p: GbPoly<F::Elem>,
    basis: &[GbPoly<F::Elem>],
    guard: &BudgetGuard,
) -> Result<GbPoly<F::Elem>> {
    let mut remainder: Vec<(Vec<u32>, F::Elem)> = Vec::new();
    'outer: while !p.is_zero() {
        guard.check()?;
        for g in basis {
            if g.is_zero() {
                continue;
            }
            if mono_divides(g.lm(), p.lm()) {
                let shift: Vec<u32> = p.lm().iter().zip(g.lm()).map(|(a, b)| a - b).collect();
                let c = field.mul(p.lc(), &field.inv(g.lc()));
                p = sub_scaled(field, order, &p, &c, &shift, g);
                continue 'outer;
            }
        }
        remainder.push(p.terms.remove(0));
    }
    Ok(GbPoly { terms: remainder })
}

fn make_monic<F: CoeffField>(field: &F, p: &mut GbPoly<F::Elem>) {
    if p.is_zero() {
        return;
    }
    let inv = field.inv(p.lc());
    for (_, c) in &mut p.terms {
        *c = field.mul(c, &inv);
    }
}

fn s_poly<F: CoeffField>(
    field: &F,
    order: &MonomialOrder,
    f: &GbPoly<F::Elem>,
    g: &GbPoly<F::Elem>,
) -> GbPoly<F::Elem> {
    let lcm = mono_lcm(f.lm(), g.lm());
    let sf: Vec<u32> = lcm.iter().zip(f.lm()).map(|(a, b)| a - b).collect();
    let sg: Vec<u32> = lcm.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
    // f/lc(f) * x^sf - g/lc(g) * x^sg
    let mut fs = f.clone();
    make_monic(field, &mut fs);
    for (m, _) in &mut fs.terms {
        *m = mono_mul(m, &sf);
    }
    let one = field.one();
    sub_scaled(field, order, &fs, &field.inv(&field.mul(g.lc(), &one)), &sg, g)
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Vec<u32>,
    deg: u64,
}

/// Buchberger's algorithm with normal selection (minimal lcm degree first)
/// and Gebauer-Möller style pair elimination; returns the reduced basis.
fn buchberger_generic<F: CoeffField>(
    field: &F,
    order: &MonomialOrder,
    gens: &[GbPoly<F::Elem>],
    budget: &Budget,
) -> Result<Vec<GbPoly<F::Elem>>> {
    let guard = BudgetGuard::new(budget);
    let mut basis: Vec<GbPoly<F::Elem>> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let add_element = |basis: &mut Vec<GbPoly<F::Elem>>,
                       pairs: &mut Vec<Pair>,
                       mut f: GbPoly<F::Elem>| {
        make_monic(field, &mut f);
        let t = basis.len();
        let lt = f.lm().clone();
        // Chain criterion on existing pairs.
        pairs.retain(|p| {
            if !mono_divides(&lt, &p.lcm) {
                return true;
            }
            let li = mono_lcm(basis[p.i].lm(), &lt);
            let lj = mono_lcm(basis[p.j].lm(), &lt);
            li == p.lcm || lj == p.lcm
        });
        // New pairs with multiple/equal-lcm and coprimality pruning.
        let mut fresh: Vec<Pair> = (0..t)
            .map(|i| {
                let lcm = mono_lcm(basis[i].lm(), &lt);
                let deg = mono_deg(&lcm);
                Pair { i, j: t, lcm, deg }
            })
            .collect();
        let mut keep = vec![true; fresh.len()];
        for a in 0..fresh.len() {
            if !keep[a] {
                continue;
            }
            for b in 0..fresh.len() {
                if a == b || !keep[a] {
                    continue;
                }
                if keep[b]
                    && mono_divides(&fresh[b].lcm, &fresh[a].lcm)
                    && fresh[b].lcm != fresh[a].lcm
                {
                    keep[a] = false;
                }
            }
        }
        // Among equal lcms keep the first index.
        for a in 0..fresh.len() {
            if !keep[a] {
                continue;
            }
            for b in (a + 1)..fresh.len() {
                if keep[b] && fresh[a].lcm == fresh[b].lcm {
                    keep[b] = false;
                }
            }
        }
        for (a, p) in fresh.drain(..).enumerate() {
            if !keep[a] {
                continue;
            }
            let product = mono_mul(basis[p.i].lm(), &lt);
            if product == p.lcm {
                continue; // coprime leading terms
            }
            pairs.push(p);
        }
        basis.push(f);
    };

    for g in gens {
        if g.is_zero() {
            continue;
        }
        let red = reduce(field, order, g.clone(), &basis, &guard)?;
        if !red.is_zero() {
            add_element(&mut basis, &mut pairs, red);
        }
    }

    while !pairs.is_empty() {
        guard.check()?;
        // Normal strategy: minimal lcm degree, then lcm, then indices.
        let mut best = 0;
        for k in 1..pairs.len() {
            let a = &pairs[k];
            let b = &pairs[best];
            let ord = a
                .deg
                .cmp(&b.deg)
                .then_with(|| a.lcm.cmp(&b.lcm))
                .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)));
            if ord == std::cmp::Ordering::Less {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        let s = s_poly(field, order, &basis[pair.i], &basis[pair.j]);
        let red = reduce(field, order, s, &basis, &guard)?;
        if !red.is_zero() {
            add_element(&mut basis, &mut pairs, red);
        }
    }

    // Minimalize: drop elements whose leading monomial is divisible by
    // another one's.
    let mut alive: Vec<bool> = vec![true; basis.len()];
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            if a != b
                && alive[a]
                && alive[b]
                && mono_divides(basis[b].lm(), basis[a].lm())
                && (basis[b].lm() != basis[a].lm() || b < a)
            {
                alive[a] = false;
            }
        }
    }
    let minimal: Vec<GbPoly<F::Elem>> = basis
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(g, _)| g)
        .collect();
    // Tail-reduce each element against the others.
    let mut reduced = Vec::with_capacity(minimal.len());
    for (k, g) in minimal.iter().enumerate() {
        let others: Vec<GbPoly<F::Elem>> = minimal
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, x)| x.clone())
            .collect();
        let mut r = reduce(field, order, g.clone(), &others, &guard)?;
        make_monic(field, &mut r);
        if !r.is_zero() {
            reduced.push(r);
        }
    }
    reduced.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    Ok(reduced)
}

// ---------------------------------------------------------------------------
// public exact interface
// ---------------------------------------------------------------------------

/// A reduced, monic Gröbner basis over the rationals.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub order: MonomialOrder,
    pub elements: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn reduce_polynomial(&self, p: &Polynomial) -> Polynomial {
        let field = RatField;
        let guard_budget = Budget::unlimited();
        let guard = BudgetGuard::new(&guard_budget);
        let basis: Vec<GbPoly<Rat>> = self
            .elements
            .iter()
            .map(|e| from_polynomial(e, &field, &self.order).expect("rat"))
            .collect();
        let gp = from_polynomial(p, &field, &self.order).expect("rat");
        let r = reduce(&field, &self.order, gp, &basis, &guard).expect("unlimited budget");
        to_polynomial(&r, p.context())
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce_polynomial(p).is_zero()
    }

    pub fn leading_monomials(&self) -> Vec<Vec<u32>> {
        self.elements
            .iter()
            .map(|e| {
                let field = RatField;
                from_polynomial(e, &field, &self.order)
                    .expect("rat")
                    .lm()
                    .clone()
            })
            .collect()
    }
}

/// Reduced Gröbner basis of the given generators over the rationals.
pub fn buchberger(
    gens: &[Polynomial],
    order: &MonomialOrder,
    budget: &Budget,
) -> Result<GroebnerBasis> {
    if gens.is_empty() {
        return Err(Error::BadInput("no generators".into()));
    }
    let ctx = gens[0].context().clone();
    for g in gens {
        g.check_same_context(&gens[0])?;
    }
    let field = RatField;
    let gb: Vec<GbPoly<Rat>> = gens
        .iter()
        .map(|g| from_polynomial(g, &field, order))
        .collect::<Result<_>>()?;
    let reduced = buchberger_generic(&field, order, &gb, budget)?;
    Ok(GroebnerBasis {
        order: order.clone(),
        elements: reduced.iter().map(|g| to_polynomial(g, &ctx)).collect(),
    })
}

/// Krull dimension of the quotient by the ideal with the given leading
/// monomials: the largest size of a variable set meeting no leading monomial.
/// `None` is the `-infinity` sentinel for the unit ideal.
pub fn dimension_from_leading_monomials(lms: &[Vec<u32>], nvars: usize) -> Option<usize> {
    if lms.iter().any(|m| m.iter().all(|&e| e == 0)) {
        return None;
    }
    assert!(nvars <= 63, "dimension search limited to 63 variables");
    let supports: Vec<u64> = lms
        .iter()
        .map(|m| {
            let mut mask = 0u64;
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    mask |= 1 << i;
                }
            }
            mask
        })
        .collect();
    let mut best = 0usize;
    for set in 0u64..(1u64 << nvars) {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        if supports.iter().all(|s| s & !set != 0) {
            best = size;
        }
    }
    Some(best)
}

/// Krull dimension of a proper ideal from its reduced basis; `None` for the
/// unit ideal.
pub fn ideal_dimension(gb: &GroebnerBasis) -> Option<usize> {
    if gb.elements.is_empty() {
        let nvars = 0;
        let _ = nvars;
        return None;
    }
    let nvars = gb.elements[0].context().len();
    dimension_from_leading_monomials(&gb.leading_monomials(), nvars)
}

// ---------------------------------------------------------------------------
// regular sequences
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Modular(u64),
}

impl Arithmetic {
    pub fn describe(&self) -> String {
        match self {
            Arithmetic::Exact => "exact".into(),
            Arithmetic::Modular(p) => format!("modular {p}"),
        }
    }
}

/// Searches for strictly positive integer weights making all generators
/// weighted-homogeneous. The weight space is cut out by exponent differences
/// within each generator; a strictly positive point of that subspace is then
/// found exactly by Fourier-Motzkin elimination on kernel coordinates.
pub fn find_positive_grading(gens: &[Polynomial]) -> Option<Vec<i64>> {
    let nvars = gens.first()?.context().len();
    if nvars == 0 {
        return Some(vec![]);
    }
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for g in gens {
        let mut terms = g.terms();
        let Some((first, _)) = terms.next() else { continue };
        for (e, _) in terms {
            let row: Vec<Rat> = (0..nvars)
                .map(|i| Rat::from_integer(BigInt::from(e[i] as i64 - first[i] as i64)))
                .collect();
            rows.push(row);
        }
    }
    let kernel: Vec<Vec<Rat>> = if rows.is_empty() {
        (0..nvars)
            .map(|i| {
                let mut v = vec![Rat::zero(); nvars];
                v[i] = Rat::one();
                v
            })
            .collect()
    } else {
        QMatrix::from_rows(rows).kernel_basis()
    };
    if kernel.is_empty() {
        return None;
    }
    // Feasibility of (sum_b y_b kernel[b])_i >= 1 for every variable i.
    let k = kernel.len();
    let constraints: Vec<(Vec<Rat>, Rat)> = (0..nvars)
        .map(|i| {
            let coeffs: Vec<Rat> = (0..k).map(|b| kernel[b][i].clone()).collect();
            (coeffs, Rat::one())
        })
        .collect();
    let y = fourier_motzkin_point(constraints, k)?;
    let v: Vec<Rat> = (0..nvars)
        .map(|i| (0..k).map(|b| &kernel[b][i] * &y[b]).sum())
        .collect();
    debug_assert!(v.iter().all(|x| x.is_positive()));
    let mut lcm = BigInt::one();
    for x in &v {
        lcm = num::integer::lcm(lcm, x.denom().clone());
    }
    Some(
        v.iter()
            .map(|x| {
                let scaled = x * Rat::from_integer(lcm.clone());
                i64::try_from(scaled.to_integer()).expect("grading fits i64")
            })
            .collect(),
    )
}

/// Finds a point satisfying `coeffs . y >= rhs` for every row, or `None` if
/// the system is infeasible. Intended for the small systems arising from
/// grading searches.
fn fourier_motzkin_point(constraints: Vec<(Vec<Rat>, Rat)>, nvars: usize) -> Option<Vec<Rat>> {
    const ROW_CAP: usize = 20_000;
    // stages[j] holds the system before eliminating variable j.
    let mut stages: Vec<Vec<(Vec<Rat>, Rat)>> = Vec::with_capacity(nvars);
    let mut current = constraints;
    for j in 0..nvars {
        stages.push(current.clone());
        let mut next: Vec<(Vec<Rat>, Rat)> = Vec::new();
        let mut pos: Vec<&(Vec<Rat>, Rat)> = Vec::new();
        let mut neg: Vec<&(Vec<Rat>, Rat)> = Vec::new();
        for row in &current {
            if row.0[j].is_positive() {
                pos.push(row);
            } else if row.0[j].is_negative() {
                neg.push(row);
            } else {
                next.push(row.clone());
            }
        }
        for p in &pos {
            for q in &neg {
                // (-b) * p + a * q with a = p.0[j] > 0, b = q.0[j] < 0.
                let a = p.0[j].clone();
                let mb = -q.0[j].clone();
                let coeffs: Vec<Rat> = (0..nvars)
                    .map(|t| &mb * &p.0[t] + &a * &q.0[t])
                    .collect();
                let rhs = &mb * &p.1 + &a * &q.1;
                next.push((coeffs, rhs));
                if next.len() > ROW_CAP {
                    return None;
                }
            }
        }
        current = next;
    }
    // All variables eliminated: rows read `0 >= rhs`.
    if current.iter().any(|(_, rhs)| rhs.is_positive()) {
        return None;
    }
    // Back-substitute.
    let mut y = vec![Rat::zero(); nvars];
    for j in (0..nvars).rev() {
        let mut lower: Option<Rat> = None;
        let mut upper: Option<Rat> = None;
        for (coeffs, rhs) in &stages[j] {
            let a = &coeffs[j];
            if a.is_zero() {
                continue;
            }
            let mut rest = rhs.clone();
            for t in (j + 1)..nvars {
                rest -= &coeffs[t] * &y[t];
            }
            let bound = rest / a.clone();
            if a.is_positive() {
                lower = Some(match lower {
                    None => bound,
                    Some(l) => l.max(bound),
                });
            } else {
                upper = Some(match upper {
                    None => bound,
                    Some(u) => u.min(bound),
                });
            }
        }
        y[j] = match (lower, upper) {
            (Some(l), Some(u)) => (l + u) / Rat::from_integer(BigInt::from(2)),
            (Some(l), None) => l + Rat::one(),
            (None, Some(u)) => u - Rat::one(),
            (None, None) => Rat::zero(),
        };
    }
    Some(y)
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularSequenceReport {
    pub regular: bool,
    pub num_vars: usize,
    pub length: usize,
    pub dimension: Option<usize>,
    pub expected_dimension: usize,
    pub arithmetic: String,
    pub grading: Vec<i64>,
}

/// Certifies regularity of a homogeneous sequence by the dimension count
/// `codim = length`, valid because positively graded polynomial rings are
/// Cohen-Macaulay.
pub fn is_regular_sequence(
    gens: &[Polynomial],
    arithmetic: Arithmetic,
    budget: &Budget,
) -> Result<RegularSequenceReport> {
    if gens.is_empty() {
        return Err(Error::BadInput("empty sequence".into()));
    }
    let nvars = gens[0].context().len();
    for g in gens {
        g.check_same_context(&gens[0])?;
    }
    let grading = find_positive_grading(gens).ok_or(Error::Inhomogeneous)?;
    let mut report = RegularSequenceReport {
        regular: false,
        num_vars: nvars,
        length: gens.len(),
        dimension: None,
        expected_dimension: nvars.saturating_sub(gens.len()),
        arithmetic: arithmetic.describe(),
        grading,
    };
    if gens.len() > nvars {
        return Ok(report);
    }
    if gens.iter().any(|g| g.is_zero() || g.as_constant().is_some()) {
        // A zero entry is a zerodivisor; a unit makes the ideal improper.
        return Ok(report);
    }
    let order = MonomialOrder::degrevlex(nvars);
    let lms: Vec<Vec<u32>> = match arithmetic {
        Arithmetic::Exact => {
            let gb = buchberger(gens, &order, budget)?;
            gb.leading_monomials()
        }
        Arithmetic::Modular(p) => {
            let field = PrimeField { p };
            let converted: Vec<GbPoly<u64>> = gens
                .iter()
                .map(|g| from_polynomial(g, &field, &order))
                .collect::<Result<_>>()?;
            let gb = buchberger_generic(&field, &order, &converted, budget)?;
            gb.iter().map(|g| g.lm().clone()).collect()
        }
    };
    let dim = dimension_from_leading_monomials(&lms, nvars);
    report.dimension = dim;
    report.regular = dim == Some(nvars - gens.len());
    Ok(report)
}

// ---------------------------------------------------------------------------
// symbol sequence checks
// ---------------------------------------------------------------------------

/// Which symbol sequence to assemble and certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceCheckMode {
    SkOrder,
    SkTotal,
    IsSymbols,
    IsSymbolsWithS,
    HolonomicityBeta,
}

impl SequenceCheckMode {
    pub fn name(&self) -> &'static str {
        match self {
            SequenceCheckMode::SkOrder => "sk_order",
            SequenceCheckMode::SkTotal => "sk_total",
            SequenceCheckMode::IsSymbols => "Is_symbols",
            SequenceCheckMode::IsSymbolsWithS => "Is_symbols_with_s",
            SequenceCheckMode::HolonomicityBeta => "holonomicity_beta",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceCertificate {
    pub mode: String,
    pub sequence: Vec<String>,
    pub num_vars: usize,
    pub dimension: Option<usize>,
    pub expected_dimension: usize,
    pub verdict: bool,
    pub arithmetic: String,
}

fn certify_sequence(
    mode: SequenceCheckMode,
    sequence: Vec<Polynomial>,
    arithmetic: Arithmetic,
    budget: &Budget,
) -> Result<SequenceCertificate> {
    let report = is_regular_sequence(&sequence, arithmetic, budget)?;
    Ok(SequenceCertificate {
        mode: mode.name().into(),
        sequence: sequence.iter().map(|p| p.to_string()).collect(),
        num_vars: report.num_vars,
        dimension: report.dimension,
        expected_dimension: report.expected_dimension,
        verdict: report.regular,
        arithmetic: report.arithmetic.clone(),
    })
}

/// The symbols of the a_D fields in the commutative ring `Q[w, xi(, s)]` of a
/// Weyl context over the divisor coordinates.
fn field_symbols(analysis: &DivisorAnalysis, wctx: &Arc<WeylContext>) -> Vec<Polynomial> {
    let pair_map: Vec<usize> = (0..analysis.n).collect();
    analysis
        .ad_basis
        .iter()
        .map(|f| f.as_operator(wctx, &pair_map).principal_symbol(FiltrationKind::Order))
        .collect()
}

/// The strongly-Koszul check: the order-filtration symbols of
/// `(h, delta_1, ..., delta_{n-1})` form a regular sequence, or equivalently
/// (mode `SkTotal`) the total-order symbols of
/// `(h, delta_1, ..., delta_{n-1}, chi - d s)` do.
pub fn sk_check(
    analysis: &DivisorAnalysis,
    mode: SequenceCheckMode,
    arithmetic: Arithmetic,
    budget: &Budget,
) -> Result<SequenceCertificate> {
    let names = analysis.h.context().names().to_vec();
    let weights = analysis.h.context().weights().to_vec();
    let d = analysis.h.weighted_degree().ok_or(Error::Inhomogeneous)?;
    match mode {
        SequenceCheckMode::SkOrder => {
            let wctx = WeylContext::new(names, vec![]);
            let sym_ctx = wctx.symbol_context();
            let n = analysis.n;
            let h_sym = analysis.h.map_variables(&sym_ctx, &(0..n).collect::<Vec<_>>());
            let mut seq = vec![h_sym];
            seq.extend(field_symbols(analysis, &wctx));
            certify_sequence(mode, seq, arithmetic, budget)
        }
        SequenceCheckMode::SkTotal => {
            let wctx = WeylContext::new(names, vec!["s".into()]);
            let sym_ctx = wctx.symbol_context();
            let n = analysis.n;
            let h_sym = analysis.h.map_variables(&sym_ctx, &(0..n).collect::<Vec<_>>());
            let mut seq = vec![h_sym];
            seq.extend(field_symbols(analysis, &wctx));
            let chi = WeylOperator::euler(&wctx, &weights);
            let s = WeylOperator::central(&wctx, "s").expect("s central");
            let last = chi
                .sub(&s.scale(&Rat::from_integer(BigInt::from(d))))
                .expect("ctx");
            seq.push(last.principal_symbol(FiltrationKind::TotalOrder));
            certify_sequence(mode, seq, arithmetic, budget)
        }
        other => Err(Error::BadInput(format!(
            "mode {} is not an SK mode",
            other.name()
        ))),
    }
}

/// Symbol sequences of the homogenized ideal `I(s)` and its variants, in
/// `Q[w0, w, xi0, xi(, s)]`:
///
/// * `IsSymbols`: `(h - c w0^d, sigma(delta_i), sigma(chi) - d s + w0 xi0)`
/// * `IsSymbolsWithS`: the same with `s` prepended
/// * `HolonomicityBeta`: `(h - c w0^d, sigma(delta_i), sigma(chi) + w0 xi0)`
///   with no `s` in the ring
///
/// For `d` different from the degree of `h` the Euler entry is the
/// integer-scaled form `d sigma(chi) + n w0 xi0 (- n d s)`.
pub fn homogenized_symbol_check(
    analysis: &DivisorAnalysis,
    c: &Rat,
    d: i64,
    mode: SequenceCheckMode,
    arithmetic: Arithmetic,
    budget: &Budget,
) -> Result<SequenceCertificate> {
    if c.is_zero() || d < 1 {
        return Err(Error::BadInput("need c != 0 and d >= 1".into()));
    }
    let n_deg = analysis.h.weighted_degree().ok_or(Error::Inhomogeneous)?;
    let with_s = !matches!(mode, SequenceCheckMode::HolonomicityBeta);
    let mut names: Vec<String> = vec!["w0".into()];
    names.extend(analysis.h.context().names().iter().cloned());
    let centrals: Vec<String> = if with_s { vec!["s".into()] } else { vec![] };
    let wctx = WeylContext::new(names, centrals);
    let sym_ctx = wctx.symbol_context();
    let n = analysis.n;
    let shift_map: Vec<usize> = (1..=n).collect();

    // h - c w0^d
    let h_sym = analysis.h.map_variables(&sym_ctx, &shift_map);
    let mut w0d = vec![0u32; sym_ctx.len()];
    w0d[0] = d as u32;
    let h_tilde = h_sym
        .sub(&Polynomial::monomial(&sym_ctx, w0d, c.clone()))
        .expect("ctx");

    // field symbols over the extended context
    let pair_map: Vec<usize> = (1..=n).collect();
    let deltas: Vec<Polynomial> = analysis
        .ad_basis
        .iter()
        .map(|f| f.as_operator(&wctx, &pair_map).principal_symbol(FiltrationKind::Order))
        .collect();

    // Euler entry
    let mut chi_weights = vec![0i64; n + 1];
    for (i, &w) in analysis.h.context().weights().iter().enumerate() {
        chi_weights[i + 1] = w;
    }
    let sigma_chi = WeylOperator::euler(&wctx, &chi_weights).principal_symbol(FiltrationKind::Order);
    let mut w0xi0_exp = vec![0u32; sym_ctx.len()];
    w0xi0_exp[0] = 1;
    w0xi0_exp[sym_ctx.index_of("xiw0").expect("xi for w0")] = 1;
    let w0xi0 = Polynomial::monomial(&sym_ctx, w0xi0_exp, Rat::one());
    let s_poly = if with_s {
        Some(Polynomial::variable(&sym_ctx, "s").expect("s"))
    } else {
        None
    };

    let euler_entry = if d == n_deg {
        let mut e = sigma_chi.add(&w0xi0).expect("ctx");
        if let Some(sp) = &s_poly {
            if !matches!(mode, SequenceCheckMode::HolonomicityBeta) {
                e = e
                    .sub(&sp.scale(&Rat::from_integer(BigInt::from(d))))
                    .expect("ctx");
            }
        }
        e
    } else {
        let mut e = sigma_chi
            .scale(&Rat::from_integer(BigInt::from(d)))
            .add(&w0xi0.scale(&Rat::from_integer(BigInt::from(n_deg))))
            .expect("ctx");
        if let Some(sp) = &s_poly {
            e = e
                .sub(&sp.scale(&Rat::from_integer(BigInt::from(n_deg * d))))
                .expect("ctx");
        }
        e
    };

    let mut seq = Vec::new();
    if matches!(mode, SequenceCheckMode::IsSymbolsWithS) {
        seq.push(s_poly.clone().expect("s present"));
    }
    seq.push(h_tilde);
    seq.extend(deltas);
    seq.push(euler_entry);
    match mode {
        SequenceCheckMode::IsSymbols
        | SequenceCheckMode::IsSymbolsWithS
        | SequenceCheckMode::HolonomicityBeta => certify_sequence(mode, seq, arithmetic, budget),
        other => Err(Error::BadInput(format!(
            "mode {} is not a homogenized mode",
            other.name()
        ))),
    }
}
