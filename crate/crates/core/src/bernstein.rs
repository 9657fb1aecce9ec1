//! Bernstein-Sato polynomials of self-dual prehomogeneous equations via the
//! functional equation `h(d) h^s = b(s) h^(s-1)`, normalization conversions,
//! the root symmetry check, and resonance arithmetic (the constant `c` and
//! admissible integer twists).

use num::{BigInt, BigUint, Integer, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyring::{rat_to_string, Polynomial, Rat};
use crate::weyl::{apply_to_symbolic_power, WeylContext, WeylOperator};

// ---------------------------------------------------------------------------
// univariate polynomials in s
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over the rationals, coefficients ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize, c: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&(Rat::one() / l.clone())),
        }
    }

    /// `p(a s + b)`.
    pub fn substitute_linear(&self, a: &Rat, b: &Rat) -> Self {
        let lin = Self::new(vec![b.clone(), a.clone()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Synthetic division by `(s - r)`; `None` when `r` is not a root.
    pub fn deflate(&self, r: &Rat) -> Option<Self> {
        if self.is_zero() || !self.eval(r).is_zero() {
            return None;
        }
        let n = self.coeffs.len();
        let mut out = vec![Rat::zero(); n - 1];
        let mut carry = Rat::zero();
        for i in (0..n).rev() {
            let v = &self.coeffs[i] + &carry;
            if i == 0 {
                debug_assert!(v.is_zero());
                break;
            }
            out[i - 1] = v.clone();
            carry = v * r;
        }
        Some(Self::new(out))
    }

    /// Value as an operator polynomial in `op` (e.g. `b(t d_t)`).
    pub fn of_operator(&self, op: &WeylOperator) -> WeylOperator {
        let ctx = op.context().clone();
        let mut acc = WeylOperator::zero(&ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .normal_product(op)
                .expect("ctx")
                .add(&WeylOperator::constant(&ctx, c.clone()))
                .expect("ctx");
        }
        acc
    }

    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = if i == 0 {
                rat_to_string(&mag)
            } else {
                let pow = if i == 1 { var.to_string() } else { format!("{var}^{i}") };
                if mag.is_one() {
                    pow
                } else {
                    format!("{}*{}", rat_to_string(&mag), pow)
                }
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() { format!("-{body}") } else { body });
            } else if c.is_negative() {
                parts.push(format!(" - {body}"));
            } else {
                parts.push(format!(" + {body}"));
            }
        }
        parts.concat()
    }
}

// ---------------------------------------------------------------------------
// integer factorization for rational root candidates
// ---------------------------------------------------------------------------

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // m < 2^64 in practice here, but stay safe with a widening loop.
    if let (Ok(a64), Ok(b64), Ok(m64)) = (u64::try_from(a), u64::try_from(b), u64::try_from(m)) {
        return ((a64 as u128 * b64 as u128) % m64 as u128) as u128;
    }
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

fn pow_mod(mut base: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let mut x = 2u128;
        let mut y = 2u128;
        let mut d = 1u128;
        while d == 1 {
            x = (mul_mod(x, x, n) + c) % n;
            y = (mul_mod(y, y, n) + c) % n;
            y = (mul_mod(y, y, n) + c) % n;
            let diff = x.abs_diff(y);
            d = if diff == 0 { n } else { gcd_u128(diff, n) };
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn factor_u128(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime_u128(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_u128(d, out);
    factor_u128(n / d, out);
}

/// All positive divisors of `|n|`, exactly; errors beyond u128 range.
fn divisors(n: &BigInt) -> Result<Vec<BigUint>> {
    let mag = n.magnitude();
    let value =
        u128::try_from(mag.clone()).map_err(|_| {
            Error::BadInput("coefficient too large for exact rational root extraction".into())
        })?;
    if value == 0 {
        return Err(Error::BadInput("divisors of zero requested".into()));
    }
    let mut primes = Vec::new();
    factor_u128(value, &mut primes);
    primes.sort_unstable();
    let mut grouped: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match grouped.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => grouped.push((p, 1)),
        }
    }
    let mut divs: Vec<u128> = vec![1];
    for (p, e) in grouped {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut acc = *d;
            next.push(acc);
            for _ in 0..e {
                acc = acc.checked_mul(p).ok_or_else(|| {
                    Error::BadInput("divisor overflow in root extraction".into())
                })?;
                next.push(acc);
            }
        }
        next.sort_unstable();
        next.dedup();
        divs = next;
        if divs.len() > 200_000 {
            return Err(Error::BadInput("too many divisor candidates".into()));
        }
    }
    Ok(divs.into_iter().map(BigUint::from).collect())
}

/// Rational roots with multiplicities (ascending) and the rational-root-free
/// remaining factor, found by the rational root theorem and deflation.
pub fn rational_roots(p: &UniPoly) -> Result<(Vec<(Rat, usize)>, UniPoly)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    // Clear denominators to a primitive integer polynomial.
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
        .collect();

    let mut work = p.monic();
    let mut roots: Vec<(Rat, usize)> = Vec::new();

    // Factor out s^m first.
    let mut zero_mult = 0usize;
    while work.coeffs().first().is_some_and(|c| c.is_zero()) {
        work = work.deflate(&Rat::zero()).expect("0 is a root");
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rat::zero(), zero_mult));
    }
    if work.degree() == Some(0) || work.is_zero() {
        return Ok((roots, work));
    }

    // Candidates p/q with p | trailing, q | leading of the integer model.
    let trailing = ints.iter().find(|c| !c.is_zero()).expect("nonzero poly");
    let leading = ints.last().expect("nonzero poly");
    let nums = divisors(trailing)?;
    let dens = divisors(leading)?;
    let mut candidates: Vec<Rat> = Vec::new();
    for nu in &nums {
        for de in &dens {
            let q = Rat::new(BigInt::from(nu.clone()), BigInt::from(de.clone()));
            candidates.push(q.clone());
            candidates.push(-q);
        }
    }
    candidates.sort();
    candidates.dedup();

    for cand in candidates {
        let mut mult = 0usize;
        while let Some(next) = work.deflate(&cand) {
            work = next;
            mult += 1;
        }
        if mult > 0 {
            roots.push((cand, mult));
        }
        if work.degree().unwrap_or(0) == 0 {
            break;
        }
    }
    roots.sort_by(|(a, _), (b, _)| a.cmp(b));
    Ok((roots, work))
}

// ---------------------------------------------------------------------------
// Bernstein-Sato polynomials
// ---------------------------------------------------------------------------

/// Which functional equation the polynomial refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `h(d) h^(s+1) = b(s) h^s`
    Classical,
    /// `h(d) h^s = b(s) h^(s-1)`; zero is always a root.
    Reduction,
}

impl Normalization {
    pub fn name(&self) -> &'static str {
        match self {
            Normalization::Classical => "classical",
            Normalization::Reduction => "reduction",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BernsteinPolynomial {
    pub poly: UniPoly,
    pub normalization: Normalization,
    /// Rational roots with multiplicities, ascending.
    pub rational_roots: Vec<(Rat, usize)>,
    /// The factor without rational roots (constant when all roots are
    /// rational).
    pub nonrational_part: UniPoly,
}

impl BernsteinPolynomial {
    pub fn from_poly(poly: UniPoly, normalization: Normalization) -> Result<Self> {
        let (rational_roots, nonrational_part) = rational_roots(&poly)?;
        Ok(BernsteinPolynomial { poly, normalization, rational_roots, nonrational_part })
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// Root multiset as a flat ascending list.
    pub fn roots_with_multiplicity(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        for (r, m) in &self.rational_roots {
            for _ in 0..*m {
                out.push(r.clone());
            }
        }
        out
    }

    pub fn factored_form(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (r, m) in &self.rational_roots {
            let base = if r.is_zero() {
                "s".to_string()
            } else if r.is_negative() {
                format!("(s + {})", rat_to_string(&r.abs()))
            } else {
                format!("(s - {})", rat_to_string(r))
            };
            if *m == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{m}"));
            }
        }
        if self.nonrational_part.degree().unwrap_or(0) > 0
            || !self
                .nonrational_part
                .leading()
                .map(|c| c.is_one())
                .unwrap_or(true)
        {
            parts.push(format!("({})", self.nonrational_part.render("s")));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn uniform_degree(h: &Polynomial) -> Option<u64> {
    let mut deg = None;
    for (e, _) in h.terms() {
        let d: u64 = e.iter().map(|&x| x as u64).sum();
        match deg {
            None => deg = Some(d),
            Some(p) if p != d => return None,
            _ => {}
        }
    }
    deg
}

/// Computes the b-function of a self-dual prehomogeneous equation by
/// expanding `h(d) h^s`. The reduced symbolic-power class must be
/// `(1, b(s))` with `b` free of the coordinate variables; anything else
/// signals that `h` is not such an equation.
pub fn bernstein_selfdual(h: &Polynomial) -> Result<BernsteinPolynomial> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = uniform_degree(h).ok_or(Error::Inhomogeneous)? as usize;
    let ctx = WeylContext::new(h.context().names().to_vec(), vec![]);
    let map: Vec<usize> = (0..h.context().len()).collect();
    let op = WeylOperator::from_polynomial_in_derivations(h, &ctx, &map);
    let class = apply_to_symbolic_power(&op, h)?;
    if class.shift != 1 {
        return Err(Error::Verification(format!(
            "h(d) h^s does not reduce to shift 1 (got shift {}, payload {})",
            class.shift, class.payload
        )));
    }
    let payload_ctx = class.payload.context().clone();
    let s_idx = payload_ctx.index_of("s").expect("payload carries s");
    let mut coeffs = vec![Rat::zero(); n + 1];
    for (e, c) in class.payload.terms() {
        for (i, &x) in e.iter().enumerate() {
            if i != s_idx && x > 0 {
                return Err(Error::Verification(format!(
                    "payload is not a polynomial in s alone: {}",
                    class.payload
                )));
            }
        }
        let k = e[s_idx] as usize;
        if k >= coeffs.len() {
            coeffs.resize(k + 1, Rat::zero());
        }
        coeffs[k] = c.clone();
    }
    let b = UniPoly::new(coeffs);
    if b.degree() != Some(n) {
        return Err(Error::Verification(format!(
            "b-function has degree {:?}, expected {n}",
            b.degree()
        )));
    }
    if !b.eval(&Rat::zero()).is_zero() {
        return Err(Error::Verification(
            "reduction-normalized b-function must vanish at 0".into(),
        ));
    }
    BernsteinPolynomial::from_poly(b, Normalization::Reduction)
}

/// Shifts the argument by one and flips the normalization tag:
/// `b_reduction(s) = b_classical(s - 1)`.
pub fn convert_normalization(b: &BernsteinPolynomial) -> Result<BernsteinPolynomial> {
    let (shift, target) = match b.normalization {
        Normalization::Reduction => (Rat::one(), Normalization::Classical),
        Normalization::Classical => (-Rat::one(), Normalization::Reduction),
    };
    let poly = b.poly.substitute_linear(&Rat::one(), &shift);
    BernsteinPolynomial::from_poly(poly, target)
}

/// Classical normalization: `b(-s-2) = +-b(s)`; reduction normalization: the
/// root multiset is symmetric around zero, i.e. `b(-s) = +-b(s)`.
pub fn check_symmetry(b: &BernsteinPolynomial) -> bool {
    let reflected = match b.normalization {
        Normalization::Classical => b
            .poly
            .substitute_linear(&-Rat::one(), &-Rat::from_integer(BigInt::from(2))),
        Normalization::Reduction => b.poly.substitute_linear(&-Rat::one(), &Rat::zero()),
    };
    reflected == b.poly || reflected == b.poly.scale(&-Rat::one())
}

// ---------------------------------------------------------------------------
// resonance arithmetic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceEntry {
    pub root: String,
    pub scaled: String,
    pub meets_integers: bool,
}

/// The resonance constant `c = min(Z * union_k (k + n roots))` and the data
/// behind the admissibility test. Only rational roots can produce integers
/// after scaling and integer shifts; nonrational factors are recorded but
/// never contribute.
#[derive(Debug, Clone)]
pub struct ResonanceData {
    pub n: i64,
    pub c: Option<BigInt>,
    pub entries: Vec<ResonanceEntry>,
    roots: Vec<Rat>,
    pub nonrational_degree: usize,
}

impl ResonanceData {
    /// `beta0` avoids `union_k (k + n * roots)` for integer `k >= 0`.
    pub fn is_admissible(&self, beta0: &Rat) -> bool {
        for r in &self.roots {
            let t = beta0 - r.clone() * Rat::from_integer(BigInt::from(self.n));
            if t.is_integer() && !t.is_negative() {
                return false;
            }
        }
        true
    }

    /// The largest admissible integer, `c - 1`, when resonance meets the
    /// integers at all.
    pub fn largest_admissible_integer(&self) -> Option<BigInt> {
        self.c.as_ref().map(|c| c - BigInt::one())
    }
}

/// Resonance arithmetic from a classical-normalization b-function and the
/// degree `n`.
pub fn resonance_constant(b: &BernsteinPolynomial, n: i64) -> Result<ResonanceData> {
    if b.normalization != Normalization::Classical {
        return Err(Error::BadInput(
            "resonance constant expects the classical normalization".into(),
        ));
    }
    let mut c: Option<BigInt> = None;
    let mut entries = Vec::new();
    let mut roots = Vec::new();
    for (r, m) in &b.rational_roots {
        let scaled = r * Rat::from_integer(BigInt::from(n));
        let meets = scaled.is_integer();
        if meets {
            let v = scaled.to_integer();
            c = Some(match c {
                None => v.clone(),
                Some(old) => old.min(v.clone()),
            });
        }
        entries.push(ResonanceEntry {
            root: rat_to_string(r),
            scaled: rat_to_string(&scaled),
            meets_integers: meets,
        });
        for _ in 0..*m {
            roots.push(r.clone());
        }
    }
    Ok(ResonanceData {
        n,
        c,
        entries,
        roots,
        nonrational_degree: b.nonrational_part.degree().unwrap_or(0),
    })
}

/// The general-d admissibility test of the invertibility condition:
/// `beta` avoids `union_k (k/d + roots)` for integer `k >= 0`.
pub fn is_admissible_with_d(b: &BernsteinPolynomial, beta: &Rat, d: i64) -> Result<bool> {
    if d < 1 {
        return Err(Error::BadInput("d must be at least 1".into()));
    }
    for (r, _) in &b.rational_roots {
        let t = (beta - r) * Rat::from_integer(BigInt::from(d));
        if t.is_integer() && !t.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{rat, rat_int, VarContext};

    fn nc(n: usize) -> Polynomial {
        let ctx = VarContext::new((1..=n).map(|i| format!("w{i}")).collect::<Vec<_>>());
        let mut h = Polynomial::one(&ctx);
        for i in 1..=n {
            h = h
                .multiply(&Polynomial::variable(&ctx, &format!("w{i}")).unwrap())
                .unwrap();
        }
        h
    }

    #[test]
    fn bernstein_point() {
        let ctx = VarContext::new(vec!["w"]);
        let h = Polynomial::variable(&ctx, "w").unwrap();
        let b = bernstein_selfdual(&h).unwrap();
        assert_eq!(b.poly.render("s"), "s");
        assert_eq!(b.normalization, Normalization::Reduction);
    }

    #[test]
    fn bernstein_normal_crossing() {
        for n in 1..=4 {
            let b = bernstein_selfdual(&nc(n)).unwrap();
            assert_eq!(b.poly, UniPoly::monomial(n, Rat::one()), "nc:{n}");
            let classical = convert_normalization(&b).unwrap();
            // (s+1)^n
            let expect = UniPoly::new(vec![Rat::one(), Rat::one()]);
            let mut p = UniPoly::constant(Rat::one());
            for _ in 0..n {
                p = p.mul(&expect);
            }
            assert_eq!(classical.poly, p);
        }
    }

    #[test]
    fn bernstein_rejects_non_prehomogeneous_shape() {
        // The Fermat cubic admits no functional equation with h(d): the
        // payload keeps coordinate variables.
        let ctx = VarContext::new(vec!["w1", "w2"]);
        let w1 = Polynomial::variable(&ctx, "w1").unwrap();
        let w2 = Polynomial::variable(&ctx, "w2").unwrap();
        let h = w1.pow(3).add(&w2.pow(3)).unwrap();
        assert!(bernstein_selfdual(&h).is_err());
    }

    #[test]
    fn bernstein_smooth_quadric() {
        // The Laplacian identity: (d1^2 + d2^2)(w1^2 + w2^2)^s
        // = 4 s^2 (w1^2 + w2^2)^(s-1).
        let ctx = VarContext::new(vec!["w1", "w2"]);
        let w1 = Polynomial::variable(&ctx, "w1").unwrap();
        let w2 = Polynomial::variable(&ctx, "w2").unwrap();
        let h = w1.pow(2).add(&w2.pow(2)).unwrap();
        let b = bernstein_selfdual(&h).unwrap();
        assert_eq!(b.poly, UniPoly::monomial(2, rat_int(4)));
    }

    #[test]
    fn normalization_roundtrip() {
        let b = bernstein_selfdual(&nc(3)).unwrap();
        let there = convert_normalization(&b).unwrap();
        let back = convert_normalization(&there).unwrap();
        assert_eq!(back.poly, b.poly);
        assert_eq!(back.normalization, Normalization::Reduction);
    }

    #[test]
    fn symmetry_examples() {
        // (s+1)^n classical is symmetric.
        let b = convert_normalization(&bernstein_selfdual(&nc(3)).unwrap()).unwrap();
        assert!(check_symmetry(&b));
        // (s+1)(s+3) classical is not.
        let p = UniPoly::new(vec![rat_int(3), rat_int(4), rat_int(1)]);
        let bad = BernsteinPolynomial::from_poly(p, Normalization::Classical).unwrap();
        assert!(!check_symmetry(&bad));
        // star3-shaped reduction polynomial s^4 (s^2 - 1/9).
        let b3 = UniPoly::monomial(4, Rat::one())
            .mul(&UniPoly::new(vec![rat(-1, 9), Rat::zero(), Rat::one()]));
        let red = BernsteinPolynomial::from_poly(b3, Normalization::Reduction).unwrap();
        assert!(check_symmetry(&red));
    }

    #[test]
    fn rational_root_extraction() {
        // (s + 2/3)(s + 4/3)(s+1)^2
        let p = UniPoly::new(vec![rat(2, 3), Rat::one()])
            .mul(&UniPoly::new(vec![rat(4, 3), Rat::one()]))
            .mul(&UniPoly::new(vec![Rat::one(), Rat::one()]))
            .mul(&UniPoly::new(vec![Rat::one(), Rat::one()]));
        let (roots, rest) = rational_roots(&p).unwrap();
        assert_eq!(
            roots,
            vec![(rat(-4, 3), 1), (rat_int(-1), 2), (rat(-2, 3), 1)]
        );
        assert_eq!(rest.degree(), Some(0));

        // s^2 + 1 has no rational roots.
        let q = UniPoly::new(vec![Rat::one(), Rat::zero(), Rat::one()]);
        let (roots2, rest2) = rational_roots(&q).unwrap();
        assert!(roots2.is_empty());
        assert_eq!(rest2.degree(), Some(2));
    }

    #[test]
    fn resonance_normal_crossing() {
        for n in 1..=4i64 {
            let b = convert_normalization(&bernstein_selfdual(&nc(n as usize)).unwrap()).unwrap();
            let res = resonance_constant(&b, n).unwrap();
            assert_eq!(res.c, Some(BigInt::from(-n)));
            assert_eq!(res.largest_admissible_integer(), Some(BigInt::from(-n - 1)));
            assert!(res.is_admissible(&rat_int(-n - 1)));
            assert!(!res.is_admissible(&rat_int(-n)));
        }
    }

    #[test]
    fn resonance_star3_shape() {
        // classical roots {-4/3, -1 x4, -2/3}, n = 6 -> c = -8.
        let mut p = UniPoly::new(vec![rat(4, 3), Rat::one()])
            .mul(&UniPoly::new(vec![rat(2, 3), Rat::one()]));
        for _ in 0..4 {
            p = p.mul(&UniPoly::new(vec![Rat::one(), Rat::one()]));
        }
        let b = BernsteinPolynomial::from_poly(p, Normalization::Classical).unwrap();
        let res = resonance_constant(&b, 6).unwrap();
        assert_eq!(res.c, Some(BigInt::from(-8)));
        assert_eq!(res.largest_admissible_integer(), Some(BigInt::from(-9)));
        assert!(is_admissible_with_d(&b, &rat(-9, 6), 6).unwrap());
        assert!(!is_admissible_with_d(&b, &rat(-8, 6), 6).unwrap());
    }

    #[test]
    fn functional_equation_certificate() {
        // apply(h(d), h^k) = b(k) h^(k-1) for small k.
        let h = nc(3);
        let b = bernstein_selfdual(&h).unwrap();
        let ctx = WeylContext::new(h.context().names().to_vec(), vec![]);
        let op = WeylOperator::from_polynomial_in_derivations(&h, &ctx, &[0, 1, 2]);
        for k in 1u32..=5 {
            let hk = h.pow(k);
            let lhs = op.apply(&hk).unwrap();
            let bk = b.poly.eval(&rat_int(k as i64));
            let rhs = h.pow(k - 1).scale(&bk);
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }
}
